#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ratrw/automaton.hh"

using namespace ratrw;

namespace {

// h* f a a (g is in the alphabet but no rule reads it)
const char* kHstarFaa = R"(
alphabet: h/1 f/2 g/1 a/0
states: q0 qa
initial: q0
rule: q0 h -> q0
rule: q0 f -> qa qa
rule: qa a ->
)";

Term T(const TreeAutomaton& a, const std::string& s,
       const std::set<std::string>& vars = {}) {
    return parse_term(s, a.alphabet, vars);
}

void gen_ground(const RankedAlphabet& a, int max_size, std::vector<Term>& out) {
    std::map<int, std::vector<Term>> by_size;
    for (int s = 1; s <= max_size; ++s)
        for (const auto& [name, arity] : a.symbols()) {
            if (arity == 0) {
                if (s == 1)
                    by_size[1].push_back(Term::app(name));
            } else if (arity == 1) {
                for (const Term& t : by_size[s - 1])
                    by_size[s].push_back(Term::app(name, {t}));
            } else if (arity == 2) {
                for (int l = 1; l <= s - 2; ++l)
                    for (const Term& tl : by_size[l])
                        for (const Term& tr : by_size[s - 1 - l])
                            by_size[s].push_back(Term::app(name, {tl, tr}));
            }
        }
    for (auto& [s, v] : by_size)
        out.insert(out.end(), v.begin(), v.end());
}

}  // namespace

TEST_CASE("membership") {
    TreeAutomaton a = parse_automaton(kHstarFaa);
    CHECK(accepts(a, T(a, "h(h(f(a,a)))")));
    CHECK(accepts(a, T(a, "f(a,a)")));
    CHECK(!accepts(a, T(a, "f(g(a),a)")));  // no rule for qa g
    CHECK(!accepts(a, T(a, "h(a)")));
    CHECK_THROWS_AS(accepts(a, Term::var("x")), VetoError);

    TreeAutomaton no_init = a;
    no_init.initial.clear();
    CHECK(!accepts(no_init, T(a, "f(a,a)")));
}

TEST_CASE("enumeration agrees with membership") {
    TreeAutomaton a = parse_automaton(kHstarFaa);
    auto lang = enumerate_language(a, 6);
    std::set<Term> expect{T(a, "f(a,a)"), T(a, "h(f(a,a))"), T(a, "h(h(f(a,a)))"),
                          T(a, "h(h(h(f(a,a))))")};
    CHECK(lang == expect);

    // Brute force over all ground terms up to size 9.
    std::vector<Term> all;
    gen_ground(a.alphabet, 9, all);
    std::set<Term> brute;
    for (const Term& t : all)
        if (accepts(a, t))
            brute.insert(t);
    CHECK(enumerate_language(a, 9) == brute);
}

TEST_CASE("emptiness") {
    TreeAutomaton a = parse_automaton(kHstarFaa);
    CHECK(!is_empty(a));

    TreeAutomaton loop;
    loop.alphabet.add("g", 1);
    loop.states = {"q0"};
    loop.initial = {"q0"};
    loop.rules.push_back({"q0", "g", {"q0"}});
    CHECK(is_empty(loop));  // no leaf rule

    TreeAutomaton empty;
    empty.alphabet.add("a", 0);
    empty.states = {"q0"};
    empty.initial = {"q0"};
    CHECK(is_empty(empty));

    // Consistency with bounded enumeration.
    CHECK(enumerate_language(loop, 8).empty());
}

TEST_CASE("partial runs over open forests") {
    TreeAutomaton a = parse_automaton(kHstarFaa);
    // h(h(x)) from q0: the variable can only be reached in state q0.
    Term open1 = Term::app("h", {Term::app("h", {Term::var("x")})});
    auto runs1 = run_forest(a, {"q0"}, {open1});
    CHECK(runs1 == std::set<std::vector<std::string>>{{"q0"}});

    // f(x,y) from q0: both frontier states are qa.
    Term open2 = Term::app("f", {Term::var("x"), Term::var("y")});
    auto runs2 = run_forest(a, {"q0"}, {open2});
    CHECK(runs2 == std::set<std::vector<std::string>>{{"qa", "qa"}});

    // Forest of two trees with independent control states.
    auto runs3 = run_forest(a, {"q0", "qa"}, {Term::var("u"), Term::var("v")});
    CHECK(runs3 == std::set<std::vector<std::string>>{{"q0", "qa"}});

    // No run: a from q0 has no rule.
    auto runs4 = run_forest(a, {"q0"}, {Term::app("a")});
    CHECK(runs4.empty());
    // Closed accepted tree: one empty frontier word.
    auto runs5 = run_forest(a, {"q0"}, {T(a, "f(a,a)")});
    CHECK(runs5 == std::set<std::vector<std::string>>{{}});

    CHECK_THROWS_AS(run_forest(a, {"q0", "q0"}, {Term::var("x")}), VetoError);
}

TEST_CASE("format round trip") {
    TreeAutomaton a = parse_automaton(kHstarFaa);
    TreeAutomaton b = parse_automaton(format_automaton(a));
    CHECK(format_automaton(a) == format_automaton(b));
    CHECK(accepts(b, T(b, "h(f(a,a))")));
    CHECK_THROWS_AS(parse_automaton("rule: q f -> q q\n"), VetoError);
}
