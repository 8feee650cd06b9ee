#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ratrw/grammar.hh"

using namespace ratrw;

namespace {

// The two-projection relation grammar over f/g/h/a whose language is the
// derivation of f(g(x),g(y)) -> h(f(x,y)).
const char* kG1 = R"(
nonterminal: A/2 split 1 1
nonterminal: B/3 split 2 1
axiom: A
prod: A -> a | a
prod: A -> g(A#1.1) | g(A#1.2)
prod: A -> h(A#1.1) | h(A#1.2)
prod: A -> f(A#1.1, A#2.1) | f(A#1.2, A#2.2)
prod: A -> f(B#1.1, B#1.2) | B#1.3
prod: B -> A#1.1, A#2.1 | f(A#1.2, A#2.2)
prod: B -> g(B#1.1), g(B#1.2) | h(B#1.3)
)";

Term T(const TupleGrammar& g, const std::string& s) {
    return parse_term(s, g.alphabet, {});
}

/// Minimum ground node count derivable from each non-terminal.
std::map<std::string, int> min_sizes(const TupleGrammar& g) {
    std::map<std::string, int> best;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Production& p : g.prods) {
            int total = 0;
            bool ok = true;
            std::function<void(const Term&)> walk = [&](const Term& t) {
                if (t.is_var()) {
                    return;  // counted per instance below
                }
                ++total;
                for (const Term& a : t.args)
                    walk(a);
            };
            for (const Term& t : p.body)
                walk(t);
            std::set<std::pair<std::string, int>> insts;
            std::function<void(const Term&)> scan = [&](const Term& t) {
                if (t.is_var()) {
                    if (auto ref = instance_ref(t.name))
                        insts.insert({ref->nt, ref->instance});
                    return;
                }
                for (const Term& a : t.args)
                    scan(a);
            };
            for (const Term& t : p.body)
                scan(t);
            for (const auto& [nt, idx] : insts) {
                auto it = best.find(nt);
                if (it == best.end()) {
                    ok = false;
                    break;
                }
                total += it->second;
            }
            if (!ok)
                continue;
            auto it = best.find(p.head);
            if (it == best.end() || total < it->second) {
                best[p.head] = total;
                changed = true;
            }
        }
    }
    return best;
}

/// Reference enumerator: expand instances in a caller-chosen order. Used to
/// check that expansion order never changes the generated language.
void derive_all(const TupleGrammar& g, const std::map<std::string, int>& floor,
                const TermWord& sentential, int max_nodes, std::mt19937* rng,
                std::set<TermWord>& out, int fuel) {
    if (fuel <= 0)
        return;
    std::map<std::pair<std::string, int>, char> seen;
    std::vector<std::pair<std::string, int>> instances;
    std::function<void(const Term&)> scan = [&](const Term& t) {
        if (t.is_var()) {
            if (auto ref = instance_ref(t.name)) {
                auto key = std::make_pair(ref->nt, ref->instance);
                if (!seen.count(key)) {
                    seen[key] = 1;
                    instances.push_back(key);
                }
            }
            return;
        }
        for (const Term& a : t.args)
            scan(a);
    };
    int nodes = 0;
    std::function<void(const Term&)> count_terminals = [&](const Term& t) {
        if (t.is_var()) {
            if (!instance_ref(t.name))
                ++nodes;
            return;
        }
        ++nodes;
        for (const Term& a : t.args)
            count_terminals(a);
    };
    for (const Term& t : sentential) {
        scan(t);
        count_terminals(t);
    }
    if (instances.empty()) {
        if (is_ground(sentential) && nodes <= max_nodes)
            out.insert(sentential);
        return;
    }
    int lower = nodes;
    for (const auto& [nt, idx] : instances) {
        auto it = floor.find(nt);
        if (it == floor.end())
            return;  // unproductive instance
        lower += it->second;
    }
    if (lower > max_nodes)
        return;
    // Leftmost by default, or a random instance.
    auto key = instances[rng ? (*rng)() % instances.size() : 0];
    int counter = 0;
    std::function<void(const Term&)> widen = [&](const Term& t) {
        if (t.is_var()) {
            if (auto ref = instance_ref(t.name))
                counter = std::max(counter, ref->instance);
            return;
        }
        for (const Term& a : t.args)
            widen(a);
    };
    for (const Term& t : sentential)
        widen(t);
    for (const Production& p : g.prods) {
        if (p.head != key.first)
            continue;
        // Rename the production's instances fresh.
        std::map<std::string, std::string> fresh;
        std::function<Term(const Term&)> freshen = [&](const Term& t) -> Term {
            if (t.is_var()) {
                if (auto ref = instance_ref(t.name)) {
                    std::string k = ref->nt + "#" + std::to_string(ref->instance);
                    if (!fresh.count(k))
                        fresh[k] = std::to_string(++counter);
                    return Term::var(
                        instance_var_name(ref->nt, std::stoi(fresh[k]), ref->comp));
                }
                return t;
            }
            Term o = t;
            for (std::size_t i = 0; i < o.args.size(); ++i)
                o.args[i] = freshen(t.args[i]);
            return o;
        };
        TermWord body;
        for (const Term& t : p.body)
            body.push_back(freshen(t));
        // Substitute the instance's components.
        std::function<Term(const Term&)> subst = [&](const Term& t) -> Term {
            if (t.is_var()) {
                if (auto ref = instance_ref(t.name))
                    if (ref->nt == key.first && ref->instance == key.second)
                        return body[ref->comp - 1];
                return t;
            }
            Term o = t;
            for (std::size_t i = 0; i < o.args.size(); ++i)
                o.args[i] = subst(t.args[i]);
            return o;
        };
        TermWord next;
        for (const Term& t : sentential)
            next.push_back(subst(t));
        derive_all(g, floor, next, max_nodes, rng, out, fuel - 1);
    }
}

}  // namespace

TEST_CASE("validation") {
    TupleGrammar g = parse_grammar(kG1);
    CHECK(validate(g).empty());

    // Arity violation: body length 1 for a binary non-terminal.
    TupleGrammar bad1 = g;
    bad1.prods.push_back({"A", {Term::app("a")}});
    CHECK(!validate(bad1).empty());

    // Grouping violation: B instance missing component 3.
    CHECK_THROWS_AS(parse_grammar("nonterminal: A/2 split 1 1\n"
                                  "nonterminal: B/3 split 2 1\naxiom: A\n"
                                  "prod: A -> B#1.1 | B#1.2\n"),
                    VetoError);
}

TEST_CASE("bounded enumeration") {
    TupleGrammar g = parse_grammar(kG1);
    CHECK(enumerate_tuples(g, "A", 2) == std::set<TermWord>{{T(g, "a"), T(g, "a")}});
    CHECK(enumerate_tuples(g, "A", 0).empty());

    auto lang = enumerate_tuples(g, "A", 11);
    TermWord pair{T(g, "f(g(a),g(a))"), T(g, "h(f(a,a))")};
    CHECK(lang.count(pair));

    // Per-component caps keep exactly the component-bounded tuples.
    auto capped = enumerate_tuples(g, "A", 11, 4);
    for (const TermWord& w : lang) {
        bool small = term_size(w[0]) <= 4 && term_size(w[1]) <= 4;
        CHECK(capped.count(w) == (small ? 1u : 0u));
    }
}

TEST_CASE("membership agrees with enumeration") {
    TupleGrammar g = parse_grammar(kG1);
    CHECK(contains_tuple(g, "A", {T(g, "f(g(a),g(a))"), T(g, "h(f(a,a))")}));
    CHECK(!contains_tuple(g, "A", {T(g, "a"), T(g, "g(a)")}));
    CHECK(!contains_tuple(g, "A", {T(g, "a")}));  // wrong length

    auto lang10 = enumerate_tuples(g, "A", 10);
    // Every enumerated tuple is a member; every non-member is rejected.
    std::vector<TermWord> probes(lang10.begin(), lang10.end());
    for (const TermWord& w : probes)
        CHECK(contains_tuple(g, "A", w));
    std::mt19937 rng(5);
    int negatives = 0;
    for (const TermWord& w : probes) {
        TermWord twisted = w;
        twisted[1] = Term::app("g", {twisted[1]});
        bool in = lang10.count(twisted) ||
                  contains_tuple(g, "A", twisted);  // may legitimately be larger
        if (word_nodes(twisted) <= 10 && !lang10.count(twisted)) {
            CHECK(!in);
            ++negatives;
        }
    }
    CHECK(negatives > 0);
}

TEST_CASE("derivation order does not matter") {
    TupleGrammar g = parse_grammar(kG1);
    TermWord start{Term::var(instance_var_name("A", 1, 1)),
                   Term::var(instance_var_name("A", 1, 2))};
    auto floor = min_sizes(g);
    std::set<TermWord> leftmost, random_order;
    derive_all(g, floor, start, 8, nullptr, leftmost, 12);
    std::mt19937 rng(17);
    for (int round = 0; round < 40; ++round)
        derive_all(g, floor, start, 8, &rng, random_order, 12);
    // Random-order runs only ever produce language members.
    for (const TermWord& w : random_order)
        CHECK(leftmost.count(w));
    auto reference = enumerate_tuples(g, "A", 8);
    CHECK(leftmost == reference);
}

TEST_CASE("swap projections") {
    TupleGrammar g = parse_grammar(kG1);
    TupleGrammar s = swap_projections(g);
    CHECK(contains_tuple(s, "A", {T(g, "h(f(a,a))"), T(g, "f(g(a),g(a))")}));
    TupleGrammar ss = swap_projections(s);
    CHECK(format_grammar(ss) == format_grammar(g));

    // Tuple counts per bound are preserved.
    for (int bound : {4, 6, 8})
        CHECK(enumerate_tuples(g, "A", bound).size() ==
              enumerate_tuples(s, "A", bound).size());

    TupleGrammar empty;
    empty.alphabet.add("a", 0);
    empty.axiom = "A";
    empty.nts.emplace("A", NonTerminal{"A", 2, 1, 1});
    CHECK(swap_projections(empty).prods.empty());
}

TEST_CASE("projection to an automaton") {
    // Finite star-free relation: check side languages against enumeration.
    const char* finite = R"(
nonterminal: S/2 split 1 1
axiom: S
prod: S -> a | b
prod: S -> b | g(a)
)";
    TupleGrammar g = parse_grammar(finite);
    auto a2 = project_split(g, 2);
    CHECK(accepts(a2, T(g, "b")));
    CHECK(accepts(a2, T(g, "g(a)")));
    CHECK(!accepts(a2, T(g, "a")));
    auto a1 = project_split(g, 1);
    CHECK(accepts(a1, T(g, "a")));
    CHECK(accepts(a1, T(g, "b")));
    CHECK(!accepts(a1, T(g, "g(a)")));

    std::set<Term> left, right;
    for (const TermWord& w : enumerate_tuples(g, "S", 6)) {
        left.insert(w[0]);
        right.insert(w[1]);
    }
    CHECK(enumerate_language(a1, 6) == left);
    CHECK(enumerate_language(a2, 6) == right);

    TupleGrammar empty;
    empty.alphabet.add("a", 0);
    empty.axiom = "S";
    empty.nts.emplace("S", NonTerminal{"S", 2, 1, 1});
    CHECK(is_empty(project_split(empty, 2)));
}

TEST_CASE("file format round trip") {
    TupleGrammar g = parse_grammar(kG1);
    TupleGrammar h = parse_grammar(format_grammar(g));
    CHECK(format_grammar(g) == format_grammar(h));
    CHECK(enumerate_tuples(g, "A", 6) == enumerate_tuples(h, "A", 6));
}

TEST_CASE("rational operations on explicit languages") {
    std::vector<std::string> x{"_1", "_2"};
    auto hole = [](int i) { return Term::var("_" + std::to_string(i)); };

    TupleLanguage step;
    step.length = 2;
    step.tuples.insert({Term::app("g", {hole(1)}), Term::app("g", {hole(2)})});

    // [g_1 g_2]* at bound 11: powers up to g^3.
    TupleLanguage star = iterate_subst(step, x, 11);
    CHECK(star.tuples.size() == 4);
    CHECK(star.tuples.count({hole(1), hole(2)}));  // identity power

    TupleLanguage tmpl;
    tmpl.length = 1;
    tmpl.tuples.insert({Term::app("f", {hole(1), hole(2)})});
    TupleLanguage mid = subst_product(tmpl, x, star, 11);

    TupleLanguage aa;
    aa.length = 2;
    aa.tuples.insert({Term::app("a"), Term::app("a")});
    TupleLanguage out = subst_product(mid, x, aa, 11);

    std::set<TermWord> expect;
    RankedAlphabet fa;
    fa.add("f", 2);
    fa.add("g", 1);
    fa.add("a", 0);
    for (int n = 0; n <= 3; ++n) {
        Term t = Term::app("a");
        for (int i = 0; i < n; ++i)
            t = Term::app("g", {t});
        expect.insert({Term::app("f", {t, t})});
    }
    CHECK(out.tuples == expect);

    // Vacuous replacement vs empty middle language.
    TupleLanguage none;
    none.length = 2;
    TupleLanguage ground;
    ground.length = 1;
    ground.tuples.insert({Term::app("a")});
    CHECK(subst_product(ground, x, none).tuples == ground.tuples);
    CHECK(subst_product(tmpl, x, none).tuples.empty());

    // Monotone in both arguments.
    TupleLanguage bigger = step;
    bigger.tuples.insert({hole(1), Term::app("g", {hole(2)})});
    auto small_out = subst_product(tmpl, x, step, 9);
    auto big_out = subst_product(tmpl, x, bigger, 9);
    for (const TermWord& w : small_out.tuples)
        CHECK(big_out.tuples.count(w));
}
