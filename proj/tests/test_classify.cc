#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ratrw/classify.hh"

using namespace ratrw;

namespace {

Trs ex3() {
    return parse_trs("alphabet: f/2 g/1 h/1 a/0\nvars: x y\n"
                     "rule: f(g(x),g(y)) -> h(f(x,y))\n");
}

Trs swap_pump() {
    return parse_trs("alphabet: f/2 g/1 a/0\nvars: x y\n"
                     "rule: f(x,y) -> f(y,x)\nrule: a -> g(a)\n");
}

Trs semi_monadic() {
    return parse_trs("alphabet: f/1 g/1 a/0\nvars: x\n"
                     "rule: g(x) -> f(g(f(x)))\n");
}

bool has(const ClassReport& r, SystemClass c) { return r.classes.count(c) != 0; }

}  // namespace

TEST_CASE("critical overlaps") {
    Trs r = ex3();
    Term rhs = canonical_rename(r.rules[0].rhs, "x");
    Term lhs = canonical_rename(r.rules[0].lhs, "y");
    auto os = critical_overlaps(rhs, lhs);
    REQUIRE(os.size() == 1);
    CHECK(os[0].kind == OverlapKind::lhs_inside_rhs);
    CHECK(os[0].pos == Position{1});
    // The unifier really unifies the two subterms.
    CHECK(substitute(subterm_at(rhs, os[0].pos), os[0].unifier) ==
          substitute(lhs, os[0].unifier));

    // Distinct constants never overlap.
    CHECK(critical_overlaps(Term::app("a"), Term::app("b")).empty());

    // Symmetric embeddings.
    RankedAlphabet a;
    a.add("f", 1);
    a.add("g", 1);
    std::set<std::string> vs{"x", "x'"};
    auto fg = parse_term("f(g(x))", a, vs);
    auto g1 = parse_term("g(x')", a, vs);
    auto inside = critical_overlaps(fg, g1);
    REQUIRE(inside.size() == 1);
    CHECK(inside[0].kind == OverlapKind::lhs_inside_rhs);
    CHECK(inside[0].pos == Position{1});
    auto gx = parse_term("g(x)", a, vs);
    auto fg2 = parse_term("f(g(x'))", a, vs);
    auto host = critical_overlaps(gx, fg2);
    REQUIRE(host.size() == 1);
    CHECK(host[0].kind == OverlapKind::rhs_inside_lhs);
    CHECK(host[0].pos == Position{1});
}

TEST_CASE("classification of the worked systems") {
    ClassReport a = classify(ex3());
    CHECK(has(a, SystemClass::top_down));
    CHECK(!has(a, SystemClass::bottom_up));
    CHECK(!has(a, SystemClass::prefix));
    CHECK(!has(a, SystemClass::suffix));

    ClassReport b = classify(ex3().inverse());
    CHECK(!has(b, SystemClass::top_down));
    CHECK(has(b, SystemClass::bottom_up));
    CHECK(!has(b, SystemClass::prefix));
    CHECK(!has(b, SystemClass::suffix));

    ClassReport c = classify(swap_pump());
    CHECK(has(c, SystemClass::suffix));

    ClassReport d = classify(semi_monadic());
    CHECK(!has(d, SystemClass::top_down));

    Trs empty;
    empty.alphabet.add("a", 0);
    ClassReport e = classify(empty);
    CHECK(e.classes.size() == 4);
}

TEST_CASE("witnesses replay as violations") {
    for (const Trs& sys : {ex3(), ex3().inverse(), semi_monadic(), swap_pump()}) {
        ClassReport rep = classify(sys);
        for (const auto& [cls, entry] : rep.witnesses) {
            const Overlap& w = entry.first;
            CHECK(w.rhs_rule >= 0);
            CHECK(w.lhs_rule >= 0);
            // The recorded overlap is a genuine overlap of the named rules
            // (bottom-up witnesses refer to the inverse system).
            Trs base = cls == SystemClass::bottom_up ? sys.inverse() : sys;
            Term rhs = canonical_rename(base.rules[w.rhs_rule].rhs, "x");
            Term lhs = canonical_rename(base.rules[w.lhs_rule].lhs, "y");
            const Term& host = w.kind == OverlapKind::rhs_inside_lhs ? lhs : rhs;
            const Term& other = w.kind == OverlapKind::rhs_inside_lhs ? rhs : lhs;
            CHECK(unify(subterm_at(host, w.pos), other));
        }
        CHECK(rep.classes.size() + rep.witnesses.size() == 4);
    }
}

TEST_CASE("duality and ground systems") {
    std::mt19937 rng(3);
    auto random_term = [&](auto&& self, int depth, bool ground) -> Term {
        int pick = static_cast<int>(rng() % 8);
        if (depth == 0 || pick < 2)
            return (!ground && pick % 2) ? Term::var(pick < 4 ? "x" : "y") : Term::app("a");
        if (pick < 5)
            return Term::app("g", {self(self, depth - 1, ground)});
        return Term::app("f",
                         {self(self, depth - 1, ground), self(self, depth - 1, ground)});
    };
    int linear_seen = 0;
    for (int i = 0; i < 200; ++i) {
        Trs sys;
        sys.alphabet.add("f", 2);
        sys.alphabet.add("g", 1);
        sys.alphabet.add("a", 0);
        sys.vars = {"x", "y"};
        bool ok = true;
        int rules = 1 + static_cast<int>(rng() % 2);
        for (int k = 0; k < rules && ok; ++k) {
            Term lhs = random_term(random_term, 2, false);
            Term rhs = random_term(random_term, 2, false);
            std::set<std::string> lv = var_set(lhs);
            for (const auto& v : vars_of(rhs))
                if (!lv.count(v))
                    ok = false;
            if (ok)
                sys.rules.push_back({lhs, rhs});
        }
        if (!ok)
            continue;
        ++linear_seen;
        // Duality: R is top-down iff R^-1 is bottom-up.
        ClassReport r = classify(sys);
        ClassReport ri = classify(sys.inverse());
        CHECK(has(r, SystemClass::top_down) == has(ri, SystemClass::bottom_up));
        CHECK(has(r, SystemClass::bottom_up) == has(ri, SystemClass::top_down));

        // Ground systems are always suffix.
        Trs ground = sys;
        ground.rules.clear();
        for (const RewriteRule& rule : sys.rules)
            ground.rules.push_back({substitute(rule.lhs, {{"x", Term::app("a")},
                                                          {"y", Term::app("a")}}),
                                    substitute(rule.rhs, {{"x", Term::app("a")},
                                                          {"y", Term::app("a")}})});
        CHECK(has(classify(ground), SystemClass::suffix));
    }
    CHECK(linear_seen > 50);
}

TEST_CASE("turing machine encoding") {
    TuringMachine single;
    single.states = {"p", "q"};
    single.tape = {"A", "B"};
    single.transitions.push_back({"p", "A", "q", "B", true});
    Trs enc = encode_turing_machine(single);
    REQUIRE(enc.rules.size() == 1);
    CHECK(format_term(enc.rules[0].lhs) == "p(x,A(y))");
    CHECK(format_term(enc.rules[0].rhs) == "q(B(x),y)");

    TuringMachine left;
    left.states = {"p", "q"};
    left.tape = {"C"};
    left.transitions.push_back({"p", "A", "q", "B", false});
    CHECK_THROWS_AS(encode_turing_machine(left), VetoError);  // undeclared symbols
    left.tape = {"C", "A", "B"};
    Trs lenc = encode_turing_machine(left);
    bool found = false;
    for (const RewriteRule& r : lenc.rules)
        if (format_term(r.lhs) == "p(C(x),A(y))" &&
            format_term(r.rhs) == "q(x,C(B(y)))")
            found = true;
    CHECK(found);

    TuringMachine none;
    none.states = {"p"};
    none.tape = {"A"};
    Trs nenc = encode_turing_machine(none);
    CHECK(nenc.rules.empty());
    CHECK(classify(nenc).classes.size() == 4);

    // The two-transition machine of the classification table: prefix and
    // nothing else.
    TuringMachine two;
    two.states = {"p", "q"};
    two.tape = {"B"};
    two.transitions.push_back({"p", "B", "q", "B", true});
    two.transitions.push_back({"q", "B", "p", "B", false});
    ClassReport rep = classify(encode_turing_machine(two));
    CHECK(rep.classes == std::set<SystemClass>{SystemClass::prefix});
}

TEST_CASE("tm parsing") {
    TuringMachine m = parse_tm("state p q\ntape B\ntrans p B -> q B +\ntrans q B -> p B -\n");
    CHECK(m.transitions.size() == 2);
    CHECK(m.transitions[1].move_right == false);
    CHECK_THROWS_AS(parse_tm("trans p A -> q B *\n"), ParseError);
    // Blank scans are written '#'.
    TuringMachine b = parse_tm("state p q\ntape B\ntrans p # -> q B +\n");
    Trs enc = encode_turing_machine(b);
    CHECK(enc.rules.size() == 2);  // the #1(y) rule plus its #0 variant
}
