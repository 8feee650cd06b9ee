#include "ratrw/classify.hh"

#include <algorithm>
#include <sstream>

namespace ratrw {

std::string class_name(SystemClass c) {
    switch (c) {
        case SystemClass::top_down: return "TopDown";
        case SystemClass::bottom_up: return "BottomUp";
        case SystemClass::prefix: return "Prefix";
        case SystemClass::suffix: return "Suffix";
    }
    return "?";
}

std::vector<Overlap> critical_overlaps(const Term& r, const Term& l) {
    std::vector<Overlap> out;
    for (const Position& p : positions(r)) {
        const Term& sub = subterm_at(r, p);
        if (sub.is_var())
            continue;
        if (auto sigma = unify(sub, l)) {
            Overlap o;
            o.kind = p.empty() ? OverlapKind::root : OverlapKind::lhs_inside_rhs;
            o.pos = p;
            o.unifier = std::move(*sigma);
            out.push_back(std::move(o));
        }
    }
    for (const Position& p : positions(l)) {
        if (p.empty())
            continue;
        const Term& sub = subterm_at(l, p);
        if (sub.is_var())
            continue;
        if (auto sigma = unify(sub, r)) {
            Overlap o;
            o.kind = OverlapKind::rhs_inside_lhs;
            o.pos = p;
            o.unifier = std::move(*sigma);
            out.push_back(std::move(o));
        }
    }
    return out;
}

namespace {

struct OverlapCase {
    Overlap overlap;
    Term r;  // renamed-apart sides the overlap refers to
    Term l;
};

std::vector<OverlapCase> all_overlaps(const Trs& sys) {
    std::vector<OverlapCase> out;
    for (std::size_t i = 0; i < sys.rules.size(); ++i) {
        Term r = canonical_rename(sys.rules[i].rhs, "x");
        for (std::size_t j = 0; j < sys.rules.size(); ++j) {
            Term l = canonical_rename(sys.rules[j].lhs, "y");
            for (Overlap& o : critical_overlaps(r, l)) {
                o.rhs_rule = static_cast<int>(i);
                o.lhs_rule = static_cast<int>(j);
                out.push_back({std::move(o), r, l});
            }
        }
    }
    return out;
}

// Top-down requires every overlap to pin the lhs below the rhs: no overlap
// may embed the rhs inside the lhs, and at an overlap position p of the rhs
// the lhs must be an instance of r|p.
std::optional<std::string> top_down_violation(const OverlapCase& c) {
    if (c.overlap.kind == OverlapKind::rhs_inside_lhs)
        return "right-hand side occurs strictly inside the left-hand side";
    if (!match(subterm_at(c.r, c.overlap.pos), c.l))
        return "left-hand side is not an instance of the right-hand side at " +
               format_position(c.overlap.pos);
    return std::nullopt;
}

std::optional<std::string> prefix_violation(const OverlapCase& c) {
    if (c.overlap.kind != OverlapKind::root)
        return "overlap at a non-root position " + format_position(c.overlap.pos);
    if (!match(c.r, c.l) && !match(c.l, c.r))
        return "root overlap where neither side instantiates the other";
    return std::nullopt;
}

std::optional<std::string> suffix_violation(const OverlapCase& c) {
    const Term& host = c.overlap.kind == OverlapKind::rhs_inside_lhs ? c.l : c.r;
    const Term& embedded = c.overlap.kind == OverlapKind::rhs_inside_lhs ? c.r : c.l;
    if (!equal_up_to_renaming(subterm_at(host, c.overlap.pos), embedded))
        return "embedded side differs from the host subterm at " +
               format_position(c.overlap.pos);
    return std::nullopt;
}

void apply_test(const std::vector<OverlapCase>& cases, SystemClass cls,
                std::optional<std::string> (*test)(const OverlapCase&), ClassReport& rep) {
    for (const OverlapCase& c : cases) {
        if (auto reason = test(c)) {
            rep.witnesses.emplace(cls,
                                  std::make_pair(c.overlap, std::move(*reason)));
            return;
        }
    }
    rep.classes.insert(cls);
}

}  // namespace

ClassReport classify(const Trs& sys) {
    if (sys.has_auto_rules())
        throw VetoError("classification of recognizable systems is not supported");
    ClassReport rep;
    auto cases = all_overlaps(sys);
    apply_test(cases, SystemClass::top_down, top_down_violation, rep);
    apply_test(cases, SystemClass::prefix, prefix_violation, rep);
    apply_test(cases, SystemClass::suffix, suffix_violation, rep);
    // Bottom-up is the top-down test on the inverse; its witness overlap is
    // recorded in inverse orientation (rule indices are unchanged by it).
    auto inverse_cases = all_overlaps(sys.inverse());
    apply_test(inverse_cases, SystemClass::bottom_up, top_down_violation, rep);
    return rep;
}

std::string format_report(const ClassReport& rep, const Trs& sys) {
    std::ostringstream out;
    for (SystemClass c : {SystemClass::top_down, SystemClass::bottom_up, SystemClass::prefix,
                          SystemClass::suffix}) {
        if (rep.classes.count(c)) {
            out << class_name(c) << ": yes\n";
            continue;
        }
        const auto& [w, reason] = rep.witnesses.at(c);
        out << class_name(c) << ": no (" << reason;
        if (w.rhs_rule >= 0 && w.rhs_rule < static_cast<int>(sys.rules.size()) &&
            w.lhs_rule >= 0 && w.lhs_rule < static_cast<int>(sys.rules.size())) {
            if (c == SystemClass::bottom_up)
                out << "; in the inverse system, rhs of rule " << w.rhs_rule + 1
                    << " vs lhs of rule " << w.lhs_rule + 1;
            else
                out << "; rhs of rule " << w.rhs_rule + 1 << " vs lhs of rule "
                    << w.lhs_rule + 1;
        }
        out << ")\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Turing machine encoding.

void TuringMachine::check() const {
    std::set<std::string> st(states.begin(), states.end());
    std::set<std::string> tp(tape.begin(), tape.end());
    if (tp.count("#"))
        throw VetoError("'#' denotes the blank and cannot be a tape symbol");
    for (const auto& s : states)
        if (tp.count(s))
            throw VetoError("'" + s + "' is both a state and a tape symbol");
    for (const TmTransition& t : transitions) {
        if (!st.count(t.from) || !st.count(t.to))
            throw VetoError("transition uses an undeclared state");
        if (t.read != "#" && !tp.count(t.read))
            throw VetoError("transition reads undeclared symbol '" + t.read + "'");
        if (!tp.count(t.write))
            throw VetoError("transition writes undeclared symbol '" + t.write + "'");
    }
}

Trs encode_turing_machine(const TuringMachine& m) {
    m.check();
    Trs out;
    for (const auto& q : m.states)
        out.alphabet.add(q, 2);
    for (const auto& a : m.tape)
        out.alphabet.add(a, 1);
    out.alphabet.add("#0", 0);
    out.alphabet.add("#1", 1);
    out.vars = {"x", "y"};

    Term x = Term::var("x");
    Term y = Term::var("y");
    Term end = Term::app("#0");
    auto scanned = [&](const std::string& read, const Term& below) {
        return read == "#" ? Term::app("#1", {below}) : Term::app(read, {below});
    };

    for (const TmTransition& t : m.transitions) {
        Term wr_x = Term::app(t.write, {x});
        if (t.move_right) {
            // p x A y -> q B x y
            out.rules.push_back({Term::app(t.from, {x, scanned(t.read, y)}),
                                 Term::app(t.to, {wr_x, y})});
            if (t.read == "#")
                out.rules.push_back({Term::app(t.from, {x, end}),
                                     Term::app(t.to, {wr_x, end})});
        } else {
            Term wr_y = Term::app(t.write, {y});
            Term wr_end = Term::app(t.write, {end});
            for (const auto& c : m.tape) {
                // p C x A y -> q x C B y
                out.rules.push_back(
                    {Term::app(t.from, {Term::app(c, {x}), scanned(t.read, y)}),
                     Term::app(t.to, {x, Term::app(c, {wr_y})})});
            }
            // p # A y -> p # # B y
            out.rules.push_back({Term::app(t.from, {end, scanned(t.read, y)}),
                                 Term::app(t.from, {end, Term::app("#1", {wr_y})})});
            if (t.read == "#") {
                // p # # -> q # # B #
                out.rules.push_back({Term::app(t.from, {end, end}),
                                     Term::app(t.to, {end, Term::app("#1", {wr_end})})});
                // p C x # -> q x C B #
                for (const auto& c : m.tape)
                    out.rules.push_back(
                        {Term::app(t.from, {Term::app(c, {x}), end}),
                         Term::app(t.to, {x, Term::app(c, {wr_end})})});
            }
        }
    }
    out.check();
    return out;
}

TuringMachine parse_tm(const std::string& text) {
    TuringMachine m;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        std::istringstream toks(line);
        std::string key;
        toks >> key;
        if (key == "state") {
            std::string s;
            while (toks >> s)
                m.states.push_back(s);
        } else if (key == "tape") {
            std::string s;
            while (toks >> s)
                m.tape.push_back(s);
        } else if (key == "trans") {
            TmTransition t;
            std::string arrow, dir;
            if (!(toks >> t.from >> t.read >> arrow >> t.to >> t.write >> dir) || arrow != "->")
                throw ParseError("tm line " + std::to_string(lineno) +
                                     ": expected 'trans p A -> q B +'",
                                 0);
            if (dir == "+")
                t.move_right = true;
            else if (dir == "-")
                t.move_right = false;
            else
                throw ParseError("tm direction must be '+' or '-' on line " +
                                     std::to_string(lineno),
                                 0);
            m.transitions.push_back(std::move(t));
        } else {
            throw ParseError("unknown tm key '" + key + "' on line " + std::to_string(lineno),
                             0);
        }
    }
    m.check();
    return m;
}

}  // namespace ratrw
