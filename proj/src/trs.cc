#include "ratrw/trs.hh"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

namespace ratrw {

void RewriteRule::check() const {
    auto lv = var_set(lhs);
    for (const auto& x : vars_of(rhs))
        if (!lv.count(x))
            throw VetoError("rule " + format_term(lhs) + " -> " + format_term(rhs) +
                            " introduces variable '" + x + "'");
}

bool Trs::linear() const {
    return std::all_of(rules.begin(), rules.end(),
                       [](const RewriteRule& r) { return r.linear(); });
}

void Trs::check() const {
    std::set<std::string> vs = var_set();
    for (const auto& v : vars) {
        if (alphabet.contains(v))
            throw VetoError("name '" + v + "' is both a symbol and a variable");
        if (is_hole_name(v))
            throw VetoError("variable name '" + v + "' is reserved for context holes");
    }
    for (const RewriteRule& r : rules) {
        r.check();
        for (const auto& x : vars_of(r.lhs))
            if (!vs.count(x))
                throw VetoError("undeclared variable '" + x + "'");
    }
    for (const AutoRule& ar : auto_rules) {
        ar.lhs_lang.check();
        ar.rhs_lang.check();
    }
}

Trs Trs::inverse(bool check_vars) const {
    if (has_auto_rules())
        throw VetoError("inverse of a recognizable system is not supported");
    Trs out;
    out.alphabet = alphabet;
    out.vars = vars;
    for (const RewriteRule& r : rules)
        out.rules.push_back({r.rhs, r.lhs});
    if (check_vars)
        for (const RewriteRule& r : out.rules)
            r.check();
    return out;
}

std::vector<std::pair<Term, RewriteStep>> rewrite_step(const Trs& r, const Term& t) {
    if (r.has_auto_rules())
        throw VetoError("rewriting oracles do not support recognizable rules");
    std::vector<std::pair<Term, RewriteStep>> out;
    for (const Position& p : positions(t)) {
        const Term& sub = subterm_at(t, p);
        for (std::size_t i = 0; i < r.rules.size(); ++i) {
            auto sigma = match(r.rules[i].lhs, sub);
            if (!sigma)
                continue;
            Term replaced = replace_at(t, p, substitute(r.rules[i].rhs, *sigma));
            out.emplace_back(std::move(replaced),
                             RewriteStep{static_cast<int>(i), p, std::move(*sigma)});
        }
    }
    return out;
}

Term replay(const Trs& r, const Term& t, const std::vector<RewriteStep>& steps) {
    Term cur = t;
    for (const RewriteStep& s : steps) {
        const RewriteRule& rule = r.rules.at(s.rule);
        auto sigma = match(rule.lhs, subterm_at(cur, s.pos));
        if (!sigma)
            throw VetoError("replay: rule does not match at " + format_position(s.pos));
        cur = replace_at(cur, s.pos, substitute(rule.rhs, *sigma));
    }
    return cur;
}

std::set<Term> reachable(const Trs& r, const Term& t, const ReachBounds& bounds) {
    std::set<Term> seen;
    if (term_size(t) > bounds.max_size)
        return seen;
    seen.insert(t);
    std::deque<Term> frontier{t};
    int steps = 0;
    while (!frontier.empty() && (bounds.max_steps < 0 || steps < bounds.max_steps)) {
        ++steps;
        std::deque<Term> next;
        for (const Term& cur : frontier) {
            for (auto& [succ, step] : rewrite_step(r, cur)) {
                if (term_size(succ) > bounds.max_size)
                    continue;
                if (seen.insert(succ).second)
                    next.push_back(succ);
            }
        }
        frontier = std::move(next);
    }
    return seen;
}

namespace {

// Search state for top-down rewriting. The used positions matter for the
// future only through their deepest elements: a new position is banned iff
// some earlier one lies strictly below it, and any position strictly below a
// kept one bans a subset of what the kept one bans.
struct TdState {
    Term term;
    std::vector<Position> deepest;  // antichain, sorted
    Position last;
    bool has_last = false;
};

int compare(const TdState& a, const TdState& b) {
    if (int c = compare(a.term, b.term); c != 0)
        return c;
    if (a.deepest != b.deepest)
        return a.deepest < b.deepest ? -1 : 1;
    if (a.has_last != b.has_last)
        return a.has_last < b.has_last ? -1 : 1;
    if (a.last != b.last)
        return a.last < b.last ? -1 : 1;
    return 0;
}

struct TdStateLess {
    bool operator()(const TdState& a, const TdState& b) const { return compare(a, b) < 0; }
};

bool td_allows(const TdState& st, const Position& p) {
    for (const Position& q : st.deepest)
        if (position_lt(p, q))  // an earlier position lies strictly below p
            return false;
    return true;
}

std::vector<Position> td_insert(const std::vector<Position>& deepest, const Position& p) {
    for (const Position& q : deepest)
        if (position_le(p, q))
            return deepest;  // p or a deeper extension is already recorded
    std::vector<Position> out;
    for (const Position& q : deepest)
        if (!position_lt(q, p))
            out.push_back(q);
    out.push_back(p);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::set<Term> topdown_reachable(const Trs& r, const Term& t, const ReachBounds& bounds) {
    std::set<Term> result;
    if (term_size(t) > bounds.max_size)
        return result;
    result.insert(t);
    std::set<TdState, TdStateLess> seen;
    std::deque<TdState> frontier;
    TdState init{t, {}, {}, false};
    seen.insert(init);
    frontier.push_back(std::move(init));
    int steps = 0;
    while (!frontier.empty() && (bounds.max_steps < 0 || steps < bounds.max_steps)) {
        ++steps;
        std::deque<TdState> next;
        for (const TdState& cur : frontier) {
            for (auto& [succ, step] : rewrite_step(r, cur.term)) {
                if (!td_allows(cur, step.pos))
                    continue;
                if (cur.has_last && step.pos == cur.last &&
                    r.rules[step.rule].lhs.is_var())
                    continue;
                if (term_size(succ) > bounds.max_size)
                    continue;
                TdState st{succ, td_insert(cur.deepest, step.pos), step.pos, true};
                if (seen.insert(st).second) {
                    result.insert(succ);
                    next.push_back(std::move(st));
                }
            }
        }
        frontier = std::move(next);
    }
    return result;
}

namespace {

bool renaming_substitution(const Substitution& sigma) {
    std::set<std::string> targets;
    for (const auto& [x, t] : sigma) {
        if (!t.is_var())
            return false;
        if (!targets.insert(t.name).second)
            return false;
    }
    return true;
}

}  // namespace

std::set<Term> suffix_reachable(const Trs& r, const Term& t, const ReachBounds& bounds) {
    std::set<Term> seen;
    if (term_size(t) > bounds.max_size)
        return seen;
    seen.insert(t);
    std::deque<Term> frontier{t};
    int steps = 0;
    while (!frontier.empty() && (bounds.max_steps < 0 || steps < bounds.max_steps)) {
        ++steps;
        std::deque<Term> next;
        for (const Term& cur : frontier) {
            for (auto& [succ, step] : rewrite_step(r, cur)) {
                if (!renaming_substitution(step.sigma))
                    continue;
                if (term_size(succ) > bounds.max_size)
                    continue;
                if (seen.insert(succ).second)
                    next.push_back(succ);
            }
        }
        frontier = std::move(next);
    }
    return seen;
}

// ---------------------------------------------------------------------------
// File format.

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open file '" + path + "'", 0);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

Trs parse_trs(const std::string& text, const std::string& dir) {
    Trs r;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::vector<std::pair<std::string, std::string>> pending_rules;
    std::vector<std::pair<std::string, std::string>> pending_autorules;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        auto colon = line.find(':');
        if (colon == std::string::npos)
            throw ParseError("trs line " + std::to_string(lineno) + ": expected 'key: ...'", 0);
        std::string key = line.substr(first, colon - first);
        std::string rest = line.substr(colon + 1);
        if (key == "alphabet") {
            std::istringstream toks(rest);
            std::string tok;
            while (toks >> tok) {
                auto slash = tok.find('/');
                if (slash == std::string::npos)
                    throw ParseError("alphabet entry '" + tok + "' is not name/arity", 0);
                r.alphabet.add(tok.substr(0, slash), std::stoi(tok.substr(slash + 1)));
            }
        } else if (key == "vars") {
            std::istringstream toks(rest);
            std::string tok;
            while (toks >> tok)
                r.vars.push_back(tok);
        } else if (key == "rule" || key == "autorule") {
            auto arrow = rest.find("->");
            if (arrow == std::string::npos)
                throw ParseError("rule without '->' on line " + std::to_string(lineno), 0);
            auto& dst = key == "rule" ? pending_rules : pending_autorules;
            dst.emplace_back(rest.substr(0, arrow), rest.substr(arrow + 2));
        } else {
            throw ParseError("unknown trs key '" + key + "' on line " + std::to_string(lineno),
                             0);
        }
    }
    std::set<std::string> vs = r.var_set();
    for (const auto& [lhs, rhs] : pending_rules)
        r.rules.push_back({parse_term(lhs, r.alphabet, vs), parse_term(rhs, r.alphabet, vs)});
    for (auto [lhs, rhs] : pending_autorules) {
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        AutoRule ar{parse_automaton(slurp(dir + "/" + trim(lhs))),
                    parse_automaton(slurp(dir + "/" + trim(rhs)))};
        // Autorule automata run over the term alphabet plus the variables.
        RankedAlphabet extended = r.alphabet;
        for (const auto& v : r.vars)
            extended.add(v, 0);
        for (const TreeAutomaton* a : {&ar.lhs_lang, &ar.rhs_lang})
            if (!RankedAlphabet::compatible(a->alphabet, extended))
                throw VetoError("autorule automaton alphabet clashes with the system alphabet");
        r.auto_rules.push_back(std::move(ar));
    }
    r.check();
    return r;
}

std::string format_trs(const Trs& r) {
    std::ostringstream out;
    out << "alphabet:";
    for (const auto& [name, arity] : r.alphabet.symbols())
        out << " " << name << "/" << arity;
    out << "\nvars:";
    for (const auto& v : r.vars)
        out << " " << v;
    out << "\n";
    for (const RewriteRule& rule : r.rules)
        out << "rule: " << format_term(rule.lhs) << " -> " << format_term(rule.rhs) << "\n";
    return out.str();
}

}  // namespace ratrw
