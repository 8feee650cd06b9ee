#include "ratrw/automaton.hh"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

namespace ratrw {

int compare(const AutomatonRule& a, const AutomatonRule& b) {
    if (a.state != b.state)
        return a.state < b.state ? -1 : 1;
    if (a.symbol != b.symbol)
        return a.symbol < b.symbol ? -1 : 1;
    if (a.children != b.children)
        return a.children < b.children ? -1 : 1;
    return 0;
}

void TreeAutomaton::add_rule(const std::string& state, const std::string& symbol,
                             std::vector<std::string> children) {
    states.insert(state);
    for (const auto& c : children)
        states.insert(c);
    rules.push_back({state, symbol, std::move(children)});
}

void TreeAutomaton::check() const {
    for (const AutomatonRule& r : rules) {
        if (!alphabet.contains(r.symbol))
            throw VetoError("automaton rule uses unknown symbol '" + r.symbol + "'");
        if (alphabet.arity_of(r.symbol) != static_cast<int>(r.children.size()))
            throw VetoError("automaton rule for '" + r.symbol + "' has wrong arity");
        if (!states.count(r.state))
            throw VetoError("automaton rule uses undeclared state '" + r.state + "'");
        for (const auto& c : r.children)
            if (!states.count(c))
                throw VetoError("automaton rule uses undeclared state '" + c + "'");
    }
    for (const auto& q : initial)
        if (!states.count(q))
            throw VetoError("undeclared initial state '" + q + "'");
}

namespace {

bool accepts_memo(const TreeAutomaton& a, const std::string& state, const Term& t,
                  std::map<std::pair<std::string, Term>, bool>& memo) {
    auto key = std::make_pair(state, t);
    auto it = memo.find(key);
    if (it != memo.end())
        return it->second;
    memo[key] = false;  // cycles cannot accept a finite tree
    bool ok = false;
    for (const AutomatonRule& r : a.rules) {
        if (r.state != state || r.symbol != t.name ||
            r.children.size() != t.args.size())
            continue;
        bool all = true;
        for (std::size_t i = 0; i < t.args.size() && all; ++i)
            all = accepts_memo(a, r.children[i], t.args[i], memo);
        if (all) {
            ok = true;
            break;
        }
    }
    memo[key] = ok;
    return ok;
}

}  // namespace

bool accepts_from(const TreeAutomaton& a, const std::string& state, const Term& t) {
    if (!is_ground(t))
        throw VetoError("accepts: term is not ground");
    std::map<std::pair<std::string, Term>, bool> memo;
    return accepts_memo(a, state, t, memo);
}

bool accepts(const TreeAutomaton& a, const Term& t) {
    if (!is_ground(t))
        throw VetoError("accepts: term is not ground");
    std::map<std::pair<std::string, Term>, bool> memo;
    for (const auto& q : a.initial)
        if (accepts_memo(a, q, t, memo))
            return true;
    return false;
}

std::set<Term> enumerate_language(const TreeAutomaton& a, int max_size) {
    // lang[state][size] computed by increasing size.
    std::map<std::string, std::map<int, std::set<Term>>> lang;
    for (int size = 1; size <= max_size; ++size) {
        for (const AutomatonRule& r : a.rules) {
            int rest = size - 1;
            if (rest < static_cast<int>(r.children.size()))
                continue;
            // Distribute `rest` nodes over the children.
            std::vector<Term> picked(r.children.size());
            std::set<Term>& out = lang[r.state][size];
            std::function<void(std::size_t, int)> go = [&](std::size_t i, int budget) {
                if (i == r.children.size()) {
                    if (budget == 0)
                        out.insert(Term::app(r.symbol, picked));
                    return;
                }
                int remaining_children = static_cast<int>(r.children.size() - i) - 1;
                for (int s = 1; s + remaining_children <= budget; ++s) {
                    auto st = lang.find(r.children[i]);
                    if (st == lang.end())
                        break;
                    auto sz = st->second.find(s);
                    if (sz == st->second.end())
                        continue;
                    for (const Term& t : sz->second) {
                        picked[i] = t;
                        go(i + 1, budget - s);
                    }
                }
            };
            go(0, rest);
        }
    }
    std::set<Term> out;
    for (const auto& q : a.initial) {
        auto it = lang.find(q);
        if (it == lang.end())
            continue;
        for (const auto& [size, terms] : it->second)
            out.insert(terms.begin(), terms.end());
    }
    return out;
}

bool is_empty(const TreeAutomaton& a) {
    std::set<std::string> productive;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const AutomatonRule& r : a.rules) {
            if (productive.count(r.state))
                continue;
            bool all = std::all_of(r.children.begin(), r.children.end(),
                                   [&](const std::string& c) { return productive.count(c); });
            if (all) {
                productive.insert(r.state);
                changed = true;
            }
        }
    }
    return std::none_of(a.initial.begin(), a.initial.end(),
                        [&](const std::string& q) { return productive.count(q) != 0; });
}

namespace {

// Frontier state words for a single tree started in `state`.
std::set<std::vector<std::string>> run_tree(const TreeAutomaton& a, const std::string& state,
                                            const Term& t) {
    std::set<std::vector<std::string>> out;
    if (t.is_var()) {
        out.insert({state});
        return out;
    }
    for (const AutomatonRule& r : a.rules) {
        if (r.state != state || r.symbol != t.name || r.children.size() != t.args.size())
            continue;
        std::set<std::vector<std::string>> acc;
        acc.insert(std::vector<std::string>{});
        for (std::size_t i = 0; i < t.args.size() && !acc.empty(); ++i) {
            auto sub = run_tree(a, r.children[i], t.args[i]);
            std::set<std::vector<std::string>> next;
            for (const auto& prefix : acc)
                for (const auto& w : sub) {
                    auto joined = prefix;
                    joined.insert(joined.end(), w.begin(), w.end());
                    next.insert(joined);
                }
            acc = std::move(next);
        }
        out.insert(acc.begin(), acc.end());
    }
    return out;
}

}  // namespace

std::set<std::vector<std::string>> run_forest(const TreeAutomaton& a,
                                              const std::vector<std::string>& initial,
                                              const TermWord& forest) {
    if (initial.size() != forest.size())
        throw VetoError("run_forest: control word length does not match forest width");
    std::set<std::vector<std::string>> acc;
    acc.insert(std::vector<std::string>{});
    for (std::size_t i = 0; i < forest.size() && !acc.empty(); ++i) {
        auto sub = run_tree(a, initial[i], forest[i]);
        std::set<std::vector<std::string>> next;
        for (const auto& prefix : acc)
            for (const auto& w : sub) {
                auto joined = prefix;
                joined.insert(joined.end(), w.begin(), w.end());
                next.insert(joined);
            }
        acc = std::move(next);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// File format.

namespace {

std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok)
        out.push_back(tok);
    return out;
}

}  // namespace

TreeAutomaton parse_automaton(const std::string& text) {
    TreeAutomaton a;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string trimmed = line;
        std::size_t first = trimmed.find_first_not_of(" \t\r");
        if (first == std::string::npos || trimmed[first] == '#')
            continue;
        auto colon = trimmed.find(':');
        if (colon == std::string::npos)
            throw ParseError("automaton line " + std::to_string(lineno) + ": expected 'key: ...'",
                             0);
        std::string key = trimmed.substr(first, colon - first);
        std::string rest = trimmed.substr(colon + 1);
        if (key == "alphabet") {
            for (const std::string& tok : split_tokens(rest)) {
                auto slash = tok.find('/');
                if (slash == std::string::npos)
                    throw ParseError("alphabet entry '" + tok + "' is not name/arity", 0);
                a.alphabet.add(tok.substr(0, slash), std::stoi(tok.substr(slash + 1)));
            }
        } else if (key == "states") {
            for (const std::string& tok : split_tokens(rest))
                a.states.insert(tok);
        } else if (key == "initial") {
            for (const std::string& tok : split_tokens(rest))
                a.initial.insert(tok);
        } else if (key == "rule") {
            auto arrow = rest.find("->");
            if (arrow == std::string::npos)
                throw ParseError("automaton rule without '->' on line " + std::to_string(lineno),
                                 0);
            auto lhs = split_tokens(rest.substr(0, arrow));
            auto rhs = split_tokens(rest.substr(arrow + 2));
            if (lhs.size() != 2)
                throw ParseError("automaton rule lhs must be 'state symbol' on line " +
                                     std::to_string(lineno),
                                 0);
            AutomatonRule r{lhs[0], lhs[1], rhs};
            a.states.insert(r.state);
            for (const auto& c : r.children)
                a.states.insert(c);
            a.rules.push_back(std::move(r));
        } else {
            throw ParseError("unknown automaton key '" + key + "' on line " +
                                 std::to_string(lineno),
                             0);
        }
    }
    a.check();
    return a;
}

std::string format_automaton(const TreeAutomaton& a) {
    std::ostringstream out;
    out << "alphabet:";
    for (const auto& [name, arity] : a.alphabet.symbols())
        out << " " << name << "/" << arity;
    out << "\nstates:";
    for (const auto& q : a.states)
        out << " " << q;
    out << "\ninitial:";
    for (const auto& q : a.initial)
        out << " " << q;
    out << "\n";
    std::vector<AutomatonRule> sorted = a.rules;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (const AutomatonRule& r : sorted) {
        out << "rule: " << r.state << " " << r.symbol << " ->";
        for (const auto& c : r.children)
            out << " " << c;
        out << "\n";
    }
    return out.str();
}

}  // namespace ratrw
