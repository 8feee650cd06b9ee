#include "ratrw/grammar.hh"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <sstream>

namespace ratrw {

std::optional<InstanceRef> instance_ref(const std::string& var_name) {
    auto hash = var_name.rfind('#');
    if (hash == std::string::npos || hash == 0)
        return std::nullopt;
    auto dot = var_name.find('.', hash);
    if (dot == std::string::npos || dot == hash + 1 || dot + 1 >= var_name.size())
        return std::nullopt;
    for (std::size_t i = hash + 1; i < var_name.size(); ++i) {
        if (i == dot)
            continue;
        if (!std::isdigit(static_cast<unsigned char>(var_name[i])))
            return std::nullopt;
    }
    InstanceRef ref;
    ref.nt = var_name.substr(0, hash);
    ref.instance = std::stoi(var_name.substr(hash + 1, dot - hash - 1));
    ref.comp = std::stoi(var_name.substr(dot + 1));
    return ref;
}

std::string instance_var_name(const std::string& nt, int instance, int comp) {
    return nt + "#" + std::to_string(instance) + "." + std::to_string(comp);
}

const NonTerminal& TupleGrammar::nt(const std::string& name) const {
    auto it = nts.find(name);
    if (it == nts.end())
        throw VetoError("unknown non-terminal '" + name + "'");
    return it->second;
}

namespace {

void collect_instance_vars(const Term& t, std::vector<InstanceRef>& out) {
    if (t.is_var()) {
        if (auto ref = instance_ref(t.name))
            out.push_back(*ref);
        return;
    }
    for (const Term& a : t.args)
        collect_instance_vars(a, out);
}

std::vector<InstanceRef> body_instance_vars(const TermWord& body) {
    std::vector<InstanceRef> out;
    for (const Term& t : body)
        collect_instance_vars(t, out);
    return out;
}

/// Instances used by a body, keyed (nt, index), with their component refs.
std::map<std::pair<std::string, int>, std::vector<int>> body_instances(const TermWord& body) {
    std::map<std::pair<std::string, int>, std::vector<int>> out;
    for (const InstanceRef& r : body_instance_vars(body))
        out[{r.nt, r.instance}].push_back(r.comp);
    return out;
}

}  // namespace

std::vector<std::string> validate(const TupleGrammar& g) {
    std::vector<std::string> out;
    auto complain = [&](const std::string& msg) { out.push_back(msg); };
    if (!g.axiom.empty() && !g.nts.count(g.axiom))
        complain("axiom '" + g.axiom + "' is not declared");
    for (const auto& [name, nt] : g.nts) {
        if (nt.arity != nt.split1 + nt.split2)
            complain("non-terminal '" + name + "' has split " + std::to_string(nt.split1) +
                     "+" + std::to_string(nt.split2) + " != arity " + std::to_string(nt.arity));
        if (nt.arity < 1)
            complain("non-terminal '" + name + "' has arity < 1");
    }
    for (const Production& p : g.prods) {
        std::string where = "production of '" + p.head + "': ";
        auto it = g.nts.find(p.head);
        if (it == g.nts.end()) {
            complain(where + "undeclared head");
            continue;
        }
        if (static_cast<int>(p.body.size()) != it->second.arity)
            complain(where + "body has " + std::to_string(p.body.size()) +
                     " components, head arity is " + std::to_string(it->second.arity));
        // Arity agreement of terminal symbols; instance vars only at leaves
        // is automatic in the term encoding, asserted by the walk.
        std::function<void(const Term&)> walk = [&](const Term& t) {
            if (t.is_var())
                return;
            if (is_hole_name(t.name)) {
                complain(where + "hole symbol '" + t.name + "' in body");
                return;
            }
            if (!g.alphabet.contains(t.name))
                complain(where + "unknown symbol '" + t.name + "'");
            else if (g.alphabet.arity_of(t.name) != static_cast<int>(t.args.size()))
                complain(where + "symbol '" + t.name + "' used with wrong arity");
            for (const Term& a : t.args)
                walk(a);
        };
        for (const Term& t : p.body)
            walk(t);
        // Linearity and grouping.
        std::set<std::string> seen;
        for (const InstanceRef& r : body_instance_vars(p.body)) {
            std::string v = instance_var_name(r.nt, r.instance, r.comp);
            if (!seen.insert(v).second)
                complain(where + "instance variable " + v + " occurs twice");
        }
        for (const auto& [key, comps] : body_instances(p.body)) {
            auto def = g.nts.find(key.first);
            if (def == g.nts.end()) {
                complain(where + "undeclared non-terminal '" + key.first + "'");
                continue;
            }
            std::set<int> have(comps.begin(), comps.end());
            for (int c = 1; c <= def->second.arity; ++c)
                if (!have.count(c))
                    complain(where + "instance " + key.first + "#" +
                             std::to_string(key.second) + " is missing component " +
                             std::to_string(c));
            for (int c : have)
                if (c < 1 || c > def->second.arity)
                    complain(where + "instance " + key.first + "#" +
                             std::to_string(key.second) + " has out-of-range component " +
                             std::to_string(c));
        }
    }
    return out;
}

std::set<std::string> reachable_nts(const TupleGrammar& g, const std::string& axiom) {
    std::set<std::string> seen{axiom};
    std::deque<std::string> todo{axiom};
    while (!todo.empty()) {
        std::string cur = todo.front();
        todo.pop_front();
        for (const Production& p : g.prods) {
            if (p.head != cur)
                continue;
            for (const auto& [key, comps] : body_instances(p.body))
                if (seen.insert(key.first).second)
                    todo.push_back(key.first);
        }
    }
    return seen;
}

TupleGrammar prune_unproductive(const TupleGrammar& g) {
    std::set<std::string> productive;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const Production& p : g.prods) {
            if (productive.count(p.head))
                continue;
            bool ok = true;
            for (const auto& [key, comps] : body_instances(p.body))
                if (!productive.count(key.first)) {
                    ok = false;
                    break;
                }
            if (ok) {
                productive.insert(p.head);
                changed = true;
            }
        }
    }
    TupleGrammar out;
    out.alphabet = g.alphabet;
    out.axiom = g.axiom;
    for (const auto& [name, nt] : g.nts)
        if (productive.count(name))
            out.nts.emplace(name, nt);
    for (const Production& p : g.prods) {
        if (!productive.count(p.head))
            continue;
        bool ok = true;
        for (const auto& [key, comps] : body_instances(p.body))
            if (!productive.count(key.first)) {
                ok = false;
                break;
            }
        if (ok)
            out.prods.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Enumeration (semi-naive bounded fixpoint).

namespace {

int terminal_nodes(const Term& t) {
    if (t.is_var())
        return instance_ref(t.name) ? 0 : 1;
    int n = 1;
    for (const Term& a : t.args)
        n += terminal_nodes(a);
    return n;
}

Term fill_body(const Term& t,
               const std::map<std::pair<std::string, int>, const TermWord*>& chosen) {
    if (t.is_var()) {
        if (auto ref = instance_ref(t.name)) {
            const TermWord& w = *chosen.at({ref->nt, ref->instance});
            return w[ref->comp - 1];
        }
        return t;
    }
    Term out;
    out.kind = Term::Kind::app;
    out.name = t.name;
    out.args.reserve(t.args.size());
    for (const Term& a : t.args)
        out.args.push_back(fill_body(a, chosen));
    return out;
}

}  // namespace

std::set<TermWord> enumerate_tuples(const TupleGrammar& g, const std::string& axiom,
                                    int max_total, int comp_cap) {
    if (!g.nts.count(axiom))
        throw VetoError("enumerate_tuples: unknown axiom '" + axiom + "'");
    std::set<std::string> live = reachable_nts(g, axiom);
    struct ProdInfo {
        const Production* p;
        std::vector<std::pair<std::string, int>> instances;
        int terminal_size;  // nodes not coming from instances, plus components
    };
    std::vector<ProdInfo> prods;
    for (const Production& p : g.prods) {
        if (!live.count(p.head))
            continue;
        ProdInfo info{&p, {}, 0};
        for (const auto& [key, comps] : body_instances(p.body))
            info.instances.push_back(key);
        for (const Term& t : p.body)
            info.terminal_size += terminal_nodes(t);
        prods.push_back(std::move(info));
    }

    std::map<std::string, std::set<TermWord>> all;
    std::map<std::string, std::set<TermWord>> recent;
    auto admit = [&](const TermWord& w) {
        if (word_nodes(w) > max_total)
            return false;
        if (comp_cap >= 0)
            for (const Term& t : w)
                if (term_size(t) > comp_cap)
                    return false;
        return true;
    };

    bool first_round = true;
    while (true) {
        std::map<std::string, std::set<TermWord>> fresh;
        for (const ProdInfo& info : prods) {
            const auto& body = info.p->body;
            const std::size_t k = info.instances.size();
            // Pivot picks which instance must use a recent tuple; on the
            // first round only instance-free productions can fire.
            std::size_t pivots = first_round ? 1 : k;
            if (first_round && k > 0)
                continue;
            for (std::size_t pivot = 0; pivot < std::max<std::size_t>(pivots, 1); ++pivot) {
                if (!first_round && k == 0)
                    break;  // instance-free productions only fire once
                std::map<std::pair<std::string, int>, const TermWord*> chosen;
                std::function<void(std::size_t, int)> go = [&](std::size_t i, int budget) {
                    if (i == k) {
                        TermWord w;
                        w.reserve(body.size());
                        for (const Term& t : body)
                            w.push_back(fill_body(t, chosen));
                        if (admit(w))
                            fresh[info.p->head].insert(std::move(w));
                        return;
                    }
                    const auto& key = info.instances[i];
                    const std::set<TermWord>* pool;
                    if (!first_round && i == pivot)
                        pool = &recent[key.first];
                    else
                        pool = &all[key.first];
                    for (const TermWord& w : *pool) {
                        // Skip tuples already known when an earlier slot is
                        // forced recent, to avoid re-deriving old rows.
                        if (!first_round && i < pivot && recent[key.first].count(w))
                            continue;
                        int sz = word_nodes(w);
                        if (budget + sz > max_total)
                            continue;
                        chosen[key] = &w;
                        go(i + 1, budget + sz);
                    }
                    chosen.erase(key);
                };
                go(0, info.terminal_size);
            }
        }
        std::map<std::string, std::set<TermWord>> next_recent;
        bool changed = false;
        for (auto& [nt, tuples] : fresh) {
            for (TermWord w : tuples)
                if (all[nt].insert(w).second) {
                    next_recent[nt].insert(std::move(w));
                    changed = true;
                }
        }
        recent = std::move(next_recent);
        first_round = false;
        if (!changed)
            break;
    }
    return all[axiom];
}

// ---------------------------------------------------------------------------
// Exact membership.

namespace {

using Goal = std::pair<std::string, TermWord>;

bool decompose_tree(const Term& body, const Term& target,
                    std::map<std::pair<std::string, int>, std::map<int, Term>>& bind) {
    if (body.is_var()) {
        auto ref = instance_ref(body.name);
        if (!ref)
            return false;  // plain variables generate nothing ground
        bind[{ref->nt, ref->instance}][ref->comp] = target;
        return true;
    }
    if (target.is_var() || body.name != target.name || body.args.size() != target.args.size())
        return false;
    for (std::size_t i = 0; i < body.args.size(); ++i)
        if (!decompose_tree(body.args[i], target.args[i], bind))
            return false;
    return true;
}

bool is_universal_unary(const TupleGrammar& g, const std::string& nt) {
    auto it = g.nts.find(nt);
    if (it == g.nts.end() || it->second.arity != 1)
        return false;
    for (const auto& [f, n] : g.alphabet.symbols()) {
        bool found = false;
        for (const Production& p : g.prods) {
            if (p.head != nt || p.body.size() != 1)
                continue;
            const Term& t = p.body[0];
            if (!t.is_app() || t.name != f || static_cast<int>(t.args.size()) != n)
                continue;
            bool ok = true;
            std::set<int> used;
            for (const Term& a : t.args) {
                std::optional<InstanceRef> ref;
                if (a.is_var())
                    ref = instance_ref(a.name);
                if (!ref || ref->nt != nt || ref->comp != 1 ||
                    !used.insert(ref->instance).second) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                found = true;
                break;
            }
        }
        if (!found)
            return false;
    }
    return true;
}

}  // namespace

bool contains_tuple(const TupleGrammar& g, const std::string& axiom, const TermWord& w) {
    auto it = g.nts.find(axiom);
    if (it == g.nts.end() || static_cast<int>(w.size()) != it->second.arity)
        return false;
    if (!is_ground(w))
        return false;

    std::set<std::string> universal;
    for (const auto& [name, nt] : g.nts)
        if (is_universal_unary(g, name))
            universal.insert(name);

    std::map<Goal, std::vector<std::vector<Goal>>> expansions;
    std::map<Goal, bool> status;
    std::deque<Goal> todo;
    auto discover = [&](const Goal& goal) {
        if (status.count(goal))
            return;
        status[goal] = universal.count(goal.first) != 0;
        todo.push_back(goal);
    };
    Goal root{axiom, w};
    discover(root);
    while (!todo.empty()) {
        Goal goal = todo.front();
        todo.pop_front();
        if (status[goal])
            continue;  // universal shortcut: no decomposition needed
        auto& exps = expansions[goal];
        for (const Production& p : g.prods) {
            if (p.head != goal.first || p.body.size() != goal.second.size())
                continue;
            std::map<std::pair<std::string, int>, std::map<int, Term>> bind;
            bool ok = true;
            for (std::size_t i = 0; i < p.body.size() && ok; ++i)
                ok = decompose_tree(p.body[i], goal.second[i], bind);
            if (!ok)
                continue;
            std::vector<Goal> conj;
            for (auto& [key, comps] : bind) {
                TermWord sub;
                sub.reserve(comps.size());
                for (auto& [c, t] : comps)
                    sub.push_back(std::move(t));
                conj.emplace_back(key.first, std::move(sub));
            }
            for (const Goal& gsub : conj)
                discover(gsub);
            exps.push_back(std::move(conj));
        }
    }
    // Least fixpoint over the finite goal graph.
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [goal, exps] : expansions) {
            if (status[goal])
                continue;
            for (const auto& conj : exps) {
                bool all = std::all_of(conj.begin(), conj.end(),
                                       [&](const Goal& s) { return status[s]; });
                if (all) {
                    status[goal] = true;
                    changed = true;
                    break;
                }
            }
        }
    }
    return status[root];
}

// ---------------------------------------------------------------------------
// Projection handling.

TupleGrammar swap_projections(const TupleGrammar& g) {
    TupleGrammar out;
    out.alphabet = g.alphabet;
    out.axiom = g.axiom;
    for (const auto& [name, nt] : g.nts)
        out.nts.emplace(name, NonTerminal{name, nt.arity, nt.split2, nt.split1});
    std::function<Term(const Term&)> remap = [&](const Term& t) -> Term {
        if (t.is_var()) {
            if (auto ref = instance_ref(t.name)) {
                const NonTerminal& nt = g.nt(ref->nt);
                int comp = ref->comp <= nt.split1 ? ref->comp + nt.split2
                                                  : ref->comp - nt.split1;
                return Term::var(instance_var_name(ref->nt, ref->instance, comp));
            }
            return t;
        }
        Term o = t;
        for (std::size_t i = 0; i < o.args.size(); ++i)
            o.args[i] = remap(t.args[i]);
        return o;
    };
    for (const Production& p : g.prods) {
        const NonTerminal& nt = g.nt(p.head);
        Production q;
        q.head = p.head;
        for (int c = nt.split1 + 1; c <= nt.arity; ++c)
            q.body.push_back(remap(p.body[c - 1]));
        for (int c = 1; c <= nt.split1; ++c)
            q.body.push_back(remap(p.body[c - 1]));
        out.prods.push_back(std::move(q));
    }
    return out;
}

namespace {

std::string comp_state(const std::string& nt, int comp) {
    return nt + ":" + std::to_string(comp);
}

void check_side_purity(const TupleGrammar& g) {
    for (const Production& p : g.prods) {
        const NonTerminal& head = g.nt(p.head);
        for (int c = 1; c <= head.arity; ++c) {
            bool first_side = c <= head.split1;
            std::vector<InstanceRef> refs;
            collect_instance_vars(p.body[c - 1], refs);
            for (const InstanceRef& r : refs) {
                const NonTerminal& nt = g.nt(r.nt);
                if ((r.comp <= nt.split1) != first_side)
                    throw VetoError("production of '" + p.head +
                                    "' links projections across component " +
                                    instance_var_name(r.nt, r.instance, r.comp));
            }
        }
    }
}

}  // namespace

TreeAutomaton project_split(const TupleGrammar& g0, int side) {
    if (side != 1 && side != 2)
        throw VetoError("project_split: side must be 1 or 2");
    TupleGrammar g = prune_unproductive(g0);
    check_side_purity(g);
    TreeAutomaton a;
    a.alphabet = g.alphabet;
    std::vector<std::pair<std::string, std::string>> eps;  // state -> state
    int fresh = 0;
    std::function<void(const std::string&, const Term&)> emit = [&](const std::string& state,
                                                                    const Term& t) {
        a.states.insert(state);
        if (t.is_var()) {
            auto ref = instance_ref(t.name);
            if (!ref)
                throw VetoError("project_split: plain variable in body");
            eps.emplace_back(state, comp_state(ref->nt, ref->comp));
            a.states.insert(comp_state(ref->nt, ref->comp));
            return;
        }
        std::vector<std::string> children;
        for (const Term& arg : t.args) {
            if (arg.is_var()) {
                auto ref = instance_ref(arg.name);
                if (!ref)
                    throw VetoError("project_split: plain variable in body");
                children.push_back(comp_state(ref->nt, ref->comp));
                a.states.insert(children.back());
            } else {
                std::string inner = "i" + std::to_string(fresh++);
                children.push_back(inner);
                emit(inner, arg);
            }
        }
        a.rules.push_back({state, t.name, std::move(children)});
    };
    for (const Production& p : g.prods) {
        const NonTerminal& head = g.nt(p.head);
        int from = side == 1 ? 1 : head.split1 + 1;
        int to = side == 1 ? head.split1 : head.arity;
        for (int c = from; c <= to; ++c)
            emit(comp_state(p.head, c), p.body[c - 1]);
    }
    if (g.nts.count(g.axiom)) {
        const NonTerminal& ax = g.nt(g.axiom);
        int from = side == 1 ? 1 : ax.split1 + 1;
        int to = side == 1 ? ax.split1 : ax.arity;
        for (int c = from; c <= to; ++c) {
            a.initial.insert(comp_state(g.axiom, c));
            a.states.insert(comp_state(g.axiom, c));
        }
    }
    // Epsilon elimination: every state inherits the rules of the states it
    // can reach through bare component links.
    std::map<std::string, std::set<std::string>> closure;
    for (const auto& [from, to] : eps)
        closure[from].insert(to);
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [from, tos] : closure) {
            std::set<std::string> add;
            for (const auto& mid : tos) {
                auto it = closure.find(mid);
                if (it == closure.end())
                    continue;
                for (const auto& far : it->second)
                    if (!tos.count(far))
                        add.insert(far);
            }
            if (!add.empty()) {
                tos.insert(add.begin(), add.end());
                changed = true;
            }
        }
    }
    std::vector<AutomatonRule> extra;
    for (const auto& [from, tos] : closure)
        for (const auto& to : tos)
            for (const AutomatonRule& r : a.rules)
                if (r.state == to)
                    extra.push_back({from, r.symbol, r.children});
    a.rules.insert(a.rules.end(), extra.begin(), extra.end());
    std::sort(a.rules.begin(), a.rules.end());
    a.rules.erase(std::unique(a.rules.begin(), a.rules.end()), a.rules.end());
    return a;
}

// ---------------------------------------------------------------------------
// Product with a tree automaton.

namespace {

std::string product_name(const std::string& base, const std::vector<std::string>& states) {
    std::string out = base + "@";
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (i)
            out += ".";
        out += states[i];
    }
    return out;
}

}  // namespace

TupleGrammar synchronize(const TupleGrammar& g, const TreeAutomaton& a, int side) {
    if (side != 1 && side != 2)
        throw VetoError("synchronize: side must be 1 or 2");
    check_side_purity(g);
    RankedAlphabet::merged(g.alphabet, a.alphabet);  // arities must agree

    TupleGrammar out;
    out.alphabet = g.alphabet;
    const NonTerminal& ax = g.nt(g.axiom);
    int ax_side = side == 1 ? ax.split1 : ax.split2;
    if (ax_side > 1)
        throw VetoError("synchronize: axiom must have at most one component on the "
                        "synchronized side");

    using Key = std::pair<std::string, std::vector<std::string>>;
    std::set<Key> seen;
    std::deque<Key> todo;
    auto declare = [&](const Key& key) -> std::string {
        std::string name = product_name(key.first, key.second);
        if (seen.insert(key).second) {
            const NonTerminal& base = g.nt(key.first);
            out.nts.emplace(name, NonTerminal{name, base.arity, base.split1, base.split2});
            todo.push_back(key);
        }
        return name;
    };

    // Synthetic start: one epsilon production per initial automaton state.
    std::string start = "start";
    while (g.nts.count(start) || out.nts.count(start))
        start += "'";
    out.nts.emplace(start, NonTerminal{start, ax.arity, ax.split1, ax.split2});
    out.axiom = start;
    for (const std::string& q : a.initial) {
        std::vector<std::string> word(static_cast<std::size_t>(ax_side), q);
        std::string name = declare({g.axiom, word});
        Production p;
        p.head = start;
        for (int c = 1; c <= ax.arity; ++c)
            p.body.push_back(Term::var(instance_var_name(name, 1, c)));
        out.prods.push_back(std::move(p));
    }

    while (!todo.empty()) {
        Key key = todo.front();
        todo.pop_front();
        const NonTerminal& base = g.nt(key.first);
        std::string head_name = product_name(key.first, key.second);
        int from = side == 1 ? 1 : base.split1 + 1;
        int count = side == 1 ? base.split1 : base.split2;
        for (const Production& p : g.prods) {
            if (p.head != key.first)
                continue;
            TermWord side_trees(p.body.begin() + (from - 1),
                                p.body.begin() + (from - 1) + count);
            // Leaves of the synchronized side, left to right.
            std::vector<InstanceRef> frontier;
            for (const Term& t : side_trees)
                collect_instance_vars(t, frontier);
            for (const auto& word : run_forest(a, key.second, side_trees)) {
                // States per instance, indexed by that instance's own
                // side components in component order.
                std::map<std::pair<std::string, int>, std::map<int, std::string>> states;
                for (std::size_t i = 0; i < frontier.size(); ++i)
                    states[{frontier[i].nt, frontier[i].instance}][frontier[i].comp] = word[i];
                std::map<std::pair<std::string, int>, std::string> inst_name;
                std::map<std::string, int> next_index;
                std::map<std::pair<std::string, int>, int> new_index;
                for (const auto& [bkey, comps] : body_instances(p.body)) {
                    std::vector<std::string> w;
                    auto st = states.find(bkey);
                    if (st != states.end())
                        for (const auto& [comp, q] : st->second)
                            w.push_back(q);
                    std::string name = declare({bkey.first, w});
                    inst_name[bkey] = name;
                    new_index[bkey] = ++next_index[name];
                }
                std::function<Term(const Term&)> rewrite = [&](const Term& t) -> Term {
                    if (t.is_var()) {
                        if (auto ref = instance_ref(t.name)) {
                            auto bkey = std::make_pair(ref->nt, ref->instance);
                            return Term::var(instance_var_name(inst_name.at(bkey),
                                                               new_index.at(bkey), ref->comp));
                        }
                        return t;
                    }
                    Term o = t;
                    for (std::size_t i = 0; i < o.args.size(); ++i)
                        o.args[i] = rewrite(t.args[i]);
                    return o;
                };
                Production q;
                q.head = head_name;
                for (const Term& t : p.body)
                    q.body.push_back(rewrite(t));
                out.prods.push_back(std::move(q));
            }
        }
    }
    return out;
}

TupleGrammar tidy(const TupleGrammar& g, const std::map<std::string, std::string>& rename) {
    TupleGrammar out;
    out.alphabet = g.alphabet;
    auto mapped = [&](const std::string& name) {
        auto it = rename.find(name);
        return it == rename.end() ? name : it->second;
    };
    out.axiom = mapped(g.axiom);
    for (const auto& [name, nt] : g.nts)
        out.nts.emplace(mapped(name),
                        NonTerminal{mapped(name), nt.arity, nt.split1, nt.split2});
    std::function<Term(const Term&)> remap = [&](const Term& t) -> Term {
        if (t.is_var()) {
            if (auto ref = instance_ref(t.name))
                return Term::var(instance_var_name(mapped(ref->nt), ref->instance, ref->comp));
            return t;
        }
        Term o = t;
        for (std::size_t i = 0; i < o.args.size(); ++i)
            o.args[i] = remap(t.args[i]);
        return o;
    };
    for (const Production& p : g.prods) {
        Production q;
        q.head = mapped(p.head);
        for (const Term& t : p.body)
            q.body.push_back(remap(t));
        out.prods.push_back(std::move(q));
    }
    return out;
}

// ---------------------------------------------------------------------------
// File format.

namespace {

/// Term parser that infers the alphabet: leaves written NAME#i.j become
/// instance variables, everything else is a symbol application.
struct UntypedCursor {
    const std::string& text;
    std::size_t pos = 0;
    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
};

bool grammar_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' || c == '@' ||
           c == '.' || c == '\'' || c == ':';
}

Term parse_untyped(UntypedCursor& cur) {
    cur.skip_ws();
    std::size_t start = cur.pos;
    while (cur.pos < cur.text.size() && grammar_ident_char(cur.text[cur.pos]))
        ++cur.pos;
    if (cur.pos == start)
        throw ParseError("expected a name in grammar body", start);
    std::string name = cur.text.substr(start, cur.pos - start);
    if (cur.peek() != '(') {
        if (instance_ref(name))
            return Term::var(name);
        return Term::app(name);
    }
    ++cur.pos;
    std::vector<Term> args;
    if (cur.peek() != ')') {
        while (true) {
            args.push_back(parse_untyped(cur));
            if (cur.peek() == ',') {
                ++cur.pos;
                continue;
            }
            break;
        }
    }
    if (cur.peek() != ')')
        throw ParseError("expected ')' in grammar body", cur.pos);
    ++cur.pos;
    return Term::app(name, std::move(args));
}

TermWord parse_side(const std::string& text) {
    TermWord out;
    UntypedCursor cur{text};
    cur.skip_ws();
    if (cur.pos >= text.size())
        return out;
    while (true) {
        out.push_back(parse_untyped(cur));
        if (cur.peek() == ',') {
            ++cur.pos;
            continue;
        }
        break;
    }
    cur.skip_ws();
    if (cur.pos < text.size())
        throw ParseError("trailing input in grammar body", cur.pos);
    return out;
}

void infer_alphabet(const Term& t, RankedAlphabet& alphabet) {
    if (t.is_var())
        return;
    alphabet.add(t.name, static_cast<int>(t.args.size()));
    for (const Term& a : t.args)
        infer_alphabet(a, alphabet);
}

}  // namespace

TupleGrammar parse_grammar(const std::string& text) {
    TupleGrammar g;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        auto colon = line.find(':');
        if (colon == std::string::npos)
            throw ParseError("grammar line " + std::to_string(lineno) + ": expected 'key: ...'",
                             0);
        std::string key = line.substr(first, colon - first);
        std::string rest = line.substr(colon + 1);
        if (key == "nonterminal") {
            std::istringstream toks(rest);
            std::string decl, split_kw;
            int s1 = -1, s2 = -1;
            if (!(toks >> decl >> split_kw >> s1 >> s2) || split_kw != "split")
                throw ParseError("expected 'nonterminal: N/arity split p q' on line " +
                                     std::to_string(lineno),
                                 0);
            auto slash = decl.find('/');
            if (slash == std::string::npos)
                throw ParseError("non-terminal declaration '" + decl + "' is not name/arity", 0);
            NonTerminal nt{decl.substr(0, slash), std::stoi(decl.substr(slash + 1)), s1, s2};
            g.nts.emplace(nt.name, nt);
        } else if (key == "axiom") {
            std::istringstream toks(rest);
            toks >> g.axiom;
        } else if (key == "prod") {
            auto arrow = rest.find("->");
            if (arrow == std::string::npos)
                throw ParseError("production without '->' on line " + std::to_string(lineno), 0);
            std::istringstream head_toks(rest.substr(0, arrow));
            Production p;
            head_toks >> p.head;
            std::string body = rest.substr(arrow + 2);
            auto pipe = body.find('|');
            TermWord side1 = parse_side(pipe == std::string::npos ? body : body.substr(0, pipe));
            TermWord side2 =
                pipe == std::string::npos ? TermWord{} : parse_side(body.substr(pipe + 1));
            p.body = std::move(side1);
            p.body.insert(p.body.end(), side2.begin(), side2.end());
            g.prods.push_back(std::move(p));
        } else {
            throw ParseError("unknown grammar key '" + key + "' on line " +
                                 std::to_string(lineno),
                             0);
        }
    }
    for (const Production& p : g.prods)
        for (const Term& t : p.body)
            infer_alphabet(t, g.alphabet);
    auto violations = validate(g);
    if (!violations.empty())
        throw VetoError("invalid grammar: " + violations.front());
    return g;
}

namespace {

/// Renumber instances per non-terminal in first-appearance order so emitted
/// files are canonical.
Production canonical_instances(const Production& p) {
    std::map<std::pair<std::string, int>, int> renumber;
    std::map<std::string, int> next;
    for (const InstanceRef& r : body_instance_vars(p.body)) {
        auto key = std::make_pair(r.nt, r.instance);
        if (!renumber.count(key))
            renumber[key] = ++next[r.nt];
    }
    std::function<Term(const Term&)> remap = [&](const Term& t) -> Term {
        if (t.is_var()) {
            if (auto ref = instance_ref(t.name))
                return Term::var(instance_var_name(
                    ref->nt, renumber.at({ref->nt, ref->instance}), ref->comp));
            return t;
        }
        Term o = t;
        for (std::size_t i = 0; i < o.args.size(); ++i)
            o.args[i] = remap(t.args[i]);
        return o;
    };
    Production q;
    q.head = p.head;
    for (const Term& t : p.body)
        q.body.push_back(remap(t));
    return q;
}

}  // namespace

std::string format_grammar(const TupleGrammar& g) {
    std::ostringstream out;
    for (const auto& [name, nt] : g.nts)
        out << "nonterminal: " << name << "/" << nt.arity << " split " << nt.split1 << " "
            << nt.split2 << "\n";
    out << "axiom: " << g.axiom << "\n";
    std::vector<std::string> lines;
    for (const Production& p : g.prods) {
        Production q = canonical_instances(p);
        const NonTerminal& nt = g.nt(q.head);
        std::string line = "prod: " + q.head + " ->";
        for (int c = 1; c <= nt.split1; ++c)
            line += std::string(c > 1 ? "," : "") + " " + format_term(q.body[c - 1]);
        line += " |";
        for (int c = nt.split1 + 1; c <= nt.arity; ++c)
            line += std::string(c > nt.split1 + 1 ? "," : "") + " " + format_term(q.body[c - 1]);
        lines.push_back(std::move(line));
    }
    std::sort(lines.begin(), lines.end());
    lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
    for (const std::string& l : lines)
        out << l << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Tuple languages.

TupleLanguage subst_product(const TupleLanguage& l, const std::vector<std::string>& x,
                            const TupleLanguage& m, int max_total) {
    if (!m.tuples.empty() && m.length != static_cast<int>(x.size()))
        throw VetoError("subst_product: variable word length " + std::to_string(x.size()) +
                        " does not match tuple length " + std::to_string(m.length));
    TupleLanguage out;
    out.length = l.length;
    for (const TermWord& t : l.tuples) {
        // Count occurrences per variable of x; all must agree.
        std::map<std::string, int> occ;
        std::function<void(const Term&)> count = [&](const Term& u) {
            if (u.is_var()) {
                occ[u.name]++;
                return;
            }
            for (const Term& a : u.args)
                count(a);
        };
        for (const Term& u : t)
            count(u);
        int k = -1;
        for (const auto& xi : x) {
            int c = occ.count(xi) ? occ[xi] : 0;
            if (k < 0)
                k = c;
            else if (c != k)
                throw VetoError("subst_product: occurrences of the variable word are not "
                                "groupable into instances");
        }
        if (k <= 0) {
            out.tuples.insert(t);  // no instance of x: vacuous replacement
            continue;
        }
        std::vector<const TermWord*> choice(static_cast<std::size_t>(k));
        std::map<std::string, int> seen;
        std::function<Term(const Term&)> build = [&](const Term& u) -> Term {
            if (u.is_var()) {
                auto it = std::find(x.begin(), x.end(), u.name);
                if (it == x.end())
                    return u;
                int inst = seen[u.name]++;
                return (*choice[inst])[static_cast<std::size_t>(it - x.begin())];
            }
            Term o = u;
            for (std::size_t i = 0; i < o.args.size(); ++i)
                o.args[i] = build(u.args[i]);
            return o;
        };
        std::function<void(int)> pick = [&](int i) {
            if (i == k) {
                seen.clear();
                TermWord w;
                w.reserve(t.size());
                for (const Term& u : t)
                    w.push_back(build(u));
                if (max_total < 0 || word_size(w) <= max_total)
                    out.tuples.insert(std::move(w));
                return;
            }
            for (const TermWord& cand : m.tuples) {
                choice[i] = &cand;
                pick(i + 1);
            }
        };
        pick(0);
    }
    return out;
}

TupleLanguage iterate_subst(const TupleLanguage& l, const std::vector<std::string>& x,
                            int max_total) {
    TupleLanguage out;
    out.length = static_cast<int>(x.size());
    TermWord id;
    for (const auto& xi : x)
        id.push_back(Term::var(xi));
    TupleLanguage power;
    power.length = out.length;
    if (max_total < 0 || word_size(id) <= max_total)
        power.tuples.insert(id);
    while (!power.tuples.empty()) {
        bool fresh = false;
        for (const TermWord& w : power.tuples)
            if (out.tuples.insert(w).second)
                fresh = true;
        if (!fresh)
            break;
        power = subst_product(l, x, power, max_total);
    }
    return out;
}

}  // namespace ratrw
