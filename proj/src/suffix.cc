#include "ratrw/suffix.hh"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <functional>
#include <sstream>

#include "ratrw/classify.hh"

namespace ratrw {

namespace {

Term state_term(const std::string& state, const std::vector<std::string>& args) {
    std::vector<Term> ts;
    ts.reserve(args.size());
    for (const auto& a : args)
        ts.push_back(Term::var(a));
    return Term::app(state, std::move(ts));
}

}  // namespace

Trs StateSystem::as_trs() const {
    Trs out;
    out.alphabet = ext_alphabet;
    std::set<std::string> vs(vars.begin(), vars.end());
    for (const auto& group : {consume_sym, produce_sym, bridge})
        for (const RewriteRule& r : group)
            out.rules.push_back(r);
    for (const auto& [x, p] : consume_var)
        out.rules.push_back({Term::var(x), Term::app(p, {Term::var(x)})});
    for (const auto& [q, x] : produce_var)
        out.rules.push_back({Term::app(q, {Term::var(x)}), Term::var(x)});
    for (const RewriteRule& r : out.rules)
        for (const auto& x : vars_of(r.lhs))
            vs.insert(x);
    out.vars.assign(vs.begin(), vs.end());
    return out;
}

namespace {

/// Single-run automaton compilation of one side of a finite rule: one state
/// per position, variable boundaries computed bottom-up.
void compile_side(const Term& side, const std::string& prefix, bool lhs_side,
                  StateSystem& out) {
    std::function<std::vector<std::string>(const Term&, const std::string&)> walk =
        [&](const Term& t, const std::string& state) -> std::vector<std::string> {
        if (t.is_var()) {
            out.states[state] = {state, {t.name}, lhs_side};
            if (lhs_side)
                out.consume_var.emplace_back(t.name, state);
            else
                out.produce_var.emplace_back(state, t.name);
            return {t.name};
        }
        std::vector<std::string> nu;
        std::vector<Term> children;
        for (std::size_t i = 0; i < t.args.size(); ++i) {
            std::string child = state + "." + std::to_string(i + 1);
            auto cnu = walk(t.args[i], child);
            children.push_back(state_term(child, cnu));
            nu.insert(nu.end(), cnu.begin(), cnu.end());
        }
        out.states[state] = {state, nu, lhs_side};
        Term tree = Term::app(t.name, std::move(children));
        Term st = state_term(state, nu);
        if (lhs_side)
            out.consume_sym.push_back({tree, st});
        else
            out.produce_sym.push_back({st, tree});
        return nu;
    };
    walk(side, prefix);
}

/// Variable boundaries of every state of a rule-side automaton, by fixpoint.
/// Fails if some productive state admits two distinct boundaries.
std::map<std::string, std::vector<std::string>> automaton_boundaries(
    const TreeAutomaton& a, const std::set<std::string>& vars, std::size_t max_len) {
    std::map<std::string, std::set<std::vector<std::string>>> words;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const AutomatonRule& r : a.rules) {
            if (vars.count(r.symbol)) {
                if (!r.children.empty())
                    throw VetoError("variable '" + r.symbol + "' used with arguments");
                if (words[r.state].insert({r.symbol}).second)
                    changed = true;
                continue;
            }
            std::vector<std::set<std::vector<std::string>>*> kids;
            bool ready = true;
            for (const auto& c : r.children) {
                auto it = words.find(c);
                if (it == words.end() || it->second.empty()) {
                    ready = false;
                    break;
                }
                kids.push_back(&it->second);
            }
            if (!ready)
                continue;
            std::vector<std::vector<std::string>> picked(kids.size());
            std::function<void(std::size_t)> go = [&](std::size_t i) {
                if (i == kids.size()) {
                    std::vector<std::string> joined;
                    for (const auto& w : picked)
                        joined.insert(joined.end(), w.begin(), w.end());
                    if (joined.size() <= max_len && words[r.state].insert(joined).second)
                        changed = true;
                    return;
                }
                for (const auto& w : *kids[i]) {
                    picked[i] = w;
                    go(i + 1);
                }
            };
            go(0);
        }
    }
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [state, ws] : words) {
        if (ws.size() > 1) {
            auto it = ws.begin();
            std::string w1, w2;
            for (const auto& x : *it)
                w1 += x + " ";
            ++it;
            for (const auto& x : *it)
                w2 += x + " ";
            throw VetoError("state '" + state + "' has two variable boundaries: '" + w1 +
                            "' and '" + w2 + "'");
        }
        const auto& w = *ws.begin();
        std::set<std::string> distinct(w.begin(), w.end());
        if (distinct.size() != w.size())
            throw VetoError("state '" + state + "' has a non-linear variable boundary");
        out[state] = w;
    }
    return out;
}

/// Import one recognizable rule side, renaming its states with a prefix.
void import_automaton(const TreeAutomaton& a, const std::string& prefix, bool lhs_side,
                      const std::set<std::string>& vars, std::size_t max_len,
                      StateSystem& out, std::vector<std::string>& initials) {
    auto nu = automaton_boundaries(a, vars, max_len);
    auto name = [&](const std::string& q) { return prefix + "." + q; };
    for (const auto& [q, w] : nu)
        out.states[name(q)] = {name(q), w, lhs_side};
    for (const AutomatonRule& r : a.rules) {
        if (!nu.count(r.state))
            continue;
        if (vars.count(r.symbol)) {
            if (lhs_side)
                out.consume_var.emplace_back(r.symbol, name(r.state));
            else
                out.produce_var.emplace_back(name(r.state), r.symbol);
            continue;
        }
        bool ready = true;
        std::vector<Term> children;
        std::vector<std::string> joined;
        for (const auto& c : r.children) {
            auto it = nu.find(c);
            if (it == nu.end()) {
                ready = false;
                break;
            }
            children.push_back(state_term(name(c), it->second));
            joined.insert(joined.end(), it->second.begin(), it->second.end());
        }
        if (!ready)
            continue;
        Term tree = Term::app(r.symbol, std::move(children));
        Term st = state_term(name(r.state), joined);
        if (lhs_side)
            out.consume_sym.push_back({tree, st});
        else
            out.produce_sym.push_back({st, tree});
    }
    for (const auto& q : a.initial)
        if (nu.count(q))
            initials.push_back(name(q));
}

}  // namespace

StateSystem to_state_system(const Trs& r) {
    if (!r.linear())
        throw VetoError("state-system normalization requires a linear system");
    StateSystem out;
    out.base_alphabet = r.alphabet;
    out.vars = r.vars;
    for (std::size_t i = 0; i < r.rules.size(); ++i) {
        const RewriteRule& rule = r.rules[i];
        std::string lp = "L" + std::to_string(i + 1);
        std::string rp = "R" + std::to_string(i + 1);
        compile_side(rule.lhs, lp, true, out);
        compile_side(rule.rhs, rp, false, out);
        out.bridge.push_back({state_term(lp, out.states.at(lp).nu),
                              state_term(rp, out.states.at(rp).nu)});
    }
    std::set<std::string> vs = r.var_set();
    for (std::size_t i = 0; i < r.auto_rules.size(); ++i) {
        std::string up = "U" + std::to_string(i + 1);
        std::string vp = "V" + std::to_string(i + 1);
        std::vector<std::string> u_init, v_init;
        import_automaton(r.auto_rules[i].lhs_lang, up, true, vs, vs.size(), out, u_init);
        import_automaton(r.auto_rules[i].rhs_lang, vp, false, vs, vs.size(), out, v_init);
        for (const auto& p0 : u_init)
            for (const auto& q0 : v_init) {
                const auto& pn = out.states.at(p0).nu;
                const auto& qn = out.states.at(q0).nu;
                std::set<std::string> pv(pn.begin(), pn.end());
                for (const auto& x : qn)
                    if (!pv.count(x))
                        throw VetoError("recognizable rule introduces variable '" + x + "'");
                out.bridge.push_back({state_term(p0, pn), state_term(q0, qn)});
            }
    }
    out.ext_alphabet = out.base_alphabet;
    for (const auto& [name, info] : out.states)
        out.ext_alphabet.add(name, static_cast<int>(info.nu.size()));
    return out;
}

// ---------------------------------------------------------------------------
// Saturation.

namespace {

std::pair<Term, Term> canon_pair(const Term& a, const Term& b) {
    return canonical_rename_pair(a, b);
}

/// Positional renaming taking `from`'s variable arguments to `to`'s.
std::map<std::string, std::string> positional(const Term& from, const Term& to) {
    std::map<std::string, std::string> out;
    for (std::size_t i = 0; i < from.args.size(); ++i)
        out[from.args[i].name] = to.args[i].name;
    return out;
}

Term apply_renaming(const Term& t, const std::map<std::string, std::string>& rho) {
    if (t.is_var()) {
        auto it = rho.find(t.name);
        return it == rho.end() ? t : Term::var(it->second);
    }
    Term out = t;
    for (std::size_t i = 0; i < out.args.size(); ++i)
        out.args[i] = apply_renaming(t.args[i], rho);
    return out;
}

}  // namespace

SaturationTriple saturate(const StateSystem& s) {
    SaturationTriple t;
    t.plus = s.consume_sym;
    t.minus = s.produce_sym;
    // The cancellation rule ranges over every way a state term can open
    // into a tree and a tree can close into a state term, in either family.
    std::vector<RewriteRule> expansions, contractions;
    for (const RewriteRule& r : s.consume_sym) {
        contractions.push_back(r);
        expansions.push_back({r.rhs, r.lhs});
    }
    for (const RewriteRule& r : s.produce_sym) {
        expansions.push_back(r);
        contractions.push_back({r.rhs, r.lhs});
    }

    // (1) reflexivity, (2) bridges, and the variable-rule cancellations: a
    // variable-linked state expands to its bare variable, which any other
    // variable-linked state contracts again, so all such pairs bridge.
    for (const auto& [name, info] : s.states)
        t.eq.insert(canon_pair(state_term(name, info.nu), state_term(name, info.nu)));
    for (const RewriteRule& r : s.bridge)
        t.eq.insert(canon_pair(r.lhs, r.rhs));
    std::set<std::string> var_states;
    for (const auto& [x, p] : s.consume_var)
        var_states.insert(p);
    for (const auto& [q, x] : s.produce_var)
        var_states.insert(q);
    for (const auto& a : var_states)
        for (const auto& b : var_states)
            t.eq.insert(canon_pair(Term::app(a, {Term::var("x1")}),
                                   Term::app(b, {Term::var("x1")})));

    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::pair<Term, Term>> fresh;
        // (4) transitivity.
        for (const auto& [a, b] : t.eq)
            for (const auto& [a2, b2] : t.eq) {
                if (b.name != a2.name || b.args.size() != a2.args.size())
                    continue;
                auto rho = positional(a2, b);
                fresh.push_back(canon_pair(a, apply_renaming(b2, rho)));
            }
        // (5) cancellation across a shared symbol: an expansion of p meets a
        // contraction into q with eq-related children.
        for (const RewriteRule& exp : expansions) {
            const Term& ftree = exp.rhs;
            for (const RewriteRule& con : contractions) {
                if (con.lhs.name != ftree.name || con.lhs.args.size() != ftree.args.size())
                    continue;
                std::size_t n = ftree.args.size();
                // For each child pick an eq pair matching its expansion state.
                std::vector<std::vector<Term>> images(n);
                bool feasible = true;
                for (std::size_t i = 0; i < n && feasible; ++i) {
                    const Term& ci = ftree.args[i];
                    const Term& di = con.lhs.args[i];
                    for (const auto& [a, b] : t.eq) {
                        if (a.name != ci.name || a.args.size() != ci.args.size())
                            continue;
                        if (b.name != di.name || b.args.size() != di.args.size())
                            continue;
                        images[i].push_back(apply_renaming(b, positional(a, ci)));
                    }
                    feasible = !images[i].empty();
                }
                if (!feasible)
                    continue;
                std::vector<const Term*> picked(n);
                std::function<void(std::size_t)> go = [&](std::size_t i) {
                    if (i == n) {
                        std::map<std::string, std::string> theta;
                        for (std::size_t j = 0; j < n; ++j)
                            for (std::size_t k = 0; k < picked[j]->args.size(); ++k)
                                theta[con.lhs.args[j].args[k].name] =
                                    picked[j]->args[k].name;
                        fresh.push_back(
                            canon_pair(exp.lhs, apply_renaming(con.rhs, theta)));
                        return;
                    }
                    for (const Term& img : images[i]) {
                        picked[i] = &img;
                        go(i + 1);
                    }
                };
                go(0);
            }
        }
        for (auto& pair : fresh)
            if (t.eq.insert(std::move(pair)).second)
                changed = true;
    }
    return t;
}

namespace {

Trs triple_trs(const StateSystem& s, const std::vector<RewriteRule>& sym,
               const std::set<std::pair<Term, Term>>& eq, bool contracting) {
    Trs out;
    out.alphabet = s.ext_alphabet;
    out.rules = sym;
    for (const auto& [a, b] : eq)
        out.rules.push_back({a, b});
    // Variable rules of the matching family: the consuming phase opens a
    // consuming state below a variable, the producing phase closes one.
    if (contracting)
        for (const auto& [x, p] : s.consume_var)
            out.rules.push_back({Term::var(x), Term::app(p, {Term::var(x)})});
    else
        for (const auto& [q, x] : s.produce_var)
            out.rules.push_back({Term::app(q, {Term::var(x)}), Term::var(x)});
    std::set<std::string> vs(s.vars.begin(), s.vars.end());
    for (const RewriteRule& r : out.rules)
        for (const auto& x : vars_of(r.lhs))
            vs.insert(x);
    out.vars.assign(vs.begin(), vs.end());
    return out;
}

}  // namespace

Trs SaturationTriple::plus_eq_trs(const StateSystem& s) const {
    return triple_trs(s, plus, eq, /*contracting=*/true);
}

Trs SaturationTriple::minus_eq_trs(const StateSystem& s) const {
    return triple_trs(s, minus, eq, /*contracting=*/false);
}

// ---------------------------------------------------------------------------
// The derivation grammar.

namespace {

using PairKey = std::pair<TermWord, TermWord>;

int nonterminal_cap() {
    if (const char* env = std::getenv("RATRW_MAX_NONTERMINALS"))
        return std::max(1, std::atoi(env));
    return 20000;
}

/// Connected components of a state-word pair under shared variables; each
/// component keeps its positions in order and is a grammar non-terminal.
struct SplitPart {
    std::vector<int> upos;
    std::vector<int> vpos;
};

std::vector<SplitPart> split_pair(const TermWord& u, const TermWord& v) {
    int n = static_cast<int>(u.size()), m = static_cast<int>(v.size());
    std::vector<int> parent(n + m);
    for (int i = 0; i < n + m; ++i)
        parent[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
    std::map<std::string, int> owner;
    for (int i = 0; i < n + m; ++i) {
        const Term& t = i < n ? u[i] : v[i - n];
        for (const auto& x : vars_of(t)) {
            auto it = owner.find(x);
            if (it == owner.end())
                owner[x] = i;
            else
                unite(i, it->second);
        }
    }
    std::map<int, SplitPart> parts;
    for (int i = 0; i < n; ++i)
        parts[find(i)].upos.push_back(i);
    for (int j = 0; j < m; ++j)
        parts[find(n + j)].vpos.push_back(j);
    std::vector<SplitPart> out;
    for (auto& [root, part] : parts)
        out.push_back(std::move(part));
    return out;
}

struct SuffixBuilder {
    const StateSystem& sys;
    const SaturationTriple& triple;
    TupleGrammar g;
    std::map<PairKey, std::string> name_of;
    std::deque<PairKey> todo;
    int cap = nonterminal_cap();
    int counter = 0;
    std::set<std::string> consume_var_states;
    std::set<std::string> produce_var_states;

    SuffixBuilder(const StateSystem& s, const SaturationTriple& t) : sys(s), triple(t) {
        for (const auto& [x, p] : s.consume_var)
            consume_var_states.insert(p);
        for (const auto& [q, x] : s.produce_var)
            produce_var_states.insert(q);
    }

    std::string declare(const TermWord& u, const TermWord& v) {
        auto [cu, cv] = canonical_rename_pair(u, v);
        PairKey key{cu, cv};
        auto it = name_of.find(key);
        if (it != name_of.end())
            return it->second;
        if (static_cast<int>(name_of.size()) >= cap)
            throw VetoError("non-terminal cap exceeded (" + std::to_string(cap) +
                            "); raise RATRW_MAX_NONTERMINALS to go further");
        std::string name = "T" + std::to_string(counter++);
        name_of.emplace(key, name);
        int n = static_cast<int>(cu.size()), m = static_cast<int>(cv.size());
        g.nts.emplace(name, NonTerminal{name, n + m, n, m});
        todo.push_back(key);
        return name;
    }

    /// Build the production head -> body for moving to the pair (u, v),
    /// optionally emitting `f` around a range of fresh positions.
    void add_production(const std::string& head, const TermWord& u, const TermWord& v,
                        int wrap_side, int wrap_from, int wrap_count,
                        const std::string& f) {
        auto parts = split_pair(u, v);
        int n = static_cast<int>(u.size()), m = static_cast<int>(v.size());
        std::vector<Term> uvar(n), vvar(m);
        std::map<std::string, int> next_index;
        for (const SplitPart& part : parts) {
            TermWord pu, pv;
            for (int i : part.upos)
                pu.push_back(u[i]);
            for (int j : part.vpos)
                pv.push_back(v[j]);
            std::string nt = declare(pu, pv);
            int idx = ++next_index[nt];
            int comp = 0;
            for (int i : part.upos)
                uvar[i] = Term::var(instance_var_name(nt, idx, ++comp));
            for (int j : part.vpos)
                vvar[j] = Term::var(instance_var_name(nt, idx, ++comp));
        }
        Production p;
        p.head = head;
        auto emit_side = [&](const std::vector<Term>& vars, int side) {
            int count = static_cast<int>(vars.size());
            if (wrap_side != side) {
                for (int i = 0; i < count; ++i)
                    p.body.push_back(vars[i]);
                return;
            }
            for (int i = 0; i < wrap_from; ++i)
                p.body.push_back(vars[i]);
            std::vector<Term> children(vars.begin() + wrap_from,
                                       vars.begin() + wrap_from + wrap_count);
            p.body.push_back(Term::app(f, std::move(children)));
            for (int i = wrap_from + wrap_count; i < count; ++i)
                p.body.push_back(vars[i]);
        };
        emit_side(uvar, 1);
        emit_side(vvar, 2);
        g.prods.push_back(std::move(p));
    }

    void process(const PairKey& key) {
        const auto& [u, v] = key;
        const std::string& head = name_of.at(key);
        std::set<std::string> used;
        for (const auto& x : vars_of(u))
            used.insert(x);
        for (const auto& x : vars_of(v))
            used.insert(x);
        int fresh_counter = 0;
        auto fresh_var = [&]() {
            std::string x;
            do {
                x = "w" + std::to_string(++fresh_counter);
            } while (used.count(x));
            return x;
        };

        // Epsilon moves backward on the input side: replace an eq-pair's
        // right part by its left part.
        for (std::size_t k = 0; k < u.size(); ++k) {
            for (const auto& [a, b] : triple.eq) {
                if (b.name != u[k].name || b.args.size() != u[k].args.size())
                    continue;
                auto rho = positional(b, u[k]);
                // Variables of a that b dropped become fresh here.
                for (const auto& x : vars_of(a))
                    if (!rho.count(x))
                        rho[x] = fresh_var();
                Term replacement = apply_renaming(a, rho);
                if (replacement == u[k])
                    continue;
                TermWord nu = u;
                nu[k] = replacement;
                add_production(head, nu, v, 0, 0, 0, "");
            }
        }
        // Epsilon moves forward on the output side.
        for (std::size_t k = 0; k < v.size(); ++k) {
            for (const auto& [a, b] : triple.eq) {
                if (a.name != v[k].name || a.args.size() != v[k].args.size())
                    continue;
                auto rho = positional(a, v[k]);
                Term replacement = apply_renaming(b, rho);
                if (replacement == v[k])
                    continue;
                TermWord nv = v;
                nv[k] = replacement;
                add_production(head, u, nv, 0, 0, 0, "");
            }
        }
        // The input side unreads a consuming rule: u1 px u2 emits the symbol
        // the state consumed and continues with the child states.
        for (std::size_t k = 0; k < u.size(); ++k) {
            for (const RewriteRule& con : triple.plus) {
                if (con.rhs.name != u[k].name || con.rhs.args.size() != u[k].args.size())
                    continue;
                auto rho = positional(con.rhs, u[k]);
                for (const auto& x : vars_of(con.lhs))
                    if (!rho.count(x))
                        rho[x] = fresh_var();
                Term tree = apply_renaming(con.lhs, rho);
                TermWord nu(u.begin(), u.begin() + k);
                for (const Term& child : tree.args)
                    nu.push_back(child);
                nu.insert(nu.end(), u.begin() + k + 1, u.end());
                add_production(head, nu, v, 1, static_cast<int>(k),
                               static_cast<int>(tree.args.size()), tree.name);
            }
        }
        // The output side applies a producing rule.
        for (std::size_t k = 0; k < v.size(); ++k) {
            for (const RewriteRule& prod : triple.minus) {
                if (prod.lhs.name != v[k].name || prod.lhs.args.size() != v[k].args.size())
                    continue;
                auto rho = positional(prod.lhs, v[k]);
                Term tree = apply_renaming(prod.rhs, rho);
                TermWord nv(v.begin(), v.begin() + k);
                for (const Term& child : tree.args)
                    nv.push_back(child);
                nv.insert(nv.end(), v.begin() + k + 1, v.end());
                add_production(head, u, nv, 2, static_cast<int>(k),
                               static_cast<int>(tree.args.size()), tree.name);
            }
        }
        // Restarts between variable-linked leaves.
        if (u.size() == 1 && u[0].args.size() == 1 && u[0].args[0].is_var() &&
            consume_var_states.count(u[0].name)) {
            if (v.size() == 1 && v[0].args.size() == 1 && v[0].args[0] == u[0].args[0] &&
                produce_var_states.count(v[0].name)) {
                Production p;
                p.head = head;
                p.body = {Term::var(instance_var_name("I", 1, 1)),
                          Term::var(instance_var_name("I", 1, 2))};
                g.prods.push_back(std::move(p));
            }
            if (v.empty()) {
                Production p;
                p.head = head;
                p.body = {Term::var(instance_var_name("I'", 1, 1))};
                g.prods.push_back(std::move(p));
            }
        }
    }
};

}  // namespace

TupleGrammar build_suffix_grammar(const Trs& r) {
    if (!r.linear())
        throw VetoError("suffix construction requires a linear system");
    if (!r.rules.empty()) {
        Trs finite = r;
        finite.auto_rules.clear();
        ClassReport rep = classify(finite);
        if (!rep.classes.count(SystemClass::suffix)) {
            std::string why = rep.witnesses.count(SystemClass::suffix)
                                  ? rep.witnesses.at(SystemClass::suffix).second
                                  : "";
            throw VetoError("system is not suffix" + (why.empty() ? "" : ": " + why));
        }
    }
    StateSystem sys = to_state_system(r);
    SaturationTriple triple = saturate(sys);

    SuffixBuilder b(sys, triple);
    b.g.alphabet = r.alphabet;
    b.g.axiom = "I";
    b.g.nts.emplace("I", NonTerminal{"I", 2, 1, 1});
    b.g.nts.emplace("I'", NonTerminal{"I'", 1, 1, 0});
    for (const auto& [f, n] : r.alphabet.symbols()) {
        Production copy;
        copy.head = "I";
        std::vector<Term> in, out;
        for (int i = 1; i <= n; ++i) {
            in.push_back(Term::var(instance_var_name("I", i, 1)));
            out.push_back(Term::var(instance_var_name("I", i, 2)));
        }
        copy.body = {Term::app(f, in), Term::app(f, out)};
        b.g.prods.push_back(std::move(copy));
        Production prime;
        prime.head = "I'";
        std::vector<Term> args;
        for (int i = 1; i <= n; ++i)
            args.push_back(Term::var(instance_var_name("I'", i, 1)));
        prime.body = {Term::app(f, args)};
        b.g.prods.push_back(std::move(prime));
    }
    // Seeds: one axiom production per state-term pair px|px.
    for (const auto& [name, info] : sys.states) {
        Term st = state_term(name, info.nu);
        TermWord u{st}, v{st};
        auto parts = split_pair(u, v);
        std::vector<Term> uvar(1), vvar(1);
        std::map<std::string, int> next_index;
        for (const auto& part : parts) {
            TermWord pu, pv;
            for (int i : part.upos)
                pu.push_back(u[i]);
            for (int j : part.vpos)
                pv.push_back(v[j]);
            std::string nt = b.declare(pu, pv);
            int idx = ++next_index[nt];
            int comp = 0;
            for (int i : part.upos)
                uvar[i] = Term::var(instance_var_name(nt, idx, ++comp));
            for (int j : part.vpos)
                vvar[j] = Term::var(instance_var_name(nt, idx, ++comp));
        }
        Production p;
        p.head = "I";
        p.body = {uvar[0], vvar[0]};
        b.g.prods.push_back(std::move(p));
    }
    while (!b.todo.empty()) {
        PairKey key = b.todo.front();
        b.todo.pop_front();
        b.process(key);
    }

    // Deterministic names, then drop dead weight.
    std::map<std::string, std::string> rename;
    std::vector<std::pair<std::string, std::string>> signatures;
    for (const auto& [key, name] : b.name_of)
        signatures.emplace_back(format_word(key.first) + " | " + format_word(key.second),
                                name);
    std::sort(signatures.begin(), signatures.end());
    for (std::size_t i = 0; i < signatures.size(); ++i)
        rename[signatures[i].second] = "N" + std::to_string(i + 1);
    TupleGrammar g = tidy(b.g, rename);
    g = prune_unproductive(g);
    if (!g.nts.count("I")) {
        // No production survives; keep a well-formed empty-language grammar.
        g.nts.emplace("I", NonTerminal{"I", 2, 1, 1});
        g.axiom = "I";
    }
    std::set<std::string> live = reachable_nts(g, g.axiom);
    TupleGrammar out;
    out.alphabet = g.alphabet;
    out.axiom = g.axiom;
    for (const auto& [name, nt] : g.nts)
        if (live.count(name))
            out.nts.emplace(name, nt);
    for (const Production& p : g.prods)
        if (live.count(p.head))
            out.prods.push_back(p);
    auto violations = validate(out);
    if (!violations.empty())
        throw VetoError("internal: built suffix grammar invalid: " + violations.front());
    return out;
}

TreeAutomaton image_automaton_suffix(const Trs& r, const TreeAutomaton& a, bool inverse) {
    if (!RankedAlphabet::compatible(a.alphabet, r.alphabet))
        throw VetoError("automaton alphabet clashes with the system alphabet");
    TupleGrammar g = build_suffix_grammar(r);
    TupleGrammar product = synchronize(g, a, inverse ? 2 : 1);
    return project_split(product, inverse ? 1 : 2);
}

std::string format_triple(const StateSystem& s, const SaturationTriple& t) {
    std::ostringstream out;
    out << "alphabet:";
    for (const auto& [name, arity] : s.base_alphabet.symbols())
        out << " " << name << "/" << arity;
    out << "\nstates:";
    for (const auto& [name, info] : s.states)
        out << " " << name << "/" << info.nu.size();
    out << "\nvars:";
    std::set<std::string> vs(s.vars.begin(), s.vars.end());
    for (const auto& [a, b] : t.eq)
        for (const auto& x : vars_of(a))
            vs.insert(x);
    for (const auto& x : vs)
        out << " " << x;
    out << "\n";
    std::vector<std::string> lines;
    for (const RewriteRule& r : t.plus)
        lines.push_back("rplus: " + format_term(r.lhs) + " -> " + format_term(r.rhs));
    for (const RewriteRule& r : t.minus)
        lines.push_back("rminus: " + format_term(r.lhs) + " -> " + format_term(r.rhs));
    for (const auto& [a, b] : t.eq)
        lines.push_back("req: " + format_term(a) + " -> " + format_term(b));
    std::sort(lines.begin(), lines.end());
    for (const auto& l : lines)
        out << l << "\n";
    return out.str();
}

}  // namespace ratrw
