#include "ratrw/topdown.hh"

#include <algorithm>
#include <functional>
#include <map>

#include "ratrw/classify.hh"

namespace ratrw {

namespace {

void require_topdown(const Trs& r) {
    if (r.has_auto_rules())
        throw VetoError("top-down construction requires a finite system");
    if (!r.linear())
        throw VetoError("top-down construction requires a linear system");
    ClassReport rep = classify(r);
    if (!rep.classes.count(SystemClass::top_down)) {
        std::string why = rep.witnesses.count(SystemClass::top_down)
                              ? rep.witnesses.at(SystemClass::top_down).second
                              : "";
        throw VetoError("system is not top-down" + (why.empty() ? "" : ": " + why));
    }
}

bool context_less(const Term& a, const Term& b) {
    int sa = term_size(a), sb = term_size(b);
    if (sa != sb)
        return sa < sb;
    return compare(a, b) < 0;
}

/// Positions of a context covered by symbols (everything except holes).
std::set<Position> cover(const Term& ctx) {
    std::set<Position> out;
    for (const Position& p : positions(ctx))
        if (!is_hole_name(subterm_at(ctx, p).name))
            out.insert(p);
    return out;
}

/// Renumber a captured piece's holes to 1..k, preserving order. Captured
/// pieces keep the host's global hole numbers, which are contiguous and
/// ascending left to right within the piece.
Term renumber_holes(const Term& piece, int offset) {
    if (piece.is_app() && is_hole_name(piece.name))
        return Term::app(hole_name(hole_index(piece.name) - offset));
    Term out = piece;
    for (std::size_t i = 0; i < out.args.size(); ++i)
        out.args[i] = renumber_holes(piece.args[i], offset);
    return out;
}

int min_hole(const Term& piece) {
    if (piece.is_app() && is_hole_name(piece.name))
        return hole_index(piece.name);
    int best = -1;
    for (const Term& a : piece.args) {
        int h = min_hole(a);
        if (h >= 0 && (best < 0 || h < best))
            best = h;
    }
    return best;
}

struct NameTable {
    std::map<Term, std::string> of_context;
    std::string any;
};

NameTable make_names(const std::vector<Term>& overlaps) {
    NameTable t;
    for (std::size_t i = 0; i < overlaps.size(); ++i) {
        std::string name;
        if (i < 26)
            name = std::string(1, static_cast<char>('A' + i));
        else
            name = "N" + std::to_string(i);
        t.of_context[overlaps[i]] = name;
    }
    t.any = "Any";
    return t;
}

}  // namespace

std::vector<Term> overlap_set(const Trs& r) {
    require_topdown(r);
    std::set<Term> set;
    set.insert(Term::app(hole_name(1)));
    std::vector<Term> lhss;
    for (const RewriteRule& rule : r.rules)
        lhss.push_back(canonical_rename(rule.lhs, "y"));
    for (const RewriteRule& rule : r.rules) {
        Term rhs = canonical_rename(rule.rhs, "x");
        for (const Position& p : positions(rhs)) {
            Term ctx = to_context(subterm_at(rhs, p)).first;
            bool prefix_of_lhs = std::any_of(lhss.begin(), lhss.end(), [&](const Term& l) {
                return context_match(ctx, l).has_value();
            });
            if (prefix_of_lhs)
                set.insert(ctx);
        }
    }
    std::vector<Term> out(set.begin(), set.end());
    std::sort(out.begin(), out.end(), context_less);
    return out;
}

TupleGrammar build_grammar(const Trs& r) {
    std::vector<Term> overlaps = overlap_set(r);
    std::set<Term> oset(overlaps.begin(), overlaps.end());
    NameTable names = make_names(overlaps);

    TupleGrammar g;
    g.alphabet = r.alphabet;
    for (const Term& ctx : overlaps) {
        int n = count_holes(ctx);
        const std::string& name = names.of_context.at(ctx);
        g.nts.emplace(name, NonTerminal{name, n + 1, n, 1});
    }
    g.nts.emplace(names.any, NonTerminal{names.any, 1, 1, 0});
    Term hole = Term::app(hole_name(1));
    g.axiom = names.of_context.at(hole);

    // Type (1): copy rules for the hole non-terminal and the any-tree one.
    for (const auto& [f, n] : r.alphabet.symbols()) {
        Production copy;
        copy.head = g.axiom;
        std::vector<Term> in, outv;
        for (int i = 1; i <= n; ++i) {
            in.push_back(Term::var(instance_var_name(g.axiom, i, 1)));
            outv.push_back(Term::var(instance_var_name(g.axiom, i, 2)));
        }
        copy.body = {Term::app(f, in), Term::app(f, outv)};
        g.prods.push_back(std::move(copy));

        Production any;
        any.head = names.any;
        std::vector<Term> args;
        for (int i = 1; i <= n; ++i)
            args.push_back(Term::var(instance_var_name(names.any, i, 1)));
        any.body = {Term::app(f, args)};
        g.prods.push_back(std::move(any));
    }

    // Types (2) and (3): shifting between nested overlap contexts.
    for (const Term& small : overlaps) {
        for (const Term& big : overlaps) {
            auto pieces = context_match(small, big);
            if (!pieces)
                continue;
            int m = count_holes(big);
            const std::string& sname = names.of_context.at(small);
            const std::string& bname = names.of_context.at(big);
            if (small != big) {
                // (2): read the extension on the input side, delegate.
                Production p;
                p.head = sname;
                for (const Term& piece : *pieces) {
                    std::function<Term(const Term&)> fill = [&](const Term& t) -> Term {
                        if (t.is_app() && is_hole_name(t.name))
                            return Term::var(
                                instance_var_name(bname, 1, hole_index(t.name)));
                        Term o = t;
                        for (std::size_t i = 0; i < o.args.size(); ++i)
                            o.args[i] = fill(t.args[i]);
                        return o;
                    };
                    p.body.push_back(fill(piece));
                }
                p.body.push_back(Term::var(instance_var_name(bname, 1, m + 1)));
                g.prods.push_back(std::move(p));
            }
            if (small != hole) {
                // (3): emit the inner context on the output side, one
                // instance per captured piece; pieces must be overlaps too.
                bool all_in = true;
                std::vector<std::pair<Term, int>> canon;  // piece, hole offset
                for (const Term& piece : *pieces) {
                    int lo = min_hole(piece);
                    Term c = lo < 0 ? piece : renumber_holes(piece, lo - 1);
                    if (!oset.count(c)) {
                        all_in = false;
                        break;
                    }
                    canon.emplace_back(c, lo);
                }
                if (!all_in)
                    continue;
                Production p;
                p.head = bname;
                std::map<std::string, int> next_index;
                std::vector<Term> out_fill;
                for (const auto& [piece, lo] : canon) {
                    const std::string& pname = names.of_context.at(piece);
                    int idx = ++next_index[pname];
                    int holes = count_holes(piece);
                    for (int c = 1; c <= holes; ++c)
                        p.body.push_back(Term::var(instance_var_name(pname, idx, c)));
                    out_fill.push_back(Term::var(instance_var_name(pname, idx, holes + 1)));
                }
                p.body.push_back(plug(small, out_fill));
                g.prods.push_back(std::move(p));
            }
        }
    }

    // Type (4): one production per rule, maximal decomposition on both sides.
    for (const RewriteRule& rule : r.rules) {
        // Maximal overlap prefix of the left-hand side.
        std::vector<std::pair<Term, std::set<Position>>> matching;
        for (const Term& ctx : overlaps)
            if (context_match(ctx, rule.lhs))
                matching.emplace_back(ctx, cover(ctx));
        std::vector<std::size_t> maximal;
        for (std::size_t i = 0; i < matching.size(); ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < matching.size() && !dominated; ++j)
                if (i != j &&
                    std::includes(matching[j].second.begin(), matching[j].second.end(),
                                  matching[i].second.begin(), matching[i].second.end()) &&
                    matching[j].second != matching[i].second)
                    dominated = true;
            if (!dominated)
                maximal.push_back(i);
        }
        if (maximal.size() != 1)
            throw VetoError("rule " + format_term(rule.lhs) + " -> " + format_term(rule.rhs) +
                            " has no unique maximal overlap decomposition of its left-hand "
                            "side");
        const Term& t = matching[maximal.front()].first;
        TermWord u = *context_match(t, rule.lhs);

        // Greedy top-most decomposition of the right-hand side into overlap
        // pieces; ground parts that match nothing stay in the output part.
        struct Cut {
            Position pos;
            Term piece;                      // canonical context
            std::vector<std::string> vars;  // rhs variables under the cut, in order
        };
        std::vector<Cut> cuts;
        std::function<void(const Term&, Position&)> dissect = [&](const Term& sub,
                                                                  Position& at) {
            auto [ctx, vars] = to_context(sub);
            if (oset.count(ctx)) {
                cuts.push_back({at, ctx, vars});
                return;
            }
            if (sub.is_var()) {
                // to_context of a variable is the hole, which is always an
                // overlap, so this cannot be reached.
                throw VetoError("uncovered variable in right-hand side decomposition");
            }
            for (std::size_t i = 0; i < sub.args.size(); ++i) {
                at.push_back(static_cast<int>(i) + 1);
                dissect(sub.args[i], at);
                at.pop_back();
            }
        };
        Position root;
        dissect(rule.rhs, root);

        Production p;
        p.head = names.of_context.at(t);
        std::map<std::string, int> next_index;
        std::map<std::string, Term> sigma;  // lhs variable -> instance component
        Term out_side = rule.rhs;
        // Later cuts first so positions stay valid while substituting.
        for (auto it = cuts.rbegin(); it != cuts.rend(); ++it)
            out_side = replace_at(out_side, it->pos, Term::var("!cut" + format_position(it->pos)));
        std::map<std::string, Term> cut_fill;
        for (const Cut& c : cuts) {
            const std::string& pname = names.of_context.at(c.piece);
            int idx = ++next_index[pname];
            for (std::size_t j = 0; j < c.vars.size(); ++j)
                sigma[c.vars[j]] =
                    Term::var(instance_var_name(pname, idx, static_cast<int>(j) + 1));
            cut_fill["!cut" + format_position(c.pos)] = Term::var(
                instance_var_name(pname, idx, static_cast<int>(c.vars.size()) + 1));
        }
        for (const std::string& x : vars_of(rule.lhs))
            if (!sigma.count(x)) {
                int idx = ++next_index[names.any];
                sigma[x] = Term::var(instance_var_name(names.any, idx, 1));
            }
        for (const Term& ui : u)
            p.body.push_back(substitute(ui, sigma));
        p.body.push_back(substitute(out_side, cut_fill));
        g.prods.push_back(std::move(p));
    }

    auto violations = validate(g);
    if (!violations.empty())
        throw VetoError("internal: built grammar invalid: " + violations.front());
    return g;
}

TreeAutomaton image_automaton(const Trs& r, const TreeAutomaton& a) {
    if (!RankedAlphabet::compatible(a.alphabet, r.alphabet))
        throw VetoError("automaton alphabet clashes with the system alphabet");
    TupleGrammar g = build_grammar(r);
    TupleGrammar product = synchronize(g, a, 1);
    return project_split(product, 2);
}

TupleGrammar build_bottomup(const Trs& r) {
    Trs inv = r.inverse(/*check_vars=*/true);
    TupleGrammar g;
    try {
        g = build_grammar(inv);
    } catch (const VetoError&) {
        throw VetoError("system is not bottom-up");
    }
    return swap_projections(g);
}

TreeAutomaton inverse_image_automaton(const Trs& r, const TreeAutomaton& a) {
    if (!RankedAlphabet::compatible(a.alphabet, r.alphabet))
        throw VetoError("automaton alphabet clashes with the system alphabet");
    Trs inv = r.inverse(/*check_vars=*/true);
    TupleGrammar g;
    try {
        g = build_grammar(inv);
    } catch (const VetoError&) {
        throw VetoError("system is not bottom-up");
    }
    TupleGrammar product = synchronize(g, a, 1);
    return project_split(product, 2);
}

}  // namespace ratrw
