#ifndef RATRW_GRAMMAR_HH
#define RATRW_GRAMMAR_HH

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ratrw/automaton.hh"
#include "ratrw/term.hh"

namespace ratrw {

/// Component j of the i-th instance of a non-terminal; written `NT#i.j`.
struct InstanceRef {
    std::string nt;
    int instance = 0;
    int comp = 0;
};

std::optional<InstanceRef> instance_ref(const std::string& var_name);
std::string instance_var_name(const std::string& nt, int instance, int comp);

/// Non-terminal of arity split1+split2; the first split1 components belong to
/// the first projection when the grammar encodes a binary relation.
struct NonTerminal {
    std::string name;
    int arity = 0;
    int split1 = 0;
    int split2 = 0;
};

struct Production {
    std::string head;
    TermWord body;  // length = head arity; instance variables at leaves
};

struct TupleGrammar {
    RankedAlphabet alphabet;
    std::map<std::string, NonTerminal> nts;
    std::vector<Production> prods;
    std::string axiom;

    const NonTerminal& nt(const std::string& name) const;
};

/// Structural checks: declared heads, arity agreement, linearity of instance
/// variables, instance grouping (all components of a used instance occur
/// exactly once), instance variables only at leaves.
std::vector<std::string> validate(const TupleGrammar& g);

/// Ground tuples derivable from `axiom` whose total node count is at most
/// max_total. A non-negative comp_cap additionally prunes any tuple with a
/// single component larger than comp_cap; components never shrink during
/// derivation, so this is exact for component-bounded queries.
std::set<TermWord> enumerate_tuples(const TupleGrammar& g, const std::string& axiom,
                                    int max_total, int comp_cap = -1);

/// Exact membership of a ground tuple, by least-fixpoint goal decomposition.
bool contains_tuple(const TupleGrammar& g, const std::string& axiom, const TermWord& w);

/// Reorder every non-terminal so the second projection comes first.
TupleGrammar swap_projections(const TupleGrammar& g);

/// Keep only non-terminals that can derive a ground tuple, and productions
/// that mention no dead non-terminal.
TupleGrammar prune_unproductive(const TupleGrammar& g);
std::set<std::string> reachable_nts(const TupleGrammar& g, const std::string& axiom);

/// Forget the other projection and read the remaining components as unary
/// non-terminals of a regular tree grammar, i.e. a top-down automaton.
/// The caller is responsible for the grammar being component-splittable on
/// that side (the image constructions guarantee it after pruning).
TreeAutomaton project_split(const TupleGrammar& g, int side);

/// Product of a relation grammar with a tree automaton on one projection:
/// non-terminals become (base, state word over that side's components), and
/// each production is instantiated once per partial run of `a` over its
/// side trees. The result generates exactly the pairs of L(g) whose chosen
/// side is accepted by `a`.
TupleGrammar synchronize(const TupleGrammar& g, const TreeAutomaton& a, int side);

/// Deterministic renaming of non-terminals (sorted by their production-free
/// signature) plus sorted productions; used before emitting files.
TupleGrammar tidy(const TupleGrammar& g, const std::map<std::string, std::string>& rename);

TupleGrammar parse_grammar(const std::string& text);
std::string format_grammar(const TupleGrammar& g);

// ---------------------------------------------------------------------------
// Explicit finite tuple languages and the rational operations on them.

struct TupleLanguage {
    int length = 0;
    std::set<TermWord> tuples;
};

/// Replace each instance of the variable word x in every member of L with a
/// (possibly different) member of M. Occurrences of x's variables are grouped
/// into instances in left-to-right order per variable; every variable of x
/// must occur equally often. Members whose word size (components plus nodes)
/// exceeds max_total are dropped when max_total is non-negative.
TupleLanguage subst_product(const TupleLanguage& l, const std::vector<std::string>& x,
                            const TupleLanguage& m, int max_total = -1);

/// Union of all iterated substitution powers, starting from the identity
/// tuple (x itself), truncated at max_total.
TupleLanguage iterate_subst(const TupleLanguage& l, const std::vector<std::string>& x,
                            int max_total);

}  // namespace ratrw

#endif
