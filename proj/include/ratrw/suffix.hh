#ifndef RATRW_SUFFIX_HH
#define RATRW_SUFFIX_HH

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ratrw/grammar.hh"
#include "ratrw/trs.hh"

namespace ratrw {

/// A state of the normalized system: a ranked symbol whose arity is the
/// length of its variable boundary.
struct StateInfo {
    std::string name;
    std::vector<std::string> nu;  // frontier variable word
    bool from_lhs = true;         // consuming (lhs-side) or producing state
};

/// The system R' over F extended with states: consuming rules contract a
/// left-hand side upward into a state, producing rules expand a state into
/// a right-hand side, bridges connect initial state pairs, and the variable
/// rules x -> p(x) / q(x) -> x open and close variable boundaries.
struct StateSystem {
    RankedAlphabet base_alphabet;
    RankedAlphabet ext_alphabet;
    std::vector<std::string> vars;
    std::map<std::string, StateInfo> states;
    std::vector<RewriteRule> consume_sym;  // f(p1(..),..,pm(..)) -> p(..)
    std::vector<RewriteRule> produce_sym;  // q(..) -> f(q1(..),..,qm(..))
    std::vector<RewriteRule> bridge;       // p0(..) -> q0(..)
    std::vector<std::pair<std::string, std::string>> consume_var;  // (x, p): x -> p(x)
    std::vector<std::pair<std::string, std::string>> produce_var;  // (q, x): q(x) -> x

    /// R' as one rewriting system (variable rules included).
    Trs as_trs() const;
};

/// Normalizes a linear system: finite rules are compiled into single-run
/// automata (one state per position), recognizable rules use their automata
/// directly. Fails when some state's variable boundary is not a single word.
StateSystem to_state_system(const Trs& r);

/// Lemma-shaped rule triple. `plus` holds the consuming contractions
/// f(..) -> p(..), `minus` the producing expansions q(..) -> f(..), and `eq`
/// the saturated state-to-state pairs that bridge the two phases.
struct SaturationTriple {
    std::vector<RewriteRule> plus;
    std::vector<RewriteRule> minus;
    std::set<std::pair<Term, Term>> eq;  // canonical pairs

    Trs plus_eq_trs(const StateSystem& s) const;   // R+ together with R=
    Trs minus_eq_trs(const StateSystem& s) const;  // R- together with R=
};

/// Least fixpoint of reflexivity, bridge inclusion, renaming closure,
/// transitivity and cancellation across a shared symbol (including the
/// variable rules as a degenerate shared symbol).
SaturationTriple saturate(const StateSystem& s);

/// Derivation grammar of a linear suffix system: the identity non-terminals
/// I and I', one non-terminal per non-splittable state-word pair u|v, with
/// epsilon moves along eq-pairs, expansion/contraction productions, and the
/// restart rules between variable-linked leaves.
TupleGrammar build_suffix_grammar(const Trs& r);

/// Image (or inverse image when `inverse` is set) of L(a) under the
/// derivation of a linear suffix system.
TreeAutomaton image_automaton_suffix(const Trs& r, const TreeAutomaton& a, bool inverse);

/// TRS-like presentation of a saturation triple, with a `states:` section.
std::string format_triple(const StateSystem& s, const SaturationTriple& t);

}  // namespace ratrw

#endif
