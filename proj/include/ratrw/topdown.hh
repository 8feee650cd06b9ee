#ifndef RATRW_TOPDOWN_HH
#define RATRW_TOPDOWN_HH

#include "ratrw/grammar.hh"
#include "ratrw/trs.hh"

namespace ratrw {

/// Contexts occurring both as a subterm context of some right-hand side and
/// as a root prefix of some left-hand side, plus the trivial hole. Sorted
/// canonically (hole first). Vetoes systems that are not finite, linear and
/// top-down.
std::vector<Term> overlap_set(const Trs& r);

/// Derivation grammar of a finite linear top-down system: one non-terminal
/// per overlap context (components: its holes plus one output tree), the
/// unary any-tree non-terminal, and the copy/shift/unshift/rule production
/// families. The axiom generates exactly the derivation pairs.
TupleGrammar build_grammar(const Trs& r);

/// Automaton for the forward image of L(a) under the derivation.
TreeAutomaton image_automaton(const Trs& r, const TreeAutomaton& a);

/// Derivation grammar of a bottom-up system: the top-down grammar of the
/// inverse with both projections swapped.
TupleGrammar build_bottomup(const Trs& r);

/// Automaton for the inverse image of L(a) under a bottom-up derivation.
TreeAutomaton inverse_image_automaton(const Trs& r, const TreeAutomaton& a);

}  // namespace ratrw

#endif
