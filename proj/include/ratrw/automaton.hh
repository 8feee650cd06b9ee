#ifndef RATRW_AUTOMATON_HH
#define RATRW_AUTOMATON_HH

#include <set>
#include <string>
#include <vector>

#include "ratrw/term.hh"

namespace ratrw {

/// One transition q f -> f q1 ... qn of a top-down tree automaton.
struct AutomatonRule {
    std::string state;
    std::string symbol;
    std::vector<std::string> children;
};

int compare(const AutomatonRule& a, const AutomatonRule& b);
inline bool operator<(const AutomatonRule& a, const AutomatonRule& b) { return compare(a, b) < 0; }
inline bool operator==(const AutomatonRule& a, const AutomatonRule& b) { return compare(a, b) == 0; }

/// Nondeterministic top-down tree automaton with a set of initial states.
struct TreeAutomaton {
    RankedAlphabet alphabet;
    std::set<std::string> states;
    std::set<std::string> initial;
    std::vector<AutomatonRule> rules;

    void add_rule(const std::string& state, const std::string& symbol,
                  std::vector<std::string> children);
    /// Declared states referenced by rules must exist; rule arity must match.
    void check() const;
};

/// Whether some run relabels the ground term t from an initial state.
bool accepts(const TreeAutomaton& a, const Term& t);
bool accepts_from(const TreeAutomaton& a, const std::string& state, const Term& t);

/// Every accepted ground term of size <= max_size.
std::set<Term> enumerate_language(const TreeAutomaton& a, int max_size);

/// True iff no ground term is accepted.
bool is_empty(const TreeAutomaton& a);

/// Partial runs over an open forest: start rule application at forest root i
/// in state initial[i]; a run stops at each variable leaf, recording the state
/// reached there. Returns all final state words, aligned with the variable
/// occurrences in left-to-right order across the forest.
std::set<std::vector<std::string>> run_forest(const TreeAutomaton& a,
                                              const std::vector<std::string>& initial,
                                              const TermWord& forest);

TreeAutomaton parse_automaton(const std::string& text);
std::string format_automaton(const TreeAutomaton& a);

}  // namespace ratrw

#endif
