#ifndef RATRW_TRS_HH
#define RATRW_TRS_HH

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ratrw/automaton.hh"
#include "ratrw/term.hh"

namespace ratrw {

struct RewriteRule {
    Term lhs;
    Term rhs;
    bool linear() const { return is_linear(lhs) && is_linear(rhs); }
    /// Var(rhs) must be contained in Var(lhs).
    void check() const;
};

/// Recognizable rule set: every pair in L(lhs_lang) x L(rhs_lang) is a rule.
/// The automata run over the term alphabet extended with the system variables
/// as nullary symbols.
struct AutoRule {
    TreeAutomaton lhs_lang;
    TreeAutomaton rhs_lang;
};

struct Trs {
    RankedAlphabet alphabet;
    std::vector<std::string> vars;
    std::vector<RewriteRule> rules;
    std::vector<AutoRule> auto_rules;

    std::set<std::string> var_set() const { return {vars.begin(), vars.end()}; }
    bool linear() const;
    bool has_auto_rules() const { return !auto_rules.empty(); }
    void check() const;

    /// Raw lhs/rhs swap; set check_vars to enforce the Var(rhs) <= Var(lhs)
    /// invariant on the result (needed when the inverse is rewritten with).
    Trs inverse(bool check_vars = false) const;
};

struct RewriteStep {
    int rule;  // index into rules
    Position pos;
    Substitution sigma;
};

/// All one-step successors of t, with the step that produced each.
std::vector<std::pair<Term, RewriteStep>> rewrite_step(const Trs& r, const Term& t);

/// Replays a step sequence from t; throws if a step does not apply.
Term replay(const Trs& r, const Term& t, const std::vector<RewriteStep>& steps);

struct ReachBounds {
    int max_steps = -1;  // negative: run to the bounded fixpoint
    int max_size = 1 << 20;
};

/// Bounded closure of rewrite_step. Sound unconditionally; complete only
/// within the given bounds. Always contains t.
std::set<Term> reachable(const Trs& r, const Term& t, const ReachBounds& bounds);

/// Closure under steps whose positions never move strictly above an earlier
/// one, and where a step repeated at the same position must not have a bare
/// variable as left-hand side.
std::set<Term> topdown_reachable(const Trs& r, const Term& t, const ReachBounds& bounds);

/// Closure under steps whose matching substitution is a bijective variable
/// renaming (no proper terms substituted).
std::set<Term> suffix_reachable(const Trs& r, const Term& t, const ReachBounds& bounds);

/// TRS file format; `dir` resolves autorule file references.
Trs parse_trs(const std::string& text, const std::string& dir = ".");
std::string format_trs(const Trs& r);

}  // namespace ratrw

#endif
