#ifndef RATRW_CLASSIFY_HH
#define RATRW_CLASSIFY_HH

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ratrw/trs.hh"

namespace ratrw {

enum class OverlapKind { root, lhs_inside_rhs, rhs_inside_lhs };

/// A unifiable overlap between the right-hand side of one rule and the
/// left-hand side of another, after renaming apart.
struct Overlap {
    int rhs_rule = -1;
    int lhs_rule = -1;
    OverlapKind kind = OverlapKind::root;
    Position pos;          // in the host term (rhs for lhs_inside_rhs, lhs otherwise)
    Substitution unifier;  // over the renamed-apart pair
};

enum class SystemClass { top_down, bottom_up, prefix, suffix };

std::string class_name(SystemClass c);

struct ClassReport {
    std::set<SystemClass> classes;
    /// One violating overlap per rejected class, with a short reason.
    std::map<SystemClass, std::pair<Overlap, std::string>> witnesses;
};

/// Overlaps between a right-hand side r and a left-hand side l (renamed
/// apart by the caller): unification at the non-variable positions of the
/// host. Root overlaps are reported once, as kind root.
std::vector<Overlap> critical_overlaps(const Term& r, const Term& l);

ClassReport classify(const Trs& r);

std::string format_report(const ClassReport& rep, const Trs& r);

// ---------------------------------------------------------------------------
// Turing machines and their prefix-system encoding.

struct TmTransition {
    std::string from;
    std::string read;  // tape symbol or "#"
    std::string to;
    std::string write;  // tape symbol
    bool move_right = true;
};

struct TuringMachine {
    std::vector<std::string> states;
    std::vector<std::string> tape;
    std::vector<TmTransition> transitions;
    void check() const;
};

/// States become binary symbols, tape symbols unary, and the blank splits
/// into the nullary end marker #0 and the unary #1.
Trs encode_turing_machine(const TuringMachine& m);

TuringMachine parse_tm(const std::string& text);

}  // namespace ratrw

#endif
