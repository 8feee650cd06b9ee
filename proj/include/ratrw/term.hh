#ifndef RATRW_TERM_HH
#define RATRW_TERM_HH

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace ratrw {

/// Parse failure with the byte offset of the offending token.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what), offset(offset) {}
    std::size_t offset;
};

/// A precondition rejected an input (wrong system class, unsupported rule
/// kind, ...). The CLI maps this to exit code 3.
struct VetoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite ranked alphabet. Symbol names are unique; hole names (`_1`, `_2`,
/// ...) are reserved and rejected.
class RankedAlphabet {
public:
    void add(const std::string& name, int arity);
    bool contains(const std::string& name) const;
    int arity_of(const std::string& name) const;
    bool has_constant() const;
    const std::vector<std::pair<std::string, int>>& symbols() const { return symbols_; }
    bool empty() const { return symbols_.empty(); }

    /// Union of two alphabets; arities must agree on common names.
    static RankedAlphabet merged(const RankedAlphabet& a, const RankedAlphabet& b);
    /// True if every symbol of `sub` occurs in `sup` with the same arity.
    static bool compatible(const RankedAlphabet& sub, const RankedAlphabet& sup);

private:
    std::vector<std::pair<std::string, int>> symbols_;
    std::map<std::string, int> index_;
};

/// Reserved context-hole names: `_i` with i >= 1.
bool is_hole_name(const std::string& name);
int hole_index(const std::string& name);
std::string hole_name(int index);

/// First-order term: a variable leaf or a symbol application. Contexts reuse
/// the same representation with nullary hole symbols `_1`, ..., `_n`.
struct Term {
    enum class Kind : unsigned char { var, app };
    Kind kind = Kind::app;
    std::string name;
    std::vector<Term> args;

    static Term var(std::string n);
    static Term app(std::string n, std::vector<Term> a = {});
    bool is_var() const { return kind == Kind::var; }
    bool is_app() const { return kind == Kind::app; }
};

int compare(const Term& a, const Term& b);
inline bool operator==(const Term& a, const Term& b) { return compare(a, b) == 0; }
inline bool operator!=(const Term& a, const Term& b) { return compare(a, b) != 0; }
inline bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }

using TermWord = std::vector<Term>;
using Substitution = std::map<std::string, Term>;

int compare(const TermWord& a, const TermWord& b);

/// Node count, variables included.
int term_size(const Term& t);
/// Size of a term word: one per component plus the component nodes.
int word_size(const TermWord& w);
/// Plain node count of a term word.
int word_nodes(const TermWord& w);

bool is_ground(const Term& t);
bool is_ground(const TermWord& w);
bool is_linear(const Term& t);
bool is_linear(const TermWord& w);

/// Variables in left-to-right first-occurrence order.
std::vector<std::string> vars_of(const Term& t);
std::vector<std::string> vars_of(const TermWord& w);
std::set<std::string> var_set(const Term& t);

// ---------------------------------------------------------------------------
// Positions. A position extends another when it lies below it; the paper's
// order p >= q holds iff q is a sequence prefix of p.

using Position = std::vector<int>;

bool position_le(const Position& q, const Position& p);  // q prefix of p
bool position_lt(const Position& q, const Position& p);  // strict
std::vector<Position> positions(const Term& t);
bool valid_position(const Term& t, const Position& p);
const Term& subterm_at(const Term& t, const Position& p);
Term replace_at(const Term& t, const Position& p, const Term& s);
std::string format_position(const Position& p);

// ---------------------------------------------------------------------------
// Substitution, matching, unification.

Term substitute(const Term& t, const Substitution& sigma);
TermWord substitute(const TermWord& w, const Substitution& sigma);

/// Matching: subject variables are inert constants. If a substitution is
/// returned, substitute(pattern, sigma) == subject.
std::optional<Substitution> match(const Term& pattern, const Term& subject);

/// Most general unifier with occurs check. Caller renames apart.
std::optional<Substitution> unify(const Term& s, const Term& t);

/// Rename variables to prefix1, prefix2, ... in first-occurrence order.
Term canonical_rename(const Term& t, const std::string& prefix = "x");
TermWord canonical_rename(const TermWord& w, const std::string& prefix = "x");
/// Rename a pair with one shared scheme (first occurrence across a then b).
std::pair<Term, Term> canonical_rename_pair(const Term& a, const Term& b);
std::pair<TermWord, TermWord> canonical_rename_pair(const TermWord& a, const TermWord& b);
/// True if a and b are equal after canonical renaming.
bool equal_up_to_renaming(const Term& a, const Term& b);

// ---------------------------------------------------------------------------
// Contexts: linear terms whose variables have been replaced by holes.

/// Replace the i-th variable occurrence (left to right) with hole _i.
/// Returns the context and the original variable names in order.
/// Throws VetoError on non-linear input.
std::pair<Term, std::vector<std::string>> to_context(const Term& t);

int count_holes(const Term& ctx);
/// Plug word[i-1] into hole _i.
Term plug(const Term& ctx, const TermWord& word);
/// Match a context against a term, holes acting as wildcards; returns the
/// captured subterms indexed by hole. Subject variables are inert.
std::optional<TermWord> context_match(const Term& ctx, const Term& subject);

// ---------------------------------------------------------------------------
// Concrete syntax: `f(t1,...,tn)`, nullary symbols bare.

Term parse_term(const std::string& text, const RankedAlphabet& alphabet,
                const std::set<std::string>& vars);
std::string format_term(const Term& t);
std::string format_word(const TermWord& w);

}  // namespace ratrw

#endif
