#include "ratrw/term.hh"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace ratrw {

void RankedAlphabet::add(const std::string& name, int arity) {
    if (name.empty())
        throw VetoError("empty symbol name");
    if (is_hole_name(name))
        throw VetoError("symbol name '" + name + "' is reserved for context holes");
    if (arity < 0)
        throw VetoError("negative arity for symbol '" + name + "'");
    auto it = index_.find(name);
    if (it != index_.end()) {
        if (symbols_[it->second].second != arity)
            throw VetoError("symbol '" + name + "' redeclared with different arity");
        return;
    }
    index_[name] = static_cast<int>(symbols_.size());
    symbols_.emplace_back(name, arity);
}

bool RankedAlphabet::contains(const std::string& name) const {
    return index_.count(name) != 0;
}

int RankedAlphabet::arity_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end())
        throw VetoError("unknown symbol '" + name + "'");
    return symbols_[it->second].second;
}

bool RankedAlphabet::has_constant() const {
    for (const auto& [name, arity] : symbols_)
        if (arity == 0)
            return true;
    return false;
}

RankedAlphabet RankedAlphabet::merged(const RankedAlphabet& a, const RankedAlphabet& b) {
    RankedAlphabet out = a;
    for (const auto& [name, arity] : b.symbols())
        out.add(name, arity);
    return out;
}

bool RankedAlphabet::compatible(const RankedAlphabet& sub, const RankedAlphabet& sup) {
    for (const auto& [name, arity] : sub.symbols())
        if (!sup.contains(name) || sup.arity_of(name) != arity)
            return false;
    return true;
}

bool is_hole_name(const std::string& name) {
    if (name.size() < 2 || name[0] != '_')
        return false;
    for (std::size_t i = 1; i < name.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(name[i])))
            return false;
    return true;
}

int hole_index(const std::string& name) {
    return std::stoi(name.substr(1));
}

std::string hole_name(int index) {
    return "_" + std::to_string(index);
}

Term Term::var(std::string n) {
    Term t;
    t.kind = Kind::var;
    t.name = std::move(n);
    return t;
}

Term Term::app(std::string n, std::vector<Term> a) {
    Term t;
    t.kind = Kind::app;
    t.name = std::move(n);
    t.args = std::move(a);
    return t;
}

int compare(const Term& a, const Term& b) {
    if (a.kind != b.kind)
        return a.kind == Term::Kind::var ? -1 : 1;
    if (int c = a.name.compare(b.name); c != 0)
        return c < 0 ? -1 : 1;
    if (a.args.size() != b.args.size())
        return a.args.size() < b.args.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (int c = compare(a.args[i], b.args[i]); c != 0)
            return c;
    return 0;
}

int compare(const TermWord& a, const TermWord& b) {
    if (a.size() != b.size())
        return a.size() < b.size() ? -1 : 1;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (int c = compare(a[i], b[i]); c != 0)
            return c;
    return 0;
}

int term_size(const Term& t) {
    int n = 1;
    for (const Term& a : t.args)
        n += term_size(a);
    return n;
}

int word_size(const TermWord& w) {
    int n = static_cast<int>(w.size());
    for (const Term& t : w)
        n += term_size(t);
    return n;
}

int word_nodes(const TermWord& w) {
    int n = 0;
    for (const Term& t : w)
        n += term_size(t);
    return n;
}

bool is_ground(const Term& t) {
    if (t.is_var())
        return false;
    for (const Term& a : t.args)
        if (!is_ground(a))
            return false;
    return true;
}

bool is_ground(const TermWord& w) {
    return std::all_of(w.begin(), w.end(), [](const Term& t) { return is_ground(t); });
}

static void collect_vars(const Term& t, std::vector<std::string>& out,
                         std::set<std::string>& seen) {
    if (t.is_var()) {
        if (seen.insert(t.name).second)
            out.push_back(t.name);
        return;
    }
    for (const Term& a : t.args)
        collect_vars(a, out, seen);
}

std::vector<std::string> vars_of(const Term& t) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    collect_vars(t, out, seen);
    return out;
}

std::vector<std::string> vars_of(const TermWord& w) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const Term& t : w)
        collect_vars(t, out, seen);
    return out;
}

std::set<std::string> var_set(const Term& t) {
    auto v = vars_of(t);
    return std::set<std::string>(v.begin(), v.end());
}

static bool linear_walk(const Term& t, std::set<std::string>& seen) {
    if (t.is_var())
        return seen.insert(t.name).second;
    for (const Term& a : t.args)
        if (!linear_walk(a, seen))
            return false;
    return true;
}

bool is_linear(const Term& t) {
    std::set<std::string> seen;
    return linear_walk(t, seen);
}

bool is_linear(const TermWord& w) {
    std::set<std::string> seen;
    for (const Term& t : w)
        if (!linear_walk(t, seen))
            return false;
    return true;
}

bool position_le(const Position& q, const Position& p) {
    if (q.size() > p.size())
        return false;
    return std::equal(q.begin(), q.end(), p.begin());
}

bool position_lt(const Position& q, const Position& p) {
    return q.size() < p.size() && position_le(q, p);
}

static void collect_positions(const Term& t, Position& cur, std::vector<Position>& out) {
    out.push_back(cur);
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        cur.push_back(static_cast<int>(i) + 1);
        collect_positions(t.args[i], cur, out);
        cur.pop_back();
    }
}

std::vector<Position> positions(const Term& t) {
    std::vector<Position> out;
    Position cur;
    collect_positions(t, cur, out);
    return out;
}

bool valid_position(const Term& t, const Position& p) {
    const Term* cur = &t;
    for (int i : p) {
        if (i < 1 || static_cast<std::size_t>(i) > cur->args.size())
            return false;
        cur = &cur->args[i - 1];
    }
    return true;
}

const Term& subterm_at(const Term& t, const Position& p) {
    const Term* cur = &t;
    for (int i : p) {
        if (i < 1 || static_cast<std::size_t>(i) > cur->args.size())
            throw VetoError("invalid position " + format_position(p) + " in " + format_term(t));
        cur = &cur->args[i - 1];
    }
    return *cur;
}

Term replace_at(const Term& t, const Position& p, const Term& s) {
    if (p.empty())
        return s;
    if (p.front() < 1 || static_cast<std::size_t>(p.front()) > t.args.size())
        throw VetoError("invalid position " + format_position(p) + " in " + format_term(t));
    Term out = t;
    Position rest(p.begin() + 1, p.end());
    out.args[p.front() - 1] = replace_at(t.args[p.front() - 1], rest, s);
    return out;
}

std::string format_position(const Position& p) {
    if (p.empty())
        return "eps";
    std::string out = "[";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i)
            out += ",";
        out += std::to_string(p[i]);
    }
    return out + "]";
}

Term substitute(const Term& t, const Substitution& sigma) {
    if (t.is_var()) {
        auto it = sigma.find(t.name);
        return it == sigma.end() ? t : it->second;
    }
    Term out;
    out.kind = Term::Kind::app;
    out.name = t.name;
    out.args.reserve(t.args.size());
    for (const Term& a : t.args)
        out.args.push_back(substitute(a, sigma));
    return out;
}

TermWord substitute(const TermWord& w, const Substitution& sigma) {
    TermWord out;
    out.reserve(w.size());
    for (const Term& t : w)
        out.push_back(substitute(t, sigma));
    return out;
}

static bool match_walk(const Term& pattern, const Term& subject, Substitution& sigma) {
    if (pattern.is_var()) {
        auto it = sigma.find(pattern.name);
        if (it != sigma.end())
            return it->second == subject;
        sigma[pattern.name] = subject;
        return true;
    }
    if (subject.is_var() || pattern.name != subject.name ||
        pattern.args.size() != subject.args.size())
        return false;
    for (std::size_t i = 0; i < pattern.args.size(); ++i)
        if (!match_walk(pattern.args[i], subject.args[i], sigma))
            return false;
    return true;
}

std::optional<Substitution> match(const Term& pattern, const Term& subject) {
    Substitution sigma;
    if (!match_walk(pattern, subject, sigma))
        return std::nullopt;
    return sigma;
}

static bool occurs(const std::string& x, const Term& t) {
    if (t.is_var())
        return t.name == x;
    for (const Term& a : t.args)
        if (occurs(x, a))
            return true;
    return false;
}

static bool unify_walk(Term s, Term t, Substitution& sigma) {
    s = substitute(s, sigma);
    t = substitute(t, sigma);
    if (s.is_var() && t.is_var() && s.name == t.name)
        return true;
    if (s.is_var() || t.is_var()) {
        if (t.is_var())
            std::swap(s, t);
        if (occurs(s.name, t))
            return false;
        Substitution bind{{s.name, t}};
        for (auto& [k, v] : sigma)
            v = substitute(v, bind);
        sigma[s.name] = t;
        return true;
    }
    if (s.name != t.name || s.args.size() != t.args.size())
        return false;
    for (std::size_t i = 0; i < s.args.size(); ++i)
        if (!unify_walk(s.args[i], t.args[i], sigma))
            return false;
    return true;
}

std::optional<Substitution> unify(const Term& s, const Term& t) {
    Substitution sigma;
    if (!unify_walk(s, t, sigma))
        return std::nullopt;
    return sigma;
}

static void rename_walk(const Term& t, Term& out, std::map<std::string, std::string>& map,
                        const std::string& prefix) {
    if (t.is_var()) {
        auto it = map.find(t.name);
        if (it == map.end())
            it = map.emplace(t.name, prefix + std::to_string(map.size() + 1)).first;
        out = Term::var(it->second);
        return;
    }
    out.kind = Term::Kind::app;
    out.name = t.name;
    out.args.resize(t.args.size());
    for (std::size_t i = 0; i < t.args.size(); ++i)
        rename_walk(t.args[i], out.args[i], map, prefix);
}

Term canonical_rename(const Term& t, const std::string& prefix) {
    std::map<std::string, std::string> map;
    Term out;
    rename_walk(t, out, map, prefix);
    return out;
}

TermWord canonical_rename(const TermWord& w, const std::string& prefix) {
    std::map<std::string, std::string> map;
    TermWord out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        rename_walk(w[i], out[i], map, prefix);
    return out;
}

std::pair<Term, Term> canonical_rename_pair(const Term& a, const Term& b) {
    std::map<std::string, std::string> map;
    Term oa, ob;
    rename_walk(a, oa, map, "x");
    rename_walk(b, ob, map, "x");
    return {oa, ob};
}

std::pair<TermWord, TermWord> canonical_rename_pair(const TermWord& a, const TermWord& b) {
    std::map<std::string, std::string> map;
    TermWord oa(a.size()), ob(b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        rename_walk(a[i], oa[i], map, "x");
    for (std::size_t i = 0; i < b.size(); ++i)
        rename_walk(b[i], ob[i], map, "x");
    return {oa, ob};
}

bool equal_up_to_renaming(const Term& a, const Term& b) {
    return canonical_rename(a) == canonical_rename(b);
}

static void context_walk(const Term& t, Term& out, int& next, std::vector<std::string>& names,
                         std::set<std::string>& seen) {
    if (t.is_var()) {
        if (!seen.insert(t.name).second)
            throw VetoError("to_context: term is not linear in '" + t.name + "'");
        names.push_back(t.name);
        out = Term::app(hole_name(next++));
        return;
    }
    out.kind = Term::Kind::app;
    out.name = t.name;
    out.args.resize(t.args.size());
    for (std::size_t i = 0; i < t.args.size(); ++i)
        context_walk(t.args[i], out.args[i], next, names, seen);
}

std::pair<Term, std::vector<std::string>> to_context(const Term& t) {
    Term out;
    std::vector<std::string> names;
    std::set<std::string> seen;
    int next = 1;
    context_walk(t, out, next, names, seen);
    return {out, names};
}

int count_holes(const Term& ctx) {
    if (ctx.is_app() && is_hole_name(ctx.name))
        return 1;
    int n = 0;
    for (const Term& a : ctx.args)
        n += count_holes(a);
    return n;
}

Term plug(const Term& ctx, const TermWord& word) {
    if (ctx.is_app() && is_hole_name(ctx.name)) {
        int i = hole_index(ctx.name);
        if (i < 1 || static_cast<std::size_t>(i) > word.size())
            throw VetoError("plug: no filler for hole " + ctx.name);
        return word[i - 1];
    }
    Term out = ctx;
    for (std::size_t i = 0; i < out.args.size(); ++i)
        out.args[i] = plug(ctx.args[i], word);
    return out;
}

static bool context_match_walk(const Term& ctx, const Term& subject,
                               std::map<int, Term>& captures) {
    if (ctx.is_app() && is_hole_name(ctx.name)) {
        captures[hole_index(ctx.name)] = subject;
        return true;
    }
    if (ctx.is_var())
        return subject.is_var() && subject.name == ctx.name;
    if (subject.is_var() || subject.name != ctx.name || subject.args.size() != ctx.args.size())
        return false;
    for (std::size_t i = 0; i < ctx.args.size(); ++i)
        if (!context_match_walk(ctx.args[i], subject.args[i], captures))
            return false;
    return true;
}

std::optional<TermWord> context_match(const Term& ctx, const Term& subject) {
    std::map<int, Term> captures;
    if (!context_match_walk(ctx, subject, captures))
        return std::nullopt;
    TermWord out;
    out.reserve(captures.size());
    int expect = 1;
    for (const auto& [idx, t] : captures) {
        if (idx != expect++)
            throw VetoError("context holes are not numbered 1..n");
        out.push_back(t);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parser.

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }
    bool at_end() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
};

bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' || c == '@' ||
           c == '.' || c == '\'';
}

std::string read_ident(Cursor& cur) {
    cur.skip_ws();
    std::size_t start = cur.pos;
    while (cur.pos < cur.text.size() && ident_char(cur.text[cur.pos]))
        ++cur.pos;
    if (cur.pos == start)
        throw ParseError("expected a symbol or variable name", start);
    return cur.text.substr(start, cur.pos - start);
}

Term parse_rec(Cursor& cur, const RankedAlphabet& alphabet, const std::set<std::string>& vars) {
    std::size_t start = cur.pos;
    cur.skip_ws();
    start = cur.pos;
    std::string name = read_ident(cur);
    bool has_args = cur.peek() == '(';
    if (!has_args) {
        if (vars.count(name))
            return Term::var(name);
        if (is_hole_name(name))
            throw ParseError("hole symbol '" + name + "' is reserved", start);
        if (!alphabet.contains(name))
            throw ParseError("unknown symbol '" + name + "'", start);
        if (alphabet.arity_of(name) != 0)
            throw ParseError("symbol '" + name + "' expects " +
                                 std::to_string(alphabet.arity_of(name)) + " arguments",
                             start);
        return Term::app(name);
    }
    if (vars.count(name))
        throw ParseError("variable '" + name + "' cannot take arguments", start);
    if (is_hole_name(name))
        throw ParseError("hole symbol '" + name + "' is reserved", start);
    if (!alphabet.contains(name))
        throw ParseError("unknown symbol '" + name + "'", start);
    cur.skip_ws();
    ++cur.pos;  // '('
    std::vector<Term> args;
    if (cur.peek() != ')') {
        while (true) {
            args.push_back(parse_rec(cur, alphabet, vars));
            char c = cur.peek();
            if (c == ',') {
                ++cur.pos;
                continue;
            }
            break;
        }
    }
    if (cur.peek() != ')')
        throw ParseError("expected ')'", cur.pos);
    ++cur.pos;
    int arity = alphabet.arity_of(name);
    if (static_cast<int>(args.size()) != arity)
        throw ParseError("symbol '" + name + "' expects " + std::to_string(arity) +
                             " arguments, got " + std::to_string(args.size()),
                         start);
    return Term::app(name, std::move(args));
}

}  // namespace

Term parse_term(const std::string& text, const RankedAlphabet& alphabet,
                const std::set<std::string>& vars) {
    Cursor cur{text};
    Term t = parse_rec(cur, alphabet, vars);
    if (!cur.at_end())
        throw ParseError("trailing input after term", cur.pos);
    return t;
}

std::string format_term(const Term& t) {
    if (t.args.empty())
        return t.name;
    std::string out = t.name + "(";
    for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i)
            out += ",";
        out += format_term(t.args[i]);
    }
    return out + ")";
}

std::string format_word(const TermWord& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i)
            out += ", ";
        out += format_term(w[i]);
    }
    return out;
}

}  // namespace ratrw
