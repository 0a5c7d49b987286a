#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "noether/errors.hpp"
#include "noether/problem.hpp"

namespace noether {

bool ProblemFile::has_characteristic() const {
    for (const auto& [dep, q] : characteristic) {
        if (!q.is_zero()) return true;
    }
    return false;
}

std::size_t ProblemFile::axis_of(const std::string& n) const {
    for (std::size_t i = 0; i < axes.size(); ++i) {
        if (axes[i] == n) return i;
    }
    throw UndeclaredIdentifier(n);
}

namespace {

// ---------------------------------------------------------------------------
// tokens

struct Tok {
    enum Kind {
        Num,
        Ident,
        JetSub,  // name_sub or name_{...}: text = name, sub = subscript body
        JetOff,  // name[i,j,...]: text = name, offsets filled
        LParen,
        RParen,
        Plus,
        Minus,
        Star,
        Slash,
        Caret,
        Comma,
        Eq,
        End
    };
    Kind kind = End;
    std::string text;
    std::string sub;
    std::vector<int> offsets;
    int line = 0;
    int col = 0;
};

const char* tok_name(Tok::Kind k) {
    switch (k) {
        case Tok::Num: return "number";
        case Tok::Ident: return "identifier";
        case Tok::JetSub: return "jet";
        case Tok::JetOff: return "lattice value";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Caret: return "'^'";
        case Tok::Comma: return "','";
        case Tok::Eq: return "'='";
        case Tok::End: return "end of expression";
    }
    return "?";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

void lex_line(const std::string& s, int line, std::vector<Tok>& out) {
    std::size_t i = 0;
    auto make = [&](Tok::Kind k, std::size_t col) {
        Tok t;
        t.kind = k;
        t.line = line;
        t.col = static_cast<int>(col) + 1;
        return t;
    };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (i < s.size() && s[i] == '.') {
                throw ParseError(line, static_cast<int>(i) + 1,
                                 "decimal literals are not supported; use rationals like 3/10");
            }
            Tok t = make(Tok::Num, start);
            t.text = s.substr(start, i - start);
            out.push_back(std::move(t));
            continue;
        }
        if (ident_start(c)) {
            while (i < s.size() && ident_char(s[i])) ++i;
            std::string name = s.substr(start, i - start);
            if (i < s.size() && s[i] == '_') {
                ++i;
                Tok t = make(Tok::JetSub, start);
                t.text = std::move(name);
                if (i < s.size() && s[i] == '{') {
                    std::size_t close = s.find('}', i);
                    if (close == std::string::npos) {
                        throw ParseError(line, static_cast<int>(i) + 1, "unterminated '{'");
                    }
                    t.sub = s.substr(i + 1, close - i - 1);
                    i = close + 1;
                } else {
                    std::size_t sub_start = i;
                    while (i < s.size() && ident_char(s[i])) ++i;
                    if (i == sub_start) {
                        throw ParseError(line, static_cast<int>(i) + 1,
                                         "expected subscript after '_'");
                    }
                    t.sub = s.substr(sub_start, i - sub_start);
                }
                out.push_back(std::move(t));
                continue;
            }
            if (i < s.size() && s[i] == '[') {
                ++i;
                Tok t = make(Tok::JetOff, start);
                t.text = std::move(name);
                for (;;) {
                    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
                    bool neg = false;
                    if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
                        neg = s[i] == '-';
                        ++i;
                    }
                    std::size_t d0 = i;
                    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
                    if (i == d0) {
                        throw ParseError(line, static_cast<int>(i) + 1,
                                         "expected integer offset");
                    }
                    int v = std::stoi(s.substr(d0, i - d0));
                    t.offsets.push_back(neg ? -v : v);
                    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
                    if (i < s.size() && s[i] == ',') {
                        ++i;
                        continue;
                    }
                    if (i < s.size() && s[i] == ']') {
                        ++i;
                        break;
                    }
                    throw ParseError(line, static_cast<int>(i) + 1, "expected ',' or ']'");
                }
                out.push_back(std::move(t));
                continue;
            }
            Tok t = make(Tok::Ident, start);
            t.text = std::move(name);
            out.push_back(std::move(t));
            continue;
        }
        Tok::Kind k;
        switch (c) {
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case '+': k = Tok::Plus; break;
            case '-': k = Tok::Minus; break;
            case '*': k = Tok::Star; break;
            case '/': k = Tok::Slash; break;
            case '^': k = Tok::Caret; break;
            case ',': k = Tok::Comma; break;
            case '=': k = Tok::Eq; break;
            default:
                throw ParseError(line, static_cast<int>(i) + 1,
                                 std::string("unexpected character '") + c + "'");
        }
        out.push_back(make(k, i));
        ++i;
    }
}

// ---------------------------------------------------------------------------
// expression parser

struct TokStream {
    std::vector<Tok> toks;
    std::size_t pos = 0;

    const Tok& peek() const {
        static Tok end_tok;
        return pos < toks.size() ? toks[pos] : end_tok;
    }
    Tok take() {
        Tok t = peek();
        if (pos < toks.size()) ++pos;
        return t;
    }
    bool at(Tok::Kind k) const { return peek().kind == k; }
    Tok expect(Tok::Kind k, int line_hint) {
        if (!at(k)) {
            const Tok& t = peek();
            throw ParseError(t.line ? t.line : line_hint, t.col,
                             std::string("expected ") + tok_name(k) + ", found " +
                                 tok_name(t.kind));
        }
        return take();
    }
};

enum class NameKind { Axis, Dep, Param, Arb, Imag, Func, Unknown };

struct ExprParser {
    const ProblemFile& p;
    TokStream& ts;
    int line_hint;

    NameKind classify(const std::string& n) const {
        if (n == "i") return NameKind::Imag;
        if (n == "exp" || n == "ln" || n == "sin" || n == "cos" || n == "conj") {
            return NameKind::Func;
        }
        for (const auto& a : p.axes) {
            if (a == n) return NameKind::Axis;
        }
        for (const auto& d : p.deps) {
            if (d == n) return NameKind::Dep;
        }
        for (const auto& g : p.arbitrary) {
            if (g == n) return NameKind::Arb;
        }
        for (const auto& [q, real] : p.params) {
            if (q == n) return NameKind::Param;
        }
        return NameKind::Unknown;
    }

    MultiIndex subscript_index(const Tok& t) const {
        if (p.kind != OperatorKind::Differential) {
            throw ParseError(t.line, t.col, "derivative subscripts in a discrete problem");
        }
        std::vector<int> counts(p.axes.size(), 0);
        std::vector<std::string> tokens;
        std::string cur;
        for (char c : t.sub) {
            if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
                if (!cur.empty()) tokens.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) tokens.push_back(cur);
        auto axis_pos = [this](const std::string& n) -> int {
            for (std::size_t i = 0; i < p.axes.size(); ++i) {
                if (p.axes[i] == n) return static_cast<int>(i);
            }
            return -1;
        };
        for (const std::string& name : tokens) {
            int pos = axis_pos(name);
            if (pos >= 0) {
                counts[static_cast<std::size_t>(pos)] += 1;
                continue;
            }
            // a run of single-letter axis names, e.g. u_{xt}
            bool all = !name.empty();
            for (char c : name) {
                if (axis_pos(std::string(1, c)) < 0) {
                    all = false;
                    break;
                }
            }
            if (!all) {
                throw ParseError(t.line, t.col, "unknown axis '" + name + "' in subscript");
            }
            for (char c : name) counts[static_cast<std::size_t>(axis_pos(std::string(1, c)))] += 1;
        }
        return MultiIndex(IndexMode::Derivative, std::move(counts));
    }

    Expr jet_atom(const Tok& t) const {
        NameKind k = classify(t.text);
        if (k != NameKind::Dep && k != NameKind::Arb) {
            if (k == NameKind::Unknown) throw UndeclaredIdentifier(t.text);
            throw ParseError(t.line, t.col, "'" + t.text + "' cannot carry a jet index");
        }
        MultiIndex J;
        if (t.kind == Tok::JetSub) {
            J = subscript_index(t);
        } else {
            if (p.kind != OperatorKind::Difference) {
                throw ParseError(t.line, t.col, "lattice offsets in a continuous problem");
            }
            if (t.offsets.size() != p.axes.size()) {
                throw ParseError(t.line, t.col, "offset arity does not match the axis count");
            }
            J = MultiIndex(IndexMode::Shift, t.offsets);
        }
        Atom a = k == NameKind::Dep ? Atom::jet(t.text, std::move(J))
                                    : Atom::arb(t.text, std::move(J));
        return Expr::atom(std::move(a));
    }

    Expr bare_ident(const Tok& t) const {
        switch (classify(t.text)) {
            case NameKind::Imag:
                return Expr::imaginary();
            case NameKind::Axis:
                return Expr::atom(Atom::independent(t.text, p.axis_of(t.text)));
            case NameKind::Dep:
                return Expr::atom(Atom::jet(t.text, MultiIndex::zero(p.index_mode(), p.axes.size())));
            case NameKind::Arb:
                return Expr::atom(Atom::arb(t.text, MultiIndex::zero(p.index_mode(), p.axes.size())));
            case NameKind::Param: {
                bool real = true;
                for (const auto& [q, r] : p.params) {
                    if (q == t.text) real = r;
                }
                return Expr::atom(Atom::parameter(t.text, real));
            }
            case NameKind::Func:
                throw ParseError(t.line, t.col, "'" + t.text + "' requires an argument list");
            case NameKind::Unknown:
                break;
        }
        throw UndeclaredIdentifier(t.text);
    }

    Rat exponent() {
        bool neg = false;
        if (ts.at(Tok::Minus)) {
            ts.take();
            neg = true;
        }
        if (ts.at(Tok::Num)) {
            Rat r(ts.take().text);
            return neg ? -r : r;
        }
        if (ts.at(Tok::LParen)) {
            ts.take();
            if (ts.at(Tok::Minus)) {
                ts.take();
                neg = !neg;
            }
            Rat num(ts.expect(Tok::Num, line_hint).text);
            Rat r = num;
            if (ts.at(Tok::Slash)) {
                Tok slash = ts.take();
                Rat den(ts.expect(Tok::Num, line_hint).text);
                if (den == 0) throw ParseError(slash.line, slash.col, "zero exponent denominator");
                r = num / den;
            }
            ts.expect(Tok::RParen, line_hint);
            return neg ? -r : r;
        }
        const Tok& t = ts.peek();
        throw ParseError(t.line ? t.line : line_hint, t.col, "expected exponent");
    }

    Expr primary() {
        const Tok t = ts.take();
        switch (t.kind) {
            case Tok::Num:
                return Expr(Rat(t.text));
            case Tok::JetSub:
            case Tok::JetOff:
                return jet_atom(t);
            case Tok::LParen: {
                Expr e = expression();
                ts.expect(Tok::RParen, line_hint);
                return e;
            }
            case Tok::Ident: {
                if (classify(t.text) == NameKind::Func) {
                    ts.expect(Tok::LParen, line_hint);
                    Expr arg = expression();
                    ts.expect(Tok::RParen, line_hint);
                    if (t.text == "exp") return exp(arg);
                    if (t.text == "ln") return ln(arg);
                    if (t.text == "sin") return sin(arg);
                    if (t.text == "cos") return cos(arg);
                    return arg.conjugated(p.conj_pairs);
                }
                return bare_ident(t);
            }
            default:
                throw ParseError(t.line ? t.line : line_hint, t.col,
                                 std::string("expected number, identifier or '(', found ") +
                                     tok_name(t.kind));
        }
    }

    Expr factor() {
        if (ts.at(Tok::Minus)) {
            ts.take();
            return -factor();
        }
        Expr e = primary();
        while (ts.at(Tok::Caret)) {
            ts.take();
            e = pow(e, exponent());
        }
        return e;
    }

    Expr term() {
        Expr e = factor();
        for (;;) {
            if (ts.at(Tok::Star)) {
                ts.take();
                e = e * factor();
            } else if (ts.at(Tok::Slash)) {
                ts.take();
                e = e / factor();
            } else {
                return e;
            }
        }
    }

    Expr expression() {
        Expr e = term();
        for (;;) {
            if (ts.at(Tok::Plus)) {
                ts.take();
                e = e + term();
            } else if (ts.at(Tok::Minus)) {
                ts.take();
                e = e - term();
            } else {
                return e;
            }
        }
    }
};

Expr parse_expr_tokens(std::vector<Tok> toks, const ProblemFile& p, int line_hint,
                       bool allow_eq_zero = false) {
    TokStream ts{std::move(toks)};
    ExprParser ep{p, ts, line_hint};
    Expr e = ep.expression();
    if (allow_eq_zero && ts.at(Tok::Eq)) {
        ts.take();
        Expr rhs = ep.expression();
        e = e - rhs;
    }
    if (!ts.at(Tok::End)) {
        const Tok& t = ts.peek();
        throw ParseError(t.line, t.col,
                         std::string("unexpected ") + tok_name(t.kind) + " after expression");
    }
    return e;
}

// ---------------------------------------------------------------------------
// sections

struct Section {
    std::string header;  // lowered words before ':'
    std::vector<std::pair<int, std::string>> value_lines;
    int line = 0;
};

std::string strip_comment(const std::string& s) {
    auto pos = s.find('#');
    return pos == std::string::npos ? s : s.substr(0, pos);
}

bool blank(const std::string& s) {
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

std::vector<Section> split_sections(const std::string& text) {
    std::vector<Section> out;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string s = strip_comment(raw);
        if (blank(s)) continue;
        bool continuation = std::isspace(static_cast<unsigned char>(s[0])) != 0;
        if (continuation) {
            if (out.empty()) throw ParseError(line_no, 1, "continuation line before any section");
            out.back().value_lines.emplace_back(line_no, s);
            continue;
        }
        auto colon = s.find(':');
        if (colon == std::string::npos) {
            throw ParseError(line_no, 1, "expected 'section: value'");
        }
        Section sec;
        sec.header = s.substr(0, colon);
        sec.line = line_no;
        std::string rest = s.substr(colon + 1);
        if (!blank(rest)) sec.value_lines.emplace_back(line_no, rest);
        out.push_back(std::move(sec));
    }
    return out;
}

std::vector<std::string> header_words(const std::string& h) {
    std::vector<std::string> words;
    std::string cur;
    for (char c : h) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!cur.empty()) words.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) words.push_back(cur);
    return words;
}

std::vector<Tok> lex_section(const Section& sec) {
    std::vector<Tok> toks;
    for (const auto& [ln, text] : sec.value_lines) lex_line(text, ln, toks);
    return toks;
}

std::string joined_value(const Section& sec) {
    std::string s;
    for (const auto& [ln, text] : sec.value_lines) {
        if (!s.empty()) s += " ";
        std::size_t a = text.find_first_not_of(" \t");
        std::size_t b = text.find_last_not_of(" \t");
        if (a != std::string::npos) s += text.substr(a, b - a + 1);
    }
    return s;
}

int parse_index(const std::string& word, int line) {
    for (char c : word) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            throw ParseError(line, 1, "expected a row index, found '" + word + "'");
        }
    }
    if (word.empty() || word.size() > 6) throw ParseError(line, 1, "bad row index");
    return std::stoi(word);
}

void declare_name(ProblemFile& p, const std::string& name, int line,
                  std::set<std::string>& seen) {
    if (name == "i" || name == "exp" || name == "ln" || name == "sin" || name == "cos" ||
        name == "conj") {
        throw ParseError(line, 1, "'" + name + "' is reserved");
    }
    if (!seen.insert(name).second) {
        throw ParseError(line, 1, "duplicate declaration of '" + name + "'");
    }
}

}  // namespace

ProblemFile parse_problem(const std::string& text, const std::string& fallback_name) {
    ProblemFile p;
    p.name = fallback_name;
    bool kind_set = false;
    bool lagrangian_set = false;
    std::set<std::string> seen;

    for (const Section& sec : split_sections(text)) {
        std::vector<std::string> words = header_words(sec.header);
        if (words.empty()) throw ParseError(sec.line, 1, "empty section header");
        const std::string& key = words[0];

        if (key == "name") {
            p.name = joined_value(sec);
        } else if (key == "kind") {
            std::string v = joined_value(sec);
            if (v == "continuous") {
                p.kind = OperatorKind::Differential;
            } else if (v == "discrete") {
                p.kind = OperatorKind::Difference;
            } else {
                throw ParseError(sec.line, 1, "kind must be 'continuous' or 'discrete'");
            }
            kind_set = true;
        } else if (key == "vars") {
            for (const Tok& t : lex_section(sec)) {
                if (t.kind != Tok::Ident) throw ParseError(t.line, t.col, "expected axis name");
                declare_name(p, t.text, t.line, seen);
                p.axes.push_back(t.text);
            }
        } else if (key == "fields") {
            std::vector<Tok> toks = lex_section(sec);
            std::size_t i = 0;
            while (i < toks.size()) {
                if (toks[i].kind != Tok::Ident) {
                    throw ParseError(toks[i].line, toks[i].col, "expected field name");
                }
                std::string a = toks[i].text;
                declare_name(p, a, toks[i].line, seen);
                p.deps.push_back(a);
                ++i;
                if (i < toks.size() && toks[i].kind == Tok::Slash) {
                    ++i;
                    if (i >= toks.size() || toks[i].kind != Tok::Ident) {
                        throw ParseError(sec.line, 1, "expected conjugate partner after '/'");
                    }
                    std::string b = toks[i].text;
                    declare_name(p, b, toks[i].line, seen);
                    p.deps.push_back(b);
                    p.conj_pairs[a] = b;
                    p.conj_pairs[b] = a;
                    ++i;
                }
            }
        } else if (key == "params") {
            std::vector<Tok> toks = lex_section(sec);
            std::size_t i = 0;
            while (i < toks.size()) {
                if (toks[i].kind != Tok::Ident) {
                    throw ParseError(toks[i].line, toks[i].col, "expected parameter name");
                }
                std::string name = toks[i].text;
                declare_name(p, name, toks[i].line, seen);
                bool real = true;
                ++i;
                if (i < toks.size() && toks[i].kind == Tok::LParen) {
                    ++i;
                    if (i >= toks.size() || toks[i].kind != Tok::Ident ||
                        (toks[i].text != "real" && toks[i].text != "complex")) {
                        throw ParseError(sec.line, 1, "expected (real) or (complex)");
                    }
                    real = toks[i].text == "real";
                    ++i;
                    if (i >= toks.size() || toks[i].kind != Tok::RParen) {
                        throw ParseError(sec.line, 1, "expected ')'");
                    }
                    ++i;
                }
                p.params.emplace_back(name, real);
            }
        } else if (key == "arbitrary") {
            for (const Tok& t : lex_section(sec)) {
                if (t.kind != Tok::Ident) {
                    throw ParseError(t.line, t.col, "expected arbitrary-function name");
                }
                declare_name(p, t.text, t.line, seen);
                p.arbitrary.push_back(t.text);
            }
        } else if (key == "lagrangian") {
            p.lagrangian = parse_expr_tokens(lex_section(sec), p, sec.line);
            lagrangian_set = true;
        } else if (key == "characteristic") {
            if (words.size() != 2) {
                throw ParseError(sec.line, 1, "expected 'characteristic <dependent>:'");
            }
            const std::string& dep = words[1];
            if (std::find(p.deps.begin(), p.deps.end(), dep) == p.deps.end()) {
                throw UndeclaredIdentifier(dep);
            }
            p.characteristic[dep] = parse_expr_tokens(lex_section(sec), p, sec.line);
        } else if (key == "constraint") {
            p.constraint_rows.push_back(
                parse_expr_tokens(lex_section(sec), p, sec.line, /*allow_eq_zero=*/true));
        } else if (key == "multiplier") {
            if (words.size() != 2) throw ParseError(sec.line, 1, "expected 'multiplier <row>:'");
            int idx = parse_index(words[1], sec.line);
            p.multipliers[idx] = parse_expr_tokens(lex_section(sec), p, sec.line);
        } else if (key == "potential_link") {
            p.potential_link_param = joined_value(sec);
        } else if (key == "expect") {
            if (words.size() != 3) {
                throw ParseError(sec.line, 1,
                                 "expected 'expect euler|relation|residual|flux <which>:'");
            }
            Expr e = parse_expr_tokens(lex_section(sec), p, sec.line);
            if (words[1] == "euler") {
                p.expect_euler[words[2]] = e;
            } else if (words[1] == "relation") {
                p.expect_relation[parse_index(words[2], sec.line)] = e;
            } else if (words[1] == "residual") {
                p.expect_residual[parse_index(words[2], sec.line)] = e;
            } else if (words[1] == "flux") {
                p.expect_flux[words[2]] = e;
            } else {
                throw ParseError(sec.line, 1, "unknown expect target '" + words[1] + "'");
            }
        } else {
            throw ParseError(sec.line, 1, "unknown section '" + key + "'");
        }
    }

    if (!kind_set) throw ParseError(1, 1, "missing 'kind:' section");
    if (p.axes.empty()) throw ParseError(1, 1, "missing 'vars:' section");
    if (p.deps.empty()) throw ParseError(1, 1, "missing 'fields:' section");
    if (!lagrangian_set) throw ParseError(1, 1, "missing 'lagrangian:' section");
    std::set<std::string> family(p.arbitrary.begin(), p.arbitrary.end());
    for (std::size_t s = 0; s < p.constraint_rows.size(); ++s) {
        if (!is_linear_homogeneous(p.constraint_rows[s], family)) {
            throw ConstraintNotLinear("constraint row " + std::to_string(s + 1) +
                                      " is not linear homogeneous in the arbitrary functions");
        }
    }
    for (const auto& [idx, e] : p.multipliers) {
        if (idx < 1 || idx > static_cast<int>(p.constraint_rows.size())) {
            throw ParseError(1, 1, "multiplier index " + std::to_string(idx) +
                                       " has no matching constraint row");
        }
    }
    for (const auto& [axis, e] : p.expect_flux) {
        p.axis_of(axis);  // validates
    }
    return p;
}

ProblemFile parse_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, 0, "cannot open problem file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string base = path;
    auto slash = base.find_last_of('/');
    if (slash != std::string::npos) base = base.substr(slash + 1);
    auto dot = base.rfind(".n2");
    if (dot != std::string::npos) base = base.substr(0, dot);
    return parse_problem(buf.str(), base);
}

Expr parse_expression(const std::string& text, const ProblemFile& context) {
    std::vector<Tok> toks;
    lex_line(text, 1, toks);
    return parse_expr_tokens(std::move(toks), context, 1);
}

std::string print_problem(const ProblemFile& p) {
    std::ostringstream out;
    if (!p.name.empty()) out << "name: " << p.name << "\n";
    out << "kind: " << (p.kind == OperatorKind::Differential ? "continuous" : "discrete")
        << "\n";
    out << "vars:";
    for (const auto& a : p.axes) out << " " << a;
    out << "\nfields:";
    std::set<std::string> done;
    for (const auto& d : p.deps) {
        if (done.count(d)) continue;
        auto it = p.conj_pairs.find(d);
        if (it != p.conj_pairs.end()) {
            out << " " << d << "/" << it->second;
            done.insert(it->second);
        } else {
            out << " " << d;
        }
        done.insert(d);
    }
    out << "\n";
    if (!p.params.empty()) {
        out << "params:";
        for (const auto& [name, real] : p.params) {
            out << " " << name;
            if (!real) out << "(complex)";
        }
        out << "\n";
    }
    if (!p.arbitrary.empty()) {
        out << "arbitrary:";
        for (const auto& g : p.arbitrary) out << " " << g;
        out << "\n";
    }
    out << "lagrangian: " << p.lagrangian.str(p.axes) << "\n";
    for (const auto& [dep, q] : p.characteristic) {
        out << "characteristic " << dep << ": " << q.str(p.axes) << "\n";
    }
    for (const Expr& row : p.constraint_rows) {
        out << "constraint: " << row.str(p.axes) << " = 0\n";
    }
    for (const auto& [idx, nu] : p.multipliers) {
        out << "multiplier " << idx << ": " << nu.str(p.axes) << "\n";
    }
    if (p.potential_link_param) out << "potential_link: " << *p.potential_link_param << "\n";
    for (const auto& [dep, e] : p.expect_euler) {
        out << "expect euler " << dep << ": " << e.str(p.axes) << "\n";
    }
    for (const auto& [idx, e] : p.expect_relation) {
        out << "expect relation " << idx << ": " << e.str(p.axes) << "\n";
    }
    for (const auto& [idx, e] : p.expect_residual) {
        out << "expect residual " << idx << ": " << e.str(p.axes) << "\n";
    }
    for (const auto& [axis, e] : p.expect_flux) {
        out << "expect flux " << axis << ": " << e.str(p.axes) << "\n";
    }
    return out.str();
}

}  // namespace noether
