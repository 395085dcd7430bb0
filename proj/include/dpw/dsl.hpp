#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dpw/beck.hpp"

namespace dpw {

struct ParseError : Error {
    std::size_t line = 0, col = 0;
    ParseError(std::size_t l, std::size_t c, const std::string& msg)
        : Error("line " + std::to_string(l) + ", col " + std::to_string(c) + ": " + msg),
          line(l),
          col(c) {}
};

struct DuplicatePrime : ParseError {
    DuplicatePrime(std::size_t l, std::size_t c) : ParseError(l, c, "prime already declared") {}
};

struct UnknownLabel : ParseError {
    UnknownLabel(std::size_t l, std::size_t c, const std::string& what)
        : ParseError(l, c, "unknown " + what) {}
};

struct ExprTerm {
    Scalar c;
    std::size_t idx;
    bool operator==(const ExprTerm&) const = default;
};

struct MulEntry {
    std::size_t i, j;  // i <= j
    std::vector<ExprTerm> rhs;
    bool operator==(const MulEntry&) const = default;
};

struct PMapEntry {
    std::size_t i;
    std::vector<ExprTerm> rhs;
    bool operator==(const PMapEntry&) const = default;
};

struct AlgebraBlock {
    std::string name;
    std::vector<std::string> basis;
    std::vector<std::uint32_t> plus;
    std::vector<MulEntry> muls;
    std::vector<PMapEntry> pmaps;
    bool operator==(const AlgebraBlock&) const = default;
};

struct ActEntry {
    std::size_t ai, mj;
    std::vector<ExprTerm> rhs;
    bool operator==(const ActEntry&) const = default;
};

struct PimEntry {
    std::size_t mj;
    std::vector<ExprTerm> rhs;
    bool operator==(const PimEntry&) const = default;
};

struct ModuleBlock {
    std::string name;
    std::size_t over;
    std::vector<std::string> basis;
    std::vector<ActEntry> acts;
    std::vector<PimEntry> pims;
    bool operator==(const ModuleBlock&) const = default;
};

struct CheckDirective {
    std::string kind;
    std::vector<std::string> args;
    std::size_t line = 0, col = 0;  // excluded from equality
    bool operator==(const CheckDirective& o) const { return kind == o.kind && args == o.args; }
};

inline const std::set<std::string>& check_kinds() {
    static const std::set<std::string> kinds = {
        "verify",  "gamma",    "derivations", "special",          "beck",
        "kaehler", "omega",    "powersplit",  "representability", "sequence",
        "sections", "witt",    "localize"};
    return kinds;
}

struct SessionAst {
    std::uint64_t prime = 0;
    std::vector<AlgebraBlock> algebras;
    std::vector<ModuleBlock> modules;
    std::vector<CheckDirective> checks;
    bool operator==(const SessionAst&) const = default;

    const AlgebraBlock* find_algebra(const std::string& name) const {
        for (const AlgebraBlock& a : algebras)
            if (a.name == name) return &a;
        return nullptr;
    }
    const ModuleBlock* find_module(const std::string& name) const {
        for (const ModuleBlock& m : modules)
            if (m.name == name) return &m;
        return nullptr;
    }
};

namespace detail {

struct DslToken {
    std::string text;
    std::size_t line, col;
};

inline std::vector<std::vector<DslToken>> lex_session(const std::string& text) {
    std::vector<std::vector<DslToken>> lines;
    std::size_t lineno = 1;
    std::vector<DslToken> cur;
    std::string tok;
    std::size_t tok_col = 0, col = 0;
    auto flush_tok = [&]() {
        if (!tok.empty()) {
            cur.push_back(DslToken{tok, lineno, tok_col});
            tok.clear();
        }
    };
    auto flush_line = [&]() {
        flush_tok();
        if (!cur.empty()) lines.push_back(std::move(cur));
        cur.clear();
        ++lineno;
        col = 0;
    };
    bool in_comment = false;
    for (char ch : text) {
        ++col;
        if (ch == '\n') {
            in_comment = false;
            flush_line();
            continue;
        }
        if (in_comment) continue;
        if (ch == '#') {
            flush_tok();
            in_comment = true;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(ch))) {
            flush_tok();
            continue;
        }
        if (tok.empty()) tok_col = col;
        tok += ch;
    }
    flush_line();
    return lines;
}

inline bool dsl_is_integer(const std::string& s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline bool dsl_is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline const std::set<std::string>& dsl_reserved() {
    static const std::set<std::string> words = {"prime", "algebra", "mul",   "pmap", "module",
                                                "act",   "pimap",   "check", "basis", "plus",
                                                "over"};
    return words;
}

// Terms are [coeff] label; a leading integer is a coefficient exactly when a
// label follows it, so "1" alone still names the unit basis vector.
inline std::vector<ExprTerm> parse_expr(const std::vector<DslToken>& toks, std::size_t from,
                                        const std::vector<std::string>& labels, std::uint64_t p,
                                        const std::string& what) {
    auto lookup = [&](const DslToken& t) -> std::size_t {
        auto it = std::find(labels.begin(), labels.end(), t.text);
        if (it == labels.end()) throw UnknownLabel(t.line, t.col, what + " '" + t.text + "'");
        return static_cast<std::size_t>(it - labels.begin());
    };
    const DslToken& anchor = toks[from - 1];
    if (from >= toks.size())
        throw ParseError(anchor.line, anchor.col + anchor.text.size(), "expected expression");
    Fp k(p);
    Vec acc(labels.size(), 0);
    if (from + 1 == toks.size() && toks[from].text == "0" &&
        std::find(labels.begin(), labels.end(), "0") == labels.end()) {
        // literal zero
    } else {
        std::size_t t = from;
        while (true) {
            Scalar c = 1;
            const DslToken& first = toks[t];
            std::size_t idx;
            if (dsl_is_integer(first.text) && t + 1 < toks.size() && toks[t + 1].text != "+") {
                c = k.reduce_int(static_cast<long long>(std::stoull(first.text)));
                idx = lookup(toks[t + 1]);
                t += 2;
            } else {
                idx = lookup(first);
                t += 1;
            }
            acc[idx] = k.add(acc[idx], c);
            if (t == toks.size()) break;
            if (toks[t].text != "+")
                throw ParseError(toks[t].line, toks[t].col, "expected '+'");
            ++t;
            if (t == toks.size())
                throw ParseError(toks[t - 1].line, toks[t - 1].col + 1, "expected term after '+'");
        }
    }
    std::vector<ExprTerm> out;
    for (std::size_t i = 0; i < acc.size(); ++i)
        if (acc[i]) out.push_back(ExprTerm{acc[i], i});
    return out;
}

inline void dsl_check_label(const DslToken& t) {
    if (dsl_reserved().count(t.text))
        throw ParseError(t.line, t.col, "reserved word '" + t.text + "' cannot be a label");
    if (t.text.find_first_of("=+#") != std::string::npos)
        throw ParseError(t.line, t.col, "label '" + t.text + "' contains a reserved character");
}

}  // namespace detail

inline SessionAst parse_session(const std::string& text) {
    using detail::DslToken;
    SessionAst ast;
    bool prime_seen = false;
    auto lines = detail::lex_session(text);

    auto need = [&](const std::vector<DslToken>& ts, std::size_t i,
                    const std::string& what) -> const DslToken& {
        if (i < ts.size()) return ts[i];
        const DslToken& last = ts.back();
        throw ParseError(last.line, last.col + last.text.size(), "expected " + what);
    };
    auto need_keyword = [&](const std::vector<DslToken>& ts, std::size_t i, const std::string& kw) {
        const DslToken& t = need(ts, i, "'" + kw + "'");
        if (t.text != kw) throw ParseError(t.line, t.col, "expected '" + kw + "'");
    };
    auto algebra_at = [&](const DslToken& t) -> AlgebraBlock& {
        for (AlgebraBlock& a : ast.algebras)
            if (a.name == t.text) return a;
        throw UnknownLabel(t.line, t.col, "algebra '" + t.text + "'");
    };
    auto module_at = [&](const DslToken& t) -> ModuleBlock& {
        for (ModuleBlock& m : ast.modules)
            if (m.name == t.text) return m;
        throw UnknownLabel(t.line, t.col, "module '" + t.text + "'");
    };
    auto basis_index = [&](const std::vector<std::string>& labels, const DslToken& t,
                           const std::string& what) -> std::size_t {
        auto it = std::find(labels.begin(), labels.end(), t.text);
        if (it == labels.end()) throw UnknownLabel(t.line, t.col, what + " '" + t.text + "'");
        return static_cast<std::size_t>(it - labels.begin());
    };
    auto need_prime = [&](const DslToken& t) {
        if (!prime_seen)
            throw ParseError(t.line, t.col, "prime must be declared before '" + t.text + "'");
    };

    for (const auto& ts : lines) {
        const DslToken& head = ts[0];
        if (head.text == "prime") {
            const DslToken& pt = need(ts, 1, "prime number");
            if (prime_seen) throw DuplicatePrime(head.line, head.col);
            if (!detail::dsl_is_integer(pt.text))
                throw ParseError(pt.line, pt.col, "expected prime number");
            std::uint64_t p = std::stoull(pt.text);
            if (!detail::dsl_is_prime(p)) throw NonPrimeModulus(p, pt.line, pt.col);
            if (ts.size() > 2) throw ParseError(ts[2].line, ts[2].col, "trailing tokens");
            ast.prime = p;
            prime_seen = true;
        } else if (head.text == "algebra") {
            need_prime(head);
            const DslToken& name = need(ts, 1, "algebra name");
            detail::dsl_check_label(name);
            if (ast.find_algebra(name.text) || ast.find_module(name.text))
                throw ParseError(name.line, name.col, "name '" + name.text + "' already used");
            need_keyword(ts, 2, "basis");
            AlgebraBlock blk;
            blk.name = name.text;
            std::size_t t = 3;
            for (; t < ts.size() && ts[t].text != "plus"; ++t) {
                detail::dsl_check_label(ts[t]);
                if (std::find(blk.basis.begin(), blk.basis.end(), ts[t].text) != blk.basis.end())
                    throw ParseError(ts[t].line, ts[t].col, "duplicate basis label");
                blk.basis.push_back(ts[t].text);
            }
            if (blk.basis.empty()) throw ParseError(name.line, name.col, "empty basis");
            if (t < ts.size()) {
                for (++t; t < ts.size(); ++t) {
                    std::size_t idx = basis_index(blk.basis, ts[t], "basis label");
                    if (idx == 0)
                        throw ParseError(ts[t].line, ts[t].col,
                                         "unit label cannot lie in the plus part");
                    std::uint32_t v = static_cast<std::uint32_t>(idx);
                    if (std::find(blk.plus.begin(), blk.plus.end(), v) != blk.plus.end())
                        throw ParseError(ts[t].line, ts[t].col, "duplicate plus label");
                    blk.plus.push_back(v);
                }
            }
            std::sort(blk.plus.begin(), blk.plus.end());
            ast.algebras.push_back(std::move(blk));
        } else if (head.text == "mul") {
            need_prime(head);
            AlgebraBlock& blk = algebra_at(need(ts, 1, "algebra name"));
            std::size_t i = basis_index(blk.basis, need(ts, 2, "basis label"), "basis label");
            std::size_t j = basis_index(blk.basis, need(ts, 3, "basis label"), "basis label");
            need_keyword(ts, 4, "=");
            if (i > j) std::swap(i, j);
            for (const MulEntry& m : blk.muls)
                if (m.i == i && m.j == j)
                    throw ParseError(ts[2].line, ts[2].col, "duplicate product entry");
            blk.muls.push_back(
                MulEntry{i, j, detail::parse_expr(ts, 5, blk.basis, ast.prime, "basis label")});
        } else if (head.text == "pmap") {
            need_prime(head);
            AlgebraBlock& blk = algebra_at(need(ts, 1, "algebra name"));
            const DslToken& lt = need(ts, 2, "basis label");
            std::size_t i = basis_index(blk.basis, lt, "basis label");
            if (std::find(blk.plus.begin(), blk.plus.end(), static_cast<std::uint32_t>(i)) ==
                blk.plus.end())
                throw ParseError(lt.line, lt.col, "p-map entries must target the plus part");
            need_keyword(ts, 3, "=");
            for (const PMapEntry& e : blk.pmaps)
                if (e.i == i) throw ParseError(lt.line, lt.col, "duplicate p-map entry");
            blk.pmaps.push_back(
                PMapEntry{i, detail::parse_expr(ts, 4, blk.basis, ast.prime, "basis label")});
        } else if (head.text == "module") {
            need_prime(head);
            const DslToken& name = need(ts, 1, "module name");
            detail::dsl_check_label(name);
            if (ast.find_algebra(name.text) || ast.find_module(name.text))
                throw ParseError(name.line, name.col, "name '" + name.text + "' already used");
            need_keyword(ts, 2, "over");
            const DslToken& an = need(ts, 3, "algebra name");
            algebra_at(an);
            std::size_t over = 0;
            for (; over < ast.algebras.size(); ++over)
                if (ast.algebras[over].name == an.text) break;
            need_keyword(ts, 4, "basis");
            ModuleBlock blk;
            blk.name = name.text;
            blk.over = over;
            for (std::size_t t = 5; t < ts.size(); ++t) {
                detail::dsl_check_label(ts[t]);
                if (std::find(blk.basis.begin(), blk.basis.end(), ts[t].text) != blk.basis.end())
                    throw ParseError(ts[t].line, ts[t].col, "duplicate basis label");
                blk.basis.push_back(ts[t].text);
            }
            if (blk.basis.empty()) throw ParseError(name.line, name.col, "empty basis");
            ast.modules.push_back(std::move(blk));
        } else if (head.text == "act") {
            need_prime(head);
            ModuleBlock& blk = module_at(need(ts, 1, "module name"));
            const AlgebraBlock& alg = ast.algebras[blk.over];
            const DslToken& at = need(ts, 2, "basis label");
            std::size_t ai = basis_index(alg.basis, at, "basis label");
            if (ai == 0)
                throw ParseError(at.line, at.col, "unit action is fixed to the identity");
            std::size_t mj = basis_index(blk.basis, need(ts, 3, "module label"), "module label");
            need_keyword(ts, 4, "=");
            for (const ActEntry& e : blk.acts)
                if (e.ai == ai && e.mj == mj)
                    throw ParseError(at.line, at.col, "duplicate action entry");
            blk.acts.push_back(
                ActEntry{ai, mj, detail::parse_expr(ts, 5, blk.basis, ast.prime, "module label")});
        } else if (head.text == "pimap") {
            need_prime(head);
            ModuleBlock& blk = module_at(need(ts, 1, "module name"));
            const DslToken& mt = need(ts, 2, "module label");
            std::size_t mj = basis_index(blk.basis, mt, "module label");
            need_keyword(ts, 3, "=");
            for (const PimEntry& e : blk.pims)
                if (e.mj == mj) throw ParseError(mt.line, mt.col, "duplicate p-operator entry");
            blk.pims.push_back(
                PimEntry{mj, detail::parse_expr(ts, 4, blk.basis, ast.prime, "module label")});
        } else if (head.text == "check") {
            need_prime(head);
            const DslToken& kind = need(ts, 1, "check kind");
            if (!check_kinds().count(kind.text))
                throw ParseError(kind.line, kind.col, "unknown check kind '" + kind.text + "'");
            CheckDirective c;
            c.kind = kind.text;
            for (std::size_t t = 2; t < ts.size(); ++t) c.args.push_back(ts[t].text);
            c.line = kind.line;
            c.col = kind.col;
            ast.checks.push_back(std::move(c));
        } else {
            throw ParseError(head.line, head.col,
                             "unknown directive '" + head.text +
                                 "'; expected one of prime, algebra, mul, pmap, module, act, "
                                 "pimap, check");
        }
    }
    if (!prime_seen) throw ParseError(1, 1, "missing prime");

    // Canonicalize after duplicate detection: explicit zero entries are
    // dropped and the rest sorted, so parse(print(ast)) == ast.
    auto sweep = [](auto& entries, auto key) {
        std::erase_if(entries, [](const auto& e) { return e.rhs.empty(); });
        std::sort(entries.begin(), entries.end(),
                  [&](const auto& x, const auto& y) { return key(x) < key(y); });
    };
    for (AlgebraBlock& a : ast.algebras) {
        sweep(a.muls, [](const MulEntry& m) { return std::pair(m.i, m.j); });
        sweep(a.pmaps, [](const PMapEntry& e) { return std::pair(e.i, e.i); });
    }
    for (ModuleBlock& m : ast.modules) {
        sweep(m.acts, [](const ActEntry& e) { return std::pair(e.ai, e.mj); });
        sweep(m.pims, [](const PimEntry& e) { return std::pair(e.mj, e.mj); });
    }
    return ast;
}

namespace detail {

inline std::string expr_string(const std::vector<ExprTerm>& rhs,
                               const std::vector<std::string>& labels) {
    if (rhs.empty()) return "0";
    std::string out;
    for (const ExprTerm& t : rhs) {
        if (!out.empty()) out += " + ";
        if (t.c != 1) out += std::to_string(t.c) + " ";
        out += labels[t.idx];
    }
    return out;
}

}  // namespace detail

// Canonical form: entries sorted, zero right-hand sides dropped, coefficients
// reduced; printing a parsed session and reparsing reproduces the same AST.
inline std::string print_session(const SessionAst& ast) {
    std::string out = "prime " + std::to_string(ast.prime) + "\n";
    for (const AlgebraBlock& a : ast.algebras) {
        out += "\nalgebra " + a.name + " basis";
        for (const std::string& l : a.basis) out += " " + l;
        if (!a.plus.empty()) {
            out += " plus";
            for (std::uint32_t i : a.plus) out += " " + a.basis[i];
        }
        out += "\n";
        std::vector<MulEntry> muls = a.muls;
        std::sort(muls.begin(), muls.end(), [](const MulEntry& x, const MulEntry& y) {
            return std::pair(x.i, x.j) < std::pair(y.i, y.j);
        });
        for (const MulEntry& m : muls) {
            if (m.rhs.empty()) continue;
            out += "mul " + a.name + " " + a.basis[m.i] + " " + a.basis[m.j] + " = " +
                   detail::expr_string(m.rhs, a.basis) + "\n";
        }
        std::vector<PMapEntry> pmaps = a.pmaps;
        std::sort(pmaps.begin(), pmaps.end(),
                  [](const PMapEntry& x, const PMapEntry& y) { return x.i < y.i; });
        for (const PMapEntry& e : pmaps) {
            if (e.rhs.empty()) continue;
            out += "pmap " + a.name + " " + a.basis[e.i] + " = " +
                   detail::expr_string(e.rhs, a.basis) + "\n";
        }
    }
    for (const ModuleBlock& m : ast.modules) {
        const AlgebraBlock& a = ast.algebras[m.over];
        out += "\nmodule " + m.name + " over " + a.name + " basis";
        for (const std::string& l : m.basis) out += " " + l;
        out += "\n";
        std::vector<ActEntry> acts = m.acts;
        std::sort(acts.begin(), acts.end(), [](const ActEntry& x, const ActEntry& y) {
            return std::pair(x.ai, x.mj) < std::pair(y.ai, y.mj);
        });
        for (const ActEntry& e : acts) {
            if (e.rhs.empty()) continue;
            out += "act " + m.name + " " + a.basis[e.ai] + " " + m.basis[e.mj] + " = " +
                   detail::expr_string(e.rhs, m.basis) + "\n";
        }
        std::vector<PimEntry> pims = m.pims;
        std::sort(pims.begin(), pims.end(),
                  [](const PimEntry& x, const PimEntry& y) { return x.mj < y.mj; });
        for (const PimEntry& e : pims) {
            if (e.rhs.empty()) continue;
            out += "pimap " + m.name + " " + m.basis[e.mj] + " = " +
                   detail::expr_string(e.rhs, m.basis) + "\n";
        }
    }
    if (!ast.checks.empty()) out += "\n";
    for (const CheckDirective& c : ast.checks) {
        out += "check " + c.kind;
        for (const std::string& a : c.args) out += " " + a;
        out += "\n";
    }
    return out;
}

inline Vec expr_to_vec(const Fp& k, const std::vector<ExprTerm>& rhs, std::size_t dim) {
    Vec v(dim, 0);
    for (const ExprTerm& t : rhs) v[t.idx] = k.reduce_int(static_cast<long long>(t.c));
    return v;
}

inline PDAlgebra build_algebra(const SessionAst& ast, const AlgebraBlock& blk) {
    Fp k(ast.prime);
    FiniteCommAlgebra A(k, blk.basis, blk.plus);
    for (const MulEntry& m : blk.muls) {
        SparseRow row;
        for (const ExprTerm& t : m.rhs)
            row.push_back(Term{static_cast<std::uint32_t>(t.idx), t.c});
        A.set_product(m.i, m.j, row);
    }
    PMap pi = PMap::zero(A);
    for (const PMapEntry& e : blk.pmaps) {
        std::size_t pos =
            std::find(A.plus.begin(), A.plus.end(), static_cast<std::uint32_t>(e.i)) -
            A.plus.begin();
        pi.images[pos] = expr_to_vec(k, e.rhs, A.dim);
    }
    return PDAlgebra{std::move(A), std::move(pi)};
}

inline BeckModule build_module(const SessionAst& ast, const ModuleBlock& blk,
                               const PDAlgebra& base) {
    const Fp& k = base.A.k;
    const std::size_t n = blk.basis.size();
    std::vector<Matrix> action(base.A.dim, Matrix(k, n, n));
    action[0] = Matrix::identity(k, n);
    for (const ActEntry& e : blk.acts)
        for (const ExprTerm& t : e.rhs) action[e.ai].at(t.idx, e.mj) = t.c;
    Matrix piM(k, n, n);
    for (const PimEntry& e : blk.pims)
        for (const ExprTerm& t : e.rhs) piM.at(t.idx, e.mj) = t.c;
    return BeckModule{base.A, base.pi, n, blk.basis, std::move(action), std::move(piM)};
}

}  // namespace dpw
