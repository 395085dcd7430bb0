#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "dpw/fp.hpp"

namespace dpw {

using Vec = std::vector<Scalar>;

struct NotInSpan : Error {
    NotInSpan() : Error("vector lies outside the expected span") {}
};

inline void vec_add_scaled(const Fp& k, Vec& dst, const Vec& src, Scalar c) {
    if (dst.size() != src.size()) throw DimensionMismatch("vec_add_scaled");
    if (c == 0) return;
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = k.add(dst[i], k.mul(c, src[i]));
}

inline Vec vec_scale(const Fp& k, const Vec& v, Scalar c) {
    Vec r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = k.mul(c, v[i]);
    return r;
}

inline Vec vec_add(const Fp& k, const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vec_add");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = k.add(a[i], b[i]);
    return r;
}

inline Vec vec_sub(const Fp& k, const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("vec_sub");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = k.sub(a[i], b[i]);
    return r;
}

inline bool vec_is_zero(const Vec& v) {
    for (Scalar x : v)
        if (x != 0) return false;
    return true;
}

class Matrix {
public:
    Matrix(const Fp& k, std::size_t rows, std::size_t cols)
        : k_(k), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

    static Matrix identity(const Fp& k, std::size_t n) {
        Matrix m(k, n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    static Matrix from_columns(const Fp& k, std::size_t rows, const std::vector<Vec>& cols) {
        Matrix m(k, rows, cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != rows) throw DimensionMismatch("from_columns");
            for (std::size_t i = 0; i < rows; ++i) m.at(i, j) = cols[j][i];
        }
        return m;
    }

    static Matrix from_rows(const Fp& k, std::size_t cols, const std::vector<Vec>& rows) {
        Matrix m(k, rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols) throw DimensionMismatch("from_rows");
            for (std::size_t j = 0; j < cols; ++j) m.at(i, j) = rows[i][j];
        }
        return m;
    }

    const Fp& field() const { return k_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Scalar& at(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    Scalar at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Vec row(std::size_t i) const { return Vec(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_); }

    Vec column(std::size_t j) const {
        Vec c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = at(i, j);
        return c;
    }

    Vec apply(const Vec& v) const {
        if (v.size() != cols_) throw DimensionMismatch("Matrix::apply");
        Vec r(rows_, 0);
        for (std::size_t i = 0; i < rows_; ++i) {
            Scalar acc = 0;
            const Scalar* rp = &data_[i * cols_];
            for (std::size_t j = 0; j < cols_; ++j)
                if (v[j]) acc = k_.add(acc, k_.mul(rp[j], v[j]));
            r[i] = acc;
        }
        return r;
    }

    Matrix times(const Matrix& o) const {
        if (cols_ != o.rows_) throw DimensionMismatch("Matrix::times");
        Matrix r(k_, rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t l = 0; l < cols_; ++l) {
                Scalar a = at(i, l);
                if (!a) continue;
                for (std::size_t j = 0; j < o.cols_; ++j)
                    r.at(i, j) = k_.add(r.at(i, j), k_.mul(a, o.at(l, j)));
            }
        return r;
    }

    Matrix plus(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("Matrix::plus");
        Matrix r(k_, rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = k_.add(data_[i], o.data_[i]);
        return r;
    }

    Matrix minus(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("Matrix::minus");
        Matrix r(k_, rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = k_.sub(data_[i], o.data_[i]);
        return r;
    }

    Matrix scaled(Scalar c) const {
        Matrix r(k_, rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = k_.mul(c, data_[i]);
        return r;
    }

    Matrix power(std::uint64_t e) const {
        if (rows_ != cols_) throw DimensionMismatch("Matrix::power");
        Matrix r = identity(k_, rows_);
        Matrix b = *this;
        while (e) {
            if (e & 1) r = r.times(b);
            b = b.times(b);
            e >>= 1;
        }
        return r;
    }

    bool is_zero() const {
        for (Scalar x : data_)
            if (x) return false;
        return true;
    }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    // Row-major flattening; the hom solvers treat a matrix unknown as this vector.
    Vec flatten() const { return data_; }

    static Matrix unflatten(const Fp& k, std::size_t rows, std::size_t cols, const Vec& v) {
        if (v.size() != rows * cols) throw DimensionMismatch("Matrix::unflatten");
        Matrix m(k, rows, cols);
        m.data_ = v;
        return m;
    }

private:
    Fp k_;
    std::size_t rows_, cols_;
    Vec data_;
};

// Deterministic reduced row echelon form: pivots are the first nonzero column
// scanning left to right, pivot entries normalized to 1, eliminated above and
// below.  Every canonical-form claim downstream rests on this routine.
inline void rref_in_place(const Fp& k, std::vector<Vec>& rows, std::vector<std::size_t>& pivots) {
    pivots.clear();
    if (rows.empty()) return;
    const std::size_t n = rows[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
        std::size_t sel = r;
        while (sel < rows.size() && rows[sel][c] == 0) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[r], rows[sel]);
        Scalar inv = k.inv(rows[r][c]);
        for (std::size_t j = c; j < n; ++j) rows[r][j] = k.mul(inv, rows[r][j]);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            Scalar f = rows[i][c];
            for (std::size_t j = c; j < n; ++j) rows[i][j] = k.sub(rows[i][j], k.mul(f, rows[r][j]));
        }
        pivots.push_back(c);
        ++r;
    }
    rows.resize(r);
}

class Subspace {
public:
    Subspace(const Fp& k, std::size_t ambient) : k_(k), ambient_(ambient) {}

    static Subspace span(const Fp& k, std::size_t ambient, std::vector<Vec> gens) {
        for (const Vec& g : gens)
            if (g.size() != ambient) throw DimensionMismatch("Subspace::span");
        Subspace s(k, ambient);
        s.rows_ = std::move(gens);
        rref_in_place(k, s.rows_, s.pivots_);
        return s;
    }

    const Fp& field() const { return k_; }
    std::size_t ambient_dim() const { return ambient_; }
    std::size_t dim() const { return rows_.size(); }
    const std::vector<Vec>& basis() const { return rows_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }

    Vec reduce(Vec v) const {
        if (v.size() != ambient_) throw DimensionMismatch("Subspace::reduce");
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            Scalar c = v[pivots_[i]];
            if (c) vec_add_scaled(k_, v, rows_[i], k_.neg(c));
        }
        return v;
    }

    bool member(const Vec& v) const { return vec_is_zero(reduce(v)); }

    // Coefficients of v over the RREF basis rows; rows are normalized with
    // zeros above and below each pivot, so coefficients are pivot entries.
    Vec coordinates(const Vec& v) const {
        if (v.size() != ambient_) throw DimensionMismatch("Subspace::coordinates");
        Vec rem = v, c(rows_.size(), 0);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            c[i] = rem[pivots_[i]];
            if (c[i]) vec_add_scaled(k_, rem, rows_[i], k_.neg(c[i]));
        }
        if (!vec_is_zero(rem)) throw NotInSpan();
        return c;
    }

    bool contains(const Subspace& o) const {
        for (const Vec& b : o.rows_)
            if (!member(b)) return false;
        return true;
    }

    bool operator==(const Subspace& o) const {
        return ambient_ == o.ambient_ && rows_ == o.rows_;
    }

    Subspace sum(const Subspace& o) const {
        if (ambient_ != o.ambient_) throw DimensionMismatch("Subspace::sum");
        std::vector<Vec> gens = rows_;
        gens.insert(gens.end(), o.rows_.begin(), o.rows_.end());
        return span(k_, ambient_, std::move(gens));
    }

    Subspace intersect(const Subspace& o) const;

    // Standard basis vectors on the non-pivot coordinates: coset
    // representatives completing this subspace to the ambient space.
    std::vector<Vec> quotient_basis() const {
        std::vector<Vec> reps;
        std::size_t pi = 0;
        for (std::size_t c = 0; c < ambient_; ++c) {
            if (pi < pivots_.size() && pivots_[pi] == c) {
                ++pi;
                continue;
            }
            Vec e(ambient_, 0);
            e[c] = 1;
            reps.push_back(std::move(e));
        }
        return reps;
    }

private:
    Fp k_;
    std::size_t ambient_;
    std::vector<Vec> rows_;
    std::vector<std::size_t> pivots_;
};

struct RrefResult {
    std::vector<Vec> rows;
    std::vector<std::size_t> pivots;
};

inline RrefResult rref(const Matrix& m) {
    RrefResult r;
    r.rows.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) r.rows.push_back(m.row(i));
    rref_in_place(m.field(), r.rows, r.pivots);
    return r;
}

// Null space of m as a canonical subspace of F^(cols).
inline Subspace kernel(const Matrix& m) {
    const Fp& k = m.field();
    RrefResult r = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (std::size_t c : r.pivots) is_pivot[c] = true;
    std::vector<Vec> gens;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        Vec v(m.cols(), 0);
        v[f] = 1;
        for (std::size_t i = 0; i < r.pivots.size(); ++i) v[r.pivots[i]] = k.neg(r.rows[i][f]);
        gens.push_back(std::move(v));
    }
    return Subspace::span(k, m.cols(), std::move(gens));
}

inline std::size_t rank(const Matrix& m) { return rref(m).pivots.size(); }

// Deterministic particular solution of m x = b (free variables at zero).
inline std::optional<Vec> solve(const Matrix& m, const Vec& b) {
    if (b.size() != m.rows()) throw DimensionMismatch("solve");
    const Fp& k = m.field();
    std::vector<Vec> aug;
    aug.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Vec r = m.row(i);
        r.push_back(b[i]);
        aug.push_back(std::move(r));
    }
    std::vector<std::size_t> pivots;
    rref_in_place(k, aug, pivots);
    Vec x(m.cols(), 0);
    for (std::size_t i = 0; i < pivots.size(); ++i) {
        if (pivots[i] == m.cols()) return std::nullopt;
        x[pivots[i]] = aug[i][m.cols()];
    }
    return x;
}

inline std::optional<Matrix> inverse_matrix(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("inverse_matrix");
    const Fp& k = m.field();
    const std::size_t n = m.rows();
    std::vector<Vec> aug;
    aug.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec r = m.row(i);
        r.resize(2 * n, 0);
        r[n + i] = 1;
        aug.push_back(std::move(r));
    }
    std::vector<std::size_t> pivots;
    rref_in_place(k, aug, pivots);
    if (pivots.size() != n || pivots.back() != n - 1) return std::nullopt;
    Matrix inv(k, n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv.at(i, j) = aug[i][n + j];
    return inv;
}

inline Subspace Subspace::intersect(const Subspace& o) const {
    if (ambient_ != o.ambient_) throw DimensionMismatch("Subspace::intersect");
    // x = alpha . U = beta . V: solve [U^t | -V^t] (alpha; beta) = 0.
    const std::size_t u = rows_.size(), v = o.rows_.size();
    Matrix m(k_, ambient_, u + v);
    for (std::size_t j = 0; j < u; ++j)
        for (std::size_t i = 0; i < ambient_; ++i) m.at(i, j) = rows_[j][i];
    for (std::size_t j = 0; j < v; ++j)
        for (std::size_t i = 0; i < ambient_; ++i) m.at(i, u + j) = k_.neg(o.rows_[j][i]);
    Subspace ker = kernel(m);
    std::vector<Vec> gens;
    for (const Vec& ab : ker.basis()) {
        Vec x(ambient_, 0);
        for (std::size_t j = 0; j < u; ++j) vec_add_scaled(k_, x, rows_[j], ab[j]);
        gens.push_back(std::move(x));
    }
    return span(k_, ambient_, std::move(gens));
}

inline Subspace product_span(const Subspace& u, const Subspace& v,
                             const std::function<Vec(const Vec&, const Vec&)>& mul) {
    std::vector<Vec> gens;
    gens.reserve(u.dim() * v.dim());
    for (const Vec& a : u.basis())
        for (const Vec& b : v.basis()) gens.push_back(mul(a, b));
    return Subspace::span(u.field(), u.ambient_dim(), std::move(gens));
}

// Working coordinates on num/denom: representatives are RREF rows reduced
// against denom, so coordinates are read off pivot entries.  Constructed
// either from an explicit spanning set of the numerator or from the full
// ambient space.
class QuotientSpace {
public:
    QuotientSpace(Subspace denom, const std::vector<Vec>& numerator_span)
        : k_(denom.field()), ambient_(denom.ambient_dim()), denom_(std::move(denom)) {
        std::vector<Vec> red;
        red.reserve(numerator_span.size());
        for (const Vec& v : numerator_span) red.push_back(denom_.reduce(v));
        rref_in_place(k_, red, rep_pivots_);
        reps_ = std::move(red);
    }

    static QuotientSpace of_full_space(Subspace denom) {
        std::vector<Vec> reps = denom.quotient_basis();
        return QuotientSpace(std::move(denom), reps);
    }

    const Fp& field() const { return k_; }
    std::size_t ambient_dim() const { return ambient_; }
    std::size_t dim() const { return reps_.size(); }
    const std::vector<Vec>& reps() const { return reps_; }
    const Subspace& denominator() const { return denom_; }

    Vec coords(const Vec& v) const {
        Vec rem = denom_.reduce(v);
        Vec c(reps_.size(), 0);
        for (std::size_t i = 0; i < reps_.size(); ++i) {
            c[i] = rem[rep_pivots_[i]];
            if (c[i]) vec_add_scaled(k_, rem, reps_[i], k_.neg(c[i]));
        }
        if (!vec_is_zero(rem)) throw NotInSpan();
        return c;
    }

    bool in_numerator(const Vec& v) const {
        Vec rem = denom_.reduce(v);
        for (std::size_t i = 0; i < reps_.size(); ++i) {
            Scalar c = rem[rep_pivots_[i]];
            if (c) vec_add_scaled(k_, rem, reps_[i], k_.neg(c));
        }
        return vec_is_zero(rem);
    }

    Vec lift(const Vec& coords) const {
        if (coords.size() != reps_.size()) throw DimensionMismatch("QuotientSpace::lift");
        Vec v(ambient_, 0);
        for (std::size_t i = 0; i < reps_.size(); ++i) vec_add_scaled(k_, v, reps_[i], coords[i]);
        return v;
    }

    // Matrix of an ambient-space operator on quotient coordinates; op must
    // map numerator + denom into itself.
    Matrix induced_matrix(const std::function<Vec(const Vec&)>& op) const {
        std::vector<Vec> cols;
        cols.reserve(reps_.size());
        for (const Vec& r : reps_) cols.push_back(coords(op(r)));
        return Matrix::from_columns(k_, reps_.size(), cols);
    }

private:
    Fp k_;
    std::size_t ambient_;
    Subspace denom_;
    std::vector<Vec> reps_;
    std::vector<std::size_t> rep_pivots_;
};

}  // namespace dpw
