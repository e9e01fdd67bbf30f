#include "tracelab/linalg.hpp"

#include "tracelab/error.hpp"

#include <algorithm>

namespace tracelab {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                              std::to_string(b) + ")");
    }
}

} // namespace

RatVector zero_vector(std::size_t dim) { return RatVector(dim); }

RatVector ones_vector(std::size_t dim) { return RatVector(dim, Rational(1)); }

bool is_zero(const RatVector& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& x) { return sgn(x) == 0; });
}

Rational dot(const RatVector& a, const RatVector& b) {
    require_same_dim(a.size(), b.size(), "dot");
    Rational acc;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (sgn(a[i]) != 0 && sgn(b[i]) != 0) acc += a[i] * b[i];
    }
    return acc;
}

RatVector operator+(const RatVector& a, const RatVector& b) {
    require_same_dim(a.size(), b.size(), "vector +");
    RatVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

RatVector operator-(const RatVector& a, const RatVector& b) {
    require_same_dim(a.size(), b.size(), "vector -");
    RatVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

RatVector operator*(const Rational& s, const RatVector& v) {
    RatVector r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = s * v[i];
    return r;
}

RatVector concat(const RatVector& a, const RatVector& b) {
    RatVector r = a;
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

// --- RatMatrix -------------------------------------------------------------

RatMatrix::RatMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

RatMatrix RatMatrix::identity(std::size_t n) {
    RatMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

RatMatrix RatMatrix::from_columns(std::size_t rows, const std::vector<RatVector>& columns) {
    RatMatrix m(rows, columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        require_same_dim(columns[c].size(), rows, "from_columns");
        for (std::size_t r = 0; r < rows; ++r) m(r, c) = columns[c][r];
    }
    return m;
}

RatMatrix RatMatrix::from_rows(std::size_t cols, const std::vector<RatVector>& rows) {
    RatMatrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        require_same_dim(rows[r].size(), cols, "from_rows");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
}

RatVector RatMatrix::row(std::size_t r) const {
    return RatVector(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                     data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_));
}

RatVector RatMatrix::col(std::size_t c) const {
    RatVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

RatMatrix RatMatrix::transpose() const {
    RatMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

RatVector RatMatrix::apply(const RatVector& column) const {
    require_same_dim(column.size(), cols_, "matrix * column");
    RatVector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        Rational acc;
        for (std::size_t c = 0; c < cols_; ++c) {
            const Rational& e = (*this)(r, c);
            if (sgn(e) != 0 && sgn(column[c]) != 0) acc += e * column[c];
        }
        out[r] = acc;
    }
    return out;
}

RatVector RatMatrix::left_apply(const RatVector& row_vec) const {
    require_same_dim(row_vec.size(), rows_, "row * matrix");
    RatVector out(cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        if (sgn(row_vec[r]) == 0) continue;
        for (std::size_t c = 0; c < cols_; ++c) {
            const Rational& e = (*this)(r, c);
            if (sgn(e) != 0) out[c] += row_vec[r] * e;
        }
    }
    return out;
}

RatMatrix operator*(const RatMatrix& a, const RatMatrix& b) {
    require_same_dim(a.cols_, b.rows_, "matrix product");
    RatMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const Rational& aik = a(i, k);
            if (sgn(aik) == 0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) {
                const Rational& bkj = b(k, j);
                if (sgn(bkj) != 0) out(i, j) += aik * bkj;
            }
        }
    }
    return out;
}

RatMatrix operator+(const RatMatrix& a, const RatMatrix& b) {
    require_same_dim(a.rows_, b.rows_, "matrix +");
    require_same_dim(a.cols_, b.cols_, "matrix +");
    RatMatrix out(a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.data_.size(); ++i) out.data_[i] = a.data_[i] + b.data_[i];
    return out;
}

RatMatrix operator*(const Rational& s, const RatMatrix& m) {
    RatMatrix out = m;
    for (auto& e : out.data_) e *= s;
    return out;
}

// --- Basis -----------------------------------------------------------------

RatVector Basis::reduce(RatVector v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const Rational factor = v[pivots_[i]];
        if (sgn(factor) == 0) continue;
        const RatVector& row = rows_[i];
        for (std::size_t c = pivots_[i]; c < dim_; ++c) {
            if (sgn(row[c]) != 0) v[c] -= factor * row[c];
        }
    }
    return v;
}

bool Basis::insert(const RatVector& v, std::size_t tag) {
    require_same_dim(v.size(), dim_, "basis insert");
    RatVector r = reduce(v);
    const auto lead = std::find_if(r.begin(), r.end(), [](const Rational& x) { return sgn(x) != 0; });
    if (lead == r.end()) return false;
    const std::size_t pivot = static_cast<std::size_t>(lead - r.begin());
    const Rational inv = 1 / r[pivot];
    for (std::size_t c = pivot; c < dim_; ++c) r[c] *= inv;

    // clear the new pivot column from the existing rows
    for (auto& row : rows_) {
        const Rational factor = row[pivot];
        if (sgn(factor) == 0) continue;
        for (std::size_t c = pivot; c < dim_; ++c) {
            if (sgn(r[c]) != 0) row[c] -= factor * r[c];
        }
    }
    const auto pos = static_cast<std::size_t>(std::lower_bound(pivots_.begin(), pivots_.end(), pivot) - pivots_.begin());
    rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(r));
    pivots_.insert(pivots_.begin() + static_cast<std::ptrdiff_t>(pos), pivot);
    generators_.push_back(v);
    tags_.push_back(tag);
    return true;
}

bool Basis::contains(const RatVector& v) const {
    require_same_dim(v.size(), dim_, "span query");
    return is_zero(reduce(v));
}

bool Basis::subspace_of(const Basis& other) const {
    return std::all_of(rows_.begin(), rows_.end(), [&](const RatVector& r) { return other.contains(r); });
}

std::pair<Basis, bool> basis_insert(Basis basis, const RatVector& v, std::size_t tag) {
    const bool changed = basis.insert(v, tag);
    return {std::move(basis), changed};
}

bool in_span(const Basis& basis, const RatVector& v) { return basis.contains(v); }

// --- Linear constraints ----------------------------------------------------

void LinearConstraintSystem::add(RatVector coefficients, Relation relation, Rational bound) {
    require_same_dim(coefficients.size(), dim_, "constraint");
    constraints_.push_back({std::move(coefficients), relation, std::move(bound)});
}

void LinearConstraintSystem::add_greater_equal(const RatVector& coefficients, const Rational& bound) {
    add(Rational(-1) * coefficients, Relation::LessEqual, -bound);
}

bool LinearConstraintSystem::satisfied_by(const RatVector& x) const {
    require_same_dim(x.size(), dim_, "substitution");
    for (const auto& c : constraints_) {
        const Rational lhs = dot(c.coefficients, x);
        switch (c.relation) {
        case Relation::LessEqual:
            if (lhs > c.bound) return false;
            break;
        case Relation::Less:
            if (lhs >= c.bound) return false;
            break;
        case Relation::Equal:
            if (lhs != c.bound) return false;
            break;
        }
    }
    return true;
}

namespace {

// Phase-one simplex over free variables for rows `a.x <= b` (is_eq false) or
// `a.x = b` (is_eq true). Returns a feasible point or nullopt.
struct Row {
    RatVector a;
    bool is_eq;
    Rational b;
};

std::optional<RatVector> phase_one(std::size_t n, const std::vector<Row>& rows) {
    const std::size_t m = rows.size();
    if (m == 0) return zero_vector(n);

    std::size_t slack_count = 0;
    for (const auto& r : rows) slack_count += r.is_eq ? 0 : 1;

    // columns: x+ (n), x- (n), slacks, artificials (m), rhs
    const std::size_t slack_base = 2 * n;
    const std::size_t art_base = slack_base + slack_count;
    const std::size_t width = art_base + m;
    const std::size_t rhs = width;

    std::vector<RatVector> t(m + 1, RatVector(width + 1));
    std::vector<std::size_t> basic(m);
    std::size_t slack = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const Row& r = rows[i];
        const bool flip = r.b < 0;
        const Rational sign = flip ? -1 : 1;
        for (std::size_t j = 0; j < n; ++j) {
            t[i][j] = sign * r.a[j];
            t[i][n + j] = -sign * r.a[j];
        }
        if (!r.is_eq) t[i][slack_base + slack++] = sign;
        t[i][art_base + i] = 1;
        t[i][rhs] = sign * r.b;
        basic[i] = art_base + i;
    }
    // objective row: minimize the sum of artificials, expressed in the
    // non-basic columns
    RatVector& obj = t[m];
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < art_base; ++j) obj[j] -= t[i][j];
        obj[rhs] -= t[i][rhs];
    }

    for (;;) {
        std::size_t enter = width;
        for (std::size_t j = 0; j < width; ++j) {
            if (obj[j] < 0) {
                enter = j;
                break;
            }
        }
        if (enter == width) break;

        std::size_t leave = m;
        Rational best;
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter] <= 0) continue;
            Rational ratio = t[i][rhs] / t[i][enter];
            if (leave == m || ratio < best || (ratio == best && basic[i] < basic[leave])) {
                leave = i;
                best = ratio;
            }
        }
        // the phase-one objective is bounded below by zero
        if (leave == m) throw Error("simplex: unbounded phase-one objective");

        const Rational inv = 1 / t[leave][enter];
        for (auto& e : t[leave]) e *= inv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave) continue;
            const Rational factor = t[i][enter];
            if (sgn(factor) == 0) continue;
            for (std::size_t j = 0; j <= width; ++j) {
                if (sgn(t[leave][j]) != 0) t[i][j] -= factor * t[leave][j];
            }
        }
        basic[leave] = enter;
    }

    if (sgn(obj[rhs]) != 0) return std::nullopt;

    RatVector x(n);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t col = basic[i];
        if (col < n) {
            x[col] += t[i][rhs];
        } else if (col < 2 * n) {
            x[col - n] -= t[i][rhs];
        }
    }
    return x;
}

} // namespace

std::optional<RatVector> lp_feasible(const LinearConstraintSystem& system) {
    const std::size_t n = system.dim();
    const bool has_strict = std::any_of(system.constraints().begin(), system.constraints().end(),
                                        [](const LinearConstraint& c) { return c.relation == Relation::Less; });
    std::optional<RatVector> point;
    if (!has_strict) {
        std::vector<Row> rows;
        for (const auto& c : system.constraints())
            rows.push_back({c.coefficients, c.relation == Relation::Equal, c.bound});
        point = phase_one(n, rows);
    } else {
        // x = y / s with s > 0: every row becomes homogeneous in (y, s), and a
        // homogeneous system with strict rows is feasible iff it is feasible
        // with each strict row tightened to <= -1.
        std::vector<Row> rows;
        for (const auto& c : system.constraints()) {
            RatVector a = c.coefficients;
            a.push_back(-c.bound);
            switch (c.relation) {
            case Relation::LessEqual:
                rows.push_back({std::move(a), false, 0});
                break;
            case Relation::Less:
                rows.push_back({std::move(a), false, -1});
                break;
            case Relation::Equal:
                rows.push_back({std::move(a), true, 0});
                break;
            }
        }
        RatVector s_row(n + 1);
        s_row[n] = -1;
        rows.push_back({std::move(s_row), false, -1});
        auto y = phase_one(n + 1, rows);
        if (y) {
            const Rational s = (*y)[n];
            RatVector x(n);
            for (std::size_t j = 0; j < n; ++j) x[j] = (*y)[j] / s;
            point = std::move(x);
        }
    }
    if (point && !system.satisfied_by(*point)) {
        throw Error("lp_feasible: simplex returned a point that fails substitution");
    }
    return point;
}

std::optional<RatVector> solve_linear(const RatMatrix& a, const RatVector& b) {
    require_same_dim(b.size(), a.rows(), "solve_linear");
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    std::vector<RatVector> aug(rows, RatVector(cols + 1));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) aug[r][c] = a(r, c);
        aug[r][cols] = b[r];
    }
    std::vector<std::size_t> pivot_cols;
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t p = rank;
        while (p < rows && sgn(aug[p][c]) == 0) ++p;
        if (p == rows) continue;
        std::swap(aug[p], aug[rank]);
        const Rational inv = 1 / aug[rank][c];
        for (auto& e : aug[rank]) e *= inv;
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rank || sgn(aug[r][c]) == 0) continue;
            const Rational factor = aug[r][c];
            for (std::size_t k = c; k <= cols; ++k) aug[r][k] -= factor * aug[rank][k];
        }
        pivot_cols.push_back(c);
        ++rank;
    }
    for (std::size_t r = rank; r < rows; ++r) {
        if (sgn(aug[r][cols]) != 0) return std::nullopt;
    }
    RatVector x(cols);
    for (std::size_t i = 0; i < rank; ++i) x[pivot_cols[i]] = aug[i][cols];
    return x;
}

std::size_t matrix_rank(const RatMatrix& m) {
    Basis basis(m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) basis.insert(m.row(r));
    return basis.rank();
}

} // namespace tracelab
