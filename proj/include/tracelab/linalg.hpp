#pragma once

#include "tracelab/rational.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace tracelab {

using RatVector = std::vector<Rational>;

RatVector zero_vector(std::size_t dim);
RatVector ones_vector(std::size_t dim);
bool is_zero(const RatVector& v);
Rational dot(const RatVector& a, const RatVector& b);
RatVector operator+(const RatVector& a, const RatVector& b);
RatVector operator-(const RatVector& a, const RatVector& b);
RatVector operator*(const Rational& s, const RatVector& v);
RatVector concat(const RatVector& a, const RatVector& b);

/// Dense row-major rational matrix.
class RatMatrix {
public:
    RatMatrix() = default;
    RatMatrix(std::size_t rows, std::size_t cols);

    static RatMatrix identity(std::size_t n);
    /// Matrix whose columns are the given vectors (all of one dimension).
    static RatMatrix from_columns(std::size_t rows, const std::vector<RatVector>& columns);
    static RatMatrix from_rows(std::size_t cols, const std::vector<RatVector>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    RatVector row(std::size_t r) const;
    RatVector col(std::size_t c) const;
    RatMatrix transpose() const;

    /// Matrix times column vector.
    RatVector apply(const RatVector& column) const;
    /// Row vector times matrix.
    RatVector left_apply(const RatVector& row) const;

    friend RatMatrix operator*(const RatMatrix& a, const RatMatrix& b);
    friend RatMatrix operator+(const RatMatrix& a, const RatMatrix& b);
    friend RatMatrix operator*(const Rational& s, const RatMatrix& m);
    friend bool operator==(const RatMatrix& a, const RatMatrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

/// A basis of a subspace of Q^dim kept in reduced row-echelon form: each
/// vector has leading entry 1 at its pivot, zeros at every other pivot, and
/// vectors are ordered by pivot column. The echelon vectors are therefore a
/// canonical description of the span, so two bases span the same space iff
/// their `vectors()` are equal.
///
/// Alongside the echelon form the basis remembers each independent vector as
/// it was inserted (`generators()`, insertion order) together with a caller
/// supplied tag, which the decision procedures use for witness extraction.
class Basis {
public:
    static constexpr std::size_t kNoTag = std::numeric_limits<std::size_t>::max();

    explicit Basis(std::size_t dim = 0) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    std::size_t rank() const { return rows_.size(); }

    const std::vector<RatVector>& vectors() const { return rows_; }
    const std::vector<std::size_t>& pivots() const { return pivots_; }
    const std::vector<RatVector>& generators() const { return generators_; }
    const std::vector<std::size_t>& tags() const { return tags_; }

    /// Adds `v` to the span. Returns true iff the span grew.
    bool insert(const RatVector& v, std::size_t tag = kNoTag);
    bool contains(const RatVector& v) const;

    /// Every generator lies in `other`'s span.
    bool subspace_of(const Basis& other) const;

    friend bool operator==(const Basis& a, const Basis& b) {
        return a.dim_ == b.dim_ && a.rows_ == b.rows_;
    }

private:
    RatVector reduce(RatVector v) const;

    std::size_t dim_;
    std::vector<RatVector> rows_;
    std::vector<std::size_t> pivots_;
    std::vector<RatVector> generators_;
    std::vector<std::size_t> tags_;
};

/// Functional form: the updated basis and whether `v` was new.
std::pair<Basis, bool> basis_insert(Basis basis, const RatVector& v, std::size_t tag = Basis::kNoTag);
bool in_span(const Basis& basis, const RatVector& v);

enum class Relation { LessEqual, Less, Equal };

struct LinearConstraint {
    RatVector coefficients;
    Relation relation;
    Rational bound;
};

/// Conjunction of `coefficients . x  (<=|<|=)  bound` over Q^dim.
class LinearConstraintSystem {
public:
    explicit LinearConstraintSystem(std::size_t dim) : dim_(dim) {}

    std::size_t dim() const { return dim_; }
    const std::vector<LinearConstraint>& constraints() const { return constraints_; }

    void add(RatVector coefficients, Relation relation, Rational bound);
    /// coefficients . x >= bound, stored as its negation.
    void add_greater_equal(const RatVector& coefficients, const Rational& bound);

    bool satisfied_by(const RatVector& x) const;

private:
    std::size_t dim_;
    std::vector<LinearConstraint> constraints_;
};

/// A rational point satisfying every constraint, or nullopt when the system
/// is infeasible. Exact two-phase simplex (phase one only) with Bland's rule;
/// strict rows are handled by homogenizing and replacing `< 0` with `<= -1`.
/// The returned point has been checked by substitution.
std::optional<RatVector> lp_feasible(const LinearConstraintSystem& system);

/// Some x with A x = b, or nullopt if none exists.
std::optional<RatVector> solve_linear(const RatMatrix& a, const RatVector& b);

std::size_t matrix_rank(const RatMatrix& m);

} // namespace tracelab
