#include "helpers.hpp"
#include "random_models.hpp"

#include "tracelab/linalg.hpp"

#include <doctest.h>

using namespace tracelab;
using namespace tracelab::testing;

namespace {

RatVector vec(std::initializer_list<long> xs) {
    RatVector v;
    for (long x : xs) v.push_back(Rational(x));
    return v;
}

RatMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    RatMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = make_rational(uniform_int(rng, -5, 5), uniform_int(rng, 1, 4));
    }
    return m;
}

} // namespace

TEST_SUITE("linalg") {
    TEST_CASE("basis_insert examples") {
        Basis b(3);
        b.insert(vec({1, 2, 3}));
        auto [same, changed] = basis_insert(b, vec({0, 0, 0}));
        CHECK_FALSE(changed);
        CHECK(same == b);

        Basis c(2);
        c.insert(vec({1, 1}));
        CHECK_FALSE(basis_insert(c, vec({2, 2})).second);
        auto [wider, grew] = basis_insert(c, vec({1, 0}));
        CHECK(grew);
        CHECK(wider.rank() == 2);
        CHECK_THROWS(c.insert(vec({1, 2, 3})));
    }

    TEST_CASE("in_span examples") {
        Basis b(2);
        b.insert(vec({1, 1}));
        CHECK(in_span(b, vec({3, 3})));
        CHECK_FALSE(in_span(b, vec({1, 0})));
        b.insert(vec({1, 0}));
        CHECK(in_span(b, vec({-7, 5})));
        CHECK(in_span(b, RatVector{make_rational(1, 3), make_rational(-2, 9)}));
    }

    TEST_CASE("echelon form is canonical and insertion is idempotent") {
        Rng rng(7);
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t d = static_cast<std::size_t>(uniform_int(rng, 1, 5));
            const std::size_t k = static_cast<std::size_t>(uniform_int(rng, 1, 6));
            Basis a(d), b(d);
            std::vector<RatVector> vs;
            for (std::size_t i = 0; i < k; ++i) vs.push_back(random_matrix(rng, 1, d).row(0));
            for (const auto& v : vs) a.insert(v);
            for (auto it = vs.rbegin(); it != vs.rend(); ++it) b.insert(*it);
            CHECK(a == b);
            CHECK(a.rank() <= std::min(k, d));
            for (const auto& v : vs) CHECK_FALSE(basis_insert(a, v).second);
            for (std::size_t i = 0; i < a.rank(); ++i) {
                const auto p = a.pivots()[i];
                CHECK(a.vectors()[i][p] == 1);
                for (std::size_t j = 0; j < a.rank(); ++j) {
                    if (j != i) CHECK(a.vectors()[j][p] == 0);
                }
            }
        }
    }

    TEST_CASE("matrix products are exact and associative") {
        Rng rng(11);
        for (int trial = 0; trial < 30; ++trial) {
            const auto a = random_matrix(rng, 2, 3);
            const auto b = random_matrix(rng, 3, 4);
            const auto c = random_matrix(rng, 4, 2);
            CHECK((a * b) * c == a * (b * c));
            const RatVector x = random_matrix(rng, 1, 2).row(0);
            CHECK(a.left_apply(x) == (RatMatrix::from_rows(2, {x}) * a).row(0));
            CHECK(a.transpose().transpose() == a);
        }
        CHECK(matrix_rank(RatMatrix::identity(3)) == 3);
    }

    TEST_CASE("lp_feasible examples") {
        LinearConstraintSystem infeasible(1);
        infeasible.add_greater_equal(vec({1}), 1);
        infeasible.add_greater_equal(vec({-1}), 0);
        CHECK_FALSE(lp_feasible(infeasible));

        LinearConstraintSystem empty(2);
        auto zero = lp_feasible(empty);
        REQUIRE(zero);
        CHECK(*zero == vec({0, 0}));

        LinearConstraintSystem sys(2);
        sys.add(vec({1, 1}), Relation::LessEqual, 1);
        sys.add_greater_equal(vec({1, 0}), 0);
        sys.add_greater_equal(vec({0, 1}), 0);
        sys.add(vec({1, -1}), Relation::Equal, make_rational(1, 2));
        auto p = lp_feasible(sys);
        REQUIRE(p);
        CHECK(sys.satisfied_by(*p));
        CHECK(sys.satisfied_by(RatVector{make_rational(3, 4), make_rational(1, 4)}));
    }

    TEST_CASE("strict constraints") {
        LinearConstraintSystem sys(2);
        sys.add(vec({1, 0}), Relation::Less, 0);
        sys.add(vec({-1, 1}), Relation::Less, 0);
        auto p = lp_feasible(sys);
        REQUIRE(p);
        CHECK(sys.satisfied_by(*p));
        LinearConstraintSystem contradiction(1);
        contradiction.add(vec({1}), Relation::Less, 0);
        contradiction.add(vec({-1}), Relation::Less, 0);
        CHECK_FALSE(lp_feasible(contradiction));
    }

    TEST_CASE("random systems: feasible answers substitute, infeasible answers reject samples") {
        Rng rng(5);
        int feasible = 0;
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t d = static_cast<std::size_t>(uniform_int(rng, 1, 3));
            LinearConstraintSystem sys(d);
            const int rows = uniform_int(rng, 1, 5);
            for (int i = 0; i < rows; ++i) {
                const auto rel = static_cast<Relation>(uniform_int(rng, 0, 2));
                sys.add(random_matrix(rng, 1, d).row(0), rel, make_rational(uniform_int(rng, -3, 3), 1));
            }
            const auto p = lp_feasible(sys);
            if (p) {
                ++feasible;
                CHECK(sys.satisfied_by(*p));
            } else {
                for (int s = 0; s < 100; ++s) CHECK_FALSE(sys.satisfied_by(random_matrix(rng, 1, d).row(0)));
            }
        }
        CHECK(feasible > 0);
    }

    TEST_CASE("solve_linear") {
        RatMatrix a = RatMatrix::from_rows(2, {vec({1, 1}), vec({1, -1})});
        auto x = solve_linear(a, vec({3, 1}));
        REQUIRE(x);
        CHECK(*x == vec({2, 1}));
        RatMatrix singular = RatMatrix::from_rows(2, {vec({1, 1}), vec({2, 2})});
        CHECK_FALSE(solve_linear(singular, vec({1, 3})));
        CHECK(solve_linear(singular, vec({1, 2})));
    }
}
