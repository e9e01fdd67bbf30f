#include "helpers.hpp"
#include "random_models.hpp"
#include "reference.hpp"

#include "tracelab/error.hpp"
#include "tracelab/gadgets.hpp"
#include "tracelab/mc_equiv.hpp"
#include "tracelab/restricted.hpp"

#include <doctest.h>

using namespace tracelab;
using namespace tracelab::testing;

namespace {

// fig1 with p0's move split into two identical copies
Mdp fig1_doubled() {
    Mdp m = fig1_mc();
    for (auto& ms : m.moves) ms.push_back(ms.front());
    return m;
}

} // namespace

TEST_SUITE("restricted") {
    TEST_CASE("pure strategy enumeration") {
        const Mdp g = fig2_mdp();
        CHECK(pure_strategy_count(g, 100, "x") == 2);
        std::vector<std::vector<std::size_t>> seen;
        for_each_pure_strategy(g, [&](const std::vector<std::size_t>& c) {
            seen.push_back(c);
            return true;
        });
        CHECK(seen == std::vector<std::vector<std::size_t>>{{0, 0}, {0, 1}});

        const Mdp two = one_state({"a"}, {Move::dirac(0, 0), Move::dirac(0, 0)});
        Mdp wide = two;
        wide.states = {"s", "t"};
        wide.initial = {1, 0};
        wide.moves = {two.moves[0], two.moves[0]};
        seen.clear();
        for_each_pure_strategy(wide, [&](const std::vector<std::size_t>& c) {
            seen.push_back(c);
            return seen.size() < 3;
        });
        CHECK(seen == std::vector<std::vector<std::size_t>>{{0, 0}, {1, 0}, {0, 1}});
        CHECK_THROWS_AS(pure_strategy_count(wide, 3, "x"), GuardExceeded);
    }

    TEST_CASE("subset sum examples") {
        const GadgetOutput yes = gadget_subset_sum({1, 2, 3}, 4);
        const PmVerdict v = refine_mc_mdp_pm(yes.left, yes.right);
        CHECK(v.yes);
        REQUIRE(v.witness);
        long sum = 0;
        const std::vector<long> s{1, 2, 3};
        for (std::size_t i = 0; i < 3; ++i) sum += (*v.witness)[i] == 0 ? s[i] : 0;
        CHECK(sum == 4);
        CHECK(mc_equiv(yes.left, induced_mc(yes.right, LocalStrategy::pure(yes.right, *v.witness))).equivalent());

        const GadgetOutput no = gadget_subset_sum({2, 4}, 3);
        CHECK_FALSE(refine_mc_mdp_pm(no.left, no.right).yes);
        CHECK(refine_mc_mdp_pm(no.left, no.right).strategies_checked == 4);
    }

    TEST_CASE("qss examples") {
        const GadgetOutput yes = gadget_qss({1}, {1}, 1);
        CHECK(refine_pm_pm(yes.left, yes.right).yes);
        const GadgetOutput no = gadget_qss({2}, {1}, 1);
        const PmVerdict v = refine_pm_pm(no.left, no.right);
        CHECK_FALSE(v.yes);
        REQUIRE(v.unmatched);
        // S = {2} cannot be completed
        CHECK((*v.unmatched)[0] == 0);
    }

    TEST_CASE("pm refinement of a model against itself") {
        Rng rng(103);
        for (int trial = 0; trial < 15; ++trial) {
            ModelShape shape;
            shape.max_states = 3;
            const Mdp m = random_mdp(rng, shape);
            CHECK(refine_pm_pm(m, m).yes);
        }
        CHECK(refine_mc_mdp_pm(fig1_mc(), fig1_doubled()).yes);
        CHECK_FALSE(refine_mc_mdp_pm(fig1_mc(), fig2_mdp()).yes);
    }

    TEST_CASE("etr counts") {
        const EtrInstance a = emit_etr(fig1_mc(), fig2_mdp());
        CHECK(a.variables.size() == 128);
        CHECK(a.variables.size() == EtrInstance::expected_variables(3, 5, 4));
        CHECK(a.constraints.size() == EtrInstance::expected_assertions(2, 3, 5, 4));

        const EtrInstance b = emit_etr(fig1_mc(), fig1_doubled());
        CHECK(b.variables.size() == 186);
        CHECK(b.constraints.size() == EtrInstance::expected_assertions(3, 6, 6, 4));
        CHECK_THROWS(emit_etr(fig2_mdp(), fig1_mc()));
    }

    TEST_CASE("check_assignment") {
        const Mdp c = fig1_mc();
        const Mdp d = fig1_doubled();
        const EtrInstance inst = emit_etr(c, d);

        std::map<std::string, Rational> zero;
        for (const auto& v : inst.variables) zero[v] = 0;
        CHECK_FALSE(check_assignment(inst, zero));

        MemorylessStrategy alpha;
        alpha.choice = {{r(1, 3), r(2, 3)}, {r(1), r(0)}, {r(1, 2), r(1, 2)}};
        const auto sol = construct_solution(inst, c, d, alpha);
        REQUIRE(sol);
        CHECK(check_assignment(inst, *sol));

        auto bent = *sol;
        bent[inst.variables[inst.x_index[0][0]]] = r(1, 2);
        CHECK_FALSE(check_assignment(inst, bent));
        bent = *sol;
        bent[inst.variables[inst.f_index(0, 0)]] += 1;
        CHECK_FALSE(check_assignment(inst, bent));

        auto missing = *sol;
        missing.erase(inst.variables.front());
        CHECK_THROWS_AS(check_assignment(inst, missing), InvalidArgument);

        const EtrInstance other = emit_etr(fig1_mc(), fig2_mdp());
        CHECK_FALSE(construct_solution(other, fig1_mc(), fig2_mdp(), LocalStrategy::uniform(fig2_mdp())));
    }

    TEST_CASE("smtlib output is well formed") {
        const std::string script = to_smtlib(emit_etr(fig1_mc(), fig2_mdp()));
        CHECK(smtlib_syntax_error(script).empty());
        CHECK(script.find("(set-logic QF_NRA)") != std::string::npos);
        CHECK(script.rfind("(check-sat)") != std::string::npos);
        CHECK_FALSE(smtlib_syntax_error("(assert (= x 0.0)").empty());
    }
}
