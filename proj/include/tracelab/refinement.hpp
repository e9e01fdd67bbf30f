#pragma once

#include "tracelab/mc_equiv.hpp"
#include "tracelab/model.hpp"
#include "tracelab/semantics.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tracelab {

/// Which move the base strategy alpha_0 plays at each state.
enum class BaseChoice { First, Last };

/// Sigma = {alpha_0} u {alpha_{q,m}}: alpha_{q,m} plays m at q and agrees
/// with alpha_0 elsewhere. Index 0 is alpha_0; index i > 0 is
/// perturbations[i - 1].
struct StrategyBasis {
    LocalStrategy base;
    std::vector<std::pair<StateId, std::size_t>> perturbations;

    std::size_t size() const { return 1 + perturbations.size(); }
    LocalStrategy strategy(std::size_t i) const;
    /// "base" or "q<state>:m<move>".
    std::string id(std::size_t i) const;
};

StrategyBasis strategy_basis(const Mdp& m, BaseChoice choice = BaseChoice::First);

/// Extends a strategy basis of the left part of a union to the whole union;
/// states past the left part have a single move, which every member plays.
StrategyBasis extend_basis(const StrategyBasis& sigma, const Mdp& union_model);

/// D' and C' over L' = {b(alpha, a)}: one shared transition structure over
/// the union with Delta'(b(alpha, a)) = Delta_alpha(a) / |Sigma|, differing
/// only in the initial distribution.
struct LiftedPair {
    UnionModel un;
    StrategyBasis sigma;
    Mdp d_prime;
    Mdp c_prime;
    /// Lifted label index -> (Sigma index, original label).
    std::vector<std::pair<std::size_t, LabelId>> label_map;
};

LiftedPair lift(const Mdp& mdp, const Mdp& mc, BaseChoice choice = BaseChoice::First);

struct LiftedStep {
    std::string strategy;
    std::string label;
};

struct RefinementVerdict {
    bool holds = true;
    /// Distinguishing word over L' (names of d_prime's labels).
    std::optional<Word> lifted_witness;
    std::vector<LiftedStep> decoded;
    std::optional<Rational> lhs_prob;
    std::optional<Rational> rhs_prob;
    std::size_t sigma_size = 0;
    std::size_t lifted_labels = 0;
    EquivVerdict equivalence;
    LiftedPair lifted;
};

/// MDP D refines MC C iff the lifted chains are trace equivalent.
RefinementVerdict refines_mc(const Mdp& mdp, const Mdp& mc, BaseChoice choice = BaseChoice::First);

} // namespace tracelab
