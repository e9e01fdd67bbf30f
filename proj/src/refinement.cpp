#include "tracelab/refinement.hpp"

#include "tracelab/error.hpp"

namespace tracelab {

LocalStrategy StrategyBasis::strategy(std::size_t i) const {
    if (i >= size()) throw InvalidArgument("strategy basis index out of range");
    LocalStrategy s = base;
    if (i == 0) return s;
    const auto [q, mv] = perturbations[i - 1];
    std::fill(s.choice[q].begin(), s.choice[q].end(), Rational(0));
    s.choice[q][mv] = 1;
    return s;
}

std::string StrategyBasis::id(std::size_t i) const {
    if (i == 0) return "base";
    const auto [q, mv] = perturbations.at(i - 1);
    return "q" + std::to_string(q) + ":m" + std::to_string(mv);
}

StrategyBasis strategy_basis(const Mdp& m, BaseChoice choice) {
    require_valid(m);
    std::vector<std::size_t> picks(m.num_states());
    for (StateId q = 0; q < m.num_states(); ++q) picks[q] = choice == BaseChoice::First ? 0 : m.num_moves(q) - 1;
    StrategyBasis s;
    s.base = LocalStrategy::pure(m, picks);
    for (StateId q = 0; q < m.num_states(); ++q) {
        for (std::size_t i = 0; i < m.num_moves(q); ++i) s.perturbations.emplace_back(q, i);
    }
    return s;
}

StrategyBasis extend_basis(const StrategyBasis& sigma, const Mdp& union_model) {
    StrategyBasis out = sigma;
    for (StateId q = sigma.base.choice.size(); q < union_model.num_states(); ++q) {
        if (union_model.num_moves(q) != 1) throw InvalidArgument("extend_basis: right part must be a Markov chain");
        out.base.choice.push_back({Rational(1)});
    }
    return out;
}

LiftedPair lift(const Mdp& mdp, const Mdp& mc, BaseChoice choice) {
    require_valid(mdp);
    require_valid(mc);
    require_mc(mc, "right-hand model");
    LiftedPair lp;
    lp.un = disjoint_union(mdp, mc);
    lp.sigma = extend_basis(strategy_basis(mdp, choice), lp.un.model);
    const Mdp& u = lp.un.model;
    const std::size_t n = u.num_states();
    const std::size_t sigma_size = lp.sigma.size();
    const Rational scale(1, static_cast<unsigned long>(sigma_size));

    Mdp lifted;
    lifted.states = u.states;
    lifted.moves.assign(n, std::vector<Move>(1));
    for (std::size_t i = 0; i < sigma_size; ++i) {
        const LocalStrategy alpha = lp.sigma.strategy(i);
        for (LabelId a = 0; a < u.num_labels(); ++a) {
            const LabelId b = lifted.labels.size();
            lifted.labels.push_back("b(" + lp.sigma.id(i) + "," + u.labels[a] + ")");
            lp.label_map.emplace_back(i, a);
            const RatMatrix delta = transition_matrix(u, alpha, a);
            for (StateId q = 0; q < n; ++q) {
                for (StateId t = 0; t < n; ++t) {
                    if (sgn(delta(q, t)) != 0) lifted.moves[q][0].add(b, t, scale * delta(q, t));
                }
            }
        }
    }
    lp.d_prime = lifted;
    lp.d_prime.initial = lp.un.left_initial.weights;
    lp.c_prime = std::move(lifted);
    lp.c_prime.initial = lp.un.right_initial.weights;
    return lp;
}

RefinementVerdict refines_mc(const Mdp& mdp, const Mdp& mc, BaseChoice choice) {
    RefinementVerdict v;
    v.lifted = lift(mdp, mc, choice);
    v.sigma_size = v.lifted.sigma.size();
    v.lifted_labels = v.lifted.d_prime.num_labels();
    v.equivalence = mc_equiv_shared(v.lifted.d_prime, v.lifted.un.left_initial, v.lifted.un.right_initial);
    v.holds = v.equivalence.equivalent();
    if (!v.holds) {
        v.lifted_witness = v.equivalence.witness;
        v.lhs_prob = v.equivalence.lhs_prob;
        v.rhs_prob = v.equivalence.rhs_prob;
        for (LabelId b : *v.lifted_witness) {
            const auto [i, a] = v.lifted.label_map[b];
            v.decoded.push_back({v.lifted.sigma.id(i), v.lifted.un.model.labels[a]});
        }
    }
    return v;
}

} // namespace tracelab
