#include "tracelab/mc_equiv.hpp"

#include "tracelab/error.hpp"

#include <deque>

namespace tracelab {

MatrixClosure closure_of_ones(const std::vector<RatMatrix>& matrices, std::size_t dim) {
    for (const auto& m : matrices) {
        if (m.rows() != dim || m.cols() != dim) throw InvalidArgument("closure: matrix dimension mismatch");
    }
    MatrixClosure c;
    c.basis = Basis(dim);
    if (dim == 0) return c;

    std::deque<std::size_t> queue;
    auto add = [&](const RatVector& v, Word w, std::size_t level) {
        if (!c.basis.insert(v, c.words.size())) return;
        c.words.push_back(std::move(w));
        c.levels.push_back(level);
        ++c.insertions;
        queue.push_back(c.words.size() - 1);
    };
    add(ones_vector(dim), {}, 0);
    while (!queue.empty()) {
        const std::size_t i = queue.front();
        queue.pop_front();
        const RatVector u = c.basis.generators()[i];
        for (std::size_t a = 0; a < matrices.size(); ++a) {
            Word w{a};
            w.insert(w.end(), c.words[i].begin(), c.words[i].end());
            add(matrices[a].apply(u), std::move(w), c.levels[i] + 1);
        }
    }
    // generators are discovered level by level, so the last level present
    // is the last one that grew the space
    c.stabilized_at = c.levels.back();
    return c;
}

EquivVerdict mc_equiv_shared(const Mdp& mc, const SubDist& mu1, const SubDist& mu2) {
    require_valid(mc);
    require_mc(mc, "model");
    const std::size_t n = mc.num_states();
    if (mu1.size() != n || mu2.size() != n) throw InvalidArgument("initial vectors have the wrong dimension");

    const LocalStrategy only = LocalStrategy::first_moves(mc);
    std::vector<RatMatrix> deltas;
    for (LabelId a = 0; a < mc.num_labels(); ++a) deltas.push_back(transition_matrix(mc, only, a));

    EquivVerdict v;
    v.closure = closure_of_ones(deltas, n);
    const auto& gens = v.closure.basis.generators();
    for (std::size_t i = 0; i < gens.size(); ++i) {
        Rational l = dot(mu1.weights, gens[i]);
        Rational r = dot(mu2.weights, gens[i]);
        if (l != r) {
            v.result = EquivResult::Distinguished;
            v.witness = v.closure.words[i];
            v.lhs_prob = std::move(l);
            v.rhs_prob = std::move(r);
            break;
        }
    }
    return v;
}

EquivVerdict mc_equiv(const Mdp& c1, const Mdp& c2) {
    require_valid(c1);
    require_valid(c2);
    require_mc(c1, "first model");
    require_mc(c2, "second model");
    const UnionModel u = disjoint_union(c1, c2);
    return mc_equiv_shared(u.model, u.left_initial, u.right_initial);
}

} // namespace tracelab
