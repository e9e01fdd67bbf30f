#pragma once

#include "tracelab/linalg.hpp"
#include "tracelab/model.hpp"
#include "tracelab/semantics.hpp"

#include <optional>
#include <vector>

namespace tracelab {

/// Backward closure of the all-ones vector under a family of square
/// matrices, explored breadth first. Generator i of `basis` is
/// M(words[i][0]) ... M(words[i].back()) 1, so the first generator is 1 with
/// the empty word and every word is the shortest found for its vector.
struct MatrixClosure {
    Basis basis;
    std::vector<Word> words;
    /// BFS level (word length) per generator.
    std::vector<std::size_t> levels;
    /// Successful basis insertions, the all-ones vector included.
    std::size_t insertions = 0;
    /// Smallest s with V_s = V_{s+1}, where V_n is spanned by words of length <= n.
    std::size_t stabilized_at = 0;
};

MatrixClosure closure_of_ones(const std::vector<RatMatrix>& matrices, std::size_t dim);

enum class EquivResult { Equivalent, Distinguished };

struct EquivVerdict {
    EquivResult result = EquivResult::Equivalent;
    /// Word over the labels of the model the closure ran on.
    std::optional<Word> witness;
    std::optional<Rational> lhs_prob;
    std::optional<Rational> rhs_prob;
    MatrixClosure closure;

    bool equivalent() const { return result == EquivResult::Equivalent; }
};

/// Trace equivalence of two initial distributions of one Markov chain.
EquivVerdict mc_equiv_shared(const Mdp& mc, const SubDist& mu1, const SubDist& mu2);

/// Tr_{c1} = Tr_{c2}, decided on the disjoint union. The witness is over c1's labels.
EquivVerdict mc_equiv(const Mdp& c1, const Mdp& c2);

} // namespace tracelab
