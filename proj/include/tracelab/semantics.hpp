#pragma once

#include "tracelab/linalg.hpp"
#include "tracelab/model.hpp"

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tracelab {

/// A trace: a sequence of label indices. The empty word is a valid value.
using Word = std::vector<LabelId>;

/// Splits on ',' or whitespace when present, otherwise reads one label per
/// character. Throws InvalidArgument on an unknown label.
Word parse_word(const Mdp& m, std::string_view text);
/// Labels concatenated when all are single characters, comma-separated otherwise.
std::string format_word(const Mdp& m, const Word& w);

/// A distribution over moves(q), one per state; `choice[q][i]` is the weight
/// of the i-th move of q.
struct LocalStrategy {
    std::vector<std::vector<Rational>> choice;

    static LocalStrategy pure(const Mdp& m, const std::vector<std::size_t>& moves);
    static LocalStrategy first_moves(const Mdp& m);
    static LocalStrategy uniform(const Mdp& m);

    bool is_pure() const;
    /// Chosen move per state; throws if the strategy is not pure.
    std::vector<std::size_t> pure_choice() const;

    friend bool operator==(const LocalStrategy&, const LocalStrategy&) = default;
};

/// Memoryless strategies have the same shape as local strategies; the
/// distinction is only in how they are used.
using MemorylessStrategy = LocalStrategy;

/// Throws InvalidArgument unless every state carries a distribution over its own moves.
void validate_strategy(const Mdp& m, const LocalStrategy& alpha);

/// Finite-memory randomized strategy. `update[mem][label][state]` is the
/// memory after emitting `label` and entering `state`; `output[mem][state]`
/// the move distribution played in `state` with memory `mem`.
struct FiniteMemoryStrategy {
    std::vector<std::string> memory;
    std::size_t initial_memory = 0;
    std::vector<std::vector<std::vector<std::size_t>>> update;
    std::vector<std::vector<std::vector<Rational>>> output;

    std::size_t size() const { return memory.size(); }

    static FiniteMemoryStrategy from_memoryless(const LocalStrategy& alpha, std::size_t num_labels);

    friend bool operator==(const FiniteMemoryStrategy&, const FiniteMemoryStrategy&) = default;
};

void validate_strategy(const Mdp& m, const FiniteMemoryStrategy& s);

/// Trace-based strategy tabulated for all words shorter than `depth`.
struct TraceBasedTable {
    std::size_t depth = 0;
    std::map<std::pair<Word, StateId>, std::vector<Rational>> entries;

    const std::vector<Rational>* find(const Word& w, StateId q) const;
};

/// Delta_alpha(a)[q, q'] = sum over moves m of alpha(q)(m) * m(a, q').
RatMatrix transition_matrix(const Mdp& m, const LocalStrategy& alpha, LabelId a);

/// Succ(mu, alpha, a) = mu . Delta_alpha(a).
SubDist succ(const SubDist& mu, const Mdp& m, const LocalStrategy& alpha, LabelId a);

/// subDis(w) by left-to-right products from the initial distribution.
SubDist sub_dis(const Mdp& m, const TraceBasedTable& table, const Word& w);
Rational trace_prob(const Mdp& m, const TraceBasedTable& table, const Word& w);

/// The unique trace function of a Markov chain.
SubDist mc_sub_dis(const Mdp& mc, const Word& w);
Rational mc_trace_prob(const Mdp& mc, const Word& w);

/// Trace-based table equivalent to `s` on every word of length <= depth.
/// Entries at (w, q) with zero mass get the uniform distribution over moves(q).
TraceBasedTable flatten(const Mdp& m, const FiniteMemoryStrategy& s, std::size_t depth);

/// Plays `alpha` at every (w, q) with |w| < depth.
TraceBasedTable memoryless_table(const Mdp& m, const LocalStrategy& alpha, std::size_t depth);

/// Plays `steps[i]` at every (w, q) with |w| = i.
TraceBasedTable table_from_local_sequence(const Mdp& m, const std::vector<LocalStrategy>& steps);

/// The Markov chain D(alpha): one move per state mixing alpha's weights.
Mdp induced_mc(const Mdp& m, const MemorylessStrategy& alpha);

/// q0 a1 q1 ... an qn.
struct Path {
    std::vector<StateId> states;
    Word labels;
};

bool is_path(const Mdp& m, const Path& p);
/// Pr(rho) under a trace-based table (the table covers every prefix of rho).
Rational path_probability(const Mdp& m, const TraceBasedTable& table, const Path& p);

} // namespace tracelab
