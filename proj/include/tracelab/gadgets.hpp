#pragma once

#include "tracelab/linalg.hpp"
#include "tracelab/model.hpp"
#include "tracelab/semantics.hpp"

#include <json.hpp>

#include <array>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tracelab {

/// The running examples: a three-state chain and a two-state MDP whose
/// state q1 chooses between a c-loop (move 0) and a d-loop (move 1).
Mdp fig1_mc();
Mdp fig2_mdp();

/// Remembers the last label among {c, d}; at q1 it replays that label's loop.
FiniteMemoryStrategy last_label_strategy(const Mdp& fig2);

/// Probabilistic automaton over the letters {a, b}.
struct ProbabilisticAutomaton {
    std::vector<std::string> states;
    std::vector<Rational> initial;
    /// delta[0] for a, delta[1] for b; row-stochastic.
    std::array<RatMatrix, 2> delta;
    std::set<StateId> finals;

    std::size_t num_states() const { return states.size(); }
};

void validate_pa(const ProbabilisticAutomaton& pa);
ProbabilisticAutomaton parse_pa(std::string_view text);

/// dis_A(w) by forward products; `w` is a string over {a, b}.
SubDist pa_dis(const ProbabilisticAutomaton& pa, std::string_view w);
Rational pa_accept(const ProbabilisticAutomaton& pa, std::string_view w);

struct GadgetOutput {
    Mdp left;
    Mdp right;
    std::string question;
    /// parameters, expected_semantics and any derived constants.
    nlohmann::json metadata;
};

/// Left: the three-state chain. Right: D(A), universal iff left refines right.
GadgetOutput gadget_pa_universality(const ProbabilisticAutomaton& pa);

/// Subset sum: some subset of `s` sums to `n` iff left refines right under
/// pure memoryless strategies. Move 0 of s<i> leads to the b-loop.
GadgetOutput gadget_subset_sum(const std::vector<long>& s, long n);
bool subset_sum_exists(const std::vector<long>& s, long n);

/// One-round quantified subset sum: for every S of `s` some T of `t` has
/// sum(S) + sum(T) = n iff left (E_univ) refines right (E_exist) under pure
/// memoryless strategies. In E_univ move 0 (b) at s<i> puts s_i in S; in
/// E_exist move 1 (c) at t<j> puts t_j in T.
GadgetOutput gadget_qss(const std::vector<long>& s, const std::vector<long>& t, long n);
bool qss_game(const std::vector<long>& s, const std::vector<long>& t, long n);

/// NMF: M (n x m, row-stochastic) has a nonnegative factorization of inner
/// dimension r iff left refines right under memoryless strategies.
GadgetOutput gadget_nmf(const RatMatrix& m, std::size_t r);
/// alpha(p_i)(m_{i,k}) = A[i,k], alpha(l_k)(m'_{k,j}) = W[k,j].
MemorylessStrategy nmf_strategy(const Mdp& right, const RatMatrix& a, const RatMatrix& w);

/// left = D + E, right = E_2 over the labels plus "#".
GadgetOutput gadget_mutual(const Mdp& d, const Mdp& e);

} // namespace tracelab
