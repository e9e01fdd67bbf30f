#pragma once

#include "tracelab/model.hpp"
#include "tracelab/semantics.hpp"

#include <random>
#include <vector>

namespace tracelab::testing {

using Rng = std::mt19937_64;

int uniform_int(Rng& rng, int lo, int hi);

/// Weights drawn from 0..4 (at least one positive), normalized.
std::vector<Rational> random_distribution(Rng& rng, std::size_t n, bool allow_zero = true);

struct ModelShape {
    std::size_t min_states = 1;
    std::size_t max_states = 4;
    std::size_t labels = 2;
    std::size_t min_moves = 1;
    std::size_t max_moves = 3;
    /// Upper bound on the support size of each move.
    std::size_t max_support = 3;
};

std::vector<std::string> label_names(std::size_t count);

Move random_move(Rng& rng, std::size_t labels, std::size_t states, std::size_t max_support);
Mdp random_mdp(Rng& rng, const ModelShape& shape);
Mdp random_mc(Rng& rng, std::size_t max_states, std::size_t labels, std::size_t max_support = 3);

LocalStrategy random_local(Rng& rng, const Mdp& m);
std::vector<std::size_t> random_pure(Rng& rng, const Mdp& m);
FiniteMemoryStrategy random_finite_memory(Rng& rng, const Mdp& m, std::size_t memory);
Word random_word(Rng& rng, std::size_t labels, std::size_t length);

/// `mc` with every move repeated 1..max_copies times.
Mdp duplicate_moves(Rng& rng, const Mdp& mc, std::size_t max_copies);

/// Two copies of `mc`; every move of the result sends each entry (a, q') of
/// the original move to the copies of q' in a random proportion, and each
/// state gets 1..max_moves such moves. Every strategy reproduces Tr_mc.
Mdp split_copies(Rng& rng, const Mdp& mc, std::size_t max_moves);

/// Moves probability mass of one move between two of its labels; returns
/// false when the move has a single label.
bool perturb_labels(Rng& rng, Mdp& m);

/// Pairs (D, C) with D an MDP and C a Markov chain over the same labels,
/// |Q| <= 4 each, |L| <= 3, <= 3 moves per state. The mix contains
/// refinement-preserving constructions and arbitrary pairs.
struct RefinementInstance {
    Mdp mdp;
    Mdp mc;
    const char* family;
};

RefinementInstance random_refinement_instance(Rng& rng, std::size_t index);

/// Two MDPs whose state counts sum to at most `max_union`.
std::pair<Mdp, Mdp> random_mdp_pair(Rng& rng, std::size_t index, std::size_t max_union);

} // namespace tracelab::testing
