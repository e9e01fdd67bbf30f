#pragma once

#include "tracelab/linalg.hpp"
#include "tracelab/rational.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tracelab {

using StateId = std::size_t;
using LabelId = std::size_t;

/// A distribution over (label, successor) pairs. Zero-probability entries
/// are never stored, so the key set is the support.
class Move {
public:
    using Key = std::pair<LabelId, StateId>;

    Move() = default;

    /// Adds `p` to the entry for (label, target); entries that end at zero are dropped.
    Move& add(LabelId label, StateId target, const Rational& p);

    const std::map<Key, Rational>& entries() const { return entries_; }
    Rational prob(LabelId label, StateId target) const;
    Rational mass() const;

    static Move dirac(LabelId label, StateId target);

    friend bool operator==(const Move&, const Move&) = default;

private:
    std::map<Key, Rational> entries_;
};

/// A subdistribution over the states of one model, stored densely by state index.
struct SubDist {
    std::vector<Rational> weights;

    SubDist() = default;
    explicit SubDist(std::size_t states) : weights(states) {}
    explicit SubDist(std::vector<Rational> w) : weights(std::move(w)) {}

    std::size_t size() const { return weights.size(); }
    const Rational& operator[](StateId q) const { return weights[q]; }
    Rational& operator[](StateId q) { return weights[q]; }

    Rational norm() const;
    std::set<StateId> support() const;
    bool is_zero() const;

    static SubDist dirac(std::size_t states, StateId s);
    static SubDist uniform(std::size_t states, const std::set<StateId>& over);

    friend bool operator==(const SubDist&, const SubDist&) = default;
};

/// A labelled Markov decision process. Markov chains are the models in which
/// every state has exactly one move (see is_mc).
struct Mdp {
    std::vector<std::string> labels;
    std::vector<std::string> states;
    std::vector<Rational> initial;
    std::vector<std::vector<Move>> moves;

    std::size_t num_states() const { return states.size(); }
    std::size_t num_labels() const { return labels.size(); }
    std::size_t num_moves(StateId q) const { return moves.at(q).size(); }
    std::size_t total_moves() const;

    std::optional<LabelId> find_label(const std::string& name) const;
    std::optional<StateId> find_state(const std::string& name) const;
    LabelId label_id(const std::string& name) const;
    StateId state_id(const std::string& name) const;

    SubDist initial_dist() const { return SubDist(initial); }

    friend bool operator==(const Mdp&, const Mdp&) = default;
};

struct Violation {
    std::string where;
    std::string message;
};

/// All violated model invariants; empty iff the model is well formed.
std::vector<Violation> validate(const Mdp& m);
/// Throws InvalidArgument listing the violations, if any.
void require_valid(const Mdp& m);

bool is_mc(const Mdp& m);
void require_mc(const Mdp& m, const std::string& role);

std::set<Move::Key> post_set(const Mdp& m, StateId q);

/// The disjoint union of two models over the same label set. States of `d`
/// come first; `e`'s labels are re-indexed to `d`'s order. The union's own
/// initial distribution is `d`'s.
struct UnionModel {
    Mdp model;
    std::vector<StateId> left_map;
    std::vector<StateId> right_map;
    SubDist left_initial;
    SubDist right_initial;
};

UnionModel disjoint_union(const Mdp& d, const Mdp& e);

/// Index map from `e`'s labels into `d`'s labels; throws if the sets differ.
std::vector<LabelId> label_mapping(const Mdp& d, const Mdp& e);

/// `m` re-expressed over `reference`'s label order.
Mdp relabel_to(const Mdp& m, const Mdp& reference);

} // namespace tracelab
