#pragma once

#include "tracelab/model.hpp"
#include "tracelab/model_io.hpp"

#include <string>

namespace tracelab::testing {

inline std::string fixture(const std::string& name) { return std::string(TRACELAB_FIXTURES) + "/" + name; }

inline Rational r(long num, long den = 1) { return make_rational(num, den); }

/// Single-state model whose moves are Dirac self-loops or arbitrary moves.
inline Mdp one_state(std::vector<std::string> labels, std::vector<Move> moves) {
    Mdp m;
    m.labels = std::move(labels);
    m.states = {"s"};
    m.initial = {Rational(1)};
    m.moves = {std::move(moves)};
    return m;
}

} // namespace tracelab::testing
