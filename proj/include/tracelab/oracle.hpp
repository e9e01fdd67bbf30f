#pragma once

#include "tracelab/model.hpp"
#include "tracelab/semantics.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace tracelab {

enum class OracleMode { Max, Min };

/// Bounded-depth refutation result. When `counterexample` is false the
/// oracle found nothing up to `depth`, which says nothing about deeper words.
struct OracleVerdict {
    bool counterexample = false;
    std::size_t depth = 0;
    Word word;
    /// Extremal (or second-chain) probability and the value it had to match.
    Rational achieved;
    Rational required;
    OracleMode mode = OracleMode::Max;
    std::uint64_t words_checked = 0;
};

/// Backward value vectors: v_eps = 1, v_{a.u}[q] = opt_m sum m(a,q') v_u[q'].
/// `choices[i][q]` is the optimal move at step i in state q.
struct ExtremalValue {
    Rational value;
    std::vector<std::vector<std::size_t>> choices;
};

ExtremalValue extremal_trace_prob(const Mdp& m, const Word& w, OracleMode mode);
Rational max_trace_prob(const Mdp& m, const Word& w);
Rational min_trace_prob(const Mdp& m, const Word& w);

/// The depth-|w| trace-based table playing the optimal choices of `ev`.
TraceBasedTable extremal_table(const Mdp& m, const ExtremalValue& ev);

/// Shortest-first, lexicographic within a length. A word whose extensions
/// cannot differ (all values zero) is not expanded.
OracleVerdict oracle_refines_mc(const Mdp& m, const Mdp& c, std::size_t depth);
OracleVerdict oracle_mc_equiv(const Mdp& c1, const Mdp& c2, std::size_t depth);

} // namespace tracelab
