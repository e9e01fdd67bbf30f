#pragma once

#include "tracelab/error.hpp"
#include "tracelab/model.hpp"
#include "tracelab/semantics.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tracelab {

/// Number of pure memoryless strategies; throws GuardExceeded above `guard`.
std::uint64_t pure_strategy_count(const Mdp& m, std::uint64_t guard, const std::string& what);

/// Calls `visit` on every pure memoryless strategy in lexicographic order of
/// move indices (state 0 varies fastest) until it returns false.
void for_each_pure_strategy(const Mdp& m, const std::function<bool(const std::vector<std::size_t>&)>& visit);

struct PmVerdict {
    bool yes = false;
    /// mc-mdp mode: the right-hand strategy matching the chain.
    std::optional<std::vector<std::size_t>> witness;
    /// mdp-mdp mode: a left-hand strategy no right-hand strategy matches.
    std::optional<std::vector<std::size_t>> unmatched;
    std::uint64_t strategies_checked = 0;
};

/// C refines D when D may only use pure memoryless strategies.
PmVerdict refine_mc_mdp_pm(const Mdp& c, const Mdp& d, std::uint64_t guard = kDefaultGuard);

/// For every pure memoryless strategy of `d` some pure memoryless strategy
/// of `e` induces the same trace function.
PmVerdict refine_pm_pm(const Mdp& d, const Mdp& e, std::uint64_t guard = kDefaultGuard);

/// Sparse polynomial over the instance variables. A monomial is the sorted
/// list of its variable indices; the empty monomial is the constant term.
using Monomial = std::vector<std::size_t>;
using Polynomial = std::map<Monomial, Rational>;

enum class PolyRelation { Equal, GreaterEqual, LessEqual };

/// poly (=|>=|<=) 0
struct PolyConstraint {
    Polynomial poly;
    PolyRelation relation;
};

/// Existential-theory encoding of "C refines D under memoryless
/// strategies" over the union Q = Q_C then Q_D. Variables: x_<q>_<m> per
/// state/move of D, F_<i>_<j> and M_<a>_<i>_<j> over Q.
struct EtrInstance {
    std::size_t mc_states = 0;
    std::size_t mdp_states = 0;
    std::size_t labels = 0;
    std::vector<std::string> variables;
    std::vector<PolyConstraint> constraints;
    /// x_index[q][m] for the MDP's states.
    std::vector<std::vector<std::size_t>> x_index;

    std::size_t states() const { return mc_states + mdp_states; }
    std::size_t f_index(std::size_t i, std::size_t j) const;
    std::size_t m_index(LabelId a, std::size_t i, std::size_t j) const;

    /// Closed forms for the counts derived from the constraint list.
    static std::size_t expected_variables(std::size_t moves, std::size_t states, std::size_t labels);
    static std::size_t expected_assertions(std::size_t mdp_states, std::size_t moves, std::size_t states,
                                           std::size_t labels);
};

EtrInstance emit_etr(const Mdp& c, const Mdp& d);

/// QF_NRA script declaring every variable, asserting every constraint and
/// ending with (check-sat).
std::string to_smtlib(const EtrInstance& inst);

/// Exact substitution. Throws InvalidArgument if a variable is unassigned.
bool check_assignment(const EtrInstance& inst, const std::map<std::string, Rational>& assignment);

/// A satisfying assignment for c refines d(alpha) when that holds: x from
/// alpha, F from a basis of the forward difference space, M(a) by exact
/// linear solves. nullopt when c is not equivalent to d(alpha).
std::optional<std::map<std::string, Rational>> construct_solution(const EtrInstance& inst, const Mdp& c, const Mdp& d,
                                                                  const MemorylessStrategy& alpha);

struct SolverResult {
    std::string status;
    std::string output;
    int exit_code = 0;
};

/// Writes the script to a temporary file, runs `command <file>` through the
/// shell and reports the first line of its output as the status.
SolverResult run_external_solver(const std::string& script, const std::string& command);

} // namespace tracelab
