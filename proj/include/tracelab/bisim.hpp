#pragma once

#include "tracelab/error.hpp"
#include "tracelab/linalg.hpp"
#include "tracelab/model.hpp"
#include "tracelab/model_io.hpp"
#include "tracelab/semantics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tracelab {

/// Matrix whose columns are the basis generators (insertion order).
RatMatrix basis_matrix(const Basis& b);

/// p(mu, alpha) = (mu Delta_alpha(a_1) B, ..., mu Delta_alpha(a_|L|) B).
RatVector point(const Mdp& m, const RatMatrix& b, const SubDist& mu, const LocalStrategy& alpha);

/// p(d_q, alpha_{q,move}); depends only on the move played at q.
RatVector move_point(const Mdp& m, const RatMatrix& b, StateId q, std::size_t move);

/// Moves of q whose point equals the point of the move alpha_hat plays at q.
std::vector<std::size_t> eqmoves(const Mdp& m, const RatMatrix& b, const LocalStrategy& alpha_hat, StateId q);

/// A direction v with p(d_q, alpha_{q,m}) v + 1 <= p(d_q, alpha_hat) v for
/// every q and every m outside eqmoves(q); nullopt when none exists.
std::optional<RatVector> is_extremal(const Mdp& m, const RatMatrix& b, const LocalStrategy& alpha_hat);

/// Checks the two defining conditions for `v` directly against every pure
/// alternative (used to validate LP answers).
bool extremal_in_direction(const Mdp& m, const RatMatrix& b, const LocalStrategy& alpha_hat, const RatVector& v);

/// All extremal pure local strategies, one per combination of per-state
/// point classes (each class represented by its lowest move index).
/// Throws GuardExceeded when the number of combinations exceeds `guard`.
std::vector<LocalStrategy> extremal_strategies(const Mdp& m, const RatMatrix& b, std::uint64_t guard = kDefaultGuard);

struct ProvenanceStep {
    std::string strategy;
    LabelId label;
};

/// Generator i of `basis` is Delta(steps[0]) ... Delta(steps.back()) 1.
using Provenance = std::vector<ProvenanceStep>;

struct BisimSpace {
    Basis basis;
    std::vector<Provenance> provenance;
    /// Smallest s with V_s = V_{s+1}.
    std::size_t stabilized_at = 0;
    /// dim V_0, dim V_1, ..., dim V_s.
    std::vector<std::size_t> level_dims;
};

/// Fixpoint: V_0 = span{1}; V_{n+1} adds Delta_a(alpha_hat) u for
/// u in V_n and alpha_hat extremal with respect to V_n.
BisimSpace bisim_space_two_mdps(const Mdp& union_model, std::uint64_t guard = kDefaultGuard);

/// Closure of 1 under Delta_alpha(a) for alpha in the strategy basis of the
/// union; the bisimulation space when one side is a Markov chain.
BisimSpace bisim_space_mdp_mc(const Mdp& union_model);

bool bisimilar(const BisimSpace& space, const SubDist& mu1, const SubDist& mu2);

struct BisimQuery {
    UnionModel un;
    BisimSpace space;
    bool bisimilar = false;
};

/// `mc` must be a Markov chain.
BisimQuery bisim_mdp_mc(const Mdp& mdp, const Mdp& mc);
BisimQuery bisim_mdp_mdp(const Mdp& d, const Mdp& e, std::uint64_t guard = kDefaultGuard);

struct CertificateVerdict {
    bool accepted = false;
    std::string reason;
    /// b_0 ... b_{k-1} as recomputed.
    std::vector<RatVector> vectors;
};

/// Throws InvalidArgument on structurally malformed certificates.
CertificateVerdict verify_certificate(const Mdp& union_model, const SubDist& mu_d, const SubDist& mu_e,
                                      const Certificate& cert);

/// Exhaustive search over certificates with k <= max_k whose strategies are
/// drawn from the deduplicated pure set; the first accepted one, if any.
std::optional<Certificate> search_certificate(const Mdp& union_model, const SubDist& mu_d, const SubDist& mu_e,
                                              std::size_t max_k, std::uint64_t guard = kDefaultGuard);

} // namespace tracelab
