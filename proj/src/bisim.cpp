#include "tracelab/bisim.hpp"

#include "tracelab/mc_equiv.hpp"
#include "tracelab/refinement.hpp"

#include <functional>

namespace tracelab {

RatMatrix basis_matrix(const Basis& b) { return RatMatrix::from_columns(b.dim(), b.generators()); }

namespace {

void check_rows(const Mdp& m, const RatMatrix& b) {
    if (b.rows() != m.num_states()) throw InvalidArgument("B must have one row per state");
}

std::string pure_id(const std::vector<std::size_t>& moves) {
    std::string s = "pure(";
    for (std::size_t i = 0; i < moves.size(); ++i) s += (i ? "," : "") + std::to_string(moves[i]);
    return s + ")";
}

// Point classes of each state: representative move indices with pairwise
// distinct points, plus the class index of every move.
struct StateClasses {
    std::vector<std::size_t> representatives;
    std::vector<RatVector> points;
};

std::vector<StateClasses> point_classes(const Mdp& m, const RatMatrix& b) {
    std::vector<StateClasses> out(m.num_states());
    for (StateId q = 0; q < m.num_states(); ++q) {
        for (std::size_t i = 0; i < m.num_moves(q); ++i) {
            RatVector p = move_point(m, b, q, i);
            bool seen = false;
            for (const auto& other : out[q].points) {
                if (other == p) {
                    seen = true;
                    break;
                }
            }
            if (!seen) {
                out[q].representatives.push_back(i);
                out[q].points.push_back(std::move(p));
            }
        }
    }
    return out;
}

std::vector<std::size_t> level_dims_from(const std::vector<std::size_t>& levels, std::size_t stabilized_at) {
    std::vector<std::size_t> dims(stabilized_at + 1, 0);
    for (std::size_t lv : levels) {
        for (std::size_t n = lv; n <= stabilized_at; ++n) ++dims[n];
    }
    return dims;
}

} // namespace

RatVector point(const Mdp& m, const RatMatrix& b, const SubDist& mu, const LocalStrategy& alpha) {
    check_rows(m, b);
    if (mu.size() != m.num_states()) throw InvalidArgument("point: subdistribution has the wrong dimension");
    RatVector out;
    out.reserve(m.num_labels() * b.cols());
    for (LabelId a = 0; a < m.num_labels(); ++a) {
        const RatVector block = b.left_apply(transition_matrix(m, alpha, a).left_apply(mu.weights));
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

RatVector move_point(const Mdp& m, const RatMatrix& b, StateId q, std::size_t move) {
    check_rows(m, b);
    const std::size_t k = b.cols();
    RatVector out(m.num_labels() * k);
    for (const auto& [key, p] : m.moves.at(q).at(move).entries()) {
        for (std::size_t c = 0; c < k; ++c) out[key.first * k + c] += p * b(key.second, c);
    }
    return out;
}

std::vector<std::size_t> eqmoves(const Mdp& m, const RatMatrix& b, const LocalStrategy& alpha_hat, StateId q) {
    const std::size_t chosen = alpha_hat.pure_choice().at(q);
    const RatVector ref = move_point(m, b, q, chosen);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m.num_moves(q); ++i) {
        if (i == chosen || move_point(m, b, q, i) == ref) out.push_back(i);
    }
    return out;
}

std::optional<RatVector> is_extremal(const Mdp& m, const RatMatrix& b, const LocalStrategy& alpha_hat) {
    check_rows(m, b);
    validate_strategy(m, alpha_hat);
    const auto chosen = alpha_hat.pure_choice();
    const std::size_t dim = m.num_labels() * b.cols();
    LinearConstraintSystem sys(dim);
    for (StateId q = 0; q < m.num_states(); ++q) {
        const RatVector ref = move_point(m, b, q, chosen[q]);
        for (std::size_t i = 0; i < m.num_moves(q); ++i) {
            RatVector p = move_point(m, b, q, i);
            if (p == ref) continue;
            sys.add(p - ref, Relation::LessEqual, Rational(-1));
        }
    }
    auto v = lp_feasible(sys);
    if (v && !extremal_in_direction(m, b, alpha_hat, *v)) {
        throw Error("internal: LP direction fails the extremality conditions");
    }
    return v;
}

bool extremal_in_direction(const Mdp& m, const RatMatrix& b, const LocalStrategy& alpha_hat, const RatVector& v) {
    const auto chosen = alpha_hat.pure_choice();
    if (v.size() != m.num_labels() * b.cols()) throw InvalidArgument("direction has the wrong dimension");
    for (StateId q = 0; q < m.num_states(); ++q) {
        const RatVector ref = move_point(m, b, q, chosen[q]);
        const Rational best = dot(ref, v);
        for (std::size_t i = 0; i < m.num_moves(q); ++i) {
            const RatVector p = move_point(m, b, q, i);
            const Rational val = dot(p, v);
            if (val > best) return false;
            if (val == best && p != ref) return false;
        }
    }
    return true;
}

std::vector<LocalStrategy> extremal_strategies(const Mdp& m, const RatMatrix& b, std::uint64_t guard) {
    check_rows(m, b);
    const auto classes = point_classes(m, b);
    std::uint64_t total = 1;
    for (const auto& c : classes) {
        const std::uint64_t k = c.representatives.size();
        if (total > guard / k + 1) {
            total = guard + 1;
            break;
        }
        total *= k;
    }
    if (total > guard) {
        // report the exact requirement when it fits in 64 bits
        long double exact = 1;
        for (const auto& c : classes) exact *= static_cast<long double>(c.representatives.size());
        const std::uint64_t required =
            exact > static_cast<long double>(UINT64_MAX) ? UINT64_MAX : static_cast<std::uint64_t>(exact);
        throw GuardExceeded("extremal strategy enumeration", guard, required);
    }

    std::vector<LocalStrategy> out;
    std::vector<std::size_t> digits(m.num_states(), 0);
    while (true) {
        std::vector<std::size_t> picks(m.num_states());
        for (StateId q = 0; q < m.num_states(); ++q) picks[q] = classes[q].representatives[digits[q]];
        LocalStrategy candidate = LocalStrategy::pure(m, picks);
        if (is_extremal(m, b, candidate)) out.push_back(std::move(candidate));
        std::size_t q = 0;
        while (q < digits.size() && ++digits[q] == classes[q].representatives.size()) digits[q++] = 0;
        if (q == digits.size()) break;
    }
    return out;
}

BisimSpace bisim_space_two_mdps(const Mdp& u, std::uint64_t guard) {
    require_valid(u);
    const std::size_t n = u.num_states();
    BisimSpace space;
    space.basis = Basis(n);
    space.basis.insert(ones_vector(n), 0);
    space.provenance.push_back({});

    for (std::size_t level = 0;; ++level) {
        space.level_dims.push_back(space.basis.rank());
        const RatMatrix b = basis_matrix(space.basis);
        const auto extremal = extremal_strategies(u, b, guard);
        const std::size_t current = space.basis.generators().size();
        for (const auto& alpha : extremal) {
            const std::string id = pure_id(alpha.pure_choice());
            for (LabelId a = 0; a < u.num_labels(); ++a) {
                const RatMatrix delta = transition_matrix(u, alpha, a);
                for (std::size_t i = 0; i < current; ++i) {
                    const RatVector v = delta.apply(space.basis.generators()[i]);
                    if (space.basis.insert(v, space.provenance.size())) {
                        Provenance p{{id, a}};
                        p.insert(p.end(), space.provenance[i].begin(), space.provenance[i].end());
                        space.provenance.push_back(std::move(p));
                    }
                }
            }
        }
        if (space.basis.generators().size() == current) {
            space.stabilized_at = level;
            break;
        }
    }
    return space;
}

BisimSpace bisim_space_mdp_mc(const Mdp& u) {
    const StrategyBasis sigma = strategy_basis(u);
    std::vector<RatMatrix> matrices;
    std::vector<ProvenanceStep> steps;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const LocalStrategy alpha = sigma.strategy(i);
        for (LabelId a = 0; a < u.num_labels(); ++a) {
            matrices.push_back(transition_matrix(u, alpha, a));
            steps.push_back({sigma.id(i), a});
        }
    }
    MatrixClosure closure = closure_of_ones(matrices, u.num_states());
    BisimSpace space;
    space.basis = std::move(closure.basis);
    for (const auto& w : closure.words) {
        Provenance p;
        for (std::size_t idx : w) p.push_back(steps[idx]);
        space.provenance.push_back(std::move(p));
    }
    space.stabilized_at = closure.stabilized_at;
    space.level_dims = level_dims_from(closure.levels, closure.stabilized_at);
    return space;
}

bool bisimilar(const BisimSpace& space, const SubDist& mu1, const SubDist& mu2) {
    const std::size_t n = space.basis.dim();
    if (mu1.size() != n || mu2.size() != n) throw InvalidArgument("bisimilar: dimension mismatch");
    const RatVector diff = mu1.weights - mu2.weights;
    for (const auto& g : space.basis.generators()) {
        if (sgn(dot(diff, g)) != 0) return false;
    }
    return true;
}

BisimQuery bisim_mdp_mc(const Mdp& mdp, const Mdp& mc) {
    require_valid(mdp);
    require_valid(mc);
    require_mc(mc, "right-hand model");
    BisimQuery q;
    q.un = disjoint_union(mdp, mc);
    q.space = bisim_space_mdp_mc(q.un.model);
    q.bisimilar = bisimilar(q.space, q.un.left_initial, q.un.right_initial);
    return q;
}

BisimQuery bisim_mdp_mdp(const Mdp& d, const Mdp& e, std::uint64_t guard) {
    require_valid(d);
    require_valid(e);
    BisimQuery q;
    q.un = disjoint_union(d, e);
    q.space = bisim_space_two_mdps(q.un.model, guard);
    q.bisimilar = bisimilar(q.space, q.un.left_initial, q.un.right_initial);
    return q;
}

CertificateVerdict verify_certificate(const Mdp& u, const SubDist& mu_d, const SubDist& mu_e, const Certificate& cert) {
    require_valid(u);
    const std::size_t n = u.num_states();
    if (mu_d.size() != n || mu_e.size() != n) throw InvalidArgument("certificate: initial vectors have the wrong dimension");
    if (cert.k < 1 || cert.k > n) throw InvalidArgument("certificate: k must lie in 1.." + std::to_string(n));
    if (cert.back_refs.size() != cert.k - 1 || cert.labels.size() != cert.k - 1 || cert.strategies.size() != cert.k - 1) {
        throw InvalidArgument("certificate: expected k-1 back references, labels and strategies");
    }
    std::vector<LocalStrategy> strategies;
    for (std::size_t j = 1; j < cert.k; ++j) {
        if (cert.back_refs[j - 1] >= j) {
            throw InvalidArgument("certificate: back reference i_" + std::to_string(j) + " must be below " + std::to_string(j));
        }
        if (cert.labels[j - 1] >= u.num_labels()) throw InvalidArgument("certificate: label out of range");
        strategies.push_back(LocalStrategy::pure(u, cert.strategies[j - 1]));
    }

    CertificateVerdict verdict;
    verdict.vectors.push_back(ones_vector(n));
    for (std::size_t j = 1; j < cert.k; ++j) {
        const RatMatrix b = RatMatrix::from_columns(n, verdict.vectors);
        if (!is_extremal(u, b, strategies[j - 1])) {
            verdict.reason = "strategy " + std::to_string(j) + " is not extremal with respect to span(b_0..b_" +
                             std::to_string(j - 1) + ")";
            return verdict;
        }
        verdict.vectors.push_back(
            transition_matrix(u, strategies[j - 1], cert.labels[j - 1]).apply(verdict.vectors[cert.back_refs[j - 1]]));
    }
    const RatVector& last = verdict.vectors.back();
    if (dot(mu_d.weights, last) == dot(mu_e.weights, last)) {
        verdict.reason = "mu_D b_{k-1} equals mu_E b_{k-1}";
        return verdict;
    }
    verdict.accepted = true;
    verdict.reason = "mu_D b_{k-1} = " + to_string(dot(mu_d.weights, last)) + " differs from mu_E b_{k-1} = " +
                     to_string(dot(mu_e.weights, last));
    return verdict;
}

std::optional<Certificate> search_certificate(const Mdp& u, const SubDist& mu_d, const SubDist& mu_e, std::size_t max_k,
                                              std::uint64_t guard) {
    require_valid(u);
    const std::size_t n = u.num_states();
    max_k = std::min(max_k, n);
    if (max_k == 0) return std::nullopt;

    Certificate cert;
    std::vector<RatVector> vectors{ones_vector(n)};
    Basis span(n);
    span.insert(vectors[0]);

    // iterative deepening over chains of linearly independent vectors, so the
    // first certificate found is a shortest one; a chain whose last vector is
    // dependent can be cut back to an earlier accepting prefix
    std::size_t limit = 1;
    std::function<bool()> dfs = [&]() -> bool {
        const RatVector& last = vectors.back();
        if (dot(mu_d.weights, last) != dot(mu_e.weights, last)) return true;
        if (vectors.size() >= limit) return false;
        const RatMatrix b = RatMatrix::from_columns(n, vectors);
        const auto extremal = extremal_strategies(u, b, guard);
        const std::size_t j = vectors.size();
        for (std::size_t i = 0; i < j; ++i) {
            for (LabelId a = 0; a < u.num_labels(); ++a) {
                for (const auto& alpha : extremal) {
                    RatVector next = transition_matrix(u, alpha, a).apply(vectors[i]);
                    if (span.contains(next)) continue;
                    const Basis saved = span;
                    span.insert(next);
                    vectors.push_back(std::move(next));
                    cert.back_refs.push_back(i);
                    cert.labels.push_back(a);
                    cert.strategies.push_back(alpha.pure_choice());
                    if (dfs()) return true;
                    vectors.pop_back();
                    cert.back_refs.pop_back();
                    cert.labels.pop_back();
                    cert.strategies.pop_back();
                    span = saved;
                }
            }
        }
        return false;
    };
    for (; limit <= max_k; ++limit) {
        if (dfs()) {
            cert.k = vectors.size();
            return cert;
        }
    }
    return std::nullopt;
}

} // namespace tracelab
