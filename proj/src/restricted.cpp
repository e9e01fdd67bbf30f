#include "tracelab/restricted.hpp"

#include "tracelab/mc_equiv.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <sstream>
#include <unistd.h>
#include <sys/wait.h>

namespace tracelab {

std::uint64_t pure_strategy_count(const Mdp& m, std::uint64_t guard, const std::string& what) {
    std::uint64_t total = 1;
    bool over = false;
    long double exact = 1;
    for (StateId q = 0; q < m.num_states(); ++q) {
        const std::uint64_t k = m.num_moves(q);
        exact *= static_cast<long double>(k);
        if (!over && total > guard / k) over = true;
        if (!over) total *= k;
    }
    if (over || total > guard) {
        const std::uint64_t required =
            exact > static_cast<long double>(UINT64_MAX) ? UINT64_MAX : static_cast<std::uint64_t>(exact);
        throw GuardExceeded(what, guard, required);
    }
    return total;
}

void for_each_pure_strategy(const Mdp& m, const std::function<bool(const std::vector<std::size_t>&)>& visit) {
    std::vector<std::size_t> digits(m.num_states(), 0);
    while (true) {
        if (!visit(digits)) return;
        std::size_t q = 0;
        while (q < digits.size() && ++digits[q] == m.num_moves(q)) digits[q++] = 0;
        if (q == digits.size()) return;
    }
}

namespace {

// Trace probabilities of all words of length <= 2: equal chains have equal
// fingerprints, so only chains sharing one need an exact comparison.
std::vector<Rational> fingerprint(const Mdp& mc) {
    std::vector<Rational> out;
    const LocalStrategy only = LocalStrategy::first_moves(mc);
    const SubDist mu0 = mc.initial_dist();
    for (LabelId a = 0; a < mc.num_labels(); ++a) {
        const SubDist mu1 = succ(mu0, mc, only, a);
        out.push_back(mu1.norm());
        for (LabelId b = 0; b < mc.num_labels(); ++b) out.push_back(succ(mu1, mc, only, b).norm());
    }
    return out;
}

void add_term(Polynomial& p, Monomial mono, const Rational& c) {
    if (sgn(c) == 0) return;
    std::sort(mono.begin(), mono.end());
    auto [it, inserted] = p.try_emplace(std::move(mono), c);
    if (!inserted) {
        it->second += c;
        if (sgn(it->second) == 0) p.erase(it);
    }
}

std::string smt_rational(const Rational& r) {
    const mpz_class num = abs(r.get_num());
    const mpz_class& den = r.get_den();
    std::string body = den == 1 ? num.get_str() + ".0" : "(/ " + num.get_str() + ".0 " + den.get_str() + ".0)";
    return sgn(r) < 0 ? "(- " + body + ")" : body;
}

std::string smt_polynomial(const Polynomial& p, const std::vector<std::string>& names) {
    if (p.empty()) return "0.0";
    std::vector<std::string> terms;
    for (const auto& [mono, c] : p) {
        if (mono.empty()) {
            terms.push_back(smt_rational(c));
            continue;
        }
        std::string factors;
        for (std::size_t v : mono) factors += " " + names[v];
        if (c == 1 && mono.size() == 1) {
            terms.push_back(names[mono[0]]);
        } else if (c == 1) {
            terms.push_back("(*" + factors + ")");
        } else {
            terms.push_back("(* " + smt_rational(c) + factors + ")");
        }
    }
    if (terms.size() == 1) return terms[0];
    std::string out = "(+";
    for (const auto& t : terms) out += " " + t;
    return out + ")";
}

} // namespace

PmVerdict refine_mc_mdp_pm(const Mdp& c, const Mdp& d, std::uint64_t guard) {
    require_valid(c);
    require_valid(d);
    require_mc(c, "left-hand model");
    label_mapping(c, d);
    pure_strategy_count(d, guard, "pure memoryless strategies of the right-hand model");

    PmVerdict v;
    const auto target = fingerprint(c);
    for_each_pure_strategy(d, [&](const std::vector<std::size_t>& picks) {
        ++v.strategies_checked;
        const Mdp induced = relabel_to(induced_mc(d, LocalStrategy::pure(d, picks)), c);
        if (fingerprint(induced) != target) return true;
        if (!mc_equiv(c, induced).equivalent()) return true;
        v.yes = true;
        v.witness = picks;
        return false;
    });
    return v;
}

PmVerdict refine_pm_pm(const Mdp& d, const Mdp& e, std::uint64_t guard) {
    require_valid(d);
    require_valid(e);
    label_mapping(d, e);
    pure_strategy_count(d, guard, "pure memoryless strategies of the left-hand model");
    pure_strategy_count(e, guard, "pure memoryless strategies of the right-hand model");

    // classes of right-hand induced chains, bucketed by fingerprint
    std::map<std::vector<Rational>, std::vector<Mdp>> classes;
    for_each_pure_strategy(e, [&](const std::vector<std::size_t>& picks) {
        Mdp induced = relabel_to(induced_mc(e, LocalStrategy::pure(e, picks)), d);
        auto& bucket = classes[fingerprint(induced)];
        for (const auto& rep : bucket) {
            if (mc_equiv(rep, induced).equivalent()) return true;
        }
        bucket.push_back(std::move(induced));
        return true;
    });

    PmVerdict v;
    v.yes = true;
    for_each_pure_strategy(d, [&](const std::vector<std::size_t>& picks) {
        ++v.strategies_checked;
        const Mdp induced = induced_mc(d, LocalStrategy::pure(d, picks));
        auto it = classes.find(fingerprint(induced));
        if (it != classes.end()) {
            for (const auto& rep : it->second) {
                if (mc_equiv(induced, rep).equivalent()) return true;
            }
        }
        v.yes = false;
        v.unmatched = picks;
        return false;
    });
    return v;
}

// --- ETR emission ----------------------------------------------------------

std::size_t EtrInstance::f_index(std::size_t i, std::size_t j) const {
    std::size_t moves = 0;
    for (const auto& row : x_index) moves += row.size();
    return moves + i * states() + j;
}

std::size_t EtrInstance::m_index(LabelId a, std::size_t i, std::size_t j) const {
    const std::size_t n = states();
    return f_index(0, 0) + n * n + a * n * n + i * n + j;
}

std::size_t EtrInstance::expected_variables(std::size_t moves, std::size_t states, std::size_t labels) {
    return moves + states * states + labels * states * states;
}

std::size_t EtrInstance::expected_assertions(std::size_t mdp_states, std::size_t moves, std::size_t states,
                                             std::size_t labels) {
    // move sums, first row of F, F1 = 0, the matrix equations, two bounds per x
    return mdp_states + states + states + labels * states * states + 2 * moves;
}

EtrInstance emit_etr(const Mdp& c, const Mdp& d) {
    require_valid(c);
    require_valid(d);
    require_mc(c, "left-hand model");
    const UnionModel u = disjoint_union(c, d);
    const Mdp& um = u.model;

    EtrInstance inst;
    inst.mc_states = c.num_states();
    inst.mdp_states = d.num_states();
    inst.labels = um.num_labels();
    const std::size_t n1 = inst.mc_states;
    const std::size_t n = inst.states();

    inst.x_index.resize(inst.mdp_states);
    for (StateId q = 0; q < inst.mdp_states; ++q) {
        for (std::size_t m = 0; m < d.num_moves(q); ++m) {
            inst.x_index[q].push_back(inst.variables.size());
            inst.variables.push_back("x_" + std::to_string(q) + "_" + std::to_string(m));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) inst.variables.push_back("F_" + std::to_string(i) + "_" + std::to_string(j));
    }
    for (LabelId a = 0; a < inst.labels; ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                inst.variables.push_back("M_" + std::to_string(a) + "_" + std::to_string(i) + "_" + std::to_string(j));
            }
        }
    }

    for (StateId q = 0; q < inst.mdp_states; ++q) {
        Polynomial p;
        for (std::size_t x : inst.x_index[q]) add_term(p, {x}, 1);
        add_term(p, {}, -1);
        inst.constraints.push_back({p, PolyRelation::Equal});
    }
    for (std::size_t j = 0; j < n; ++j) {
        const Rational target = j < n1 ? u.left_initial[j] : Rational(-u.right_initial[j]);
        Polynomial p;
        add_term(p, {inst.f_index(0, j)}, 1);
        add_term(p, {}, -target);
        inst.constraints.push_back({p, PolyRelation::Equal});
    }
    for (std::size_t i = 0; i < n; ++i) {
        Polynomial p;
        for (std::size_t j = 0; j < n; ++j) add_term(p, {inst.f_index(i, j)}, 1);
        inst.constraints.push_back({p, PolyRelation::Equal});
    }
    for (LabelId a = 0; a < inst.labels; ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                Polynomial p;
                // (F blockdiag(Delta(a), Delta'(a)))[i, j]
                for (std::size_t k = 0; k < n; ++k) {
                    if (k < n1) {
                        add_term(p, {inst.f_index(i, k)}, um.moves[k][0].prob(a, j));
                    } else {
                        for (std::size_t m = 0; m < um.num_moves(k); ++m) {
                            add_term(p, {inst.f_index(i, k), inst.x_index[k - n1][m]}, um.moves[k][m].prob(a, j));
                        }
                    }
                }
                // - (M(a) F)[i, j]
                for (std::size_t k = 0; k < n; ++k) add_term(p, {inst.m_index(a, i, k), inst.f_index(k, j)}, -1);
                inst.constraints.push_back({p, PolyRelation::Equal});
            }
        }
    }
    for (const auto& row : inst.x_index) {
        for (std::size_t x : row) {
            Polynomial lower;
            add_term(lower, {x}, 1);
            inst.constraints.push_back({lower, PolyRelation::GreaterEqual});
            Polynomial upper = lower;
            add_term(upper, {}, -1);
            inst.constraints.push_back({upper, PolyRelation::LessEqual});
        }
    }
    return inst;
}

std::string to_smtlib(const EtrInstance& inst) {
    std::ostringstream out;
    out << "; memoryless refinement: " << inst.mc_states << " chain states, " << inst.mdp_states << " MDP states, "
        << inst.labels << " labels\n";
    out << "(set-logic QF_NRA)\n";
    for (const auto& v : inst.variables) out << "(declare-fun " << v << " () Real)\n";
    for (const auto& c : inst.constraints) {
        const char* op = c.relation == PolyRelation::Equal ? "=" : c.relation == PolyRelation::GreaterEqual ? ">=" : "<=";
        out << "(assert (" << op << " " << smt_polynomial(c.poly, inst.variables) << " 0.0))\n";
    }
    out << "(check-sat)\n";
    return out.str();
}

bool check_assignment(const EtrInstance& inst, const std::map<std::string, Rational>& assignment) {
    std::vector<Rational> values;
    values.reserve(inst.variables.size());
    for (const auto& name : inst.variables) {
        auto it = assignment.find(name);
        if (it == assignment.end()) throw InvalidArgument("assignment misses variable " + name);
        values.push_back(it->second);
    }
    for (const auto& c : inst.constraints) {
        Rational total;
        for (const auto& [mono, coeff] : c.poly) {
            Rational term = coeff;
            for (std::size_t v : mono) term *= values[v];
            total += term;
        }
        const int s = sgn(total);
        const bool ok = c.relation == PolyRelation::Equal ? s == 0 : c.relation == PolyRelation::GreaterEqual ? s >= 0 : s <= 0;
        if (!ok) return false;
    }
    return true;
}

std::optional<std::map<std::string, Rational>> construct_solution(const EtrInstance& inst, const Mdp& c, const Mdp& d,
                                                                  const MemorylessStrategy& alpha) {
    validate_strategy(d, alpha);
    const UnionModel u = disjoint_union(c, d);
    const std::size_t n = inst.states();
    const std::size_t n1 = inst.mc_states;
    if (u.model.num_states() != n) throw InvalidArgument("instance does not match the models");

    LocalStrategy joint;
    for (StateId q = 0; q < n1; ++q) joint.choice.push_back({Rational(1)});
    for (const auto& dist : alpha.choice) joint.choice.push_back(dist);
    std::vector<RatMatrix> blocks;
    for (LabelId a = 0; a < inst.labels; ++a) blocks.push_back(transition_matrix(u.model, joint, a));

    // forward closure of the difference row vector
    Basis rows(n);
    std::deque<RatVector> queue;
    const RatVector r0 = u.left_initial.weights - u.right_initial.weights;
    rows.insert(r0);
    queue.push_back(r0);
    while (!queue.empty()) {
        const RatVector r = queue.front();
        queue.pop_front();
        for (const auto& b : blocks) {
            RatVector next = b.left_apply(r);
            if (rows.insert(next)) queue.push_back(std::move(next));
        }
    }
    const auto& gens = rows.generators();
    for (const auto& g : gens) {
        if (sgn(dot(g, ones_vector(n))) != 0) return std::nullopt;
    }

    RatMatrix f(n, n);
    for (std::size_t i = 0; i < gens.size(); ++i) {
        for (std::size_t j = 0; j < n; ++j) f(i, j) = gens[i][j];
    }
    const RatMatrix ft = f.transpose();

    std::map<std::string, Rational> out;
    for (StateId q = 0; q < inst.mdp_states; ++q) {
        for (std::size_t m = 0; m < inst.x_index[q].size(); ++m) out[inst.variables[inst.x_index[q][m]]] = alpha.choice[q][m];
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) out[inst.variables[inst.f_index(i, j)]] = f(i, j);
    }
    for (LabelId a = 0; a < inst.labels; ++a) {
        for (std::size_t i = 0; i < n; ++i) {
            RatVector coeffs(n);
            if (i < gens.size()) {
                auto solved = solve_linear(ft, blocks[a].left_apply(gens[i]));
                if (!solved) throw Error("internal: forward space is not closed");
                coeffs = std::move(*solved);
            }
            for (std::size_t k = 0; k < n; ++k) out[inst.variables[inst.m_index(a, i, k)]] = coeffs[k];
        }
    }
    return out;
}

SolverResult run_external_solver(const std::string& script, const std::string& command) {
    char path[] = "/tmp/tracelab-etr-XXXXXX.smt2";
    const int fd = mkstemps(path, 5);
    if (fd < 0) throw Error("cannot create a temporary file for the solver");
    {
        FILE* f = fdopen(fd, "w");
        std::fputs(script.c_str(), f);
        std::fclose(f);
    }
    SolverResult result;
    const std::string cmd = command + " " + path + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        std::remove(path);
        throw Error("cannot start solver command");
    }
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) result.output += buf.data();
    const int status = pclose(pipe);
    std::remove(path);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::string first = result.output.substr(0, result.output.find('\n'));
    while (!first.empty() && std::isspace(static_cast<unsigned char>(first.back()))) first.pop_back();
    result.status = (first == "sat" || first == "unsat" || first == "unknown") ? first : "unknown";
    return result;
}

} // namespace tracelab
