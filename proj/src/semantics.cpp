#include "tracelab/semantics.hpp"

#include "tracelab/error.hpp"

#include <algorithm>
#include <cctype>

namespace tracelab {

Word parse_word(const Mdp& m, std::string_view text) {
    Word w;
    const bool separated = text.find_first_of(", \t") != std::string_view::npos;
    if (!separated) {
        for (char c : text) w.push_back(m.label_id(std::string(1, c)));
        return w;
    }
    std::string token;
    auto flush = [&] {
        if (!token.empty()) {
            w.push_back(m.label_id(token));
            token.clear();
        }
    };
    for (char c : text) {
        if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
            flush();
        } else {
            token.push_back(c);
        }
    }
    flush();
    return w;
}

std::string format_word(const Mdp& m, const Word& w) {
    const bool single = std::all_of(m.labels.begin(), m.labels.end(), [](const auto& l) { return l.size() == 1; });
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!single && i > 0) out += ',';
        out += m.labels.at(w[i]);
    }
    return out;
}

// --- strategies ------------------------------------------------------------

LocalStrategy LocalStrategy::pure(const Mdp& m, const std::vector<std::size_t>& moves) {
    if (moves.size() != m.num_states()) throw InvalidArgument("pure strategy: one move per state required");
    LocalStrategy s;
    s.choice.resize(m.num_states());
    for (StateId q = 0; q < m.num_states(); ++q) {
        if (moves[q] >= m.num_moves(q)) {
            throw InvalidArgument("pure strategy: state '" + m.states[q] + "' has no move " + std::to_string(moves[q]));
        }
        s.choice[q].assign(m.num_moves(q), Rational(0));
        s.choice[q][moves[q]] = 1;
    }
    return s;
}

LocalStrategy LocalStrategy::first_moves(const Mdp& m) {
    return pure(m, std::vector<std::size_t>(m.num_states(), 0));
}

LocalStrategy LocalStrategy::uniform(const Mdp& m) {
    LocalStrategy s;
    s.choice.resize(m.num_states());
    for (StateId q = 0; q < m.num_states(); ++q) {
        const std::size_t k = m.num_moves(q);
        s.choice[q].assign(k, Rational(1, static_cast<unsigned long>(k)));
    }
    return s;
}

bool LocalStrategy::is_pure() const {
    return std::all_of(choice.begin(), choice.end(), [](const auto& dist) {
        return std::count_if(dist.begin(), dist.end(), [](const Rational& p) { return p == 1; }) == 1;
    });
}

std::vector<std::size_t> LocalStrategy::pure_choice() const {
    std::vector<std::size_t> out;
    for (const auto& dist : choice) {
        auto it = std::find_if(dist.begin(), dist.end(), [](const Rational& p) { return p == 1; });
        if (it == dist.end()) throw InvalidArgument("strategy is not pure");
        out.push_back(static_cast<std::size_t>(it - dist.begin()));
    }
    return out;
}

namespace {

void check_distribution(const Mdp& m, StateId q, const std::vector<Rational>& dist, const std::string& where) {
    if (dist.size() != m.num_moves(q)) {
        throw InvalidArgument(where + ": state '" + m.states[q] + "' has " + std::to_string(m.num_moves(q)) +
                              " moves but the distribution has " + std::to_string(dist.size()) + " entries");
    }
    Rational total;
    for (const auto& p : dist) {
        if (p < 0 || p > 1) throw InvalidArgument(where + ": weight " + to_string(p) + " outside [0,1]");
        total += p;
    }
    if (total != 1) {
        throw InvalidArgument(where + ": distribution at state '" + m.states[q] + "' has mass " + to_string(total));
    }
}

} // namespace

void validate_strategy(const Mdp& m, const LocalStrategy& alpha) {
    if (alpha.choice.size() != m.num_states()) throw InvalidArgument("strategy covers the wrong number of states");
    for (StateId q = 0; q < m.num_states(); ++q) check_distribution(m, q, alpha.choice[q], "strategy");
}

FiniteMemoryStrategy FiniteMemoryStrategy::from_memoryless(const LocalStrategy& alpha, std::size_t num_labels) {
    FiniteMemoryStrategy s;
    s.memory = {"m0"};
    const std::size_t n = alpha.choice.size();
    s.update.assign(1, std::vector<std::vector<std::size_t>>(num_labels, std::vector<std::size_t>(n, 0)));
    s.output = {alpha.choice};
    return s;
}

void validate_strategy(const Mdp& m, const FiniteMemoryStrategy& s) {
    const std::size_t k = s.size();
    if (k == 0) throw InvalidArgument("finite-memory strategy has no memory states");
    if (s.initial_memory >= k) throw InvalidArgument("initial memory out of range");
    if (s.update.size() != k || s.output.size() != k) throw InvalidArgument("memory tables have the wrong size");
    for (std::size_t mem = 0; mem < k; ++mem) {
        if (s.update[mem].size() != m.num_labels()) throw InvalidArgument("update table has the wrong label count");
        for (const auto& row : s.update[mem]) {
            if (row.size() != m.num_states()) throw InvalidArgument("update table has the wrong state count");
            for (auto next : row) {
                if (next >= k) throw InvalidArgument("update targets unknown memory state");
            }
        }
        if (s.output[mem].size() != m.num_states()) throw InvalidArgument("output table has the wrong state count");
        for (StateId q = 0; q < m.num_states(); ++q) {
            check_distribution(m, q, s.output[mem][q], "strategy output for memory '" + s.memory[mem] + "'");
        }
    }
}

const std::vector<Rational>* TraceBasedTable::find(const Word& w, StateId q) const {
    auto it = entries.find({w, q});
    return it == entries.end() ? nullptr : &it->second;
}

// --- transition structure --------------------------------------------------

RatMatrix transition_matrix(const Mdp& m, const LocalStrategy& alpha, LabelId a) {
    if (a >= m.num_labels()) throw InvalidArgument("label index out of range");
    const std::size_t n = m.num_states();
    if (alpha.choice.size() != n) throw InvalidArgument("strategy covers the wrong number of states");
    RatMatrix delta(n, n);
    for (StateId q = 0; q < n; ++q) {
        for (std::size_t i = 0; i < m.num_moves(q); ++i) {
            const Rational& w = alpha.choice[q][i];
            if (sgn(w) == 0) continue;
            for (const auto& [key, p] : m.moves[q][i].entries()) {
                if (key.first == a) delta(q, key.second) += w * p;
            }
        }
    }
    return delta;
}

SubDist succ(const SubDist& mu, const Mdp& m, const LocalStrategy& alpha, LabelId a) {
    if (mu.size() != m.num_states()) throw InvalidArgument("succ: subdistribution has the wrong dimension");
    return SubDist(transition_matrix(m, alpha, a).left_apply(mu.weights));
}

SubDist sub_dis(const Mdp& m, const TraceBasedTable& table, const Word& w) {
    if (w.size() > table.depth) {
        throw InvalidArgument("word of length " + std::to_string(w.size()) + " exceeds table depth " +
                              std::to_string(table.depth));
    }
    SubDist mu = m.initial_dist();
    Word prefix;
    for (LabelId a : w) {
        if (a >= m.num_labels()) throw InvalidArgument("unknown label index");
        // the local strategy alpha[prefix]; zero-mass states are irrelevant to the product
        LocalStrategy step = LocalStrategy::uniform(m);
        for (StateId q = 0; q < m.num_states(); ++q) {
            if (sgn(mu[q]) == 0) continue;
            const auto* entry = table.find(prefix, q);
            if (entry == nullptr) {
                throw InvalidArgument("trace-based table has no entry for reachable state '" + m.states[q] +
                                      "' after '" + format_word(m, prefix) + "'");
            }
            step.choice[q] = *entry;
        }
        mu = succ(mu, m, step, a);
        prefix.push_back(a);
    }
    return mu;
}

Rational trace_prob(const Mdp& m, const TraceBasedTable& table, const Word& w) { return sub_dis(m, table, w).norm(); }

SubDist mc_sub_dis(const Mdp& mc, const Word& w) {
    require_mc(mc, "model");
    const LocalStrategy only = LocalStrategy::first_moves(mc);
    SubDist mu = mc.initial_dist();
    for (LabelId a : w) mu = succ(mu, mc, only, a);
    return mu;
}

Rational mc_trace_prob(const Mdp& mc, const Word& w) { return mc_sub_dis(mc, w).norm(); }

// --- strategy flattening ---------------------------------------------------

namespace {

struct Flattener {
    const Mdp& m;
    const FiniteMemoryStrategy& s;
    std::size_t depth;
    TraceBasedTable& table;

    // joint[mem * n + q]: probability of having emitted the current word with
    // memory `mem` while in state `q`
    void visit(Word& w, const std::vector<Rational>& joint) {
        const std::size_t n = m.num_states();
        const std::size_t k = s.size();
        for (StateId q = 0; q < n; ++q) {
            Rational mass;
            for (std::size_t mem = 0; mem < k; ++mem) mass += joint[mem * n + q];
            std::vector<Rational> dist(m.num_moves(q));
            if (sgn(mass) == 0) {
                dist.assign(m.num_moves(q), Rational(1, static_cast<unsigned long>(m.num_moves(q))));
            } else {
                for (std::size_t mem = 0; mem < k; ++mem) {
                    const Rational& jm = joint[mem * n + q];
                    if (sgn(jm) == 0) continue;
                    for (std::size_t i = 0; i < dist.size(); ++i) dist[i] += jm * s.output[mem][q][i];
                }
                for (auto& p : dist) p /= mass;
            }
            table.entries.emplace(std::make_pair(w, q), std::move(dist));
        }
        if (w.size() + 1 >= depth) return;
        for (LabelId a = 0; a < m.num_labels(); ++a) {
            std::vector<Rational> next(k * n);
            for (std::size_t mem = 0; mem < k; ++mem) {
                for (StateId q = 0; q < n; ++q) {
                    const Rational& jm = joint[mem * n + q];
                    if (sgn(jm) == 0) continue;
                    for (std::size_t i = 0; i < m.num_moves(q); ++i) {
                        const Rational& pm = s.output[mem][q][i];
                        if (sgn(pm) == 0) continue;
                        for (const auto& [key, p] : m.moves[q][i].entries()) {
                            if (key.first != a) continue;
                            const std::size_t mem2 = s.update[mem][a][key.second];
                            next[mem2 * n + key.second] += jm * pm * p;
                        }
                    }
                }
            }
            w.push_back(a);
            visit(w, next);
            w.pop_back();
        }
    }
};

} // namespace

TraceBasedTable flatten(const Mdp& m, const FiniteMemoryStrategy& s, std::size_t depth) {
    validate_strategy(m, s);
    TraceBasedTable table;
    table.depth = depth;
    if (depth == 0) return table;
    const std::size_t n = m.num_states();
    std::vector<Rational> joint(s.size() * n);
    for (StateId q = 0; q < n; ++q) joint[s.initial_memory * n + q] = m.initial[q];
    Word w;
    Flattener{m, s, depth, table}.visit(w, joint);
    return table;
}

namespace {

void tabulate(const Mdp& m, const std::vector<LocalStrategy>& steps, Word& w, TraceBasedTable& table) {
    const auto& alpha = steps[w.size()];
    for (StateId q = 0; q < m.num_states(); ++q) table.entries.emplace(std::make_pair(w, q), alpha.choice[q]);
    if (w.size() + 1 >= steps.size()) return;
    for (LabelId a = 0; a < m.num_labels(); ++a) {
        w.push_back(a);
        tabulate(m, steps, w, table);
        w.pop_back();
    }
}

} // namespace

TraceBasedTable table_from_local_sequence(const Mdp& m, const std::vector<LocalStrategy>& steps) {
    for (const auto& alpha : steps) validate_strategy(m, alpha);
    TraceBasedTable table;
    table.depth = steps.size();
    if (steps.empty()) return table;
    Word w;
    tabulate(m, steps, w, table);
    return table;
}

TraceBasedTable memoryless_table(const Mdp& m, const LocalStrategy& alpha, std::size_t depth) {
    return table_from_local_sequence(m, std::vector<LocalStrategy>(depth, alpha));
}

Mdp induced_mc(const Mdp& m, const MemorylessStrategy& alpha) {
    validate_strategy(m, alpha);
    Mdp out;
    out.labels = m.labels;
    out.states = m.states;
    out.initial = m.initial;
    out.moves.resize(m.num_states());
    for (StateId q = 0; q < m.num_states(); ++q) {
        Move mixed;
        for (std::size_t i = 0; i < m.num_moves(q); ++i) {
            const Rational& w = alpha.choice[q][i];
            if (sgn(w) == 0) continue;
            for (const auto& [key, p] : m.moves[q][i].entries()) mixed.add(key.first, key.second, w * p);
        }
        out.moves[q].push_back(std::move(mixed));
    }
    return out;
}

bool is_path(const Mdp& m, const Path& p) {
    if (p.states.empty() || p.states.size() != p.labels.size() + 1) return false;
    for (std::size_t i = 0; i < p.labels.size(); ++i) {
        if (p.states[i] >= m.num_states()) return false;
        if (!post_set(m, p.states[i]).count({p.labels[i], p.states[i + 1]})) return false;
    }
    return p.states.back() < m.num_states();
}

Rational path_probability(const Mdp& m, const TraceBasedTable& table, const Path& p) {
    if (p.states.empty() || p.states.size() != p.labels.size() + 1) throw InvalidArgument("malformed path");
    Rational pr = m.initial.at(p.states[0]);
    Word prefix;
    for (std::size_t i = 0; i < p.labels.size() && sgn(pr) != 0; ++i) {
        const StateId q = p.states[i];
        const auto* dist = table.find(prefix, q);
        if (dist == nullptr) throw InvalidArgument("trace-based table does not cover the path");
        Rational step;
        for (std::size_t j = 0; j < m.num_moves(q); ++j) {
            if (sgn((*dist)[j]) != 0) step += (*dist)[j] * m.moves[q][j].prob(p.labels[i], p.states[i + 1]);
        }
        pr *= step;
        prefix.push_back(p.labels[i]);
    }
    return pr;
}

} // namespace tracelab
