#include "tracelab/model.hpp"

#include "tracelab/error.hpp"

#include <algorithm>
#include <numeric>

namespace tracelab {

Move& Move::add(LabelId label, StateId target, const Rational& p) {
    if (sgn(p) == 0) return *this;
    auto [it, inserted] = entries_.try_emplace({label, target}, p);
    if (!inserted) {
        it->second += p;
        if (sgn(it->second) == 0) entries_.erase(it);
    }
    return *this;
}

Rational Move::prob(LabelId label, StateId target) const {
    auto it = entries_.find({label, target});
    return it == entries_.end() ? Rational(0) : it->second;
}

Rational Move::mass() const {
    Rational total;
    for (const auto& [key, p] : entries_) total += p;
    return total;
}

Move Move::dirac(LabelId label, StateId target) {
    Move m;
    m.add(label, target, 1);
    return m;
}

Rational SubDist::norm() const {
    return std::accumulate(weights.begin(), weights.end(), Rational(0));
}

std::set<StateId> SubDist::support() const {
    std::set<StateId> s;
    for (StateId q = 0; q < weights.size(); ++q) {
        if (sgn(weights[q]) != 0) s.insert(q);
    }
    return s;
}

bool SubDist::is_zero() const { return tracelab::is_zero(weights); }

SubDist SubDist::dirac(std::size_t states, StateId s) {
    SubDist d(states);
    d.weights.at(s) = 1;
    return d;
}

SubDist SubDist::uniform(std::size_t states, const std::set<StateId>& over) {
    if (over.empty()) throw InvalidArgument("uniform distribution over an empty set");
    SubDist d(states);
    const Rational w(1, static_cast<unsigned long>(over.size()));
    for (StateId q : over) d.weights.at(q) = w;
    return d;
}

std::size_t Mdp::total_moves() const {
    std::size_t n = 0;
    for (const auto& ms : moves) n += ms.size();
    return n;
}

std::optional<LabelId> Mdp::find_label(const std::string& name) const {
    auto it = std::find(labels.begin(), labels.end(), name);
    if (it == labels.end()) return std::nullopt;
    return static_cast<LabelId>(it - labels.begin());
}

std::optional<StateId> Mdp::find_state(const std::string& name) const {
    auto it = std::find(states.begin(), states.end(), name);
    if (it == states.end()) return std::nullopt;
    return static_cast<StateId>(it - states.begin());
}

LabelId Mdp::label_id(const std::string& name) const {
    if (auto id = find_label(name)) return *id;
    throw InvalidArgument("unknown label '" + name + "'");
}

StateId Mdp::state_id(const std::string& name) const {
    if (auto id = find_state(name)) return *id;
    throw InvalidArgument("unknown state '" + name + "'");
}

std::vector<Violation> validate(const Mdp& m) {
    std::vector<Violation> out;
    const std::size_t n = m.num_states();

    if (m.labels.empty()) out.push_back({"labels", "label set is empty"});
    if (n == 0) out.push_back({"states", "state set is empty"});
    {
        std::set<std::string> seen;
        for (const auto& l : m.labels) {
            if (!seen.insert(l).second) out.push_back({"labels", "duplicate label '" + l + "'"});
        }
    }
    {
        std::set<std::string> seen;
        for (const auto& s : m.states) {
            if (!seen.insert(s).second) out.push_back({"states", "duplicate state '" + s + "'"});
        }
    }

    if (m.initial.size() != n) {
        out.push_back({"initial", "initial vector has " + std::to_string(m.initial.size()) + " entries for " +
                                      std::to_string(n) + " states"});
    } else {
        Rational total;
        for (StateId q = 0; q < n; ++q) {
            if (m.initial[q] < 0 || m.initial[q] > 1) {
                out.push_back({"initial." + m.states[q], "probability " + to_string(m.initial[q]) + " outside [0,1]"});
            }
            total += m.initial[q];
        }
        if (total != 1) out.push_back({"initial", "initial not a distribution (mass " + to_string(total) + ")"});
    }

    if (m.moves.size() != n) {
        out.push_back({"moves", "move table has " + std::to_string(m.moves.size()) + " rows for " +
                                    std::to_string(n) + " states"});
        return out;
    }
    for (StateId q = 0; q < n; ++q) {
        const std::string where = "moves." + m.states[q];
        if (m.moves[q].empty()) out.push_back({where, "state has no move"});
        for (std::size_t i = 0; i < m.moves[q].size(); ++i) {
            const std::string mw = where + "[" + std::to_string(i) + "]";
            const Move& mv = m.moves[q][i];
            for (const auto& [key, p] : mv.entries()) {
                if (key.first >= m.num_labels()) out.push_back({mw, "label index out of range"});
                if (key.second >= n) out.push_back({mw, "successor state out of range"});
                if (p < 0 || p > 1) out.push_back({mw, "probability " + to_string(p) + " outside [0,1]"});
            }
            const Rational mass = mv.mass();
            if (mass != 1) out.push_back({mw, "move mass " + to_string(mass) + " != 1"});
        }
    }
    return out;
}

void require_valid(const Mdp& m) {
    const auto violations = validate(m);
    if (violations.empty()) return;
    std::string msg = "invalid model:";
    for (const auto& v : violations) msg += "\n  " + v.where + ": " + v.message;
    throw InvalidArgument(msg);
}

bool is_mc(const Mdp& m) {
    return std::all_of(m.moves.begin(), m.moves.end(), [](const auto& ms) { return ms.size() == 1; });
}

void require_mc(const Mdp& m, const std::string& role) {
    if (!is_mc(m)) throw InvalidArgument(role + " must be a Markov chain (exactly one move per state)");
}

std::set<Move::Key> post_set(const Mdp& m, StateId q) {
    if (q >= m.num_states()) throw InvalidArgument("post: invalid state " + std::to_string(q));
    std::set<Move::Key> out;
    for (const auto& mv : m.moves[q]) {
        for (const auto& [key, p] : mv.entries()) out.insert(key);
    }
    return out;
}

std::vector<LabelId> label_mapping(const Mdp& d, const Mdp& e) {
    const std::set<std::string> ld(d.labels.begin(), d.labels.end());
    const std::set<std::string> le(e.labels.begin(), e.labels.end());
    if (ld != le) throw InvalidArgument("label sets differ");
    std::vector<LabelId> map(e.num_labels());
    for (LabelId a = 0; a < e.num_labels(); ++a) map[a] = d.label_id(e.labels[a]);
    return map;
}

Mdp relabel_to(const Mdp& m, const Mdp& reference) {
    const auto map = label_mapping(reference, m);
    Mdp out;
    out.labels = reference.labels;
    out.states = m.states;
    out.initial = m.initial;
    out.moves.resize(m.num_states());
    for (StateId q = 0; q < m.num_states(); ++q) {
        for (const auto& mv : m.moves[q]) {
            Move r;
            for (const auto& [key, p] : mv.entries()) r.add(map[key.first], key.second, p);
            out.moves[q].push_back(std::move(r));
        }
    }
    return out;
}

UnionModel disjoint_union(const Mdp& d, const Mdp& e) {
    const auto relabel = label_mapping(d, e);
    UnionModel u;
    const std::size_t nd = d.num_states();
    const std::size_t ne = e.num_states();
    u.model.labels = d.labels;
    for (const auto& s : d.states) u.model.states.push_back("l." + s);
    for (const auto& s : e.states) u.model.states.push_back("r." + s);
    u.left_map.resize(nd);
    u.right_map.resize(ne);
    std::iota(u.left_map.begin(), u.left_map.end(), StateId{0});
    std::iota(u.right_map.begin(), u.right_map.end(), nd);

    u.model.moves.resize(nd + ne);
    for (StateId q = 0; q < nd; ++q) u.model.moves[q] = d.moves[q];
    for (StateId q = 0; q < ne; ++q) {
        for (const auto& mv : e.moves[q]) {
            Move shifted;
            for (const auto& [key, p] : mv.entries()) shifted.add(relabel[key.first], key.second + nd, p);
            u.model.moves[nd + q].push_back(std::move(shifted));
        }
    }
    u.left_initial = SubDist(nd + ne);
    u.right_initial = SubDist(nd + ne);
    for (StateId q = 0; q < nd; ++q) u.left_initial[q] = d.initial[q];
    for (StateId q = 0; q < ne; ++q) u.right_initial[nd + q] = e.initial[q];
    u.model.initial = u.left_initial.weights;
    return u;
}

} // namespace tracelab
