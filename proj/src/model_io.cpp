#include "tracelab/model_io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace tracelab {

using nlohmann::json;

namespace {

std::string join_violations(const std::vector<Violation>& vs) {
    std::string msg = "invalid model:";
    for (const auto& v : vs) msg += "\n  " + v.where + ": " + v.message;
    return msg;
}

// Converts nlohmann's byte offset into a 1-based line/column pair.
[[noreturn]] void throw_syntax(std::string_view text, const json::parse_error& e) {
    const std::size_t offset = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < offset; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    std::string what = e.what();
    if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ParseError(what, line, column);
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw_syntax(text, e);
    }
}

const json& field(const json& obj, const char* name, const std::string& where) {
    if (!obj.is_object()) throw ParseError("expected an object", where);
    auto it = obj.find(name);
    if (it == obj.end()) throw ParseError(std::string("missing field '") + name + "'", where);
    return *it;
}

std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw ParseError("expected a string", where);
    return j.get<std::string>();
}

std::vector<std::string> as_string_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError("expected an array of strings", where);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

std::size_t as_index(const json& j, const std::string& where) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
        throw ParseError("expected a non-negative integer", where);
    }
    return j.get<std::size_t>();
}

Rational as_rational(const json& j, const std::string& where) {
    if (!j.is_string()) throw ParseError("rationals are written as strings such as \"1/4\"", where);
    try {
        return parse_rational(j.get<std::string>());
    } catch (const ParseError& e) {
        throw ParseError(e.what(), where);
    }
}

Rational as_probability(const json& j, const std::string& where) {
    Rational p = as_rational(j, where);
    if (p < 0 || p > 1) throw ParseError("probability " + to_string(p) + " outside [0,1]", where);
    return p;
}

void check_version(const json& doc) {
    const json& v = field(doc, "format_version", "");
    if (!v.is_number_integer() || v.get<long long>() != kFormatVersion) {
        throw ParseError("unsupported format_version (expected " + std::to_string(kFormatVersion) + ")",
                         "format_version");
    }
}

StateId resolve_state(const Mdp& m, const std::string& name, const std::string& where) {
    if (auto q = m.find_state(name)) return *q;
    throw ParseError("unknown state '" + name + "'", where);
}

std::vector<Rational> parse_move_distribution(const json& j, const Mdp& m, StateId q, const std::string& where) {
    if (!j.is_object()) throw ParseError("expected an object mapping move indices to probabilities", where);
    std::vector<Rational> dist(m.num_moves(q));
    for (const auto& [key, value] : j.items()) {
        const std::string kw = where + "." + key;
        std::size_t idx = 0;
        try {
            std::size_t used = 0;
            idx = std::stoul(key, &used);
            if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw ParseError("move key must be a move index", kw);
        }
        if (idx >= dist.size()) {
            throw ParseError("state '" + m.states[q] + "' has no move " + std::to_string(idx), kw);
        }
        dist[idx] = as_probability(value, kw);
    }
    Rational total;
    for (const auto& p : dist) total += p;
    if (total != 1) throw ParseError("distribution mass " + to_string(total) + " != 1", where);
    return dist;
}

std::vector<Rational> default_distribution(const Mdp& m, StateId q, const std::string& where) {
    if (m.num_moves(q) != 1) throw ParseError("missing choice for state '" + m.states[q] + "' with several moves", where);
    return {Rational(1)};
}

} // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(join_violations(violations)), violations_(std::move(violations)) {}

Mdp parse_model(std::string_view text) {
    const json doc = parse_json(text);
    if (!doc.is_object()) throw ParseError("document must be a JSON object", "");
    check_version(doc);
    const std::string kind = as_string(field(doc, "kind", ""), "kind");
    if (kind != "mdp" && kind != "mc") throw ParseError("kind must be \"mdp\" or \"mc\"", "kind");

    Mdp m;
    m.labels = as_string_list(field(doc, "labels", ""), "labels");
    m.states = as_string_list(field(doc, "states", ""), "states");
    {
        std::vector<Violation> early;
        std::set<std::string> seen;
        for (const auto& s : m.states) {
            if (!seen.insert(s).second) early.push_back({"states", "duplicate state '" + s + "'"});
        }
        seen.clear();
        for (const auto& l : m.labels) {
            if (!seen.insert(l).second) early.push_back({"labels", "duplicate label '" + l + "'"});
        }
        if (!early.empty()) throw ValidationError(early);
    }

    m.initial.assign(m.num_states(), Rational(0));
    const json& init = field(doc, "initial", "");
    if (!init.is_object()) throw ParseError("expected an object mapping states to probabilities", "initial");
    for (const auto& [name, p] : init.items()) {
        const std::string where = "initial." + name;
        m.initial[resolve_state(m, name, where)] = as_probability(p, where);
    }

    m.moves.resize(m.num_states());
    const json& moves = field(doc, "moves", "");
    if (!moves.is_object()) throw ParseError("expected an object mapping states to move lists", "moves");
    for (const auto& [name, list] : moves.items()) {
        const std::string where = "moves." + name;
        const StateId q = resolve_state(m, name, where);
        if (!list.is_array()) throw ParseError("expected a list of moves", where);
        for (std::size_t i = 0; i < list.size(); ++i) {
            const std::string mw = where + "[" + std::to_string(i) + "]";
            if (!list[i].is_array()) throw ParseError("a move is a list of {label, target, prob} entries", mw);
            Move mv;
            for (std::size_t e = 0; e < list[i].size(); ++e) {
                const std::string ew = mw + "[" + std::to_string(e) + "]";
                const json& entry = list[i][e];
                const std::string label = as_string(field(entry, "label", ew), ew + ".label");
                const std::string target = as_string(field(entry, "target", ew), ew + ".target");
                auto a = m.find_label(label);
                if (!a) throw ParseError("unknown label '" + label + "'", ew + ".label");
                mv.add(*a, resolve_state(m, target, ew + ".target"), as_probability(field(entry, "prob", ew), ew + ".prob"));
            }
            m.moves[q].push_back(std::move(mv));
        }
    }

    auto violations = validate(m);
    if (!violations.empty()) throw ValidationError(std::move(violations));
    if (kind == "mc" && !is_mc(m)) {
        std::vector<Violation> vs;
        for (StateId q = 0; q < m.num_states(); ++q) {
            if (m.num_moves(q) != 1) vs.push_back({"moves." + m.states[q], "kind \"mc\" requires exactly one move"});
        }
        throw ValidationError(vs);
    }
    return m;
}

std::string serialize_model(const Mdp& m) {
    require_valid(m);
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = is_mc(m) ? "mc" : "mdp";
    doc["labels"] = m.labels;
    doc["states"] = m.states;
    json init = json::object();
    for (StateId q = 0; q < m.num_states(); ++q) {
        if (sgn(m.initial[q]) != 0) init[m.states[q]] = to_string(m.initial[q]);
    }
    doc["initial"] = init;
    json moves = json::object();
    for (StateId q = 0; q < m.num_states(); ++q) {
        json list = json::array();
        for (const auto& mv : m.moves[q]) {
            json entries = json::array();
            // std::map iteration is already ordered by (label, target)
            for (const auto& [key, p] : mv.entries()) {
                entries.push_back({{"label", m.labels[key.first]}, {"target", m.states[key.second]}, {"prob", to_string(p)}});
            }
            list.push_back(std::move(entries));
        }
        moves[m.states[q]] = std::move(list);
    }
    doc["moves"] = moves;
    return doc.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
}

Mdp load_model(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return parse_model(text);
    } catch (const ParseError& e) {
        throw e.with_prefix(path + ": ");
    }
}

void save_model(const std::string& path, const Mdp& m) { write_file(path, serialize_model(m)); }

StrategyDocument parse_strategy(std::string_view text, const Mdp& m) {
    const json doc = parse_json(text);
    if (!doc.is_object()) throw ParseError("document must be a JSON object", "");
    check_version(doc);
    const std::string kind = as_string(field(doc, "kind", ""), "kind");

    if (kind == "memoryless") {
        const json& choice = field(doc, "choice", "");
        if (!choice.is_object()) throw ParseError("expected an object keyed by state", "choice");
        MemorylessStrategy alpha;
        alpha.choice.resize(m.num_states());
        std::vector<bool> given(m.num_states(), false);
        for (const auto& [name, dist] : choice.items()) {
            const std::string where = "choice." + name;
            const StateId q = resolve_state(m, name, where);
            alpha.choice[q] = parse_move_distribution(dist, m, q, where);
            given[q] = true;
        }
        for (StateId q = 0; q < m.num_states(); ++q) {
            if (!given[q]) alpha.choice[q] = default_distribution(m, q, "choice." + m.states[q]);
        }
        return alpha;
    }

    if (kind != "finite-memory") throw ParseError("kind must be \"memoryless\" or \"finite-memory\"", "kind");
    FiniteMemoryStrategy s;
    s.memory = as_string_list(field(doc, "memory", ""), "memory");
    if (s.memory.empty()) throw ParseError("at least one memory state is required", "memory");
    auto memory_index = [&](const json& j, const std::string& where) {
        const std::string name = as_string(j, where);
        auto it = std::find(s.memory.begin(), s.memory.end(), name);
        if (it == s.memory.end()) throw ParseError("unknown memory state '" + name + "'", where);
        return static_cast<std::size_t>(it - s.memory.begin());
    };
    s.initial_memory = memory_index(field(doc, "initial_memory", ""), "initial_memory");

    const std::size_t k = s.size();
    const std::size_t n = m.num_states();
    s.update.assign(k, std::vector<std::vector<std::size_t>>(m.num_labels(), std::vector<std::size_t>(n)));
    for (std::size_t mem = 0; mem < k; ++mem) {
        for (auto& row : s.update[mem]) std::fill(row.begin(), row.end(), mem);
    }
    std::vector<std::vector<std::vector<bool>>> fixed(
        k, std::vector<std::vector<bool>>(m.num_labels(), std::vector<bool>(n, false)));
    if (doc.contains("update")) {
        const json& rules = doc["update"];
        if (!rules.is_array()) throw ParseError("expected a list of update rules", "update");
        // rules are read in order; the first rule matching a triple decides it
        for (std::size_t r = 0; r < rules.size(); ++r) {
            const std::string where = "update[" + std::to_string(r) + "]";
            const json& rule = rules[r];
            const std::size_t from = memory_index(field(rule, "from", where), where + ".from");
            const std::size_t to = memory_index(field(rule, "to", where), where + ".to");
            std::optional<LabelId> label;
            std::optional<StateId> state;
            if (rule.contains("label")) {
                const std::string l = as_string(rule["label"], where + ".label");
                label = m.find_label(l);
                if (!label) throw ParseError("unknown label '" + l + "'", where + ".label");
            }
            if (rule.contains("state")) state = resolve_state(m, as_string(rule["state"], where + ".state"), where + ".state");
            for (LabelId a = 0; a < m.num_labels(); ++a) {
                if (label && *label != a) continue;
                for (StateId q = 0; q < n; ++q) {
                    if (state && *state != q) continue;
                    if (fixed[from][a][q]) continue;
                    fixed[from][a][q] = true;
                    s.update[from][a][q] = to;
                }
            }
        }
    }

    s.output.assign(k, std::vector<std::vector<Rational>>(n));
    std::vector<std::vector<bool>> given(k, std::vector<bool>(n, false));
    const json& outputs = field(doc, "output", "");
    if (!outputs.is_array()) throw ParseError("expected a list of output rules", "output");
    for (std::size_t r = 0; r < outputs.size(); ++r) {
        const std::string where = "output[" + std::to_string(r) + "]";
        const json& rule = outputs[r];
        const StateId q = resolve_state(m, as_string(field(rule, "state", where), where + ".state"), where + ".state");
        const auto dist = parse_move_distribution(field(rule, "choice", where), m, q, where + ".choice");
        std::optional<std::size_t> only;
        if (rule.contains("memory")) only = memory_index(rule["memory"], where + ".memory");
        for (std::size_t mem = 0; mem < k; ++mem) {
            if (only && *only != mem) continue;
            if (given[mem][q]) continue;
            s.output[mem][q] = dist;
            given[mem][q] = true;
        }
    }
    for (std::size_t mem = 0; mem < k; ++mem) {
        for (StateId q = 0; q < n; ++q) {
            if (!given[mem][q]) s.output[mem][q] = default_distribution(m, q, "output");
        }
    }
    validate_strategy(m, s);
    return s;
}

json rational_json(const Rational& r) { return to_string(r); }

json subdist_json(const Mdp& m, const SubDist& d) {
    json out = json::object();
    for (StateId q = 0; q < d.size(); ++q) {
        if (sgn(d[q]) != 0) out[m.states[q]] = to_string(d[q]);
    }
    return out;
}

json word_json(const Mdp& m, const Word& w) {
    json out = json::array();
    for (LabelId a : w) out.push_back(m.labels.at(a));
    return out;
}

json strategy_json(const Mdp& m, const MemorylessStrategy& alpha) {
    json choice = json::object();
    for (StateId q = 0; q < m.num_states(); ++q) {
        json dist = json::object();
        for (std::size_t i = 0; i < alpha.choice[q].size(); ++i) {
            if (sgn(alpha.choice[q][i]) != 0) dist[std::to_string(i)] = to_string(alpha.choice[q][i]);
        }
        choice[m.states[q]] = dist;
    }
    return choice;
}

std::string serialize_strategy(const Mdp& m, const MemorylessStrategy& alpha) {
    validate_strategy(m, alpha);
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["kind"] = "memoryless";
    doc["choice"] = strategy_json(m, alpha);
    return doc.dump(2) + "\n";
}

Certificate parse_certificate(std::string_view text, const Mdp& u) {
    const json doc = parse_json(text);
    if (!doc.is_object()) throw ParseError("document must be a JSON object", "");
    check_version(doc);
    Certificate c;
    c.k = as_index(field(doc, "k", ""), "k");
    if (c.k < 1) throw ParseError("k must be at least 1", "k");
    const json& refs = field(doc, "back_refs", "");
    const json& labels = field(doc, "labels", "");
    const json& strategies = field(doc, "strategies", "");
    if (!refs.is_array() || refs.size() != c.k - 1) throw ParseError("expected k-1 back references", "back_refs");
    if (!labels.is_array() || labels.size() != c.k - 1) throw ParseError("expected k-1 labels", "labels");
    if (!strategies.is_array() || strategies.size() != c.k - 1) throw ParseError("expected k-1 strategies", "strategies");
    for (std::size_t j = 0; j + 1 < c.k; ++j) {
        const std::string idx = "[" + std::to_string(j) + "]";
        c.back_refs.push_back(as_index(refs[j], "back_refs" + idx));
        const std::string l = as_string(labels[j], "labels" + idx);
        auto a = u.find_label(l);
        if (!a) throw ParseError("unknown label '" + l + "'", "labels" + idx);
        c.labels.push_back(*a);

        const json& st = strategies[j];
        const std::string where = "strategies" + idx;
        if (!st.is_object()) throw ParseError("expected an object mapping states to move indices", where);
        std::vector<std::size_t> pure(u.num_states(), 0);
        std::vector<bool> given(u.num_states(), false);
        for (const auto& [name, mv] : st.items()) {
            const StateId q = resolve_state(u, name, where + "." + name);
            pure[q] = as_index(mv, where + "." + name);
            if (pure[q] >= u.num_moves(q)) {
                throw ParseError("state '" + name + "' has no move " + std::to_string(pure[q]), where + "." + name);
            }
            given[q] = true;
        }
        for (StateId q = 0; q < u.num_states(); ++q) {
            if (!given[q] && u.num_moves(q) != 1) {
                throw ParseError("missing move for state '" + u.states[q] + "'", where);
            }
        }
        c.strategies.push_back(std::move(pure));
    }
    return c;
}

std::string serialize_certificate(const Certificate& c, const Mdp& u) {
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["k"] = c.k;
    doc["back_refs"] = c.back_refs;
    json labels = json::array();
    for (LabelId a : c.labels) labels.push_back(u.labels.at(a));
    doc["labels"] = labels;
    json strategies = json::array();
    for (const auto& pure : c.strategies) {
        json st = json::object();
        for (StateId q = 0; q < pure.size(); ++q) {
            if (u.num_moves(q) > 1) st[u.states[q]] = pure[q];
        }
        strategies.push_back(st);
    }
    doc["strategies"] = strategies;
    return doc.dump(2) + "\n";
}

} // namespace tracelab
