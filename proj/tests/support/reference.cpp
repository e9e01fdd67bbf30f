#include "reference.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>

namespace tracelab::testing {

namespace {

void walk(const Mdp& m, const TraceBasedTable& table, const Word& w, std::size_t i, StateId q, const Rational& weight,
          SubDist& out) {
    if (i == w.size()) {
        out[q] += weight;
        return;
    }
    const Word prefix(w.begin(), w.begin() + static_cast<long>(i));
    const auto* choice = table.find(prefix, q);
    if (!choice) throw std::logic_error("table misses a reachable prefix");
    for (StateId next = 0; next < m.num_states(); ++next) {
        Rational step;
        for (std::size_t k = 0; k < m.num_moves(q); ++k) step += (*choice)[k] * m.moves[q][k].prob(w[i], next);
        if (step != 0) walk(m, table, w, i + 1, next, weight * step, out);
    }
}

} // namespace

SubDist path_enumeration_subdis(const Mdp& m, const TraceBasedTable& table, const Word& w) {
    SubDist out(m.num_states());
    for (StateId q = 0; q < m.num_states(); ++q) {
        if (m.initial[q] != 0) walk(m, table, w, 0, q, m.initial[q], out);
    }
    return out;
}

Mdp product_chain(const Mdp& m, const FiniteMemoryStrategy& s) {
    const std::size_t n = m.num_states();
    Mdp p;
    p.labels = m.labels;
    for (const auto& mem : s.memory) {
        for (const auto& q : m.states) p.states.push_back(mem + "/" + q);
    }
    p.initial.assign(s.size() * n, Rational(0));
    for (StateId q = 0; q < n; ++q) p.initial[s.initial_memory * n + q] = m.initial[q];
    p.moves.resize(s.size() * n);
    for (std::size_t mem = 0; mem < s.size(); ++mem) {
        for (StateId q = 0; q < n; ++q) {
            Move mixed;
            for (std::size_t k = 0; k < m.num_moves(q); ++k) {
                const Rational& w = s.output[mem][q][k];
                if (w == 0) continue;
                for (const auto& [key, pr] : m.moves[q][k].entries()) {
                    const auto [a, next] = key;
                    mixed.add(a, s.update[mem][a][next] * n + next, w * pr);
                }
            }
            p.moves[mem * n + q] = {mixed};
        }
    }
    return p;
}

SubDist marginal(const SubDist& joint, std::size_t states) {
    SubDist out(states);
    for (std::size_t i = 0; i < joint.size(); ++i) out[i % states] += joint[i];
    return out;
}

std::vector<Word> all_words(std::size_t labels, std::size_t n) {
    std::vector<Word> out{Word{}};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Word> next;
        for (const auto& w : out) {
            for (LabelId a = 0; a < labels; ++a) {
                Word x = w;
                x.push_back(a);
                next.push_back(std::move(x));
            }
        }
        out = std::move(next);
    }
    return out;
}

namespace {

struct Sexp {
    std::string atom;
    std::vector<Sexp> list;
    bool is_list = false;
};

class Reader {
public:
    explicit Reader(const std::string& s) : s_(s) {}

    bool at_end() {
        skip();
        return pos_ >= s_.size();
    }

    Sexp read() {
        skip();
        if (pos_ >= s_.size()) throw std::runtime_error("unexpected end of input");
        if (s_[pos_] == ')') throw std::runtime_error("unbalanced ')' at offset " + std::to_string(pos_));
        if (s_[pos_] == '(') {
            ++pos_;
            Sexp e;
            e.is_list = true;
            for (;;) {
                skip();
                if (pos_ >= s_.size()) throw std::runtime_error("unclosed '('");
                if (s_[pos_] == ')') {
                    ++pos_;
                    return e;
                }
                e.list.push_back(read());
            }
        }
        const std::size_t start = pos_;
        while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) && s_[pos_] != '(' &&
               s_[pos_] != ')' && s_[pos_] != ';') {
            ++pos_;
        }
        Sexp e;
        e.atom = s_.substr(start, pos_ - start);
        return e;
    }

private:
    void skip() {
        while (pos_ < s_.size()) {
            if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
                ++pos_;
            } else if (s_[pos_] == ';') {
                while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

bool is_numeral(const std::string& a) {
    if (a.empty()) return false;
    std::size_t i = 0;
    bool digits = false;
    bool dot = false;
    for (; i < a.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(a[i]))) {
            digits = true;
        } else if (a[i] == '.' && !dot && digits) {
            dot = true;
        } else {
            return false;
        }
    }
    if (a.size() > 1 && a[0] == '0' && a[1] != '.') return false;
    return digits && a.back() != '.';
}

bool is_symbol(const std::string& a) {
    if (a.empty() || std::isdigit(static_cast<unsigned char>(a[0]))) return false;
    for (char c : a) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && std::string("~!@$%^&*_-+=<>.?/").find(c) == std::string::npos) {
            return false;
        }
    }
    return true;
}

// Checks a term of sort Real (Bool when `boolean`).
void check_term(const Sexp& e, const std::set<std::string>& declared, bool boolean) {
    if (!e.is_list) {
        if (boolean) throw std::runtime_error("expected a Boolean term, got '" + e.atom + "'");
        if (is_numeral(e.atom)) return;
        if (!declared.count(e.atom)) throw std::runtime_error("undeclared symbol '" + e.atom + "'");
        return;
    }
    if (e.list.empty() || e.list[0].is_list) throw std::runtime_error("application without operator");
    const std::string& op = e.list[0].atom;
    const std::size_t args = e.list.size() - 1;
    static const std::set<std::string> relations{"=", "<=", ">=", "<", ">"};
    static const std::set<std::string> arithmetic{"+", "-", "*", "/"};
    if (boolean) {
        if (op == "and" || op == "or") {
            for (std::size_t i = 1; i < e.list.size(); ++i) check_term(e.list[i], declared, true);
            return;
        }
        if (!relations.count(op)) throw std::runtime_error("unknown predicate '" + op + "'");
        if (args < 2) throw std::runtime_error("'" + op + "' needs two arguments");
        for (std::size_t i = 1; i < e.list.size(); ++i) check_term(e.list[i], declared, false);
        return;
    }
    if (!arithmetic.count(op)) throw std::runtime_error("unknown function '" + op + "'");
    if (args == 0 || (op == "/" && args < 2)) throw std::runtime_error("bad arity for '" + op + "'");
    for (std::size_t i = 1; i < e.list.size(); ++i) check_term(e.list[i], declared, false);
}

} // namespace

std::string smtlib_syntax_error(const std::string& script) {
    try {
        Reader r(script);
        std::set<std::string> declared;
        bool logic = false;
        bool check_sat = false;
        while (!r.at_end()) {
            const Sexp cmd = r.read();
            if (!cmd.is_list || cmd.list.empty() || cmd.list[0].is_list) throw std::runtime_error("expected a command");
            if (check_sat) throw std::runtime_error("command after (check-sat)");
            const std::string& name = cmd.list[0].atom;
            if (name == "set-logic") {
                if (logic || declared.size()) throw std::runtime_error("set-logic must come first, once");
                if (cmd.list.size() != 2 || cmd.list[1].is_list) throw std::runtime_error("malformed set-logic");
                logic = true;
            } else if (name == "declare-fun") {
                if (cmd.list.size() != 4 || cmd.list[1].is_list || !cmd.list[2].is_list || !cmd.list[2].list.empty() ||
                    cmd.list[3].atom != "Real") {
                    throw std::runtime_error("malformed declare-fun");
                }
                if (!is_symbol(cmd.list[1].atom)) throw std::runtime_error("bad symbol '" + cmd.list[1].atom + "'");
                if (!declared.insert(cmd.list[1].atom).second) {
                    throw std::runtime_error("duplicate declaration of '" + cmd.list[1].atom + "'");
                }
            } else if (name == "assert") {
                if (cmd.list.size() != 2) throw std::runtime_error("assert takes one term");
                check_term(cmd.list[1], declared, true);
            } else if (name == "check-sat") {
                if (cmd.list.size() != 1) throw std::runtime_error("check-sat takes no arguments");
                check_sat = true;
            } else {
                throw std::runtime_error("unsupported command '" + name + "'");
            }
        }
        if (!logic) throw std::runtime_error("missing set-logic");
        if (!check_sat) throw std::runtime_error("missing (check-sat)");
        return "";
    } catch (const std::exception& e) {
        return e.what();
    }
}

} // namespace tracelab::testing
