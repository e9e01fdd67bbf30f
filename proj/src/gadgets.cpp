#include "tracelab/gadgets.hpp"

#include "tracelab/error.hpp"
#include "tracelab/model_io.hpp"

#include <algorithm>
#include <numeric>

namespace tracelab {

using nlohmann::json;

namespace {

Rational q(long num, long den = 1) { return make_rational(num, den); }

long checked_sum(const std::vector<long>& xs, const char* what) {
    if (xs.empty()) throw InvalidArgument(std::string(what) + " must not be empty");
    long total = 0;
    for (long x : xs) {
        if (x <= 0) throw InvalidArgument(std::string(what) + " must contain positive integers");
        total += x;
    }
    return total;
}

json long_list(const std::vector<long>& xs) { return json(xs); }

// The subset-sum gadget G_u over labels {a, b, c}: states <prefix>1..k,
// <prefix>_b and <prefix>_c. Returns the index of the first extra state.
std::size_t add_subset_gadget(Mdp& m, const std::string& prefix, std::size_t k) {
    const std::size_t base = m.num_states();
    for (std::size_t i = 0; i < k; ++i) m.states.push_back(prefix + std::to_string(i + 1));
    const StateId ub = base + k;
    const StateId uc = base + k + 1;
    m.states.push_back(prefix + "_b");
    m.states.push_back(prefix + "_c");
    m.moves.resize(m.num_states());
    for (std::size_t i = 0; i < k; ++i) {
        m.moves[base + i].push_back(Move::dirac(0, ub));
        m.moves[base + i].push_back(Move::dirac(0, uc));
    }
    m.moves[ub].push_back(Move::dirac(1, ub));
    m.moves[uc].push_back(Move::dirac(2, uc));
    return base + k;
}

} // namespace

Mdp fig1_mc() {
    Mdp m;
    m.labels = {"a", "b", "c", "d"};
    m.states = {"p0", "pc", "pd"};
    m.initial = {q(1), q(0), q(0)};
    Move start;
    start.add(0, 0, q(1, 4)).add(1, 0, q(1, 4)).add(2, 1, q(1, 4)).add(3, 2, q(1, 4));
    m.moves = {{start}, {Move::dirac(2, 1)}, {Move::dirac(3, 2)}};
    return m;
}

Mdp fig2_mdp() {
    Mdp m;
    m.labels = {"a", "b", "c", "d"};
    m.states = {"q0", "q1"};
    m.initial = {q(1), q(0)};
    Move start;
    start.add(0, 0, q(1, 4)).add(1, 0, q(1, 4)).add(2, 1, q(1, 4)).add(3, 1, q(1, 4));
    m.moves = {{start}, {Move::dirac(2, 1), Move::dirac(3, 1)}};
    return m;
}

FiniteMemoryStrategy last_label_strategy(const Mdp& fig2) {
    const LabelId c = fig2.label_id("c");
    const LabelId d = fig2.label_id("d");
    const StateId q1 = fig2.state_id("q1");
    FiniteMemoryStrategy s;
    s.memory = {"c", "d"};
    s.initial_memory = 0;
    const std::size_t n = fig2.num_states();
    s.update.resize(2);
    for (std::size_t mem = 0; mem < 2; ++mem) {
        s.update[mem].assign(fig2.num_labels(), std::vector<std::size_t>(n, mem));
        s.update[mem][c].assign(n, 0);
        s.update[mem][d].assign(n, 1);
    }
    s.output.resize(2);
    for (std::size_t mem = 0; mem < 2; ++mem) {
        for (StateId st = 0; st < n; ++st) {
            std::vector<Rational> dist(fig2.num_moves(st));
            dist[st == q1 ? mem : 0] = 1;
            s.output[mem].push_back(dist);
        }
    }
    validate_strategy(fig2, s);
    return s;
}

// --- probabilistic automata --------------------------------------------------

void validate_pa(const ProbabilisticAutomaton& pa) {
    const std::size_t n = pa.num_states();
    if (n == 0) throw InvalidArgument("automaton has no states");
    if (pa.initial.size() != n) throw InvalidArgument("automaton initial vector has the wrong size");
    Rational total;
    for (const auto& p : pa.initial) {
        if (p < 0 || p > 1) throw InvalidArgument("automaton initial weight outside [0,1]");
        total += p;
    }
    if (total != 1) throw InvalidArgument("automaton initial vector is not a distribution");
    for (std::size_t e = 0; e < 2; ++e) {
        const RatMatrix& d = pa.delta[e];
        if (d.rows() != n || d.cols() != n) throw InvalidArgument("automaton transition matrix has the wrong size");
        for (std::size_t i = 0; i < n; ++i) {
            Rational row;
            for (std::size_t j = 0; j < n; ++j) {
                if (d(i, j) < 0 || d(i, j) > 1) throw InvalidArgument("automaton transition probability outside [0,1]");
                row += d(i, j);
            }
            if (row != 1) {
                throw InvalidArgument("automaton row for state '" + pa.states[i] + "' and letter " +
                                      (e == 0 ? "a" : "b") + " does not sum to 1");
            }
        }
    }
    for (StateId f : pa.finals) {
        if (f >= n) throw InvalidArgument("accepting state out of range");
    }
}

ProbabilisticAutomaton parse_pa(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), "");
    }
    auto need = [&](const char* key) -> const json& {
        if (!doc.is_object() || !doc.contains(key)) throw ParseError(std::string("missing field '") + key + "'", "");
        return doc[key];
    };
    if (need("format_version") != kFormatVersion) throw ParseError("unsupported format_version", "format_version");
    ProbabilisticAutomaton pa;
    pa.states = need("states").get<std::vector<std::string>>();
    const std::size_t n = pa.states.size();
    auto index = [&](const std::string& name, const std::string& where) {
        auto it = std::find(pa.states.begin(), pa.states.end(), name);
        if (it == pa.states.end()) throw ParseError("unknown state '" + name + "'", where);
        return static_cast<StateId>(it - pa.states.begin());
    };
    auto prob = [](const json& j, const std::string& where) {
        if (!j.is_string()) throw ParseError("rationals are written as strings", where);
        try {
            return parse_rational(j.get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(e.what(), where);
        }
    };
    pa.initial.assign(n, Rational(0));
    for (const auto& [name, p] : need("initial").items()) pa.initial[index(name, "initial")] = prob(p, "initial." + name);
    pa.delta = {RatMatrix(n, n), RatMatrix(n, n)};
    for (const auto& [from, letters] : need("delta").items()) {
        const StateId i = index(from, "delta");
        for (const auto& [letter, row] : letters.items()) {
            if (letter != "a" && letter != "b") throw ParseError("letters are a and b", "delta." + from);
            const std::size_t e = letter == "a" ? 0 : 1;
            for (const auto& [to, p] : row.items()) {
                const std::string where = "delta." + from + "." + letter + "." + to;
                pa.delta[e](i, index(to, where)) = prob(p, where);
            }
        }
    }
    for (const auto& f : need("finals")) pa.finals.insert(index(f.get<std::string>(), "finals"));
    validate_pa(pa);
    return pa;
}

SubDist pa_dis(const ProbabilisticAutomaton& pa, std::string_view w) {
    validate_pa(pa);
    RatVector mu = pa.initial;
    for (char ch : w) {
        if (ch != 'a' && ch != 'b') throw InvalidArgument(std::string("letter '") + ch + "' is not in {a, b}");
        mu = pa.delta[ch == 'a' ? 0 : 1].left_apply(mu);
    }
    return SubDist(mu);
}

Rational pa_accept(const ProbabilisticAutomaton& pa, std::string_view w) {
    const SubDist d = pa_dis(pa, w);
    Rational total;
    for (StateId f : pa.finals) total += d[f];
    return total;
}

// --- gadgets -----------------------------------------------------------------

GadgetOutput gadget_pa_universality(const ProbabilisticAutomaton& pa) {
    validate_pa(pa);
    const std::size_t n = pa.num_states();
    Mdp d;
    d.labels = {"a", "b", "c", "d"};
    d.states = pa.states;
    for (const char* extra : {"q_c", "q_d"}) {
        if (std::find(d.states.begin(), d.states.end(), extra) != d.states.end()) {
            throw InvalidArgument(std::string("automaton state name '") + extra + "' is reserved");
        }
    }
    const StateId qc = n;
    const StateId qd = n + 1;
    d.states.push_back("q_c");
    d.states.push_back("q_d");
    d.initial = pa.initial;
    d.initial.push_back(0);
    d.initial.push_back(0);
    d.moves.resize(n + 2);
    const Rational quarter = q(1, 4);
    const Rational half = q(1, 2);
    for (StateId s = 0; s < n; ++s) {
        Move letters;
        for (LabelId e = 0; e < 2; ++e) {
            for (StateId t = 0; t < n; ++t) letters.add(e, t, quarter * pa.delta[e](s, t));
        }
        Move to_d = letters;
        to_d.add(3, qd, half);
        if (pa.finals.count(s)) {
            Move to_c = letters;
            to_c.add(2, qc, half);
            d.moves[s] = {to_c, to_d};
        } else {
            d.moves[s] = {to_d};
        }
    }
    d.moves[qc] = {Move::dirac(2, qc)};
    d.moves[qd] = {Move::dirac(3, qd)};

    GadgetOutput g;
    g.left = fig1_mc();
    g.right = std::move(d);
    g.question = "the automaton is universal (accepts every word over {a,b} with probability >= 1/2) iff left refines right";
    g.metadata = {{"gadget", "pa-universal"},
                  {"question", g.question},
                  {"parameters", {{"states", pa.states}, {"finals", pa.finals.size()}}},
                  {"expected_semantics", "for every strategy and w in {a,b}*, subDis(w) = dis_A(w) / 4^|w|"}};
    return g;
}

bool subset_sum_exists(const std::vector<long>& s, long n) {
    if (n < 0) return false;
    std::vector<bool> reach(static_cast<std::size_t>(n) + 1, false);
    reach[0] = true;
    for (long x : s) {
        for (long v = n; v >= x; --v) {
            if (reach[v - x]) reach[v] = true;
        }
    }
    return reach[n];
}

GadgetOutput gadget_subset_sum(const std::vector<long>& s, long n) {
    const long p = checked_sum(s, "the set");
    if (n < 0) throw InvalidArgument("target must be non-negative");
    if (n > p) throw InvalidArgument("target " + std::to_string(n) + " exceeds the total " + std::to_string(p));

    Mdp c;
    c.labels = {"a", "b", "c"};
    c.states = {"q0", "qb", "qc"};
    c.initial = {q(1), q(0), q(0)};
    Move start;
    start.add(0, 1, q(n, p)).add(0, 2, q(p - n, p));
    c.moves = {{start}, {Move::dirac(1, 1)}, {Move::dirac(2, 2)}};

    Mdp d;
    d.labels = {"a", "b", "c"};
    add_subset_gadget(d, "s", s.size());
    d.initial.assign(d.num_states(), Rational(0));
    for (std::size_t i = 0; i < s.size(); ++i) d.initial[i] = q(s[i], p);

    GadgetOutput g;
    g.left = std::move(c);
    g.right = std::move(d);
    g.question = "some subset sums to the target iff left refines right under pure memoryless strategies";
    g.metadata = {{"gadget", "subset-sum"},
                  {"question", g.question},
                  {"parameters", {{"s", long_list(s)}, {"N", n}, {"P", p}}},
                  {"expected_semantics", "yes iff some subset of s sums to N"},
                  {"expected_answer", subset_sum_exists(s, n)}};
    return g;
}

bool qss_game(const std::vector<long>& s, const std::vector<long>& t, long n) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << s.size()); ++mask) {
        long sum = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (mask >> i & 1) sum += s[i];
        }
        if (!subset_sum_exists(t, n - sum)) return false;
    }
    return true;
}

GadgetOutput gadget_qss(const std::vector<long>& s, const std::vector<long>& t, long n) {
    const long p = checked_sum(s, "the universal set");
    const long r = checked_sum(t, "the existential set");
    if (n < 0) throw InvalidArgument("target must be non-negative");
    const Rational x = q(1, p + r + n + 1);
    // nonnegative solution of y1 + xN = y2 + xR with min(y1, y2) = 0
    const Rational y1 = n >= r ? Rational(0) : Rational(x * (r - n));
    const Rational y2 = n >= r ? Rational(x * (n - r)) : Rational(0);
    const Rational half = q(1, 2);

    auto build = [&](const std::string& prefix, const std::vector<long>& values, long total, const Rational& y) {
        Mdp m;
        m.labels = {"a", "b", "c"};
        const std::size_t extra = add_subset_gadget(m, prefix, values.size());
        const StateId to_b = extra;
        const StateId to_c = extra + 1;
        const StateId sy = m.num_states();
        const StateId sr = sy + 1;
        m.states.push_back(prefix + "_y");
        m.states.push_back(prefix + "_r");
        m.moves.push_back({Move::dirac(0, to_b)});
        m.moves.push_back({Move::dirac(0, to_c)});
        m.initial.assign(m.num_states(), Rational(0));
        for (std::size_t i = 0; i < values.size(); ++i) m.initial[i] = half * x * values[i];
        m.initial[sy] = half * y;
        m.initial[sr] = 1 - half * (x * total + y);
        return m;
    };

    GadgetOutput g;
    g.left = build("s", s, p, y1);
    g.right = build("t", t, r, y2);
    g.question = "for every subset S of s some subset T of t has sum(S) + sum(T) = N iff left refines right "
                 "under pure memoryless strategies";
    g.metadata = {{"gadget", "qss"},
                  {"question", g.question},
                  {"parameters", {{"s", long_list(s)}, {"t", long_list(t)}, {"N", n}, {"P", p}, {"R", r}}},
                  {"constants", {{"x", to_string(x)}, {"y1", to_string(y1)}, {"y2", to_string(y2)}}},
                  {"expected_semantics", "yes iff the existential player wins the one-round game"},
                  {"expected_answer", qss_game(s, t, n)}};
    return g;
}

GadgetOutput gadget_nmf(const RatMatrix& mat, std::size_t r) {
    const std::size_t n = mat.rows();
    const std::size_t m = mat.cols();
    if (n == 0 || m == 0) throw InvalidArgument("matrix must be non-empty");
    if (r == 0) throw InvalidArgument("rank bound must be at least 1");
    for (std::size_t i = 0; i < n; ++i) {
        Rational row;
        for (std::size_t j = 0; j < m; ++j) {
            if (mat(i, j) < 0) throw InvalidArgument("matrix has a negative entry");
            row += mat(i, j);
        }
        if (row != 1) throw InvalidArgument("matrix row " + std::to_string(i + 1) + " does not sum to 1");
    }
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back("a" + std::to_string(i + 1));
    for (std::size_t j = 0; j < m; ++j) labels.push_back("b" + std::to_string(j + 1));
    labels.push_back("c");
    const LabelId c_label = n + m;

    Mdp c;
    c.labels = labels;
    c.states.push_back("q_in");
    for (std::size_t i = 0; i < n; ++i) c.states.push_back("q" + std::to_string(i + 1));
    c.states.push_back("q_fi");
    const StateId cfi = n + 1;
    c.initial.assign(n + 2, Rational(0));
    c.initial[0] = 1;
    c.moves.resize(n + 2);
    Move start;
    for (std::size_t i = 0; i < n; ++i) start.add(i, 1 + i, q(1, static_cast<long>(n)));
    c.moves[0] = {start};
    for (std::size_t i = 0; i < n; ++i) {
        Move row;
        for (std::size_t j = 0; j < m; ++j) row.add(n + j, cfi, mat(i, j));
        c.moves[1 + i] = {row};
    }
    c.moves[cfi] = {Move::dirac(c_label, cfi)};

    Mdp d;
    d.labels = labels;
    for (std::size_t i = 0; i < n; ++i) d.states.push_back("p" + std::to_string(i + 1));
    for (std::size_t k = 0; k < r; ++k) d.states.push_back("l" + std::to_string(k + 1));
    d.states.push_back("p_fi");
    const StateId dfi = n + r;
    d.initial.assign(d.num_states(), Rational(0));
    for (std::size_t i = 0; i < n; ++i) d.initial[i] = q(1, static_cast<long>(n));
    d.moves.resize(d.num_states());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < r; ++k) d.moves[i].push_back(Move::dirac(i, n + k));
    }
    for (std::size_t k = 0; k < r; ++k) {
        for (std::size_t j = 0; j < m; ++j) d.moves[n + k].push_back(Move::dirac(n + j, dfi));
    }
    d.moves[dfi] = {Move::dirac(c_label, dfi)};

    json rows = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m; ++j) row.push_back(to_string(mat(i, j)));
        rows.push_back(row);
    }
    GadgetOutput g;
    g.left = std::move(c);
    g.right = std::move(d);
    g.question = "M = A W for stochastic A (n x r) and W (r x m) iff left refines right under memoryless strategies";
    g.metadata = {{"gadget", "nmf"},
                  {"question", g.question},
                  {"parameters", {{"M", rows}, {"r", r}}},
                  {"expected_semantics", "yes iff M has a nonnegative factorization of inner dimension r"}};
    return g;
}

MemorylessStrategy nmf_strategy(const Mdp& right, const RatMatrix& a, const RatMatrix& w) {
    const std::size_t n = a.rows();
    const std::size_t r = a.cols();
    if (w.rows() != r) throw InvalidArgument("factor dimensions do not agree");
    if (right.num_states() != n + r + 1) throw InvalidArgument("factors do not match the gadget");
    MemorylessStrategy alpha;
    for (std::size_t i = 0; i < n; ++i) alpha.choice.push_back(a.row(i));
    for (std::size_t k = 0; k < r; ++k) alpha.choice.push_back(w.row(k));
    alpha.choice.push_back({Rational(1)});
    validate_strategy(right, alpha);
    return alpha;
}

GadgetOutput gadget_mutual(const Mdp& d, const Mdp& e) {
    require_valid(d);
    require_valid(e);
    if (d.find_label("#")) throw InvalidArgument("label '#' is already in use");
    const Mdp er = relabel_to(e, d);
    const LabelId hash = d.num_labels();

    auto copy_into = [](Mdp& out, const Mdp& src, const std::string& prefix) {
        const std::size_t base = out.num_states();
        for (const auto& s : src.states) out.states.push_back(prefix + s);
        for (const auto& ms : src.moves) {
            std::vector<Move> shifted;
            for (const auto& mv : ms) {
                Move m;
                for (const auto& [key, p] : mv.entries()) m.add(key.first, key.second + base, p);
                shifted.push_back(std::move(m));
            }
            out.moves.push_back(std::move(shifted));
        }
        return base;
    };

    Mdp sum;
    sum.labels = d.labels;
    sum.labels.push_back("#");
    sum.states = {"start"};
    sum.moves = {{}};
    const std::size_t dbase = copy_into(sum, d, "d.");
    const std::size_t ebase = copy_into(sum, er, "e.");
    Move to_d, to_e;
    for (StateId s = 0; s < d.num_states(); ++s) to_d.add(hash, dbase + s, d.initial[s]);
    for (StateId s = 0; s < er.num_states(); ++s) to_e.add(hash, ebase + s, er.initial[s]);
    sum.moves[0] = {to_d, to_e};
    sum.initial.assign(sum.num_states(), Rational(0));
    sum.initial[0] = 1;

    Mdp e2;
    e2.labels = sum.labels;
    e2.states = {"start"};
    e2.moves = {{}};
    const std::size_t base2 = copy_into(e2, er, "e.");
    Move to_e2;
    for (StateId s = 0; s < er.num_states(); ++s) to_e2.add(hash, base2 + s, er.initial[s]);
    e2.moves[0] = {to_e2};
    e2.initial.assign(e2.num_states(), Rational(0));
    e2.initial[0] = 1;

    GadgetOutput g;
    g.left = std::move(sum);
    g.right = std::move(e2);
    g.question = "D refines E iff (right refines left and left refines right)";
    g.metadata = {{"gadget", "mutual"},
                  {"question", g.question},
                  {"parameters", {{"d_states", d.num_states()}, {"e_states", e.num_states()}}},
                  {"expected_semantics", "D refines E iff (E2 refines D+E and D+E refines E2); E2 refines D+E always holds"}};
    return g;
}

} // namespace tracelab
