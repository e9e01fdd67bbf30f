#include "tracelab/oracle.hpp"

#include "tracelab/error.hpp"

#include <deque>

namespace tracelab {

ExtremalValue extremal_trace_prob(const Mdp& m, const Word& w, OracleMode mode) {
    require_valid(m);
    for (LabelId a : w) {
        if (a >= m.num_labels()) throw InvalidArgument("word uses a label outside the model");
    }
    const std::size_t n = m.num_states();
    ExtremalValue ev;
    ev.choices.assign(w.size(), std::vector<std::size_t>(n, 0));
    RatVector v = ones_vector(n);
    for (std::size_t step = w.size(); step-- > 0;) {
        const LabelId a = w[step];
        RatVector prev(n);
        for (StateId q = 0; q < n; ++q) {
            for (std::size_t i = 0; i < m.num_moves(q); ++i) {
                Rational val;
                for (const auto& [key, p] : m.moves[q][i].entries()) {
                    if (key.first == a) val += p * v[key.second];
                }
                const bool better = mode == OracleMode::Max ? val > prev[q] : val < prev[q];
                if (i == 0 || better) {
                    prev[q] = val;
                    ev.choices[step][q] = i;
                }
            }
        }
        v = std::move(prev);
    }
    ev.value = dot(m.initial, v);
    return ev;
}

Rational max_trace_prob(const Mdp& m, const Word& w) { return extremal_trace_prob(m, w, OracleMode::Max).value; }

Rational min_trace_prob(const Mdp& m, const Word& w) { return extremal_trace_prob(m, w, OracleMode::Min).value; }

TraceBasedTable extremal_table(const Mdp& m, const ExtremalValue& ev) {
    std::vector<LocalStrategy> steps;
    for (const auto& c : ev.choices) steps.push_back(LocalStrategy::pure(m, c));
    return table_from_local_sequence(m, steps);
}

namespace {

// Breadth-first over words; `check` returns the violation for a word (if
// any) and whether the word's extensions are worth visiting.
template <typename Check>
OracleVerdict enumerate(std::size_t labels, std::size_t depth, Check check) {
    OracleVerdict verdict;
    verdict.depth = depth;
    std::deque<Word> queue{Word{}};
    while (!queue.empty()) {
        Word w = std::move(queue.front());
        queue.pop_front();
        ++verdict.words_checked;
        bool expand = true;
        if (check(w, verdict, expand)) {
            verdict.counterexample = true;
            verdict.word = std::move(w);
            return verdict;
        }
        if (!expand || w.size() == depth) continue;
        for (LabelId a = 0; a < labels; ++a) {
            Word next = w;
            next.push_back(a);
            queue.push_back(std::move(next));
        }
    }
    return verdict;
}

} // namespace

OracleVerdict oracle_refines_mc(const Mdp& m, const Mdp& c, std::size_t depth) {
    require_valid(m);
    require_mc(c, "second argument");
    const Mdp cr = relabel_to(c, m);
    return enumerate(m.num_labels(), depth, [&](const Word& w, OracleVerdict& v, bool& expand) {
        const Rational hi = max_trace_prob(m, w);
        const Rational lo = min_trace_prob(m, w);
        const Rational want = mc_trace_prob(cr, w);
        if (hi != want) {
            v.achieved = hi;
            v.required = want;
            v.mode = OracleMode::Max;
            return true;
        }
        if (lo != want) {
            v.achieved = lo;
            v.required = want;
            v.mode = OracleMode::Min;
            return true;
        }
        expand = hi != 0;
        return false;
    });
}

OracleVerdict oracle_mc_equiv(const Mdp& c1, const Mdp& c2, std::size_t depth) {
    require_mc(c1, "first argument");
    require_mc(c2, "second argument");
    const Mdp c2r = relabel_to(c2, c1);
    return enumerate(c1.num_labels(), depth, [&](const Word& w, OracleVerdict& v, bool& expand) {
        const Rational lhs = mc_trace_prob(c1, w);
        const Rational rhs = mc_trace_prob(c2r, w);
        if (lhs != rhs) {
            v.achieved = lhs;
            v.required = rhs;
            return true;
        }
        expand = lhs != 0;
        return false;
    });
}

} // namespace tracelab
