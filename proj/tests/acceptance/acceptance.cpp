// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "random_models.hpp"
#include "reference.hpp"

#include "tracelab/bisim.hpp"
#include "tracelab/gadgets.hpp"
#include "tracelab/mc_equiv.hpp"
#include "tracelab/model_io.hpp"
#include "tracelab/oracle.hpp"
#include "tracelab/refinement.hpp"
#include "tracelab/restricted.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

using namespace tracelab;
using namespace tracelab::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::vector<int> failed;

void report(int id, const char* name, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) failed.push_back(id);
    std::printf("%s %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
    std::fflush(stdout);
}

Rational pow_quarter(std::size_t n) {
    Rational x(1);
    for (std::size_t i = 0; i < n; ++i) x /= 4;
    return x;
}

std::vector<Word> words_up_to(std::size_t labels, std::size_t max_len) {
    std::vector<Word> out;
    for (std::size_t n = 0; n <= max_len; ++n) {
        auto ws = all_words(labels, n);
        out.insert(out.end(), ws.begin(), ws.end());
    }
    return out;
}

// Closed form of the three-state chain: 1/4^n on (a+b)^n, 1/4^(n+1) on
// (a+b)^n c+ and (a+b)^n d+, zero elsewhere.
Rational fig1_expected(const Word& w) {
    std::size_t n = 0;
    while (n < w.size() && w[n] <= 1) ++n;
    if (n == w.size()) return pow_quarter(n);
    const LabelId tail = w[n];
    for (std::size_t i = n; i < w.size(); ++i) {
        if (w[i] != tail) return 0;
    }
    return pow_quarter(n + 1);
}

Outcome c1() {
    const Mdp f = load_model(std::string(TRACELAB_FIXTURES) + "/fig1.json");
    std::size_t bad = 0, total = 0;
    for (std::size_t n = 0; n <= 6; ++n) {
        for (const Word& w : all_words(4, n)) {
            ++total;
            if (mc_trace_prob(f, w) != fig1_expected(w)) ++bad;
        }
    }
    return {bad == 0, std::to_string(total) + " words, " + std::to_string(bad) + " mismatches"};
}

Outcome c2() {
    const Mdp g = load_model(std::string(TRACELAB_FIXTURES) + "/fig2.json");
    const Mdp f = relabel_to(fig1_mc(), g);
    const TraceBasedTable t = flatten(g, last_label_strategy(g), 8);
    std::size_t bad = 0, total = 0;
    for (const Word& w : words_up_to(4, 8)) {
        ++total;
        if (trace_prob(g, t, w) != mc_trace_prob(f, w)) ++bad;
    }
    return {bad == 0, std::to_string(total) + " words, " + std::to_string(bad) + " mismatches"};
}

struct InstanceSet {
    std::vector<RefinementInstance> items;
};

const InstanceSet& refinement_instances() {
    static const InstanceSet set = [] {
        InstanceSet s;
        Rng rng(20240601);
        for (std::size_t i = 0; i < 200; ++i) s.items.push_back(random_refinement_instance(rng, i));
        return s;
    }();
    return set;
}

// fixpoint-bound violations gathered by every criterion that builds spaces
std::size_t bound_checks = 0;
std::vector<std::string> bound_violations;

void check_space(const BisimSpace& s, std::size_t states, const char* where) {
    ++bound_checks;
    if (s.stabilized_at + 1 > states) {
        bound_violations.push_back(std::string(where) + ": stabilized_at " + std::to_string(s.stabilized_at) +
                                   " with |Q| = " + std::to_string(states));
    }
}

void check_closure(const MatrixClosure& c, std::size_t q1, std::size_t q2, const char* where) {
    ++bound_checks;
    if (c.insertions > q1 + q2) {
        bound_violations.push_back(std::string(where) + ": " + std::to_string(c.insertions) + " insertions over " +
                                   std::to_string(q1 + q2) + " states");
    }
}

Outcome c3() {
    std::size_t holds = 0, fails = 0, bad = 0;
    std::string first;
    for (const auto& inst : refinement_instances().items) {
        const RefinementVerdict v = refines_mc(inst.mdp, inst.mc);
        const std::size_t qu = inst.mdp.num_states() + inst.mc.num_states();
        bool ok;
        if (v.holds) {
            ++holds;
            ok = !oracle_refines_mc(inst.mdp, inst.mc, 6).counterexample;
        } else {
            ++fails;
            const OracleVerdict o = oracle_refines_mc(inst.mdp, inst.mc, qu);
            ok = o.counterexample && o.word.size() <= qu;
        }
        const LiftedPair p = lift(inst.mdp, inst.mc);
        check_closure(mc_equiv(p.d_prime, p.c_prime).closure, p.d_prime.num_states(), p.c_prime.num_states(),
                      "criterion 3");
        if (!ok) {
            ++bad;
            if (first.empty()) first = std::string(" first: ") + inst.family;
        }
    }
    return {bad == 0, "200 instances, " + std::to_string(holds) + " hold, " + std::to_string(fails) + " fail, " +
                          std::to_string(bad) + " disagreements" + first};
}

Outcome c4() {
    std::size_t bad = 0;
    for (const auto& inst : refinement_instances().items) {
        const bool r = refines_mc(inst.mdp, inst.mc).holds;
        const BisimQuery q = bisim_mdp_mc(inst.mdp, inst.mc);
        check_space(q.space, q.un.model.num_states(), "criterion 4");
        if (r != bisimilar(q.space, q.un.left_initial, q.un.right_initial)) ++bad;
    }
    return {bad == 0, "200 instances, " + std::to_string(bad) + " disagreements"};
}

Outcome c5() {
    Rng rng(5150);
    std::size_t bad = 0, non_bisim = 0;
    for (std::size_t i = 0; i < 50; ++i) {
        const auto [d, e] = random_mdp_pair(rng, i, 4);
        const BisimQuery q = bisim_mdp_mdp(d, e);
        const std::size_t qu = q.un.model.num_states();
        check_space(q.space, qu, "criterion 5");
        const auto cert = search_certificate(q.un.model, q.un.left_initial, q.un.right_initial, qu);
        if (!q.bisimilar) ++non_bisim;
        if (cert.has_value() == q.bisimilar) ++bad;
        if (cert && !verify_certificate(q.un.model, q.un.left_initial, q.un.right_initial, *cert).accepted) ++bad;
    }
    return {bad == 0, "50 pairs, " + std::to_string(non_bisim) + " non-bisimilar, " + std::to_string(bad) +
                          " disagreements"};
}

RatVector random_column(Rng& rng, std::size_t n) {
    RatVector v(n);
    for (auto& x : v) x = uniform_int(rng, 0, 3);
    return v;
}

// Farkas certificate for non-extremality: the rows d = p(chosen) - p(other),
// over every state and every move with a different point, admit lambda >= 0
// with sum lambda = 1 and sum lambda d = 0, so no shared v has d v >= 1.
bool confirmed_non_extremal(const Mdp& m, const RatMatrix& b, const std::vector<std::size_t>& choice) {
    std::vector<RatVector> rows;
    for (StateId q = 0; q < m.num_states(); ++q) {
        const RatVector p = move_point(m, b, q, choice[q]);
        for (std::size_t k = 0; k < m.num_moves(q); ++k) {
            const RatVector o = move_point(m, b, q, k);
            if (o != p) rows.push_back(p - o);
        }
    }
    if (rows.empty()) return false;
    LinearConstraintSystem sys(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        RatVector e = zero_vector(rows.size());
        e[i] = 1;
        sys.add_greater_equal(e, 0);
    }
    sys.add(ones_vector(rows.size()), Relation::Equal, 1);
    for (std::size_t d = 0; d < rows.front().size(); ++d) {
        RatVector coeff;
        for (const auto& r : rows) coeff.push_back(r[d]);
        sys.add(coeff, Relation::Equal, 0);
    }
    return lp_feasible(sys).has_value();
}

Outcome c6() {
    Rng rng(6006);
    std::size_t triples = 0, violations = 0, confirmed = 0, witnesses = 0, scale_bad = 0;
    while (triples < 100) {
        ModelShape shape;
        shape.labels = static_cast<std::size_t>(uniform_int(rng, 1, 2));
        shape.max_moves = 3;
        const Mdp m = random_mdp(rng, shape);
        const std::size_t n = m.num_states();
        std::vector<RatVector> cols{ones_vector(n)};
        if (uniform_int(rng, 0, 1)) cols.push_back(random_column(rng, n));
        const RatMatrix b1 = RatMatrix::from_columns(n, cols);
        cols.push_back(random_column(rng, n));
        const RatMatrix b2 = RatMatrix::from_columns(n, cols);
        ++triples;
        bool violated = false, certified = false;
        for_each_pure_strategy(m, [&](const std::vector<std::size_t>& c) {
            const LocalStrategy a = LocalStrategy::pure(m, c);
            const auto v1 = is_extremal(m, b1, a);
            const auto v2 = is_extremal(m, b2, a);
            for (const auto& [v, b] : {std::pair{&v1, &b1}, std::pair{&v2, &b2}}) {
                if (!*v) continue;
                ++witnesses;
                if (!extremal_in_direction(m, *b, a, **v) ||
                    !extremal_in_direction(m, *b, a, make_rational(2) * **v)) {
                    ++scale_bad;
                }
            }
            if (v1 && !v2) {
                violated = true;
                certified = certified || confirmed_non_extremal(m, b2, c);
            }
            return true;
        });
        violations += violated;
        confirmed += certified;
    }
    return {violations == 0 && scale_bad == 0,
            std::to_string(triples) + " triples, " + std::to_string(violations) + " widening violations (" +
                std::to_string(confirmed) + " confirmed by a Farkas certificate), " +
                std::to_string(witnesses) + " LP witnesses, " + std::to_string(scale_bad) + " scaling failures"};
}

Outcome c7() {
    Rng rng(7007);
    std::size_t bad = 0, yes = 0;
    for (int i = 0; i < 100; ++i) {
        const int n = uniform_int(rng, 1, 10);
        std::vector<long> s;
        long total = 0;
        for (int k = 0; k < n; ++k) {
            s.push_back(uniform_int(rng, 1, 50));
            total += s.back();
        }
        const long target = uniform_int(rng, 0, static_cast<int>(total));
        bool brute = false;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n) && !brute; ++mask) {
            long sum = 0;
            for (int k = 0; k < n; ++k) {
                if (mask >> k & 1) sum += s[static_cast<std::size_t>(k)];
            }
            brute = sum == target;
        }
        const GadgetOutput g = gadget_subset_sum(s, target);
        const bool verdict = refine_mc_mdp_pm(g.left, g.right).yes;
        yes += brute;
        if (verdict != brute) ++bad;
    }
    return {bad == 0, "100 instances, " + std::to_string(yes) + " yes, " + std::to_string(bad) + " disagreements"};
}

Outcome c8() {
    Rng rng(8008);
    std::size_t bad = 0, yes = 0, count = 0;
    for (int i = 0; i < 40; ++i) {
        // small sizes first, then up to six elements per side
        const int max_size = i < 20 ? 3 : 6;
        std::vector<long> s, t;
        const int ns = uniform_int(rng, 1, max_size);
        for (int k = 0; k < ns; ++k) s.push_back(uniform_int(rng, 1, 6));
        long ps = 0;
        for (long x : s) ps += x;
        long target;
        if (i % 3 == 0) {
            // T = s minus S always completes to the total: a yes instance
            t = s;
            target = ps;
        } else {
            const int nt = uniform_int(rng, 1, max_size);
            for (int k = 0; k < nt; ++k) t.push_back(uniform_int(rng, 1, 6));
            target = uniform_int(rng, 0, static_cast<int>(ps) + 6);
        }
        const int nt = static_cast<int>(t.size());
        // the game table: every S of s against every T of t
        bool table = true;
        for (std::uint64_t ms = 0; ms < (std::uint64_t{1} << ns) && table; ++ms) {
            long a = 0;
            for (int k = 0; k < ns; ++k) {
                if (ms >> k & 1) a += s[static_cast<std::size_t>(k)];
            }
            bool found = false;
            for (std::uint64_t mt = 0; mt < (std::uint64_t{1} << nt) && !found; ++mt) {
                long b = 0;
                for (int k = 0; k < nt; ++k) {
                    if (mt >> k & 1) b += t[static_cast<std::size_t>(k)];
                }
                found = a + b == target;
            }
            table = found;
        }
        const GadgetOutput g = gadget_qss(s, t, target);
        const bool verdict = refine_pm_pm(g.left, g.right).yes;
        ++count;
        yes += table;
        if (verdict != table) ++bad;
    }
    return {bad == 0, std::to_string(count) + " instances, " + std::to_string(yes) + " yes, " + std::to_string(bad) +
                          " disagreements"};
}

RatMatrix random_stochastic(Rng& rng, std::size_t rows, std::size_t cols) {
    RatMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto d = random_distribution(rng, cols);
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = d[j];
    }
    return m;
}

Outcome c9() {
    Rng rng(9009);
    std::size_t bad = 0;
    for (int i = 0; i < 20; ++i) {
        const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 3));
        const auto m = static_cast<std::size_t>(uniform_int(rng, 1, 3));
        const std::size_t r = i % 2 ? 2 : 1;
        const RatMatrix a = random_stochastic(rng, n, r);
        const RatMatrix w = random_stochastic(rng, r, m);
        const GadgetOutput g = gadget_nmf(a * w, r);
        const EquivVerdict v = mc_equiv(g.left, induced_mc(g.right, nmf_strategy(g.right, a, w)));
        check_closure(v.closure, g.left.num_states(), g.right.num_states(), "criterion 9");
        if (!v.equivalent()) ++bad;
    }
    return {bad == 0, "20 products, " + std::to_string(bad) + " not equivalent"};
}

ProbabilisticAutomaton random_pa(Rng& rng) {
    ProbabilisticAutomaton pa;
    const auto n = static_cast<std::size_t>(uniform_int(rng, 1, 4));
    for (std::size_t i = 0; i < n; ++i) pa.states.push_back("s" + std::to_string(i));
    pa.initial = random_distribution(rng, n);
    pa.delta = {random_stochastic(rng, n, n), random_stochastic(rng, n, n)};
    for (std::size_t i = 0; i < n; ++i) {
        if (uniform_int(rng, 0, 1)) pa.finals.insert(i);
    }
    return pa;
}

Outcome c10() {
    Rng rng(10010);
    std::size_t bad = 0, checks = 0;
    std::vector<std::string> words{""};
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (words[i].size() < 5) {
            words.push_back(words[i] + "a");
            words.push_back(words[i] + "b");
        }
    }
    for (int i = 0; i < 20; ++i) {
        const ProbabilisticAutomaton pa = random_pa(rng);
        const GadgetOutput g = gadget_pa_universality(pa);
        for (int k = 0; k < 5; ++k) {
            const Mdp chain = induced_mc(g.right, LocalStrategy::pure(g.right, random_pure(rng, g.right)));
            for (const auto& w : words) {
                Word lw;
                for (char ch : w) lw.push_back(ch == 'a' ? 0 : 1);
                const SubDist got = mc_sub_dis(chain, lw);
                const SubDist dis = pa_dis(pa, w);
                const Rational scale = pow_quarter(w.size());
                ++checks;
                bool ok = true;
                for (StateId q = 0; q < got.size(); ++q) {
                    const Rational want = q < pa.num_states() ? scale * dis[q] : Rational(0);
                    ok = ok && got[q] == want;
                }
                if (!ok) ++bad;
            }
        }
    }
    return {bad == 0, std::to_string(checks) + " (automaton, strategy, word) checks, " + std::to_string(bad) +
                          " mismatches"};
}

Outcome c11() {
    Rng rng(11011);
    std::size_t count_bad = 0, assign_bad = 0, syntax_bad = 0;
    for (int i = 0; i < 20; ++i) {
        ModelShape shape;
        shape.labels = static_cast<std::size_t>(uniform_int(rng, 1, 3));
        const Mdp d = random_mdp(rng, shape);
        const MemorylessStrategy alpha = random_local(rng, d);
        const Mdp c = induced_mc(d, alpha);
        const EtrInstance inst = emit_etr(c, d);
        const std::size_t n = c.num_states() + d.num_states();
        if (inst.variables.size() != EtrInstance::expected_variables(d.total_moves(), n, d.num_labels()) ||
            inst.constraints.size() !=
                EtrInstance::expected_assertions(d.num_states(), d.total_moves(), n, d.num_labels())) {
            ++count_bad;
        }
        const auto sol = construct_solution(inst, c, d, alpha);
        if (!sol || !check_assignment(inst, *sol)) ++assign_bad;
        if (!smtlib_syntax_error(to_smtlib(inst)).empty()) ++syntax_bad;
    }
    return {count_bad + assign_bad + syntax_bad == 0,
            "20 instances, " + std::to_string(count_bad) + " count mismatches, " + std::to_string(assign_bad) +
                " rejected witnesses, " + std::to_string(syntax_bad) + " syntax errors"};
}

Outcome c12() {
    Rng rng(12012);
    std::size_t bad = 0, words_checked = 0;
    for (int i = 0; i < 100; ++i) {
        ModelShape shape;
        shape.labels = static_cast<std::size_t>(uniform_int(rng, 1, 2));
        const Mdp m = random_mdp(rng, shape);
        const TraceBasedTable t = flatten(m, random_finite_memory(rng, m, 2), 4);
        for (const Word& w : words_up_to(m.num_labels(), 4)) {
            ++words_checked;
            if (sub_dis(m, t, w) != path_enumeration_subdis(m, t, w)) ++bad;
        }
    }
    std::size_t mass_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        ModelShape shape;
        shape.labels = static_cast<std::size_t>(uniform_int(rng, 1, 3));
        const Mdp m = random_mdp(rng, shape);
        SubDist mu(random_distribution(rng, m.num_states()));
        const Rational scale = make_rational(uniform_int(rng, 1, 4), 4);
        for (auto& x : mu.weights) x *= scale;
        const LocalStrategy a = random_local(rng, m);
        Rational total;
        for (LabelId l = 0; l < m.num_labels(); ++l) total += succ(mu, m, a, l).norm();
        if (total != mu.norm()) ++mass_bad;
    }
    return {bad + mass_bad == 0, std::to_string(words_checked) + " words on 100 models, " + std::to_string(bad) +
                                     " mismatches; 1000 triples, " + std::to_string(mass_bad) + " mass violations"};
}

Outcome c13() {
    // spaces and closures from criteria 3, 4, 5 and 9, plus a dedicated batch
    Rng rng(13013);
    for (std::size_t i = 0; i < 60; ++i) {
        const auto [d, e] = random_mdp_pair(rng, i, 6);
        const UnionModel u = disjoint_union(d, e);
        check_space(bisim_space_two_mdps(u.model), u.model.num_states(), "criterion 13");
        check_space(bisim_space_mdp_mc(u.model), u.model.num_states(), "criterion 13");
        const Mdp c1 = random_mc(rng, 4, 2), c2 = random_mc(rng, 4, 2);
        check_closure(mc_equiv(c1, c2).closure, c1.num_states(), c2.num_states(), "criterion 13");
    }
    std::string detail = std::to_string(bound_checks) + " bound checks, " + std::to_string(bound_violations.size()) +
                         " violations";
    if (!bound_violations.empty()) detail += "; first: " + bound_violations.front();
    return {bound_violations.empty(), detail};
}

} // namespace

// --expect-fail N (repeatable) names criteria known to be red; the exit
// status is then zero only when exactly those criteria fail.
int main(int argc, char** argv) {
    std::vector<int> expected;
    for (int i = 1; i + 1 < argc; i += 2) {
        if (std::string(argv[i]) != "--expect-fail") {
            std::fprintf(stderr, "usage: acceptance [--expect-fail N]...\n");
            return 2;
        }
        expected.push_back(std::stoi(argv[i + 1]));
    }
    std::sort(expected.begin(), expected.end());

    report(1, "three-state chain trace table", c1);
    report(2, "last-label strategy reproduces the chain", c2);
    report(3, "refinement decision agrees with the oracle", c3);
    report(4, "refinement equals bisimilarity with the chain", c4);
    report(5, "certificate search completeness", c5);
    report(6, "extremality under widening and scaling", c6);
    report(7, "subset-sum gadget", c7);
    report(8, "quantified subset-sum gadget", c8);
    report(9, "factorization gadget positive direction", c9);
    report(10, "automaton gadget invariant", c10);
    report(11, "existential-theory emission", c11);
    report(12, "semantics cross-check and mass conservation", c12);
    report(13, "fixpoint bounds", c13);
    std::printf("SUMMARY %zu PASS, %zu FAIL", 13 - failed.size(), failed.size());
    if (!expected.empty()) {
        std::printf(" (expected red:");
        for (int e : expected) std::printf(" %d", e);
        std::printf(")");
    }
    std::printf("\n");
    return failed == expected ? 0 : 1;
}
