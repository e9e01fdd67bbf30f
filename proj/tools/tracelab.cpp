#include "tracelab/bisim.hpp"
#include "tracelab/error.hpp"
#include "tracelab/gadgets.hpp"
#include "tracelab/mc_equiv.hpp"
#include "tracelab/model.hpp"
#include "tracelab/model_io.hpp"
#include "tracelab/oracle.hpp"
#include "tracelab/refinement.hpp"
#include "tracelab/restricted.hpp"
#include "tracelab/semantics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

using namespace tracelab;
using nlohmann::json;

namespace {

enum Exit { kAnswered = 0, kUsage = 1, kGuard = 2, kInternal = 3 };

struct Options {
    bool decimal = false;
    bool timings = false;
    std::uint64_t guard = 0;
};

Options opts;

std::uint64_t effective_guard() { return opts.guard ? opts.guard : guard_from_env(); }

// Sets obj[key] to the exact string and, with --decimal, a marked approximation next to it.
void put(json& obj, const std::string& key, const Rational& r) {
    obj[key] = to_string(r);
    if (opts.decimal) obj[key + "_approx_decimal"] = to_double(r);
}

json subdist_report(const Mdp& m, const SubDist& d) {
    json out = subdist_json(m, d);
    if (opts.decimal) {
        json approx = json::object();
        for (StateId q = 0; q < d.size(); ++q) {
            if (sgn(d[q]) != 0) approx[m.states[q]] = to_double(d[q]);
        }
        return json{{"exact", out}, {"approx_decimal", approx}};
    }
    return json{{"exact", out}};
}

json pure_json(const Mdp& m, const std::vector<std::size_t>& moves) {
    json out = json::object();
    for (StateId q = 0; q < m.num_states(); ++q) out[m.states[q]] = moves[q];
    return out;
}

std::vector<long> parse_longs(const std::string& text, const char* what) {
    std::vector<long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stol(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::logic_error&) {
            throw ParseError(std::string("not an integer list: '") + text + "'", what);
        }
    }
    return out;
}

RatMatrix parse_matrix(const std::string& text) {
    std::vector<RatVector> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) {
        RatVector r;
        std::stringstream rs(row);
        std::string cell;
        while (std::getline(rs, cell, ',')) r.push_back(parse_rational(cell));
        if (!rows.empty() && r.size() != rows.front().size()) throw ParseError("ragged matrix", "--matrix");
        rows.push_back(std::move(r));
    }
    if (rows.empty() || rows.front().empty()) throw ParseError("empty matrix", "--matrix");
    return RatMatrix::from_rows(rows.front().size(), rows);
}

struct Report {
    std::string command;
    json body = json::object();
    std::string summary;
};

void write_gadget(const GadgetOutput& g, const std::string& dir, Report& rep) {
    std::filesystem::create_directories(dir);
    const std::string left = (std::filesystem::path(dir) / "left.json").string();
    const std::string right = (std::filesystem::path(dir) / "right.json").string();
    const std::string meta = (std::filesystem::path(dir) / "metadata.json").string();
    save_model(left, g.left);
    save_model(right, g.right);
    json m = g.metadata;
    m["format_version"] = kFormatVersion;
    m["left"] = "left.json";
    m["right"] = "right.json";
    write_file(meta, m.dump(2) + "\n");
    rep.body["verdict"] = "Generated";
    rep.body["files"] = {{"left", left}, {"right", right}, {"metadata", meta}};
    rep.body["metadata"] = g.metadata;
    rep.body["sizes"] = {{"left_states", g.left.num_states()}, {"right_states", g.right.num_states()},
                         {"right_moves", g.right.total_moves()}};
    rep.summary = "wrote " + left + ", " + right + " and " + meta;
}

json error_json(const std::string& kind, const std::string& message) {
    return json{{"kind", kind}, {"message", message}};
}

int emit(const Report& rep, const std::string& status, double elapsed_ms) {
    json out = rep.body;
    out["command"] = rep.command;
    out["status"] = status;
    out["format_version"] = kFormatVersion;
    if (opts.timings) out["timings"] = {{"total_ms", elapsed_ms}};
    std::cout << out.dump(2) << "\n";
    if (!rep.summary.empty()) std::cerr << rep.command << ": " << rep.summary << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tracelab: trace refinement and distribution bisimulation for labelled MCs and MDPs"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_flag("--decimal", opts.decimal, "add approximate decimal renderings next to exact rationals");
    app.add_flag("--timings", opts.timings, "include wall-clock timings in the report");
    app.add_option("--guard", opts.guard, "limit on pure-strategy enumerations (default: TRACELAB_GUARD or 1000000)");

    Report rep;
    std::function<void()> action;
    auto bind = [&](CLI::App* sub, std::function<void()> f) {
        sub->callback([&, sub, f] {
            const CLI::App* parent = sub->get_parent();
            rep.command = parent && parent->get_parent() ? parent->get_name() + " " + sub->get_name() : sub->get_name();
            action = f;
        });
    };

    // validate
    std::string model_path;
    auto* validate = app.add_subcommand("validate", "parse and check a model file");
    validate->add_option("model", model_path)->required();
    bind(validate, [&] {
        const Mdp m = load_model(model_path);
        rep.body["verdict"] = "Valid";
        rep.body["kind"] = is_mc(m) ? "mc" : "mdp";
        rep.body["sizes"] = {{"states", m.num_states()}, {"labels", m.num_labels()}, {"moves", m.total_moves()}};
        rep.summary = "valid " + std::string(is_mc(m) ? "Markov chain" : "MDP") + " with " +
                      std::to_string(m.num_states()) + " states";
    });

    // tr
    std::string word_text, strategy_path;
    auto* tr = app.add_subcommand("tr", "trace probability of a word");
    tr->add_option("model", model_path)->required();
    tr->add_option("--word", word_text, "word; one label per character or comma-separated")->required();
    tr->add_option("--strategy", strategy_path, "strategy file (required unless the model is a Markov chain)");
    bind(tr, [&] {
        const Mdp m = load_model(model_path);
        const Word w = parse_word(m, word_text);
        TraceBasedTable table;
        if (strategy_path.empty()) {
            if (!is_mc(m)) throw InvalidArgument("the model has choices; pass --strategy");
            table = memoryless_table(m, LocalStrategy::first_moves(m), w.size());
        } else {
            const StrategyDocument doc = parse_strategy(read_file(strategy_path), m);
            if (const auto* alpha = std::get_if<MemorylessStrategy>(&doc)) {
                table = memoryless_table(m, *alpha, w.size());
            } else {
                table = flatten(m, std::get<FiniteMemoryStrategy>(doc), w.size());
            }
        }
        const SubDist d = sub_dis(m, table, w);
        rep.body["verdict"] = "Computed";
        rep.body["word"] = word_json(m, w);
        put(rep.body, "probability", d.norm());
        rep.body["subdistribution"] = subdist_report(m, d);
        rep.summary = "Tr(" + format_word(m, w) + ") = " + to_string(d.norm());
    });

    // equiv
    std::string left_path, right_path;
    auto* equiv = app.add_subcommand("equiv", "trace equivalence of two Markov chains");
    equiv->add_option("mc1", left_path)->required();
    equiv->add_option("mc2", right_path)->required();
    bind(equiv, [&] {
        const Mdp c1 = load_model(left_path);
        const Mdp c2 = load_model(right_path);
        const EquivVerdict v = mc_equiv(c1, c2);
        rep.body["verdict"] = v.equivalent() ? "Equivalent" : "Distinguished";
        rep.body["closure"] = {{"dimension", v.closure.basis.rank()},
                               {"insertions", v.closure.insertions},
                               {"stabilized_at", v.closure.stabilized_at}};
        if (v.witness) {
            rep.body["witness"] = word_json(c1, *v.witness);
            put(rep.body, "lhs_probability", *v.lhs_prob);
            put(rep.body, "rhs_probability", *v.rhs_prob);
            rep.summary = "Distinguished by '" + format_word(c1, *v.witness) + "': " + to_string(*v.lhs_prob) +
                          " vs " + to_string(*v.rhs_prob);
        } else {
            rep.summary = "Equivalent";
        }
    });

    // refine-mdp-mc
    auto* refine = app.add_subcommand("refine-mdp-mc", "does every strategy of the MDP match the Markov chain");
    refine->add_option("mdp", left_path)->required();
    refine->add_option("mc", right_path)->required();
    bind(refine, [&] {
        const Mdp d = load_model(left_path);
        const Mdp c = load_model(right_path);
        const RefinementVerdict v = refines_mc(d, c);
        rep.body["verdict"] = v.holds ? "Holds" : "Fails";
        rep.body["sigma_size"] = v.sigma_size;
        rep.body["lifted_labels"] = v.lifted_labels;
        rep.body["closure"] = {{"dimension", v.equivalence.closure.basis.rank()},
                               {"insertions", v.equivalence.closure.insertions},
                               {"stabilized_at", v.equivalence.closure.stabilized_at}};
        if (!v.holds) {
            json steps = json::array();
            for (const auto& s : v.decoded) steps.push_back({{"strategy", s.strategy}, {"label", s.label}});
            rep.body["lifted_witness"] = {{"word", word_json(v.lifted.d_prime, *v.lifted_witness)}, {"steps", steps}};
            put(rep.body, "lhs_probability", *v.lhs_prob);
            put(rep.body, "rhs_probability", *v.rhs_prob);
            rep.body["note"] = "the witness is a word over lifted labels b(strategy, label); run 'tracelab oracle "
                               "refine' for a word over the original labels";
            rep.summary = "Fails (lifted witness of length " + std::to_string(v.lifted_witness->size()) + ")";
        } else {
            rep.summary = "Holds";
        }
    });

    // bisim
    std::string mode;
    std::string cert_out;
    auto* bisim = app.add_subcommand("bisim", "distribution bisimilarity of the two initial distributions");
    bisim->add_option("m1", left_path)->required();
    bisim->add_option("m2", right_path)->required();
    bisim->add_option("--mode", mode, "mdp-mc or mdp-mdp (default: mdp-mc when m2 is a Markov chain)")
        ->check(CLI::IsMember({"mdp-mc", "mdp-mdp"}));
    bisim->add_option("--emit-cert", cert_out, "when not bisimilar, search for a certificate and write it here");
    bind(bisim, [&] {
        const Mdp d = load_model(left_path);
        const Mdp e = load_model(right_path);
        const std::string m = mode.empty() ? (is_mc(e) ? "mdp-mc" : "mdp-mdp") : mode;
        const BisimQuery q = m == "mdp-mc" ? bisim_mdp_mc(d, e) : bisim_mdp_mdp(d, e, effective_guard());
        rep.body["verdict"] = q.bisimilar ? "Bisimilar" : "NotBisimilar";
        rep.body["mode"] = m;
        json prov = json::array();
        for (const auto& p : q.space.provenance) {
            json steps = json::array();
            for (const auto& s : p) steps.push_back({{"strategy", s.strategy}, {"label", q.un.model.labels[s.label]}});
            prov.push_back(steps);
        }
        rep.body["space"] = {{"dimension", q.space.basis.rank()},
                             {"states", q.un.model.num_states()},
                             {"stabilized_at", q.space.stabilized_at},
                             {"level_dims", q.space.level_dims},
                             {"provenance", prov}};
        rep.summary = q.bisimilar ? "Bisimilar" : "NotBisimilar";
        if (!q.bisimilar && !cert_out.empty()) {
            const auto cert = search_certificate(q.un.model, q.un.left_initial, q.un.right_initial,
                                                 q.un.model.num_states(), effective_guard());
            if (cert) {
                write_file(cert_out, serialize_certificate(*cert, q.un.model));
                rep.body["certificate"] = {{"path", cert_out}, {"k", cert->k}};
                rep.summary += "; certificate written to " + cert_out;
            } else {
                rep.body["certificate"] = nullptr;
                rep.summary += "; no certificate found";
            }
        }
    });

    // verify-cert
    std::string cert_path;
    auto* verify = app.add_subcommand("verify-cert", "check a non-bisimilarity certificate");
    verify->add_option("m1", left_path)->required();
    verify->add_option("m2", right_path)->required();
    verify->add_option("cert", cert_path)->required();
    bind(verify, [&] {
        const Mdp d = load_model(left_path);
        const Mdp e = load_model(right_path);
        const UnionModel un = disjoint_union(d, e);
        const Certificate cert = parse_certificate(read_file(cert_path), un.model);
        const CertificateVerdict v = verify_certificate(un.model, un.left_initial, un.right_initial, cert);
        rep.body["verdict"] = v.accepted ? "Accepted" : "Rejected";
        rep.body["reason"] = v.reason;
        json vecs = json::array();
        for (const auto& vec : v.vectors) {
            json row = json::array();
            for (const auto& x : vec) row.push_back(to_string(x));
            vecs.push_back(row);
        }
        rep.body["vectors"] = vecs;
        rep.summary = std::string(v.accepted ? "Accepted" : "Rejected") + ": " + v.reason;
    });

    // refine-pm
    std::string pm_mode;
    auto* pm = app.add_subcommand("refine-pm", "refinement when the right-hand side uses pure memoryless strategies");
    pm->add_option("left", left_path)->required();
    pm->add_option("right", right_path)->required();
    pm->add_option("--mode", pm_mode, "mc-mdp or mdp-mdp (default: mc-mdp when left is a Markov chain)")
        ->check(CLI::IsMember({"mc-mdp", "mdp-mdp"}));
    bind(pm, [&] {
        const Mdp l = load_model(left_path);
        const Mdp r = load_model(right_path);
        const std::string m = pm_mode.empty() ? (is_mc(l) ? "mc-mdp" : "mdp-mdp") : pm_mode;
        const PmVerdict v = m == "mc-mdp" ? refine_mc_mdp_pm(l, r, effective_guard())
                                          : refine_pm_pm(l, r, effective_guard());
        rep.body["verdict"] = v.yes ? "Holds" : "Fails";
        rep.body["mode"] = m;
        rep.body["strategies_checked"] = v.strategies_checked;
        if (v.witness) rep.body["witness"] = pure_json(r, *v.witness);
        if (v.unmatched) rep.body["unmatched"] = pure_json(l, *v.unmatched);
        rep.summary = v.yes ? "Holds" : "Fails";
    });

    // emit-etr
    std::string etr_out, solver_cmd;
    auto* etr = app.add_subcommand("emit-etr", "existential-theory encoding of memoryless refinement");
    etr->add_option("mc", left_path)->required();
    etr->add_option("mdp", right_path)->required();
    etr->add_option("-o,--output", etr_out, "write the SMT-LIB script here instead of into the report");
    etr->add_option("--solver-cmd", solver_cmd, "run this command on the script file");
    bind(etr, [&] {
        const Mdp c = load_model(left_path);
        const Mdp d = load_model(right_path);
        const EtrInstance inst = emit_etr(c, d);
        const std::string script = to_smtlib(inst);
        rep.body["verdict"] = "Emitted";
        rep.body["variables"] = inst.variables.size();
        rep.body["assertions"] = inst.constraints.size();
        if (etr_out.empty()) {
            rep.body["script"] = script;
        } else {
            write_file(etr_out, script);
            rep.body["output"] = etr_out;
        }
        rep.summary = std::to_string(inst.variables.size()) + " variables, " +
                      std::to_string(inst.constraints.size()) + " assertions";
        if (!solver_cmd.empty()) {
            const SolverResult s = run_external_solver(script, solver_cmd);
            rep.body["solver"] = {{"status", s.status}, {"exit_code", s.exit_code}, {"output", s.output}};
            rep.summary += "; solver: " + s.status;
        }
    });

    // gadget
    std::string out_dir = ".";
    auto* gadget = app.add_subcommand("gadget", "generate a reduction instance");
    gadget->require_subcommand(1);
    std::string values, target, universal, existential, matrix, pa_path;
    std::size_t rank = 1;

    auto* g_ss = gadget->add_subcommand("subset-sum", "subset sum as pure memoryless refinement");
    g_ss->add_option("--values", values, "comma-separated positive integers")->required();
    g_ss->add_option("--target", target, "target sum")->required();
    g_ss->add_option("--out-dir", out_dir, "directory for left.json, right.json and metadata.json");
    bind(g_ss, [&] {
        const auto t = parse_longs(target, "--target");
        if (t.size() != 1) throw ParseError("expected one integer", "--target");
        write_gadget(gadget_subset_sum(parse_longs(values, "--values"), t.front()), out_dir, rep);
    });

    auto* g_qss = gadget->add_subcommand("qss", "one-round quantified subset sum");
    g_qss->add_option("--universal", universal, "values of the universal player")->required();
    g_qss->add_option("--existential", existential, "values of the existential player")->required();
    g_qss->add_option("--target", target, "target sum")->required();
    g_qss->add_option("--out-dir", out_dir, "output directory");
    bind(g_qss, [&] {
        const auto t = parse_longs(target, "--target");
        if (t.size() != 1) throw ParseError("expected one integer", "--target");
        write_gadget(gadget_qss(parse_longs(universal, "--universal"), parse_longs(existential, "--existential"),
                                t.front()),
                     out_dir, rep);
    });

    auto* g_nmf = gadget->add_subcommand("nmf", "nonnegative factorization as memoryless refinement");
    g_nmf->add_option("--matrix", matrix, "rows separated by ';', entries by ',', e.g. \"1/2,1/2;1,0\"")->required();
    g_nmf->add_option("--rank", rank, "inner dimension r")->required();
    g_nmf->add_option("--out-dir", out_dir, "output directory");
    bind(g_nmf, [&] { write_gadget(gadget_nmf(parse_matrix(matrix), rank), out_dir, rep); });

    auto* g_pa = gadget->add_subcommand("pa-universal", "probabilistic automaton universality");
    g_pa->add_option("--pa", pa_path, "automaton file")->required();
    g_pa->add_option("--out-dir", out_dir, "output directory");
    bind(g_pa, [&] { write_gadget(gadget_pa_universality(parse_pa(read_file(pa_path))), out_dir, rep); });

    auto* g_mut = gadget->add_subcommand("mutual", "general refinement as mutual refinement");
    g_mut->add_option("d", left_path)->required();
    g_mut->add_option("e", right_path)->required();
    g_mut->add_option("--out-dir", out_dir, "output directory");
    bind(g_mut, [&] { write_gadget(gadget_mutual(load_model(left_path), load_model(right_path)), out_dir, rep); });

    // oracle
    std::size_t depth = 0;
    auto* oracle = app.add_subcommand("oracle", "bounded-depth brute-force refutation");
    oracle->require_subcommand(1);
    auto oracle_report = [&](const Mdp& m, const OracleVerdict& v, bool with_mode) {
        rep.body["depth"] = v.depth;
        rep.body["words_checked"] = v.words_checked;
        if (v.counterexample) {
            rep.body["verdict"] = "Counterexample";
            rep.body["word"] = word_json(m, v.word);
            put(rep.body, "achieved", v.achieved);
            put(rep.body, "required", v.required);
            if (with_mode) rep.body["mode"] = v.mode == OracleMode::Max ? "max" : "min";
            rep.summary = "counterexample '" + format_word(m, v.word) + "': " + to_string(v.achieved) + " vs " +
                          to_string(v.required);
        } else {
            rep.body["verdict"] = "NoCounterexampleUpTo";
            rep.summary = "no counterexample up to depth " + std::to_string(v.depth);
        }
    };
    auto* o_ref = oracle->add_subcommand("refine", "every strategy of the MDP against the Markov chain");
    o_ref->add_option("mdp", left_path)->required();
    o_ref->add_option("mc", right_path)->required();
    o_ref->add_option("--depth", depth, "maximal word length")->required();
    bind(o_ref, [&] {
        const Mdp m = load_model(left_path);
        oracle_report(m, oracle_refines_mc(m, load_model(right_path), depth), true);
    });
    auto* o_eq = oracle->add_subcommand("equiv", "two Markov chains word by word");
    o_eq->add_option("mc1", left_path)->required();
    o_eq->add_option("mc2", right_path)->required();
    o_eq->add_option("--depth", depth, "maximal word length")->required();
    bind(o_eq, [&] {
        const Mdp m = load_model(left_path);
        oracle_report(m, oracle_mc_equiv(m, load_model(right_path), depth), false);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        json out{{"status", "error"}, {"format_version", kFormatVersion}, {"error", error_json("usage", e.what())}};
        std::cout << out.dump(2) << "\n";
        std::cerr << "usage error: " << e.what() << "\n";
        return kUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    auto fail = [&](const std::string& status, const json& err, int code) {
        json out{{"command", rep.command}, {"status", status}, {"format_version", kFormatVersion}, {"error", err}};
        std::cout << out.dump(2) << "\n";
        std::cerr << rep.command << ": " << err.at("message").get<std::string>() << "\n";
        return code;
    };
    try {
        action();
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        return emit(rep, "answered", ms);
    } catch (const GuardExceeded& e) {
        json err = error_json("guard_exceeded", e.what());
        err["limit"] = e.limit();
        err["required"] = e.required();
        return fail("guard_exceeded", err, kGuard);
    } catch (const ValidationError& e) {
        json err = error_json("invalid_model", e.what());
        json vs = json::array();
        for (const auto& v : e.violations()) vs.push_back({{"where", v.where}, {"message", v.message}});
        err["violations"] = vs;
        return fail("error", err, kUsage);
    } catch (const ParseError& e) {
        json err = error_json("parse", e.what());
        if (e.line()) {
            err["line"] = e.line();
            err["column"] = e.column();
        }
        if (!e.location().empty()) err["location"] = e.location();
        return fail("error", err, kUsage);
    } catch (const InvalidArgument& e) {
        return fail("error", error_json("invalid_argument", e.what()), kUsage);
    } catch (const IoError& e) {
        return fail("error", error_json("io", e.what()), kUsage);
    } catch (const std::filesystem::filesystem_error& e) {
        return fail("error", error_json("io", e.what()), kUsage);
    } catch (const std::exception& e) {
        return fail("internal_error", error_json("internal", e.what()), kInternal);
    }
}
