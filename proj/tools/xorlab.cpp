// xorsat-lab: command-line front end.
//
// Exit codes: 0 success, 1 domain or runtime failure (including an
// unverified certificate or a failed experiment gate), 2 usage error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "xorlab/xorlab.hpp"

using namespace xorlab;
using nlohmann::json;

namespace {

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

void announce(const std::string& command, const json& config)
{
    std::cerr << "xorsat-lab " << command << " " << config.dump() << "\n";
}

std::size_t resolve_m(const std::optional<std::size_t>& m, const std::optional<double>& c, std::size_t n)
{
    if (m && c) throw UsageError("give --m or --c, not both");
    if (m) return *m;
    if (c) {
        if (!(*c > 0.0)) throw UsageError("--c must be > 0");
        return static_cast<std::size_t>(std::llround(*c * static_cast<double>(n)));
    }
    throw UsageError("--m or --c is required");
}

void emit(const std::string& text, const std::string& out)
{
    if (out.empty()) {
        std::cout << text;
    } else {
        write_file(out, text);
    }
}

// ---- gen ----

struct GenArgs {
    std::string model = "unconstrained";
    int k = 3;
    std::size_t n = 100;
    std::optional<std::size_t> m;
    std::optional<double> c;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    std::string out;
    std::string format = "json";
};

int run_gen(const GenArgs& a)
{
    const ModelTag model = model_tag_from_string(a.model);
    const std::size_t m = resolve_m(a.m, a.c, a.n);
    announce("gen", {{"model", to_string(model)}, {"k", a.k}, {"n", a.n}, {"m", m}, {"seed", a.seed},
                     {"stream", a.stream}, {"out", a.out}, {"format", a.format}});
    const Instance inst = gen::generate(model, a.k, m, a.n, {a.seed, a.stream});
    if (a.format == "binary") {
        if (a.out.empty()) throw UsageError("--format binary requires --out");
        write_file(a.out, to_binary(inst));
    } else {
        emit(to_json(inst).dump() + "\n", a.out);
    }
    std::cerr << "content_hash " << content_hash(inst) << "\n";
    return 0;
}

// ---- solve ----

int run_solve(const std::string& in, const std::string& out)
{
    announce("solve", {{"in", in}, {"out", out}});
    const Instance inst = load_instance(in);
    json result = {{"content_hash", content_hash(inst)}, {"k", inst.k}, {"n", inst.n}, {"m", inst.m},
                   {"model", to_string(inst.model_tag)}};
    Bits solution;
    bool consistent = false;
    std::size_t rank = 0;
    if (inst.model_tag == ModelTag::relaxed_C) {
        // Repeated chips cancel in GF(2); solve the matrix directly.
        const auto sol = gf2::solve(to_matrix(inst), inst.rhs);
        consistent = sol.consistent;
        rank = sol.rank;
        if (sol.one_solution) solution = *sol.one_solution;
    } else {
        const auto peeled = peel::two_core(inst);
        const auto sol = gf2::solve(to_matrix(peeled.core), peeled.core.rhs);
        consistent = sol.consistent;
        // Each peeled equation owns a variable of degree one, so it adds one to the rank.
        rank = peeled.stats.m - peeled.stats.core_eqs + sol.rank;
        result["core_vars"] = peeled.stats.core_vars;
        result["core_eqs"] = peeled.stats.core_eqs;
        if (sol.consistent) solution = peel::extend_solution(*sol.one_solution, peeled.trace, inst);
    }
    result["satisfiable"] = consistent;
    result["rank"] = rank;
    result["nullity_transpose"] = inst.m - rank;
    if (consistent) {
        result["verified"] = gf2::satisfies(to_matrix(inst), solution, inst.rhs);
        std::string bits;
        for (auto b : solution) bits.push_back(b ? '1' : '0');
        result["solution"] = bits;
    }
    emit(result.dump(2) + "\n", out);
    return 0;
}

// ---- peel ----

int run_peel(const std::string& in, const std::string& out, const std::string& order)
{
    announce("peel", {{"in", in}, {"out", out}, {"order", order}});
    const Instance inst = load_instance(in);
    const auto r = peel::two_core(inst, order == "lifo" ? peel::PeelOrder::lifo : peel::PeelOrder::fifo);
    std::cout << peel::stats_csv_header << "\n" << peel::stats_csv_line(r.stats, inst.seed) << "\n";
    if (!out.empty()) {
        json doc = {{"trace", peel::to_json(r.trace)}, {"core", to_json(r.core)}};
        write_file(out, doc.dump() + "\n");
    }
    return 0;
}

// ---- threshold ----

int run_threshold(int k, const std::optional<double>& c)
{
    announce("threshold", {{"k", k}, {"c", c ? json(*c) : json(nullptr)}});
    std::cout << thresholds::to_json(thresholds::make_report(k, c)).dump(2) << "\n";
    return 0;
}

// ---- certify ----

struct CertifyArgs {
    std::string claim;
    int k = 4;
    double c_lo = 0.999;
    double c_hi = 1.001;
    std::string in;
    std::string out;
    unsigned workers = 1;
};

int run_certify(const CertifyArgs& a)
{
    announce("certify", {{"claim", a.claim}, {"k", a.k}, {"c_range", {a.c_lo, a.c_hi}}, {"in", a.in},
                         {"out", a.out}, {"workers", a.workers}});
    cert::Certificate c;
    if (!a.in.empty()) {
        c = cert::certificate_from_json(json::parse(read_file(a.in)));
        c.verified = cert::replay(c);
    } else if (a.claim == "amed") {
        c = cert::certify_amed(a.k);
    } else if (a.claim == "amed-split") {
        if (a.k == 5) c = cert::certify_s_k_splits(5, {0.1840, 0.2291, 0.2743}, -0.005);
        else if (a.k == 6) c = cert::certify_s_k_splits(6, {0.1666, 0.2204, 0.2743}, -0.03);
        else throw UsageError("amed-split is defined for --k 5 and --k 6");
    } else if (a.claim == "amed-induction") {
        c = cert::certify_amed_induction();
    } else if (a.claim == "k3-grid") {
        c = cert::certify_k3_grid(iv::Interval(a.c_lo, a.c_hi), a.workers);
    } else if (a.claim == "alarge") {
        c = cert::certify_alarge_constants();
    } else if (a.claim == "monotonicity") {
        c = cert::certify_monotonicity();
    } else {
        throw UsageError("unknown claim '" + a.claim + "'");
    }
    const std::string text = cert::to_json(c).dump(2) + "\n";
    if (!a.out.empty()) write_file(a.out, text);
    std::printf("%s verified=%s cells=%zu global_bound=%.6g%s\n", c.claim_id.c_str(), c.verified ? "true" : "false",
                c.cells.size(), c.global_bound, c.failure ? (" failure: " + *c.failure).c_str() : "");
    return c.verified ? 0 : 1;
}

// ---- experiment ----

struct ExperimentArgs {
    std::string config;
    std::optional<std::string> kind;
    std::optional<int> k;
    std::optional<std::size_t> n;
    std::vector<double> c;
    std::vector<std::size_t> m;
    std::vector<std::size_t> windows;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> model;
    std::optional<std::string> out;
    std::optional<unsigned> workers;
};

int run_experiment_cmd(const ExperimentArgs& a)
{
    lab::ExperimentConfig cfg;
    cfg.workers = default_workers();
    if (!a.config.empty()) cfg = lab::config_from_json(json::parse(read_file(a.config)), cfg);
    if (a.kind) cfg.kind = lab::kind_from_string(*a.kind);
    if (a.k) cfg.k = *a.k;
    if (a.n) cfg.n = *a.n;
    if (!a.c.empty()) {
        cfg.c_grid = a.c;
        cfg.m_list.clear();
    }
    if (!a.m.empty()) {
        cfg.m_list = a.m;
        cfg.c_grid.clear();
    }
    if (!a.windows.empty()) cfg.windows = a.windows;
    if (a.trials) cfg.trials = *a.trials;
    if (a.seed) cfg.seed = *a.seed;
    if (a.model) cfg.model = model_tag_from_string(*a.model);
    if (a.out) cfg.out = *a.out;
    if (a.workers) cfg.workers = *a.workers;
    announce("experiment", lab::to_json(cfg));
    const auto r = lab::run_experiment(cfg);
    std::cout << lab::table_csv(r.summary);
    for (const auto& g : r.gates) {
        std::printf("gate %s row %zu: observed %.6g, expected %.6g +- %.6g%s -> %s\n", g.gate.metric.c_str(), g.gate.row,
                    g.observed, g.gate.point, g.gate.tolerance, g.gate.relative ? " (relative)" : "",
                    g.pass ? "PASS" : "FAIL");
    }
    std::fprintf(stderr, "wall_time %.3f s\n", r.wall_time_seconds);
    return lab::all_gates_pass(r) ? 0 : 1;
}

// ---- plot ----

int run_plot(const std::string& in, const std::string& out, const std::optional<int>& hk, const std::vector<double>& cs,
             std::size_t samples)
{
    announce("plot", {{"in", in}, {"out", out}, {"hk", hk ? json(*hk) : json(nullptr)}, {"c", cs}, {"samples", samples}});
    if (out.empty()) throw UsageError("--out is required");
    if (hk) {
        if (cs.empty()) throw UsageError("--hk needs at least one --c");
        lab::emit_hk_plot(*hk, cs, out, samples);
    } else {
        if (in.empty()) throw UsageError("--in is required without --hk");
        lab::emit_plot(in, out);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Random k-XORSAT toolkit: instance generation, GF(2) solving, 2-core peeling, threshold "
                 "formulas, interval certificates and Monte Carlo experiments."};
    app.require_subcommand(1);

    GenArgs gen_args;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a random instance (unconstrained: uniform k-subsets per "
                                              "equation; constrained: uniform 0-1 matrix with row sums k and "
                                              "column sums >= 2; relaxed_C: chip model with repeats).");
    gen_cmd->add_option("--model", gen_args.model, "unconstrained | constrained | relaxed_C")->capture_default_str();
    gen_cmd->add_option("--k", gen_args.k, "variables per equation")->capture_default_str();
    gen_cmd->add_option("--n", gen_args.n, "number of variables")->capture_default_str();
    gen_cmd->add_option("--m", gen_args.m, "number of equations");
    gen_cmd->add_option("--c", gen_args.c, "density; m = round(c n)");
    gen_cmd->add_option("--seed", gen_args.seed, "master seed")->capture_default_str();
    gen_cmd->add_option("--stream", gen_args.stream, "stream index under the master seed")->capture_default_str();
    gen_cmd->add_option("--out", gen_args.out, "output file (JSON to stdout when absent)");
    gen_cmd->add_option("--format", gen_args.format, "json | binary")
        ->check(CLI::IsMember({"json", "binary"}))
        ->capture_default_str();

    std::string solve_in, solve_out;
    auto* solve_cmd = app.add_subcommand("solve", "Solve an instance over GF(2): peel to the 2-core, eliminate on "
                                                  "the core, back-substitute, and verify the solution.");
    solve_cmd->add_option("--in", solve_in, "instance file (JSON or binary)")->required();
    solve_cmd->add_option("--out", solve_out, "result JSON (stdout when absent)");

    std::string peel_in, peel_out, peel_order = "fifo";
    auto* peel_cmd = app.add_subcommand("peel", "Compute the 2-core by repeatedly deleting variables of degree <= 1 "
                                                "with their equation; prints n,m,N,M,ratio,seed.");
    peel_cmd->add_option("--in", peel_in, "instance file (JSON or binary)")->required();
    peel_cmd->add_option("--out", peel_out, "write the peeling trace and core as JSON");
    peel_cmd->add_option("--order", peel_order, "fifo | lifo")->check(CLI::IsMember({"fifo", "lifo"}))->capture_default_str();

    int th_k = 3;
    std::optional<double> th_c;
    auto* th_cmd = app.add_subcommand("threshold", "Print lambda = psi^{-1}(ck), gamma, alpha_k, the 2-core threshold "
                                                   "c_hat, mu, the satisfiability threshold c_star and the predicted "
                                                   "core fractions as JSON. Without --c, c = c_star.");
    th_cmd->add_option("--k", th_k, "variables per equation (>= 3)")->capture_default_str();
    th_cmd->add_option("--c", th_c, "density m/n");

    CertifyArgs cert_args;
    cert_args.workers = default_workers();
    auto* cert_cmd = app.add_subcommand(
        "certify", "Build or replay an interval-arithmetic certificate. Claims: amed (s_k < target on "
                   "[0.99 alpha_k, 0.2743]), amed-split (k = 5, 6 on two fixed cells), amed-induction (k >= 7 step), "
                   "k3-grid (H_3 <= -0.002 on alpha in [0.099, 0.4] for c in a range near 1), alarge (constants of "
                   "the alpha in (0.2743, 1/2] case), monotonicity (three series positivity facts). Exit 0 iff "
                   "verified.");
    cert_cmd->add_option("--claim", cert_args.claim, "claim id");
    cert_cmd->add_option("--k", cert_args.k, "k for amed / amed-split")->capture_default_str();
    cert_cmd->add_option("--c-lo", cert_args.c_lo, "k3-grid: lower end of c")->capture_default_str();
    cert_cmd->add_option("--c-hi", cert_args.c_hi, "k3-grid: upper end of c")->capture_default_str();
    cert_cmd->add_option("--in", cert_args.in, "replay a certificate JSON instead of building one");
    cert_cmd->add_option("--out", cert_args.out, "write the certificate JSON");
    cert_cmd->add_option("--workers", cert_args.workers, "worker threads (default XORSAT_LAB_WORKERS or cores)");

    ExperimentArgs ex;
    auto* ex_cmd = app.add_subcommand(
        "experiment", "Run a Monte Carlo campaign (sat_sweep, critical_census, core_check, collision_check, "
                      "window_check). --config loads JSON; flags override it. Writes <out>.trials.csv, "
                      "<out>.summary.csv and <out>.json; prints the summary CSV. Exit 1 if a gate fails.");
    ex_cmd->add_option("--config", ex.config, "experiment JSON");
    ex_cmd->add_option("--kind", ex.kind, "experiment kind");
    ex_cmd->add_option("--k", ex.k, "variables per equation");
    ex_cmd->add_option("--n", ex.n, "number of variables");
    ex_cmd->add_option("--c", ex.c, "density grid (strictly increasing)");
    ex_cmd->add_option("--m", ex.m, "equation counts (instead of --c)");
    ex_cmd->add_option("--windows", ex.windows, "window_check offsets w (m = n -+ w)");
    ex_cmd->add_option("--trials", ex.trials, "trials per point");
    ex_cmd->add_option("--seed", ex.seed, "master seed");
    ex_cmd->add_option("--model", ex.model, "unconstrained | constrained | relaxed_C");
    ex_cmd->add_option("--out", ex.out, "output path prefix");
    ex_cmd->add_option("--workers", ex.workers, "worker threads (default XORSAT_LAB_WORKERS or cores)");

    std::string plot_in, plot_out;
    std::optional<int> plot_hk;
    std::vector<double> plot_c;
    std::size_t plot_samples = 400;
    auto* plot_cmd = app.add_subcommand(
        "plot", "Render an SVG line chart from a CSV (series,x,y or an experiment summary), or with --hk K "
                "plot H_K(alpha, zeta; c) against alpha for each --c, alpha in (0, 1/2], with a guide at alpha_K.");
    plot_cmd->add_option("--in", plot_in, "input CSV");
    plot_cmd->add_option("--out", plot_out, "output SVG");
    plot_cmd->add_option("--hk", plot_hk, "plot H_k for this k");
    plot_cmd->add_option("--c", plot_c, "densities for --hk");
    plot_cmd->add_option("--samples", plot_samples, "alpha samples for --hk")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*gen_cmd) return run_gen(gen_args);
        if (*solve_cmd) return run_solve(solve_in, solve_out);
        if (*peel_cmd) return run_peel(peel_in, peel_out, peel_order);
        if (*th_cmd) return run_threshold(th_k, th_c);
        if (*cert_cmd) {
            if (cert_args.claim.empty() && cert_args.in.empty()) throw UsageError("--claim or --in is required");
            return run_certify(cert_args);
        }
        if (*ex_cmd) return run_experiment_cmd(ex);
        if (*plot_cmd) return run_plot(plot_in, plot_out, plot_hk, plot_c, plot_samples);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
