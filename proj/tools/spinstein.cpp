// spinstein: command-line front end for the Potts/Curie-Weiss-Potts toolkit.
//
// Subcommands: macrostates, simulate, couple, exact, bench, replay.
// Exit codes: 0 ok, 2 usage error, 3 resource guard, 4 I/O failure.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinstein/bench.hpp"
#include "spinstein/coupling.hpp"
#include "spinstein/csv.hpp"
#include "spinstein/dynamics.hpp"
#include "spinstein/exact.hpp"
#include "spinstein/macrostates.hpp"
#include "spinstein/rng.hpp"
#include "spinstein/spin_core.hpp"

namespace {

constexpr const char* kVersion = "spinstein 1.0.0";

using namespace spinstein;

std::string iso_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunContext {
    std::string out_dir;
    ExperimentManifest manifest;

    std::string resolve(const std::string& name) const {
        if (out_dir.empty()) return name;
        return (std::filesystem::path(out_dir) / name).string();
    }

    void record_csv(const std::string& name, const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) {
        const std::string digest = write_csv(resolve(name), header, rows);
        manifest.outputs.emplace_back(name, digest);
    }

    void record_text(const std::string& name, const std::string& content) {
        const std::string digest = write_text_file(resolve(name), content);
        manifest.outputs.emplace_back(name, digest);
    }

    void finish() {
        manifest.finished_at = iso_now();
        if (!manifest.subcommand.empty())
            manifest.save(resolve(manifest.subcommand + ".manifest.json"));
    }
};

// "--x e" or "--x ordered:K"
ProbVector parse_center(const std::string& spec, double beta, int q) {
    if (spec == "e") return equiproportional(q);
    if (spec.rfind("ordered:", 0) == 0) {
        const int k = std::stoi(spec.substr(8));
        if (k < 1 || k > q) throw CLI::ValidationError("--x", "dominant color out of range");
        return ordered_macrostate(beta, q, k - 1);
    }
    throw CLI::ValidationError("--x", "expected 'e' or 'ordered:K'");
}

// "e:0.05" or "ordered:K:0.05"
Region parse_restrict(const std::string& spec, double beta, int q) {
    const auto last = spec.rfind(':');
    if (last == std::string::npos)
        throw CLI::ValidationError("--restrict", "expected X:R, e.g. e:0.05 or ordered:1:0.05");
    Region rg;
    rg.radius = std::stod(spec.substr(last + 1));
    if (!(rg.radius > 0.0)) throw CLI::ValidationError("--restrict", "radius must be > 0");
    rg.center = parse_center(spec.substr(0, last), beta, q);
    return rg;
}

std::string opt_str(const std::optional<long long>& v) {
    return v ? std::to_string(*v) : std::string();
}

int dispatch(const std::vector<std::string>& args);

// ---------------------------------------------------------------------------

void cmd_macrostates(RunContext& ctx, int q, double beta, const std::string& out) {
    const auto set = macrostate_set(beta, q);
    std::vector<std::string> header = {"index"};
    for (int k = 1; k <= q; ++k) header.push_back("x_" + std::to_string(k));
    for (const char* c : {"s_star", "theta", "lambda", "a", "a_prime", "b", "condition"})
        header.push_back(c);
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < set.size(); ++i) {
        const auto m = analyze_macrostate(set[i], beta, q);
        std::vector<std::string> row = {std::to_string(i)};
        for (double v : m.x) row.push_back(format_double(v));
        row.push_back(format_double(m.s_star));
        row.push_back(format_double(m.theta));
        row.push_back(format_double(m.lambda));
        row.push_back(format_double(m.a));
        row.push_back(format_double(m.a_prime));
        row.push_back(format_double(m.b));
        row.push_back(condition_holds(set[i], beta, q) ? "1" : "0");
        rows.push_back(std::move(row));
    }
    std::cout << "beta_c(" << q << ") = " << format_double(beta_c(q)) << "\n";
    std::cout << "beta_s(" << q << ") = " << format_double(beta_s(q)) << "\n";
    std::cout << "macrostates: " << set.size() << "\n";
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) std::cout << (i ? "," : "") << row[i];
        std::cout << "\n";
    }
    if (!out.empty()) ctx.record_csv(out, header, rows);
}

void cmd_simulate(RunContext& ctx, const std::string& model, int q, double beta, int n,
                  long long steps, uint64_t seed, const std::string& restrict_spec,
                  const std::string& graph_file, long long record_every, const std::string& out) {
    ModelParams p{q, beta, n};
    p.validate();
    std::optional<Region> region;
    if (!restrict_spec.empty()) region = parse_restrict(restrict_spec, beta, q);

    RngStream rng(seed, 0);
    Configuration init =
        region ? configuration_near(region->center, n) : configuration_near(equiproportional(q), n);

    std::vector<std::string> header = {"step"};
    for (int k = 1; k <= q; ++k) header.push_back("counts_" + std::to_string(k));
    header.push_back("rejected_cum");
    header.push_back("tau_out");
    header.push_back("tau_in");
    std::vector<std::vector<std::string>> rows;

    std::optional<long long> tau_out, tau_in;
    long long rejected = 0;
    CountVector counts(q, 0);
    for (int c : init) ++counts[c];

    Graph g;
    Configuration cfg = init;
    if (model == "graph") {
        if (graph_file.empty()) throw CLI::ValidationError("--graph", "required for --model graph");
        g = Graph::from_file(graph_file);
        if (g.n_vertices != n) throw CLI::ValidationError("--n", "does not match graph file");
    } else if (model != "cwp") {
        throw CLI::ValidationError("--model", "expected graph or cwp");
    }

    auto check = [&](long long t) {
        if (!region) return;
        if (!tau_out && !in_ball(counts, region->center, 4.0 * region->radius / 5.0, n)) tau_out = t;
        if (!tau_in && in_ball(counts, region->center, region->radius / 5.0, n)) tau_in = t;
    };
    auto emit = [&](long long t) {
        std::vector<std::string> row = {std::to_string(t)};
        for (int k = 0; k < q; ++k) row.push_back(std::to_string(counts[k]));
        row.push_back(std::to_string(rejected));
        row.push_back(opt_str(tau_out));
        row.push_back(opt_str(tau_in));
        rows.push_back(std::move(row));
    };

    check(0);
    emit(0);
    if (model == "cwp" && region) {
        RestrictedChain chain(p, cfg, region->center, region->radius);
        for (long long t = 1; t <= steps; ++t) {
            if (chain.step(rng)) ++rejected;
            counts = chain.counts;
            check(t);
            if (t % record_every == 0 || t == steps) emit(t);
        }
    } else if (model == "cwp") {
        MeanFieldChain chain(p, cfg);
        for (long long t = 1; t <= steps; ++t) {
            chain.step(rng);
            counts = chain.counts;
            check(t);
            if (t % record_every == 0 || t == steps) emit(t);
        }
    } else {
        for (long long t = 1; t <= steps; ++t) {
            const int v = static_cast<int>(rng.next_below(n));
            const int old_color = cfg[v];
            const int new_color = rng.next_categorical(conditional_spin_dist(g, cfg, v, p));
            if (new_color != old_color) {
                --counts[old_color];
                ++counts[new_color];
                if (region && !in_ball(counts, region->center, region->radius, n)) {
                    ++counts[old_color];
                    --counts[new_color];
                    ++rejected;
                } else {
                    cfg[v] = new_color;
                }
            }
            check(t);
            if (t % record_every == 0 || t == steps) emit(t);
        }
    }
    ctx.record_csv(out, header, rows);
}

void cmd_couple(RunContext& ctx, int q, double beta, int n, const std::string& x_spec, double r,
                long long replicas, uint64_t seed, long long max_steps, const std::string& out) {
    ModelParams p{q, beta, n};
    p.validate();
    const ProbVector x = parse_center(x_spec, beta, q);
    if (max_steps <= 0) max_steps = 200LL * n * static_cast<long long>(std::log(n) + 1.0);

    std::vector<std::string> header = {"replica", "tau_couple", "phase1_len", "max_hamming",
                                       "event_B_violated_at"};
    std::vector<std::vector<std::string>> rows;
    RngStream root(seed, 0);
    for (long long rep = 0; rep < replicas; ++rep) {
        RngStream rng = root.substream(rep + 1);
        RngStream start_rng = rng.substream(99);
        auto random_start = [&] {
            ProbVector y(q);
            for (int tries = 0; tries < 1000; ++tries) {
                double s = 0.0;
                for (int k = 0; k < q; ++k) {
                    y[k] = std::max(0.0, x[k] + (2.0 * start_rng.next_double() - 1.0) * r);
                    s += y[k];
                }
                for (int k = 0; k < q; ++k) y[k] /= s;
                double d2 = 0.0;
                for (int k = 0; k < q; ++k) d2 += (y[k] - x[k]) * (y[k] - x[k]);
                if (d2 <= r * r) return y;
            }
            return x;
        };
        const Configuration a = configuration_near(random_start(), n);
        const Configuration b = configuration_near(random_start(), n);
        const auto trace = two_phase_coalescence(a, b, x, r, p, rng, max_steps);
        rows.push_back({std::to_string(rep), opt_str(trace.tau_couple),
                        std::to_string(trace.phase1_len), std::to_string(trace.max_hamming),
                        opt_str(trace.event_b_violated_at)});
    }
    ctx.record_csv(out, header, rows);
}

void cmd_exact(RunContext& ctx, const std::string& what, int n, int q, double beta,
               const std::string& restrict_spec, double epsilon, const std::string& x_spec,
               const std::string& out, bool svg) {
    ModelParams p{q, beta, n};
    p.validate();
    std::optional<Region> region;
    if (!restrict_spec.empty()) region = parse_restrict(restrict_spec, beta, q);

    if (what == "tmix") {
        const auto chain = lumped_transition_matrix(n, q, beta, region);
        const auto curve = tv_curve_and_tmix(chain, epsilon);
        std::vector<std::vector<std::string>> rows;
        for (const auto& [t, d] : curve.points)
            rows.push_back({std::to_string(t), format_double(d), std::to_string(curve.t_mix)});
        ctx.record_csv(out, {"t", "worst_tv", "tmix"}, rows);
        std::cout << "t_mix(" << format_double(epsilon) << ") = " << curve.t_mix << "\n";
        if (svg) {
            std::vector<double> xs, ys;
            for (const auto& [t, d] : curve.points) {
                xs.push_back(static_cast<double>(t));
                ys.push_back(d);
            }
            ctx.record_text(out + ".svg", svg_line_plot(xs, ys, "worst-case TV vs t"));
        }
    } else if (what == "stationary") {
        const auto chain = lumped_transition_matrix(n, q, beta, region);
        const auto pi = stationary_distribution(chain);
        const auto gb = lumped_gibbs(chain.states, n, beta);
        std::vector<std::string> header;
        for (int k = 1; k <= q; ++k) header.push_back("counts_" + std::to_string(k));
        header.push_back("stationary");
        header.push_back("gibbs");
        std::vector<std::vector<std::string>> rows;
        for (size_t i = 0; i < chain.states.size(); ++i) {
            std::vector<std::string> row;
            for (long long v : chain.states[i]) row.push_back(std::to_string(v));
            row.push_back(format_double(pi.weights[i]));
            row.push_back(format_double(gb.weights[i]));
            rows.push_back(std::move(row));
        }
        ctx.record_csv(out, header, rows);
        std::cout << "tv(stationary, gibbs) = " << format_double(tv_between(pi.weights, gb.weights))
                  << "\n";
    } else if (what == "wasserstein") {
        const auto states = enumerate_states(n, q, region);
        const auto mu = lumped_gibbs(states, n, beta);
        const ProbVector x = parse_center(x_spec, beta, q);
        const auto nu = conditional_multinomial(states, n, x);
        const auto ot = exact_wasserstein_exchangeable(states, n, mu.weights, nu.weights);
        ctx.record_csv(out, {"N", "dw", "dw_over_sqrt_n", "duality_gap", "n_states"},
                       {{std::to_string(n), format_double(ot.value),
                         format_double(ot.value / std::sqrt(static_cast<double>(n))),
                         format_double(ot.duality_gap), std::to_string(states.size())}});
        std::cout << "d_W = " << format_double(ot.value) << "\n";
    } else if (what == "stein") {
        const auto chain = lumped_transition_matrix(n, q, beta, region);
        std::vector<double> h(chain.states.size());
        for (size_t i = 0; i < h.size(); ++i)
            h[i] = static_cast<double>(chain.states[i][0]) / n;  // first-coordinate proportion
        const auto f = solve_stein_poisson(chain, h);
        std::vector<std::string> header;
        for (int k = 1; k <= q; ++k) header.push_back("counts_" + std::to_string(k));
        header.push_back("h");
        header.push_back("f");
        std::vector<std::vector<std::string>> rows;
        for (size_t i = 0; i < chain.states.size(); ++i) {
            std::vector<std::string> row;
            for (long long v : chain.states[i]) row.push_back(std::to_string(v));
            row.push_back(format_double(h[i]));
            row.push_back(format_double(f[i]));
            rows.push_back(std::move(row));
        }
        ctx.record_csv(out, header, rows);
    } else {
        throw CLI::ValidationError("exact", "expected tmix|stationary|wasserstein|stein");
    }
}

void cmd_bench(RunContext& ctx, const std::string& what, int q, double beta, int n,
               const std::string& graph_spec, double linf, const std::string& x_spec, double r,
               const std::string& n_list, const std::string& beta_list, long long samples,
               uint64_t seed, const std::string& out, bool svg) {
    auto build_graph = [&]() -> Graph {
        if (graph_spec.rfind("cycle:", 0) == 0) return Graph::cycle(std::stoi(graph_spec.substr(6)));
        if (graph_spec.rfind("complete:", 0) == 0)
            return Graph::complete(std::stoi(graph_spec.substr(9)));
        if (!graph_spec.empty()) return Graph::from_file(graph_spec);
        throw CLI::ValidationError("--graph", "required (file path, cycle:N, or complete:N)");
    };
    auto parse_list = [](const std::string& s) {
        std::vector<double> out_list;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) out_list.push_back(std::stod(tok));
        return out_list;
    };

    if (what == "bounded-degree") {
        const Graph g = build_graph();
        ModelParams p{q, beta, g.n_vertices};
        p.validate();
        const auto rep = bounded_degree_bound(g, p, linf);
        ctx.record_csv(out,
                       {"n", "q", "beta", "kappa", "max_degree", "n_edges", "bound_coarse",
                        "bound_refined"},
                       {{std::to_string(g.n_vertices), std::to_string(q), format_double(beta),
                         format_double(rep.kappa), std::to_string(rep.max_degree),
                         std::to_string(rep.n_edges), format_double(rep.bound_coarse),
                         format_double(rep.bound_refined)}});
        std::cout << "bound_coarse = " << format_double(rep.bound_coarse)
                  << ", bound_refined = " << format_double(rep.bound_refined) << "\n";
    } else if (what == "tnorm") {
        const Graph g = build_graph();
        ModelParams p{q, beta, g.n_vertices};
        p.validate();
        const ProbVector x = parse_center(x_spec, beta, q);
        RngStream rng(seed, 0);
        const auto rep = mean_T_norm(g, p, x, samples, rng);
        ctx.record_csv(out, {"samples", "mc_estimate", "mc_stderr", "analytic_bound"},
                       {{std::to_string(rep.samples), format_double(rep.mc_estimate),
                         format_double(rep.mc_stderr), format_double(rep.analytic_bound)}});
    } else if (what == "clt") {
        const auto rep = clt_covariance_check(n, q, beta);
        std::vector<std::vector<std::string>> rows;
        for (int a = 0; a < q; ++a)
            for (int b = 0; b < q; ++b)
                rows.push_back({std::to_string(a + 1), std::to_string(b + 1),
                                format_double(rep.sigma_y[a][b]), format_double(rep.sigma_x[a][b])});
        ctx.record_csv(out, {"row", "col", "sigma_y", "sigma_x"}, rows);
        std::cout << "stated x diag " << format_double(rep.stated_x_diag) << " offdiag(printed) "
                  << format_double(rep.stated_x_offdiag_printed) << " offdiag(consistent) "
                  << format_double(rep.stated_x_offdiag_consistent) << "\n";
        std::cout << "max deviation from printed off-diagonal: "
                  << format_double(rep.max_dev_x_offdiag_printed)
                  << "; from row-sum-consistent value: "
                  << format_double(rep.max_dev_x_offdiag_consistent) << "\n";
    } else if (what == "wscaling") {
        const std::vector<double> ns = parse_list(n_list);
        std::vector<std::vector<std::string>> rows;
        std::vector<double> xs, ys;
        for (double nd : ns) {
            const int nn = static_cast<int>(nd);
            std::optional<Region> region;
            if (r > 0.0) region = Region{parse_center(x_spec, beta, q), r};
            const ProbVector x = parse_center(x_spec, beta, q);
            const auto row = wasserstein_scaling_row(nn, q, beta, x, region);
            rows.push_back({std::to_string(row.N), format_double(row.dw),
                            format_double(row.dw_over_sqrt_n), format_double(row.duality_gap),
                            std::to_string(row.n_states)});
            xs.push_back(nd);
            ys.push_back(row.dw_over_sqrt_n);
        }
        ctx.record_csv(out, {"N", "dw", "dw_over_sqrt_n", "duality_gap", "n_states"}, rows);
        if (svg) ctx.record_text(out + ".svg", svg_line_plot(xs, ys, "d_W / sqrt(N) vs N"));
    } else if (what == "theta-trend") {
        const std::vector<double> betas = parse_list(beta_list);
        const bool ordered = x_spec.rfind("ordered", 0) == 0;
        std::vector<std::vector<std::string>> rows;
        std::vector<double> xs, ys;
        for (double b : betas) {
            const double proxy = theta_star_proxy(b, q, ordered);
            rows.push_back({format_double(b), format_double(proxy)});
            xs.push_back(b);
            ys.push_back(proxy);
        }
        ctx.record_csv(out, {"beta", "theta_star_proxy"}, rows);
        if (svg) ctx.record_text(out + ".svg", svg_line_plot(xs, ys, "theta* proxy vs beta"));
    } else {
        throw CLI::ValidationError("bench",
                                   "expected bounded-degree|tnorm|clt|wscaling|theta-trend");
    }
}

int cmd_replay(const std::string& manifest_path, const std::string& out_dir) {
    const auto manifest = ExperimentManifest::load(manifest_path);
    std::vector<std::string> args = manifest.argv;
    // strip any stored --out-dir and apply the requested one
    std::vector<std::string> cleaned;
    for (size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out-dir") {
            ++i;
            continue;
        }
        cleaned.push_back(args[i]);
    }
    if (!out_dir.empty()) {
        cleaned.push_back("--out-dir");
        cleaned.push_back(out_dir);
    }
    const int rc = dispatch(cleaned);
    if (rc != 0) return rc;
    // compare digests
    const std::string dir = out_dir;
    bool ok = true;
    for (const auto& [name, digest] : manifest.outputs) {
        const std::string path =
            dir.empty() ? name : (std::filesystem::path(dir) / name).string();
        std::ifstream f(path, std::ios::binary);
        if (!f) {
            std::cerr << "replay: missing output " << path << "\n";
            ok = false;
            continue;
        }
        std::stringstream ss;
        ss << f.rdbuf();
        const std::string got = digest_hex(ss.str());
        if (got != digest) {
            std::cerr << "replay: digest mismatch for " << name << ": " << got << " != " << digest
                      << "\n";
            ok = false;
        } else {
            std::cout << "replay: " << name << " ok (" << digest << ")\n";
        }
    }
    return ok ? 0 : 1;
}

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{kVersion};
    app.set_config("--config", "", "flat key = value config file");
    std::string out_dir;
    if (const char* env = std::getenv("SPINSTEIN_OUT_DIR")) out_dir = env;
    app.add_option("--out-dir", out_dir, "output directory (env SPINSTEIN_OUT_DIR)");
    int threads = 1;
    app.add_option("--threads", threads, "worker parallelism cap (currently single-threaded)");
    app.require_subcommand(1);

    int q = 3, n = 30;
    double beta = 1.0, r = 0.05, epsilon = 0.25, linf = 1.0;
    uint64_t seed = 0;
    long long steps = 1000, replicas = 10, record_every = 1, max_steps = 0, samples = 10000;
    std::string out = "out.csv", model = "cwp", restrict_spec, graph_file, x_spec = "e";
    std::string n_list = "40,80", beta_list = "0.5,0.2,0.05";
    bool svg = false;

    auto add_common = [&](CLI::App* c) {
        c->fallthrough();  // allow --out-dir / --threads after the subcommand
        c->add_option("--q", q, "number of colors")->check(CLI::Range(3, 64));
        c->add_option("--beta", beta, "inverse temperature")->check(CLI::NonNegativeNumber);
        c->add_option("--out", out, "output CSV filename");
    };

    auto* mac = app.add_subcommand("macrostates", "equilibrium macrostates and constants");
    add_common(mac);

    auto* sim = app.add_subcommand("simulate", "run Glauber dynamics");
    add_common(sim);
    sim->add_option("--model", model, "graph or cwp");
    sim->add_option("--n", n, "number of vertices")->check(CLI::PositiveNumber);
    sim->add_option("--steps", steps, "number of steps")->check(CLI::NonNegativeNumber);
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--restrict", restrict_spec, "X:R, e.g. e:0.05 or ordered:1:0.05");
    sim->add_option("--graph", graph_file, "graph file for --model graph");
    sim->add_option("--record-every", record_every, "row subsampling stride")
        ->check(CLI::PositiveNumber);

    auto* cpl = app.add_subcommand("couple", "two-phase coalescence experiments");
    add_common(cpl);
    cpl->add_option("--n", n, "number of vertices")->check(CLI::PositiveNumber);
    cpl->add_option("--x", x_spec, "ball center: e or ordered:K");
    cpl->add_option("--r", r, "ball radius")->check(CLI::Range(1e-9, 1.0));
    cpl->add_option("--replicas", replicas, "number of coupled runs")->check(CLI::PositiveNumber);
    cpl->add_option("--seed", seed, "RNG seed");
    cpl->add_option("--max-steps", max_steps, "step budget per replica");

    auto* exa = app.add_subcommand("exact", "exact lumped-chain computations");
    std::string exact_what;
    exa->add_option("what", exact_what, "tmix|stationary|wasserstein|stein")->required();
    add_common(exa);
    exa->add_option("--n", n, "number of vertices")->check(CLI::PositiveNumber);
    exa->add_option("--restrict", restrict_spec, "X:R restriction");
    exa->add_option("--epsilon", epsilon, "t_mix threshold")->check(CLI::Range(1e-9, 0.4999));
    exa->add_option("--x", x_spec, "product-measure law for wasserstein");
    exa->add_flag("--svg", svg, "also write an SVG plot");

    auto* ben = app.add_subcommand("bench", "bound evaluations and scaling tables");
    std::string bench_what;
    ben->add_option("what", bench_what, "bounded-degree|tnorm|clt|wscaling|theta-trend")->required();
    add_common(ben);
    ben->add_option("--n", n, "number of vertices")->check(CLI::PositiveNumber);
    ben->add_option("--graph", graph_file, "graph file, cycle:N, or complete:N");
    ben->add_option("--linf", linf, "Lipschitz constant of the test function");
    ben->add_option("--x", x_spec, "center / product law: e or ordered:K");
    ben->add_option("--r", r, "ball radius for wscaling (0 disables restriction)")
        ->check(CLI::Range(0.0, 1.0));
    ben->add_option("--n-list", n_list, "comma-separated N values");
    ben->add_option("--beta-list", beta_list, "comma-separated beta values");
    ben->add_option("--samples", samples, "Monte Carlo sample count");
    ben->add_option("--seed", seed, "RNG seed");
    ben->add_flag("--svg", svg, "also write an SVG plot");

    auto* rep = app.add_subcommand("replay", "re-run a manifest and compare digests");
    rep->fallthrough();
    std::string manifest_path;
    rep->add_option("manifest", manifest_path, "manifest JSON path")->required();
    rep->add_option("--out-dir", out_dir, "directory for replayed outputs");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    RunContext ctx;
    ctx.out_dir = out_dir;
    ctx.manifest.argv = args;
    ctx.manifest.seed = seed;
    ctx.manifest.version = kVersion;
    ctx.manifest.started_at = iso_now();

    try {
        if (mac->parsed()) {
            ctx.manifest.subcommand = "macrostates";
            cmd_macrostates(ctx, q, beta, out == "out.csv" ? "" : out);
        } else if (sim->parsed()) {
            ctx.manifest.subcommand = "simulate";
            cmd_simulate(ctx, model, q, beta, n, steps, seed, restrict_spec, graph_file,
                         record_every, out);
        } else if (cpl->parsed()) {
            ctx.manifest.subcommand = "couple";
            cmd_couple(ctx, q, beta, n, x_spec, r, replicas, seed, max_steps, out);
        } else if (exa->parsed()) {
            ctx.manifest.subcommand = "exact-" + exact_what;
            cmd_exact(ctx, exact_what, n, q, beta, restrict_spec, epsilon, x_spec, out, svg);
        } else if (ben->parsed()) {
            ctx.manifest.subcommand = "bench-" + bench_what;
            cmd_bench(ctx, bench_what, q, beta, n, graph_file, linf, x_spec, r, n_list, beta_list,
                      samples, seed, out, svg);
        } else if (rep->parsed()) {
            return cmd_replay(manifest_path, out_dir);
        }
        ctx.finish();
        return 0;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args);
}
