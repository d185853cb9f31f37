/**
 * @file fbnet_main.cpp
 * @brief Command-line front end: train networks, evaluate checkpoints,
 *        run the oracle pricers, compare artifact bundles, and reproduce
 *        the published tables from the run cache.
 *
 * Artifact bundles are directories of the fixed-schema CSVs (history,
 * boundary, surface, report) plus checkpoint.txt and config.cfg. Exit codes:
 * 0 success, 2 configuration error, 3 training/runtime abort.
 */

#include "fbnet/config.hpp"
#include "fbnet/oracle.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace fbnet;

namespace {

using Report = std::vector<std::pair<std::string, std::string>>;

/// Progress printing shared by train/reproduce.
TrainCallbacks progress_callbacks(const std::string& label) {
    TrainCallbacks cb;
    cb.on_record = [label](const TrainRecord& rec) {
        std::printf("%s step %6d  lr %.3e  loss %.6e  (%.1fs)\n", label.c_str(),
                    rec.step, rec.lr, rec.loss, rec.elapsed_s);
        std::fflush(stdout);
    };
    cb.on_diagnostic = [label](const std::string& msg) {
        std::fprintf(stderr, "%s %s\n", label.c_str(), msg.c_str());
    };
    return cb;
}

/// history/boundary/surface/checkpoint/config for one finished run.
void write_run_bundle(const fs::path& dir, const ExperimentConfig& cfg,
                      const RunArtifacts& art, bool with_elapsed) {
    fs::create_directories(dir);
    write_history(dir / "history.csv", art.history, with_elapsed);
    write_boundary(dir / "boundary.csv",
                   boundary_rows(art.params, cfg.problem, cfg.grid.n_tau));
    write_surface(dir / "surface.csv",
                  surface_rows(art.params, cfg.problem, cfg.mode, cfg.grid.n_tau,
                               cfg.grid.n_y));
    save_checkpoint(art.params, dir / "checkpoint.txt");
    std::ofstream out(dir / "config.cfg", std::ios::binary);
    out << format_experiment_config(cfg);
}

char hex_digit(std::uint64_t v) { return "0123456789abcdef"[v & 0xf]; }

std::string hash_hex(std::uint64_t h) {
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) s[static_cast<std::size_t>(i)] = hex_digit(h);
    return s;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

int cmd_train(const std::string& config_file, const std::string& out_dir,
              std::optional<std::uint64_t> seed, const std::string& name, bool fresh) {
    ExperimentConfig cfg = load_experiment_config(config_file);
    if (seed) cfg.seed = *seed;
    if (!name.empty()) cfg.name = name;
    if (cfg.name.empty()) cfg.name = "run-" + hash_hex(cfg.hash());

    const fs::path dir = out_dir.empty() ? fs::path("runs") / cfg.name : fs::path(out_dir);
    std::printf("training %s (config hash %s) -> %s\n", cfg.name.c_str(),
                hash_hex(cfg.hash()).c_str(), dir.string().c_str());

    const TrainCallbacks cb = progress_callbacks("  ");
    const RunArtifacts art = fresh ? run_experiment(cfg, cb) : ensure_trained(cfg, cb);
    write_run_bundle(dir, cfg, art, /*with_elapsed=*/true);

    Report report;
    report.emplace_back("final_loss", csv_num(art.final_loss));
    report.emplace_back("sf_T", csv_num(art.sf_T));
    report.emplace_back("sf_dot_T", csv_num(art.sf_dot_T));
    report.emplace_back("wall_seconds", csv_num(art.wall_seconds));
    report.emplace_back("guard_skips", std::to_string(art.guard_skips));
    report.emplace_back("nonfinite_skips", std::to_string(art.nonfinite_skips));
    report.emplace_back("config_hash", hash_hex(art.config_hash));
    report.emplace_back("from_cache", art.from_cache ? "1" : "0");
    write_report(dir / "report.csv", report);

    std::printf("final loss %.6e  sf(T) %.6f  [%s]\n", art.final_loss, art.sf_T,
                art.from_cache ? "cached" : "trained");
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

int cmd_evaluate(const std::string& run_dir, const std::string& out_dir, int n_tau,
                 int n_y, const std::vector<double>& spots) {
    const fs::path run(run_dir);
    const ExperimentConfig cfg = load_experiment_config(run / "config.cfg");
    const NetworkParams params = load_checkpoint(run / "checkpoint.txt");
    const fs::path dir = out_dir.empty() ? run : fs::path(out_dir);
    fs::create_directories(dir);

    const int nt = n_tau > 0 ? n_tau : cfg.grid.n_tau;
    const int ny = n_y > 0 ? n_y : cfg.grid.n_y;
    write_boundary(dir / "boundary.csv", boundary_rows(params, cfg.problem, nt));
    write_surface(dir / "surface.csv",
                  surface_rows(params, cfg.problem, cfg.mode, nt, ny));

    if (!spots.empty()) {
        // Spot values at full maturity (τ = 1). Below the exercise boundary
        // the option is worth its exercise value; the network models the
        // continuation region y = ln(S/s̄_f)/x_max ≥ 0.
        const double sf = free_boundary(params, cfg.problem, 1.0).first;
        Report report;
        for (double S : spots) {
            double V, Delta;
            if (S <= sf) {
                V = cfg.problem.K - S;
                Delta = -1.0;
            } else {
                const double y = std::log(S / sf) / cfg.problem.x_max;
                const Greeks g = greeks(params, cfg.problem, 1.0, y, cfg.mode);
                V = g.V;
                Delta = g.Delta;
            }
            report.emplace_back("V@S=" + csv_num(S), csv_num(V));
            report.emplace_back("Delta@S=" + csv_num(S), csv_num(Delta));
            std::printf("S=%-8s V=%.6f Delta=%+.6f\n", csv_num(S).c_str(), V, Delta);
        }
        write_report(dir / "report.csv", report);
    }
    std::printf("wrote %s\n", dir.string().c_str());
    return 0;
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

int cmd_oracle(const std::string& problem, const std::string& config_file,
               const std::vector<double>& spots, int steps, bool smoothing, bool psor,
               const std::string& out_dir) {
    ProblemSpec spec;
    if (!config_file.empty())
        spec = load_experiment_config(config_file).problem;
    else
        spec = preset_by_name(problem);

    Report report;
    const LatticeConfig lattice{steps, smoothing};
    for (double S : spots) {
        const double v = binomial_put(spec, S, lattice);
        report.emplace_back("V@S=" + csv_num(S), csv_num(v));
        std::printf("S=%-8s V=%.6f  (binomial, %d steps%s)\n", csv_num(S).c_str(), v,
                    steps, smoothing ? ", smoothed" : "");
    }

    std::vector<BoundaryRow> rows;
    if (psor) {
        const PsorResult fd = psor_boundary(spec);
        // Emit on the model's clock: τ normalized by maturity, slope per
        // normalized τ (central differences; one-sided at the ends).
        const std::size_t n = fd.taus.size();
        rows.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t lo = i > 0 ? i - 1 : 0;
            const std::size_t hi = i + 1 < n ? i + 1 : n - 1;
            rows[i].tau = fd.taus[i] / spec.T;
            rows[i].sf = fd.boundary[i];
            rows[i].sf_dot = (fd.boundary[hi] - fd.boundary[lo]) /
                             ((fd.taus[hi] - fd.taus[lo]) / spec.T);
        }
        report.emplace_back("psor_sf@tau=1", csv_num(fd.boundary.back()));
        std::printf("psor s_f(tau=1) = %.6f\n", fd.boundary.back());
    }

    if (!out_dir.empty()) {
        const fs::path dir(out_dir);
        fs::create_directories(dir);
        write_report(dir / "report.csv", report);
        if (psor) write_boundary(dir / "boundary.csv", rows);
        std::printf("wrote %s\n", dir.string().c_str());
    }
    return 0;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

std::map<std::string, double> load_report_map(const fs::path& file) {
    std::map<std::string, double> out;
    if (!fs::exists(file)) return out;
    std::ifstream in(file, std::ios::binary);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto comma = line.rfind(',');
        if (comma == std::string::npos) continue;
        out[line.substr(0, comma)] = std::strtod(line.c_str() + comma + 1, nullptr);
    }
    return out;
}

struct ErrorStat {
    double max = 0.0;
    double sum = 0.0;
    int n = 0;

    void add(double err) {
        max = std::max(max, std::abs(err));
        sum += std::abs(err);
        ++n;
    }
    double mean() const { return n ? sum / n : 0.0; }
};

int cmd_compare(const std::string& a_dir, const std::string& b_dir,
                const std::string& out_dir) {
    const fs::path a(a_dir), b(b_dir);
    Report report;
    bool compared_any = false;

    // Boundary curves: linear interpolation of B onto A's τ nodes over the
    // common τ range.
    if (fs::exists(a / "boundary.csv") && fs::exists(b / "boundary.csv")) {
        const auto ra = read_numeric_csv(a / "boundary.csv", "tau,sf,sf_dot");
        const auto rb = read_numeric_csv(b / "boundary.csv", "tau,sf,sf_dot");
        const double lo = std::max(ra.front()[0], rb.front()[0]);
        const double hi = std::min(ra.back()[0], rb.back()[0]);
        if (!(lo <= hi))
            throw std::invalid_argument("compare: boundary tau ranges are disjoint");
        ErrorStat stat;
        Report points;
        double err_at_hi = 0.0;
        std::size_t j = 1;
        for (const auto& row : ra) {
            const double tau = row[0];
            if (tau < lo || tau > hi) continue;
            while (j + 1 < rb.size() && rb[j][0] < tau) ++j;
            const auto& b0 = rb[j - 1];
            const auto& b1 = rb[j];
            const double w = b1[0] > b0[0] ? (tau - b0[0]) / (b1[0] - b0[0]) : 0.0;
            const double sf_b = b0[1] + w * (b1[1] - b0[1]);
            const double err = row[1] - sf_b;
            stat.add(err);
            err_at_hi = std::abs(err);
            points.emplace_back("sf_err@tau=" + csv_num(tau), csv_num(err));
        }
        if (stat.n == 0)
            throw std::invalid_argument("compare: no boundary nodes in the common range");
        report.emplace_back("sf_max_abs_err", csv_num(stat.max));
        report.emplace_back("sf_mean_abs_err", csv_num(stat.mean()));
        report.emplace_back("sf_abs_err_at_tau_max", csv_num(err_at_hi));
        report.insert(report.end(), points.begin(), points.end());
        std::printf("boundary: max |err| %.6g  mean %.6g  at tau=%s %.6g\n", stat.max,
                    stat.mean(), csv_num(hi).c_str(), err_at_hi);
        compared_any = true;
    }

    // Surfaces: require identical (τ, y) grids, compare V and Delta.
    if (fs::exists(a / "surface.csv") && fs::exists(b / "surface.csv")) {
        const std::string header = "tau,y,S,P,P_y,P_tau,P_yy,V,Delta,Gamma";
        const auto sa = read_numeric_csv(a / "surface.csv", header);
        const auto sb = read_numeric_csv(b / "surface.csv", header);
        if (sa.size() != sb.size())
            throw std::invalid_argument("compare: surface grids differ in size");
        ErrorStat v_stat, d_stat;
        Report points;
        for (std::size_t i = 0; i < sa.size(); ++i) {
            if (sa[i][0] != sb[i][0] || sa[i][1] != sb[i][1])
                throw std::invalid_argument(
                    "compare: surface grids differ at row " + std::to_string(i + 2));
            const double v_err = sa[i][7] - sb[i][7];
            const double d_err = sa[i][8] - sb[i][8];
            v_stat.add(v_err);
            d_stat.add(d_err);
            // ';' keeps the metric a single CSV column.
            const std::string at = "@tau=" + csv_num(sa[i][0]) + ";y=" + csv_num(sa[i][1]);
            points.emplace_back("V_err" + at, csv_num(v_err));
            points.emplace_back("Delta_err" + at, csv_num(d_err));
        }
        report.emplace_back("V_max_abs_err", csv_num(v_stat.max));
        report.emplace_back("V_mean_abs_err", csv_num(v_stat.mean()));
        report.emplace_back("Delta_max_abs_err", csv_num(d_stat.max));
        report.emplace_back("Delta_mean_abs_err", csv_num(d_stat.mean()));
        report.insert(report.end(), points.begin(), points.end());
        std::printf("surface: V max |err| %.6g mean %.6g; Delta max |err| %.6g mean %.6g\n",
                    v_stat.max, v_stat.mean(), d_stat.max, d_stat.mean());
        compared_any = true;
    }

    // Report values (spot prices etc.): join on metric name.
    {
        const auto ma = load_report_map(a / "report.csv");
        const auto mb = load_report_map(b / "report.csv");
        ErrorStat stat;
        Report points;
        for (const auto& [key, va] : ma) {
            const auto it = mb.find(key);
            if (it == mb.end()) continue;
            const double err = va - it->second;
            stat.add(err);
            points.emplace_back(key + "_abs_err", csv_num(std::abs(err)));
        }
        if (stat.n > 0) {
            report.emplace_back("report_max_abs_err", csv_num(stat.max));
            report.emplace_back("report_mean_abs_err", csv_num(stat.mean()));
            report.insert(report.end(), points.begin(), points.end());
            std::printf("report: %d shared metrics, max |err| %.6g mean %.6g\n", stat.n,
                        stat.max, stat.mean());
            compared_any = true;
        }
    }

    if (!compared_any)
        throw std::invalid_argument(
            "compare: bundles share no comparable files (boundary/surface/report)");
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_report(fs::path(out_dir) / "report.csv", report);
        std::printf("wrote %s\n", (fs::path(out_dir) / "report.csv").string().c_str());
    }
    return 0;
}

// ---------------------------------------------------------------------------
// reproduce
// ---------------------------------------------------------------------------

/// Run (or fetch) one pinned config and add its headline numbers to the
/// table report. Reproduction outputs omit wall-clock columns so that two
/// invocations with a warm cache are byte-identical.
RunArtifacts reproduce_run(const ExperimentConfig& cfg, const fs::path& out,
                           Report& report, const std::string& prefix) {
    std::printf("reproduce %s (hash %s)\n", cfg.name.c_str(), hash_hex(cfg.hash()).c_str());
    const RunArtifacts art = ensure_trained(cfg, progress_callbacks("  "));
    write_run_bundle(out / cfg.name, cfg, art, /*with_elapsed=*/false);
    report.emplace_back(prefix + ".sf_T", csv_num(art.sf_T));
    return art;
}

int cmd_reproduce(const std::string& table, const std::string& out_dir,
                  std::uint64_t seed) {
    const fs::path out = out_dir.empty() ? fs::path("runs") / ("reproduce-" + table)
                                         : fs::path(out_dir);
    fs::create_directories(out);
    Report report;
    const std::vector<std::string> scenarios = {"STM", "MTM", "LTM"};

    if (table == "table2") {
        for (const char* sampling : {"uniform", "random", "stretched"})
            for (const std::string& sc : scenarios)
                reproduce_run(table2_config(sc, sampling, seed), out, report,
                              std::string(sampling) + "." + sc);
    } else if (table == "table3") {
        for (double p : {1.2, 1.5, 1.7})
            for (const std::string& sc : scenarios)
                reproduce_run(table3_config(sc, p, seed), out, report,
                              "p=" + csv_num(p) + "." + sc);
    } else if (table == "table4") {
        for (int n : {20, 30, 40})
            for (const std::string& sc : scenarios)
                reproduce_run(table4_config(sc, n, seed), out, report,
                              "n=" + std::to_string(n) + "." + sc);
    } else if (table == "table8") {
        for (double x_max : {6.0, 4.0, 3.0, 2.0})
            reproduce_run(table8_xmax_config("LTM", x_max, seed), out, report,
                          "x_max=" + csv_num(x_max));
        for (double tau_min : {1e-8, 1e-6, 1e-4, 1e-2})
            reproduce_run(table8_taumin_config("LTM", tau_min, seed), out, report,
                          "tau_min=" + csv_num(tau_min));
    } else if (table == "table9") {
        for (const BoundaryMode mode : {BoundaryMode::CASE1, BoundaryMode::CASE2}) {
            const std::string label = mode == BoundaryMode::CASE1 ? "case1" : "case2";
            const RunArtifacts art =
                reproduce_run(table9_config(mode, seed), out, report, label);
            report.emplace_back(label + ".final_loss", csv_num(art.final_loss));
        }
    } else if (table == "fig4") {
        for (int m : {1, 4, 5, 6, 7, 8}) {
            const std::string label = "method" + std::to_string(m);
            const RunArtifacts art =
                reproduce_run(fig4_config("LTM", m, seed), out, report, label);
            report.emplace_back(label + ".final_loss", csv_num(art.final_loss));
            report.emplace_back(label + ".wall_seconds", csv_num(art.wall_seconds));
        }
    } else {
        throw std::invalid_argument("reproduce: unknown table '" + table +
                                    "' (want table2|table3|table4|table8|table9|fig4)");
    }

    write_report(out / "report.csv", report);
    std::printf("wrote %s\n", (out / "report.csv").string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"American put free-boundary network: train, evaluate, and validate"};
    app.require_subcommand(1);

    // train
    auto* train_cmd = app.add_subcommand("train", "train a network from a config file");
    std::string train_config, train_out, train_name;
    std::optional<std::uint64_t> train_seed;
    bool train_fresh = false;
    train_cmd->add_option("--config", train_config, "experiment config file")->required();
    train_cmd->add_option("--out", train_out, "output bundle directory (default runs/<name>)");
    train_cmd->add_option("--seed", train_seed, "override [run] seed");
    train_cmd->add_option("--name", train_name, "override [run] name");
    train_cmd->add_flag("--fresh", train_fresh, "always retrain, bypassing the run cache");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a trained run bundle");
    std::string eval_run, eval_out;
    int eval_ntau = 0, eval_ny = 0;
    std::vector<double> eval_spots;
    eval_cmd->add_option("--run", eval_run, "bundle with config.cfg + checkpoint.txt")
        ->required();
    eval_cmd->add_option("--out", eval_out, "output directory (default: the bundle)");
    eval_cmd->add_option("--n-tau", eval_ntau, "evaluation grid nodes in tau");
    eval_cmd->add_option("--n-y", eval_ny, "evaluation grid nodes in y");
    eval_cmd->add_option("--spots", eval_spots, "asset prices to value at tau=1")
        ->delimiter(',');

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "binomial / PSOR reference pricers");
    std::string oracle_problem = "ltm", oracle_config, oracle_out;
    std::vector<double> oracle_spots = {100.0};
    int oracle_steps = 10000;
    bool oracle_smoothing = false, oracle_psor = false;
    oracle_cmd->add_option("--problem", oracle_problem, "preset: stm|mtm|ltm");
    oracle_cmd->add_option("--config", oracle_config, "read [problem] from a config file");
    oracle_cmd->add_option("--s0", oracle_spots, "spot prices to value")->delimiter(',');
    oracle_cmd->add_option("--steps", oracle_steps, "binomial tree depth");
    oracle_cmd->add_flag("--smoothing", oracle_smoothing, "Richardson-extrapolated lattice");
    oracle_cmd->add_flag("--psor", oracle_psor, "also solve the PSOR boundary curve");
    oracle_cmd->add_option("--out", oracle_out, "write report.csv (+ boundary.csv)");

    // compare
    auto* compare_cmd = app.add_subcommand("compare", "error report between two bundles");
    std::string cmp_a, cmp_b, cmp_out;
    compare_cmd->add_option("--a", cmp_a, "first bundle directory")->required();
    compare_cmd->add_option("--b", cmp_b, "second bundle directory")->required();
    compare_cmd->add_option("--out", cmp_out, "write the error report.csv here");

    // reproduce
    auto* repro_cmd = app.add_subcommand("reproduce", "regenerate a published table");
    std::string repro_table, repro_out;
    std::uint64_t repro_seed = 1;
    repro_cmd->add_option("table", repro_table, "table2|table3|table4|table8|table9|fig4")
        ->required();
    repro_cmd->add_option("--out", repro_out, "output directory (default runs/reproduce-*)");
    repro_cmd->add_option("--seed", repro_seed, "training seed for every run");

    try {
        app.parse(argc, argv);
        if (train_cmd->parsed())
            return cmd_train(train_config, train_out, train_seed, train_name, train_fresh);
        if (eval_cmd->parsed())
            return cmd_evaluate(eval_run, eval_out, eval_ntau, eval_ny, eval_spots);
        if (oracle_cmd->parsed())
            return cmd_oracle(oracle_problem, oracle_config, oracle_spots, oracle_steps,
                              oracle_smoothing, oracle_psor, oracle_out);
        if (compare_cmd->parsed()) return cmd_compare(cmp_a, cmp_b, cmp_out);
        if (repro_cmd->parsed()) return cmd_reproduce(repro_table, repro_out, repro_seed);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "aborted: %s\n", e.what());
        return 3;
    }
}
