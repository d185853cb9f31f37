/**
 * @file experiment.cpp
 * @brief Pinned experiment definitions, the checkpoint cache, and CSV-row
 *        evaluation helpers.
 */

#include "fbnet/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace fbnet {

namespace fs = std::filesystem;

void GridSpec::validate() const {
    if (kind != "uniform" && kind != "random" && kind != "stretched")
        throw std::invalid_argument("sampler.kind: unknown kind \"" + kind +
                                    "\" (uniform|random|stretched)");
    if (n_tau < 2 || n_y < 2)
        throw std::invalid_argument("sampler.n_tau/n_y: need at least 2 nodes per axis");
    if (kind == "stretched" && !(p >= 1.0))
        throw std::invalid_argument("sampler.p: stretch exponent must be >= 1");
}

Grid make_grid(const GridSpec& gs, const ProblemSpec& spec) {
    gs.validate();
    if (gs.kind == "uniform") return uniform_grid(gs.n_tau, gs.n_y, spec.tau_min);
    if (gs.kind == "random")
        return random_structured_grid(gs.n_tau, gs.n_y, gs.seed, spec.tau_min);
    return stretched_grid(gs.n_tau, gs.n_y, gs.p, spec.tau_min);
}

void ExperimentConfig::validate() const {
    problem.validate();
    grid.validate();
    arch.validate();
    adam.validate();
    if (!(init_stddev > 0.0) || !std::isfinite(init_stddev))
        throw std::invalid_argument("network.init_stddev must be positive");
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream os;
    const auto num = [](double v) { return csv_num(v); };
    os << "problem.K=" << num(problem.K) << '\n'
       << "problem.T=" << num(problem.T) << '\n'
       << "problem.r=" << num(problem.r) << '\n'
       << "problem.sigma=" << num(problem.sigma) << '\n'
       << "problem.x_max=" << num(problem.x_max) << '\n'
       << "problem.tau_min=" << num(problem.tau_min) << '\n'
       << "grid.kind=" << grid.kind << '\n'
       << "grid.n_tau=" << grid.n_tau << '\n'
       << "grid.n_y=" << grid.n_y << '\n';
    if (grid.kind == "stretched") os << "grid.p=" << num(grid.p) << '\n';
    if (grid.kind == "random") os << "grid.seed=" << grid.seed << '\n';
    os << "arch=";
    for (std::size_t i = 0; i < arch.hidden.size(); ++i)
        os << (i ? "," : "") << arch.hidden[i];
    os << '\n'
       << "adam.lr0=" << num(adam.lr0) << '\n'
       << "adam.beta1=" << num(adam.beta1) << '\n'
       << "adam.beta2=" << num(adam.beta2) << '\n'
       << "adam.eps=" << num(adam.eps) << '\n'
       << "adam.steps=" << adam.steps << '\n'
       << "adam.decay_step=" << adam.decay_step << '\n'
       << "adam.decay_rate=" << num(adam.decay_rate) << '\n'
       << "adam.smooth_decay=" << (adam.smooth_decay ? 1 : 0) << '\n'
       << "adam.display_step=" << adam.display_step << '\n'
       << "mode=" << (mode == BoundaryMode::CASE1 ? "case1" : "case2") << '\n'
       << "seed=" << seed << '\n'
       << "init_stddev=" << num(init_stddev) << '\n';
    return os.str();
}

std::uint64_t ExperimentConfig::hash() const {
    std::uint64_t h = 14695981039346656037ULL;  // FNV-1a 64-bit
    for (const unsigned char c : canonical()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

Architecture method_arch(int method) {
    Architecture a;
    switch (method) {
        case 1:
        case 2:
        case 3: a.hidden = {512, 256, 128, 64}; break;
        case 4: a.hidden = {200, 200, 200, 200}; break;
        case 5: a.hidden = {200, 200, 200, 200, 200}; break;
        case 6: a.hidden = {200, 200, 200, 200, 200, 200}; break;
        case 7: a.hidden = {256, 128, 64, 32}; break;
        case 8: a.hidden = {768, 384, 192, 96}; break;
        default: throw std::invalid_argument("method_arch: method must be 1..8");
    }
    return a;
}

AdamHyper method_adam(int method) {
    if (method < 1 || method > 8)
        throw std::invalid_argument("method_adam: method must be 1..8");
    AdamHyper h;  // defaults are Method 1: lr 0.001, 20000 steps, display 1000,
                  // decay 2000 × 0.85, β₁ 0.99, β₂ 0.999, ε 1e-8
    if (method == 2) {
        h.decay_step = 0;  // no decay
        h.beta1 = 0.90;
    } else if (method == 3) {
        h.beta1 = 0.90;
    }
    return h;
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

ExperimentConfig base_config(const std::string& scenario, int method) {
    ExperimentConfig cfg;
    cfg.problem = preset_by_name(scenario);
    cfg.arch = method_arch(method);
    cfg.adam = method_adam(method);
    return cfg;
}

}  // namespace

ExperimentConfig table2_config(const std::string& scenario, const std::string& sampling,
                               std::uint64_t seed) {
    ExperimentConfig cfg = base_config(scenario, 1);
    cfg.grid.kind = sampling;
    cfg.grid.n_tau = cfg.grid.n_y = 100;
    cfg.grid.p = 2.0;
    cfg.grid.seed = 7;
    cfg.seed = seed;
    cfg.name = "table2-" + sampling + "-" + lower(scenario) + "-s" + std::to_string(seed);
    cfg.validate();
    return cfg;
}

ExperimentConfig table3_config(const std::string& scenario, double p, std::uint64_t seed) {
    ExperimentConfig cfg = base_config(scenario, 1);
    cfg.grid.p = p;
    cfg.seed = seed;
    std::ostringstream nm;
    nm << "table3-p" << p << "-" << lower(scenario) << "-s" << seed;
    cfg.name = nm.str();
    cfg.validate();
    return cfg;
}

ExperimentConfig table4_config(const std::string& scenario, int n, std::uint64_t seed) {
    ExperimentConfig cfg = base_config(scenario, 1);
    cfg.grid.n_tau = cfg.grid.n_y = n;
    cfg.grid.p = 2.5;
    cfg.seed = seed;
    cfg.name = "table4-" + std::to_string(n) + "x" + std::to_string(n) + "-" +
               lower(scenario) + "-s" + std::to_string(seed);
    cfg.validate();
    return cfg;
}

ExperimentConfig table8_xmax_config(const std::string& scenario, double x_max,
                                    std::uint64_t seed) {
    ExperimentConfig cfg = base_config(scenario, 7);
    cfg.problem.x_max = x_max;
    cfg.grid.p = 1.7;
    cfg.seed = seed;
    std::ostringstream nm;
    nm << "table8-xmax" << x_max << "-" << lower(scenario) << "-s" << seed;
    cfg.name = nm.str();
    cfg.validate();
    return cfg;
}

ExperimentConfig table8_taumin_config(const std::string& scenario, double tau_min,
                                      std::uint64_t seed) {
    ExperimentConfig cfg = base_config(scenario, 7);
    cfg.problem.tau_min = tau_min;
    cfg.grid.p = 1.7;
    cfg.seed = seed;
    std::ostringstream nm;
    nm << "table8-taumin" << tau_min << "-" << lower(scenario) << "-s" << seed;
    cfg.name = nm.str();
    cfg.validate();
    return cfg;
}

ExperimentConfig table9_config(BoundaryMode mode, std::uint64_t seed) {
    ExperimentConfig cfg = base_config("LTM", 1);
    cfg.grid.p = 2.5;
    cfg.mode = mode;
    cfg.seed = seed;
    cfg.name = std::string("table9-") + (mode == BoundaryMode::CASE1 ? "case1" : "case2") +
               "-ltm-s" + std::to_string(seed);
    cfg.validate();
    return cfg;
}

ExperimentConfig fig4_config(const std::string& scenario, int method, std::uint64_t seed) {
    ExperimentConfig cfg = base_config(scenario, method);
    cfg.grid.p = 1.7;
    cfg.seed = seed;
    cfg.name = "fig4-m" + std::to_string(method) + "-" + lower(scenario) + "-s" +
               std::to_string(seed);
    cfg.validate();
    return cfg;
}

fs::path cache_dir() {
    if (const char* env = std::getenv("FBNET_CACHE_DIR"); env && *env) return env;
    return fs::path("artifacts") / "cache";
}

namespace {

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string meta_text(const ExperimentConfig& cfg, const RunArtifacts& art) {
    std::ostringstream os;
    os << "[config]\n"
       << cfg.canonical() << "[result]\n"
       << "name=" << cfg.name << '\n'
       << "final_loss=" << csv_num(art.final_loss) << '\n'
       << "sf_T=" << csv_num(art.sf_T) << '\n'
       << "sf_dot_T=" << csv_num(art.sf_dot_T) << '\n'
       << "wall_seconds=" << csv_num(art.wall_seconds) << '\n'
       << "guard_skips=" << art.guard_skips << '\n'
       << "nonfinite_skips=" << art.nonfinite_skips << '\n';
    return os.str();
}

/// Splits meta.txt, checks the [config] block against `canonical`, and
/// returns the [result] key=value pairs.
std::vector<std::pair<std::string, std::string>> parse_meta(
    const fs::path& file, const std::string& canonical) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cache: cannot read " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    const std::string cfg_want = "[config]\n" + canonical + "[result]\n";
    if (text.rfind(cfg_want, 0) != 0)
        throw std::runtime_error("cache: config text mismatch in " + file.string() +
                                 " (stale or colliding entry)");

    std::vector<std::pair<std::string, std::string>> kv;
    std::istringstream rest(text.substr(cfg_want.size()));
    std::string line;
    while (std::getline(rest, line)) {
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv.emplace_back(line.substr(0, eq), line.substr(eq + 1));
    }
    return kv;
}

double meta_num(const std::vector<std::pair<std::string, std::string>>& kv,
                const std::string& key, const fs::path& file) {
    for (const auto& [k, v] : kv)
        if (k == key) return std::strtod(v.c_str(), nullptr);
    throw std::runtime_error("cache: key \"" + key + "\" missing in " + file.string());
}

}  // namespace

RunArtifacts run_experiment(const ExperimentConfig& config, const TrainCallbacks& callbacks) {
    config.validate();
    const Grid grid = make_grid(config.grid, config.problem);

    const auto t0 = std::chrono::steady_clock::now();
    TrainResult res = train(config.problem, grid, config.arch, config.mode, config.adam,
                            config.seed, config.init_stddev, callbacks);
    const auto t1 = std::chrono::steady_clock::now();

    RunArtifacts art;
    art.params = std::move(res.params);
    art.history = std::move(res.history);
    art.final_loss = res.final_loss;
    std::tie(art.sf_T, art.sf_dot_T) = free_boundary(art.params, config.problem, 1.0);
    art.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    art.guard_skips = res.guard_skips;
    art.nonfinite_skips = res.nonfinite_skips;
    art.config_hash = config.hash();
    art.from_cache = false;
    return art;
}

RunArtifacts ensure_trained(const ExperimentConfig& config, const TrainCallbacks& callbacks) {
    config.validate();
    const fs::path dir = cache_dir() / hash_hex(config.hash());
    const fs::path meta_file = dir / "meta.txt";
    const fs::path ckpt_file = dir / "checkpoint.txt";
    const fs::path hist_file = dir / "history.csv";

    if (fs::exists(meta_file) && fs::exists(ckpt_file)) {
        const auto kv = parse_meta(meta_file, config.canonical());
        RunArtifacts art;
        art.params = load_checkpoint(ckpt_file);
        if (art.params.arch.hidden != config.arch.hidden)
            throw std::runtime_error("cache: checkpoint architecture mismatch in " +
                                     dir.string());
        for (const auto& row : read_numeric_csv(hist_file, "step,lr,loss,elapsed"))
            art.history.push_back(TrainRecord{static_cast<int>(row.at(0)), row.at(1),
                                              row.at(2), row.at(3)});
        art.final_loss = meta_num(kv, "final_loss", meta_file);
        art.sf_T = meta_num(kv, "sf_T", meta_file);
        art.sf_dot_T = meta_num(kv, "sf_dot_T", meta_file);
        art.wall_seconds = meta_num(kv, "wall_seconds", meta_file);
        art.guard_skips = static_cast<int>(meta_num(kv, "guard_skips", meta_file));
        art.nonfinite_skips =
            static_cast<int>(meta_num(kv, "nonfinite_skips", meta_file));
        art.config_hash = config.hash();
        art.from_cache = true;
        return art;
    }

    // Miss: train into a scratch directory, then publish it with one rename.
    // The in-progress history stream makes long runs observable.
    fs::create_directories(cache_dir());
    const fs::path tmp = dir.string() + ".tmp-" + std::to_string(::getpid());
    fs::create_directories(tmp);

    std::ofstream hist_out(tmp / "history.csv", std::ios::binary);
    hist_out << "step,lr,loss,elapsed\n";
    TrainCallbacks chained;
    chained.on_record = [&](const TrainRecord& r) {
        hist_out << r.step << ',' << csv_num(r.lr) << ',' << csv_num(r.loss) << ','
                 << csv_num(r.elapsed_s) << '\n';
        hist_out.flush();
        if (callbacks.on_record) callbacks.on_record(r);
    };
    chained.on_diagnostic = callbacks.on_diagnostic;

    RunArtifacts art = run_experiment(config, chained);
    hist_out.close();

    save_checkpoint(art.params, tmp / "checkpoint.txt");
    {
        std::ofstream meta(tmp / "meta.txt", std::ios::binary);
        meta << meta_text(config, art);
        if (!meta) throw std::runtime_error("cache: cannot write " + meta_file.string());
    }

    std::error_code ec;
    fs::rename(tmp, dir, ec);
    if (ec) {
        // Lost a race (or leftover dir): prefer the published entry.
        fs::remove_all(tmp);
        if (!fs::exists(meta_file))
            throw std::runtime_error("cache: cannot publish " + dir.string() + ": " +
                                     ec.message());
    }
    return art;
}

std::vector<BoundaryRow> boundary_rows(const NetworkParams& params,
                                       const ProblemSpec& spec, int n_tau) {
    const Grid g = uniform_grid(n_tau, 2, spec.tau_min);
    std::vector<BoundaryRow> rows;
    rows.reserve(g.taus.size());
    for (const double tau : g.taus) {
        const auto [sf, sf_dot] = free_boundary(params, spec, tau);
        rows.push_back(BoundaryRow{tau, sf, sf_dot});
    }
    return rows;
}

std::vector<SurfaceRow> surface_rows(const NetworkParams& params, const ProblemSpec& spec,
                                     BoundaryMode mode, int n_tau, int n_y) {
    const Grid g = uniform_grid(n_tau, n_y, spec.tau_min);
    std::vector<SurfaceRow> rows;
    rows.reserve(g.taus.size() * g.ys.size());
    for (const double tau : g.taus) {
        for (const double y : g.ys) {
            const AuxEval aux = evaluate(params, spec, tau, y, mode);
            const Greeks gk = greeks(params, spec, tau, y, mode);
            rows.push_back(SurfaceRow{tau, y, gk.S, aux.p, aux.p_y, aux.p_tau, aux.p_yy,
                                      gk.V, gk.Delta, gk.Gamma});
        }
    }
    return rows;
}

}  // namespace fbnet
