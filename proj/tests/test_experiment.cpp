/**
 * @file test_experiment.cpp
 * @brief Pinned experiment configs, canonical hashing, the checkpoint cache,
 *        and the CSV-row evaluation helpers.
 */

#include "fbnet/experiment.hpp"

#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace fbnet;
namespace fs = std::filesystem;

namespace {

/// Small, fast config: 8-unit net, 6×5 uniform grid, 4 steps.
ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.name = "tiny";
    cfg.problem = preset_ltm();
    cfg.problem.tau_min = 0.05;  // keep every interior point live
    cfg.grid.kind = "uniform";
    cfg.grid.n_tau = 6;
    cfg.grid.n_y = 5;
    cfg.arch.hidden = {8};
    cfg.adam.steps = 4;
    cfg.adam.display_step = 2;
    cfg.seed = 3;
    return cfg;
}

/// Fresh scratch cache for one test body; removed on destruction.
struct ScopedCache {
    fs::path dir;
    ScopedCache() {
        dir = fs::temp_directory_path() /
              ("fbnet-test-cache-" + std::to_string(::getpid()));
        fs::remove_all(dir);
        ::setenv("FBNET_CACHE_DIR", dir.c_str(), 1);
    }
    ~ScopedCache() {
        fs::remove_all(dir);
        ::unsetenv("FBNET_CACHE_DIR");
    }
};

}  // namespace

TEST_CASE("method presets match the hyperparameter tables") {
    CHECK(method_arch(1).hidden == std::vector<int>{512, 256, 128, 64});
    CHECK(method_arch(4).hidden == std::vector<int>{200, 200, 200, 200});
    CHECK(method_arch(5).hidden == std::vector<int>{200, 200, 200, 200, 200});
    CHECK(method_arch(6).hidden == std::vector<int>{200, 200, 200, 200, 200, 200});
    CHECK(method_arch(7).hidden == std::vector<int>{256, 128, 64, 32});
    CHECK(method_arch(8).hidden == std::vector<int>{768, 384, 192, 96});
    CHECK_THROWS_AS(method_arch(0), std::invalid_argument);
    CHECK_THROWS_AS(method_arch(9), std::invalid_argument);

    const AdamHyper m1 = method_adam(1);
    CHECK(m1.lr0 == 0.001);
    CHECK(m1.beta1 == 0.99);
    CHECK(m1.beta2 == 0.999);
    CHECK(m1.eps == 1e-8);
    CHECK(m1.steps == 20000);
    CHECK(m1.decay_step == 2000);
    CHECK(m1.decay_rate == 0.85);
    CHECK(m1.display_step == 1000);

    const AdamHyper m2 = method_adam(2);  // no decay, β₁ = 0.9
    CHECK(m2.decay_step == 0);
    CHECK(m2.beta1 == 0.90);
    const AdamHyper m3 = method_adam(3);  // decay kept, β₁ = 0.9
    CHECK(m3.decay_step == 2000);
    CHECK(m3.beta1 == 0.90);
    CHECK(method_adam(7).beta1 == 0.99);
}

TEST_CASE("pinned table configs carry the published settings") {
    const ExperimentConfig t2 = table2_config("LTM", "stretched", 1);
    CHECK(t2.grid.n_tau == 100);
    CHECK(t2.grid.n_y == 100);
    CHECK(t2.grid.p == 2.0);
    CHECK(t2.arch.hidden == method_arch(1).hidden);
    CHECK(t2.problem.T == 3.0);
    CHECK(t2.mode == BoundaryMode::CASE1);
    CHECK(t2.name == "table2-stretched-ltm-s1");

    const ExperimentConfig t3 = table3_config("stm", 1.5, 2);
    CHECK(t3.grid.n_tau == 60);
    CHECK(t3.grid.p == 1.5);
    CHECK(t3.problem.T == 0.5);

    const ExperimentConfig t4 = table4_config("MTM", 30, 1);
    CHECK(t4.grid.n_tau == 30);
    CHECK(t4.grid.p == 2.5);

    const ExperimentConfig t8x = table8_xmax_config("LTM", 4.0, 1);
    CHECK(t8x.problem.x_max == 4.0);
    CHECK(t8x.problem.tau_min == 1e-8);
    CHECK(t8x.grid.p == 1.7);
    CHECK(t8x.arch.hidden == method_arch(7).hidden);

    const ExperimentConfig t8t = table8_taumin_config("LTM", 1e-4, 1);
    CHECK(t8t.problem.tau_min == 1e-4);
    CHECK(t8t.problem.x_max == 6.0);

    const ExperimentConfig t9 = table9_config(BoundaryMode::CASE2, 1);
    CHECK(t9.grid.p == 2.5);
    CHECK(t9.grid.n_tau == 60);
    CHECK(t9.mode == BoundaryMode::CASE2);
    CHECK(t9.problem.T == 3.0);

    const ExperimentConfig f4 = fig4_config("MTM", 7, 1);
    CHECK(f4.arch.hidden == method_arch(7).hidden);
    CHECK(f4.grid.p == 1.7);

    CHECK_THROWS(table2_config("XTM", "stretched", 1));
    CHECK_THROWS(table2_config("LTM", "hexagonal", 1));
}

TEST_CASE("canonical text and hash identify the run") {
    const ExperimentConfig a = table9_config(BoundaryMode::CASE1, 1);
    ExperimentConfig b = a;
    CHECK(a.canonical() == b.canonical());
    CHECK(a.hash() == b.hash());

    b.seed = 2;
    CHECK(a.hash() != b.hash());

    // The label is not part of the identity: the shared Method-7 run keeps
    // one hash whichever table constructs it.
    ExperimentConfig x6 = table8_xmax_config("LTM", 6.0, 1);
    ExperimentConfig tm8 = table8_taumin_config("LTM", 1e-8, 1);
    CHECK(x6.name != tm8.name);
    CHECK(x6.canonical() == tm8.canonical());
    CHECK(x6.hash() == tm8.hash());

    // Grid-kind-specific keys appear only for their kind.
    ExperimentConfig u = a;
    u.grid.kind = "uniform";
    CHECK(u.canonical().find("grid.p=") == std::string::npos);
    CHECK(u.canonical().find("grid.seed=") == std::string::npos);
    ExperimentConfig r = a;
    r.grid.kind = "random";
    CHECK(r.canonical().find("grid.seed=7") != std::string::npos);
    CHECK(r.canonical().find("grid.p=") == std::string::npos);
}

TEST_CASE("make_grid dispatches to the sampler kinds") {
    const ProblemSpec spec = preset_stm();
    GridSpec gs;
    gs.kind = "uniform";
    gs.n_tau = 5;
    gs.n_y = 4;
    const Grid u = make_grid(gs, spec);
    CHECK(u.taus == uniform_grid(5, 4, spec.tau_min).taus);

    gs.kind = "stretched";
    gs.p = 2.0;
    CHECK(make_grid(gs, spec).taus == stretched_grid(5, 4, 2.0, spec.tau_min).taus);

    gs.kind = "random";
    gs.seed = 11;
    CHECK(make_grid(gs, spec).ys == random_structured_grid(5, 4, 11, spec.tau_min).ys);

    gs.kind = "triangular";
    CHECK_THROWS_AS(make_grid(gs, spec), std::invalid_argument);
}

TEST_CASE("run_experiment trains deterministically and reports the boundary") {
    const ExperimentConfig cfg = tiny_config();
    const RunArtifacts a = run_experiment(cfg);
    const RunArtifacts b = run_experiment(cfg);
    CHECK(a.final_loss == b.final_loss);
    CHECK(a.params.W[0] == b.params.W[0]);
    CHECK(a.params.b[1] == b.params.b[1]);
    CHECK(a.from_cache == false);
    CHECK(a.config_hash == cfg.hash());
    CHECK(a.history.size() == 3);  // steps 0, 2, 4

    const auto [sf, sf_dot] = free_boundary(a.params, cfg.problem, 1.0);
    CHECK(a.sf_T == sf);
    CHECK(a.sf_dot_T == sf_dot);
}

TEST_CASE("ensure_trained caches and reloads bit-identical artifacts") {
    ScopedCache cache;
    const ExperimentConfig cfg = tiny_config();

    const RunArtifacts fresh = ensure_trained(cfg);
    CHECK(fresh.from_cache == false);

    const RunArtifacts cached = ensure_trained(cfg);
    CHECK(cached.from_cache == true);
    CHECK(cached.final_loss == fresh.final_loss);
    CHECK(cached.sf_T == fresh.sf_T);
    CHECK(cached.sf_dot_T == fresh.sf_dot_T);
    CHECK(cached.guard_skips == fresh.guard_skips);
    CHECK(cached.params.W[0] == fresh.params.W[0]);
    CHECK(cached.params.W[1] == fresh.params.W[1]);
    CHECK(cached.params.b[0] == fresh.params.b[0]);
    CHECK(cached.history.size() == fresh.history.size());
    for (std::size_t i = 0; i < fresh.history.size(); ++i) {
        CHECK(cached.history[i].step == fresh.history[i].step);
        CHECK(cached.history[i].loss == fresh.history[i].loss);
        CHECK(cached.history[i].lr == fresh.history[i].lr);
    }

    // A different seed gets its own entry.
    ExperimentConfig other = cfg;
    other.seed = 4;
    CHECK(ensure_trained(other).from_cache == false);

    // A stale entry whose stored config text disagrees is rejected.
    const fs::path meta = cache.dir / [&] {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(cfg.hash()));
        return std::string(buf);
    }() / "meta.txt";
    {
        std::ofstream out(meta, std::ios::binary);
        out << "[config]\nproblem.K=999\n[result]\nfinal_loss=0\n";
    }
    CHECK_THROWS_AS(ensure_trained(cfg), std::runtime_error);
}

TEST_CASE("evaluation helpers emit well-formed rows") {
    const ExperimentConfig cfg = tiny_config();
    const RunArtifacts art = run_experiment(cfg);

    const auto brows = boundary_rows(art.params, cfg.problem, 7);
    REQUIRE(brows.size() == 7);
    CHECK(brows.front().tau == cfg.problem.tau_min);
    CHECK(brows.back().tau == 1.0);
    CHECK(brows.back().sf == art.sf_T);

    const auto srows = surface_rows(art.params, cfg.problem, cfg.mode, 4, 5);
    REQUIRE(srows.size() == 20);
    // y = 0 rows sit on the boundary: S = s̄_f and Δ = −1 exactly.
    const auto [sf0, sfd0] = free_boundary(art.params, cfg.problem, cfg.problem.tau_min);
    CHECK(srows[0].tau == cfg.problem.tau_min);
    CHECK(srows[0].y == 0.0);
    CHECK(srows[0].S == sf0);
    CHECK(srows[0].Delta == -1.0);
    // V = x_max·𝒫 everywhere.
    for (const SurfaceRow& r : srows) CHECK(r.V == cfg.problem.x_max * r.P);
}
