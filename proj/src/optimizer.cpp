#include "fbnet/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace fbnet {

void AdamHyper::validate() const {
    if (!(lr0 > 0.0)) throw std::invalid_argument("trainer.lr0 must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0))
        throw std::invalid_argument("trainer.beta1 must lie in [0,1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0))
        throw std::invalid_argument("trainer.beta2 must lie in [0,1)");
    if (!(eps > 0.0)) throw std::invalid_argument("trainer.eps must be positive");
    if (steps < 1) throw std::invalid_argument("trainer.steps must be at least 1");
    if (decay_step < 0) throw std::invalid_argument("trainer.decay_step must be >= 0");
    if (!(decay_rate > 0.0 && decay_rate <= 1.0))
        throw std::invalid_argument("trainer.decay_rate must lie in (0,1]");
    if (display_step < 1) throw std::invalid_argument("trainer.display_step must be >= 1");
}

double lr_at(const AdamHyper& hyper, int step) {
    if (hyper.decay_step <= 0) return hyper.lr0;
    if (hyper.smooth_decay)
        return hyper.lr0 *
               std::pow(hyper.decay_rate,
                        static_cast<double>(step) / static_cast<double>(hyper.decay_step));
    return hyper.lr0 *
           std::pow(hyper.decay_rate, static_cast<double>(step / hyper.decay_step));
}

AdamState AdamState::zeros_like(const NetworkParams& params) {
    AdamState st;
    st.m = GradBlob::zeros_like(params);
    st.v = GradBlob::zeros_like(params);
    st.t = 0;
    return st;
}

namespace {

bool all_finite(const GradBlob& g) {
    for (const auto& W : g.W)
        if (!W.allFinite()) return false;
    for (const auto& b : g.b)
        if (!b.allFinite()) return false;
    return true;
}

}  // namespace

bool adam_step(NetworkParams& params, AdamState& state, const GradBlob& grad,
               const AdamHyper& hyper, double lr) {
    if (!std::isfinite(lr) || !all_finite(grad)) return false;

    const int t = state.t + 1;
    const double bc1 = 1.0 - std::pow(hyper.beta1, t);
    const double bc2 = 1.0 - std::pow(hyper.beta2, t);

    for (std::size_t l = 0; l < params.W.size(); ++l) {
        auto& m = state.m.W[l];
        auto& v = state.v.W[l];
        const auto& g = grad.W[l];
        m = hyper.beta1 * m + (1.0 - hyper.beta1) * g;
        v.array() = hyper.beta2 * v.array() + (1.0 - hyper.beta2) * g.array().square();
        params.W[l].array() -=
            lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + hyper.eps);
    }
    for (std::size_t l = 0; l < params.b.size(); ++l) {
        auto& m = state.m.b[l];
        auto& v = state.v.b[l];
        const auto& g = grad.b[l];
        m = hyper.beta1 * m + (1.0 - hyper.beta1) * g;
        v.array() = hyper.beta2 * v.array() + (1.0 - hyper.beta2) * g.array().square();
        params.b[l].array() -=
            lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + hyper.eps);
    }
    state.t = t;
    return true;
}

TrainResult train(const ProblemSpec& spec, const Grid& grid, const Architecture& arch,
                  BoundaryMode mode, const AdamHyper& hyper, std::uint64_t seed,
                  double init_stddev, const TrainCallbacks& callbacks) {
    spec.validate();
    arch.validate();
    hyper.validate();

    TrainResult out;
    out.params = init_params(arch, seed, init_stddev);
    LossEvaluator eval(spec, grid, arch, mode);
    AdamState state = AdamState::zeros_like(out.params);
    GradBlob grad = GradBlob::zeros_like(out.params);

    const auto t0 = std::chrono::steady_clock::now();
    const auto elapsed = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    };
    const auto record = [&](int step, double lr, double loss) {
        const TrainRecord rec{step, lr, loss, elapsed()};
        out.history.push_back(rec);
        if (callbacks.on_record) callbacks.on_record(rec);
    };
    const auto diagnose = [&](const std::string& msg) {
        if (callbacks.on_diagnostic) callbacks.on_diagnostic(msg);
    };

    for (int step = 0; step < hyper.steps; ++step) {
        const double lr = lr_at(hyper, step);
        LossDiagnostics diag;
        const double loss = eval.loss_and_gradient(out.params, grad, &diag);
        if (step % hyper.display_step == 0) record(step, lr, loss);

        if (diag.guard_tripped) {
            ++out.guard_skips;
            std::ostringstream msg;
            msg << "step " << step << ": |s_f| guard tripped at tau = " << diag.tau
                << " (s_f = " << diag.sf << "); update skipped";
            diagnose(msg.str());
            continue;
        }
        if (!adam_step(out.params, state, grad, hyper, lr)) {
            ++out.nonfinite_skips;
            std::ostringstream msg;
            msg << "step " << step << ": non-finite gradient; update skipped";
            diagnose(msg.str());
            continue;
        }
    }

    out.final_loss = eval.loss(out.params);
    record(hyper.steps, lr_at(hyper, hyper.steps - 1), out.final_loss);
    return out;
}

}  // namespace fbnet
