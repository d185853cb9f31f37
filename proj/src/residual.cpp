#include "fbnet/residual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

namespace fbnet {

double pde_residual(const ProblemSpec& spec, const AuxEval& aux) {
    if (!(std::abs(aux.sf) >= 1e-8 * spec.K))
        throw BoundaryGuardError("pde_residual: |s_f| fell below 1e-8*K");
    const double sig2 = spec.sigma * spec.sigma;
    const double x = spec.x_max;
    const double k_yy = sig2 / (2.0 * x * x);
    const double c1 = (spec.r - 0.5 * sig2 + aux.sf_dot / (spec.T * aux.sf)) / x;
    return aux.p_tau / spec.T - k_yy * aux.p_yy - c1 * aux.p_y + spec.r * aux.p;
}

namespace {

/// Adjoints of one point's loss share w.r.t. its own jet lanes and the
/// row-shared boundary quantities (everything multiplied by w = 2r/N).
struct PointBackward {
    double n0 = 0.0, nt = 0.0, ny = 0.0, nyy = 0.0;   // this point's jet lanes
    double abar = 0.0, aregbar = 0.0, adotbar = 0.0;  // row coefficients a, a_reg, a′
    double sfbar = 0.0, sfdotbar = 0.0;               // row values s̄_f, s̄′_f
};

/**
 * Residual at one grid point; when bk is given, also the adjoint seeds of
 * this point's loss share wscale·r², mirroring assemble_aux line by line.
 * The Gaussian prefactor E carries no parameter dependence, so the sweep
 * treats it as a constant.
 */
double point_residual(const ProblemSpec& spec, double tau, double y,
                      const NetJet& pj, const BoundaryTerms& bt, double wscale,
                      PointBackward* bk) {
    const AuxEval aux = assemble_aux(spec, tau, y, pj, bt);
    const double r = pde_residual(spec, aux);
    if (bk == nullptr) return r;

    const double q = bt.q;
    const double ex = -0.5 * y * y * q;
    if (ex < -745.0) return r;  // exact-zero point: r == 0 and every seed == 0

    const double x = spec.x_max;
    const double T = spec.T;
    const double sig2 = spec.sigma * spec.sigma;
    const double k_yy = sig2 / (2.0 * x * x);
    const double c1 = (spec.r - 0.5 * sig2 + bt.sf_dot / (T * bt.sf)) / x;

    const double E = std::exp(ex);
    const double w = wscale * r;  // ∂loss/∂r at this point

    // ∂r/∂{𝒫, 𝒫_y, 𝒫_τ, 𝒫_yy}
    const double pbar = w * spec.r;
    const double pybar = -w * c1;
    const double ptbar = w / T;
    const double pyybar = -w * k_yy;

    // r's own s̄-dependence through the convection coefficient c1
    bk->sfdotbar += -w * aux.p_y / (x * T * bt.sf);
    bk->sfbar += w * aux.p_y * bt.sf_dot / (x * T * bt.sf * bt.sf);

    // through 𝒫 = E·ℳ, 𝒫_y = E(ℳ_y − yqℳ), 𝒫_τ = E(ℳ_t + ½y²(q/τ)ℳ), 𝒫_yy = E·G
    const double yq = y * q;
    const double Gbar = E * pyybar;
    const double Mbar =
        E * (pbar - yq * pybar + (0.5 * y * y * q / tau) * ptbar) + yq * yq * Gbar;
    const double Mybar = E * pybar - 2.0 * yq * Gbar;
    const double Mtbar = E * ptbar;

    // G = a_reg + 2x𝒩_y + yx𝒩_yy + qy(K − ½y·a − x𝒩) + y²q²ℳ − 2yq·ℳ_y
    bk->aregbar += Gbar;
    bk->ny += 2.0 * x * Gbar;
    bk->nyy += y * x * Gbar;
    bk->abar += -0.5 * q * y * y * Gbar;
    bk->n0 += -q * y * x * Gbar;

    // ℳ = (K−s̄)/x + y(−K + ½y·a + x𝒩)
    bk->sfbar += -Mbar / x;
    bk->abar += 0.5 * y * y * Mbar;
    bk->n0 += y * x * Mbar;

    // ℳ_y = −K + y·a + x𝒩 + yx𝒩_y
    bk->abar += y * Mybar;
    bk->n0 += x * Mybar;
    bk->ny += y * x * Mybar;

    // ℳ_t = −s̄′/x + ½y²·a′ + yx𝒩_τ
    bk->sfdotbar += -Mtbar / x;
    bk->adotbar += 0.5 * y * y * Mtbar;
    bk->nt += y * x * Mtbar;

    return r;
}

/// Chain a row's accumulated boundary adjoints through boundary_terms onto
/// the six lanes of that row's y=0 jet.
void add_row_seeds(const ProblemSpec& spec, BoundaryMode mode, double tau,
                   const BoundaryTerms& bt, const PointBackward& acc,
                   Eigen::MatrixXd& bseeds, Eigen::Index row) {
    const double x = spec.x_max;
    const double q = bt.q;
    const bool case1 = (mode == BoundaryMode::CASE1);
    const double a_b0 = case1 ? q + x * x : q;     // ∂a/∂𝒩
    const double areg_b0 = case1 ? x * x : 0.0;    // ∂a_reg/∂𝒩
    const double adot_bt = case1 ? q + x * x : q;  // ∂a′/∂𝒩_τ
    const double case2 = case1 ? 0.0 : 1.0;        // ∂a_reg/∂𝒩_yy and ∂a′/∂𝒩_τyy

    bseeds(row, 0) += acc.n0 + acc.abar * a_b0 + acc.aregbar * areg_b0 -
                      acc.adotbar * (q / tau) - acc.sfbar * x;
    bseeds(row, 1) += acc.nt + acc.adotbar * adot_bt - acc.sfdotbar * x;
    bseeds(row, 2) += acc.ny - 2.0 * x * (acc.abar + acc.aregbar);
    bseeds(row, 3) += acc.nyy + case2 * (acc.abar + acc.aregbar);
    bseeds(row, 4) += -2.0 * x * acc.adotbar;
    bseeds(row, 5) += case2 * acc.adotbar;
}

NetJet jet_from_row(const Eigen::MatrixXd& jets, Eigen::Index i, int lanes) {
    NetJet j;
    j.n = jets(i, 0);
    j.n_tau = jets(i, 1);
    j.n_y = jets(i, 2);
    j.n_yy = jets(i, 3);
    if (lanes == 6) {
        j.n_tau_y = jets(i, 4);
        j.n_tau_yy = jets(i, 5);
    }
    return j;
}

}  // namespace

LossEvaluator::LossEvaluator(const ProblemSpec& spec, const Grid& grid,
                             const Architecture& arch, BoundaryMode mode,
                             std::size_t chunk)
    : spec_(spec),
      arch_(arch),
      mode_(mode),
      chunk_(chunk),
      bengine_(arch, 6),
      iengine_(arch, 4) {
    spec_.validate();
    arch_.validate();
    if (chunk_ == 0) throw std::invalid_argument("LossEvaluator: chunk must be positive");
    if (grid.taus.empty() || grid.ys.empty())
        throw std::invalid_argument("LossEvaluator: empty grid");
    if (!(grid.taus.front() >= spec_.tau_min))
        throw std::invalid_argument("LossEvaluator: grid runs below tau_min");
    if (grid.ys.front() != 0.0)
        throw std::invalid_argument("LossEvaluator: grid must start at the y = 0 column");
    if (!(grid.ys.back() <= 1.0))
        throw std::invalid_argument("LossEvaluator: y-axis exceeds 1");

    taus_ = grid.taus;
    zeros_.assign(taus_.size(), 0.0);
    n_y_ = grid.ys.size();
    full_count_ = grid.taus.size() * n_y_;

    // Pack the interior points whose prefactor is representable; the same
    // cutoff short-circuits assemble_aux, so dropped points contribute exact
    // zeros to both the loss and the gradient.
    const double gamma = spec_.gamma();
    for (std::size_t ti = 0; ti < grid.taus.size(); ++ti) {
        const double q = gamma / grid.taus[ti];
        for (std::size_t yi = 1; yi < n_y_; ++yi) {
            const double y = grid.ys[yi];
            const double ex = -0.5 * y * y * q;
            if (ex < -745.0) continue;
            pt_tau_.push_back(grid.taus[ti]);
            pt_y_.push_back(y);
            pt_row_.push_back(static_cast<std::int32_t>(ti));
            pt_lin_.push_back(ti * n_y_ + yi);
        }
    }

    // Pad the coordinate arrays to a whole number of chunks by repeating the
    // last point. Every batch then has identical width, so the engine work
    // buffers never reallocate between steps; padded rows carry zero seeds and
    // are skipped by the residual loop, contributing exactly nothing.
    n_active_ = pt_tau_.size();
    if (n_active_ > 0) {
        while (pt_tau_.size() % chunk_ != 0) {
            pt_tau_.push_back(pt_tau_.back());
            pt_y_.push_back(pt_y_.back());
        }
    }
}

double LossEvaluator::loss(const NetworkParams& params, LossDiagnostics* diag) {
    return run(params, nullptr, diag);
}

double LossEvaluator::loss_and_gradient(const NetworkParams& params, GradBlob& grad,
                                        LossDiagnostics* diag) {
    return run(params, &grad, diag);
}

double LossEvaluator::run(const NetworkParams& params, GradBlob* grad,
                          LossDiagnostics* diag) {
    if (params.arch.hidden != arch_.hidden)
        throw std::invalid_argument("LossEvaluator: params architecture mismatch");
    if (diag) *diag = LossDiagnostics{};
    if (grad) grad->set_zero();

    const std::size_t n_rows = taus_.size();
    const Eigen::MatrixXd& bjets = bengine_.forward(params, taus_, zeros_);

    bterms_.resize(n_rows);
    for (std::size_t t = 0; t < n_rows; ++t) {
        const NetJet j = jet_from_row(bjets, static_cast<Eigen::Index>(t), 6);
        bterms_[t] = boundary_terms(spec_, taus_[t], j, mode_);
        if (!(std::abs(bterms_[t].sf) >= 1e-8 * spec_.K)) {
            if (diag) {
                diag->guard_tripped = true;
                diag->tau = taus_[t];
                diag->sf = bterms_[t].sf;
            }
            return std::numeric_limits<double>::quiet_NaN();
        }
    }

    r2_.assign(full_count_, 0.0);
    const double wscale = 2.0 / static_cast<double>(full_count_);
    std::vector<PointBackward> rowacc(grad ? n_rows : 0);

    // y = 0 column: each residual reads its row's boundary jet directly, so
    // its jet seeds land on the boundary batch itself.
    for (std::size_t t = 0; t < n_rows; ++t) {
        const NetJet j = jet_from_row(bjets, static_cast<Eigen::Index>(t), 6);
        PointBackward tmp;
        const double r = point_residual(spec_, taus_[t], 0.0, j, bterms_[t], wscale,
                                        grad ? &tmp : nullptr);
        r2_[t * n_y_] = r * r;
        if (grad) rowacc[t] = tmp;
    }

    // interior chunks: forward, per-point seeds, backward. The arrays are
    // padded to full chunks; rows past n_active_ keep zero seeds and are
    // never read back, so they change nothing.
    const std::size_t n_pts = pt_tau_.size();
    for (std::size_t off = 0; off < n_pts; off += chunk_) {
        const std::size_t len = std::min(chunk_, n_pts - off);
        const Eigen::MatrixXd& jets = iengine_.forward(
            params, std::span<const double>(pt_tau_).subspan(off, len),
            std::span<const double>(pt_y_).subspan(off, len));
        if (grad) iseeds_.setZero(static_cast<Eigen::Index>(len), 4);
        const std::size_t live = std::min(len, n_active_ - std::min(off, n_active_));
        for (std::size_t i = 0; i < live; ++i) {
            const std::size_t k = off + i;
            const auto ei = static_cast<Eigen::Index>(i);
            const NetJet pj = jet_from_row(jets, ei, 4);
            const std::int32_t row = pt_row_[k];
            PointBackward tmp;
            const double r = point_residual(spec_, pt_tau_[k], pt_y_[k], pj,
                                            bterms_[row], wscale, grad ? &tmp : nullptr);
            r2_[pt_lin_[k]] = r * r;
            if (grad) {
                iseeds_(ei, 0) = tmp.n0;
                iseeds_(ei, 1) = tmp.nt;
                iseeds_(ei, 2) = tmp.ny;
                iseeds_(ei, 3) = tmp.nyy;
                PointBackward& acc = rowacc[row];
                acc.abar += tmp.abar;
                acc.aregbar += tmp.aregbar;
                acc.adotbar += tmp.adotbar;
                acc.sfbar += tmp.sfbar;
                acc.sfdotbar += tmp.sfdotbar;
            }
        }
        if (grad) iengine_.backward(params, iseeds_, *grad);
    }

    if (grad) {
        bseeds_.setZero(static_cast<Eigen::Index>(n_rows), 6);
        for (std::size_t t = 0; t < n_rows; ++t)
            add_row_seeds(spec_, mode_, taus_[t], bterms_[t], rowacc[t], bseeds_,
                          static_cast<Eigen::Index>(t));
        bengine_.backward(params, bseeds_, *grad);
    }

    // compensated sum in fixed grid order (τ outer, y inner)
    double s = 0.0, comp = 0.0;
    for (const double v : r2_) {
        const double yk = v - comp;
        const double tk = s + yk;
        comp = (tk - s) - yk;
        s = tk;
    }
    return s / static_cast<double>(full_count_);
}

}  // namespace fbnet
