#include "fbnet/jet_engine.hpp"

#include <stdexcept>

namespace fbnet {

GradBlob GradBlob::zeros_like(const NetworkParams& params) {
    GradBlob g;
    for (std::size_t l = 0; l < params.arch.n_layers(); ++l) {
        g.W.emplace_back(Eigen::MatrixXd::Zero(params.W[l].rows(), params.W[l].cols()));
        g.b.emplace_back(Eigen::VectorXd::Zero(params.b[l].size()));
    }
    return g;
}

void GradBlob::set_zero() {
    for (auto& w : W) w.setZero();
    for (auto& v : b) v.setZero();
}

JetEngine::JetEngine(const Architecture& arch, int lanes) : arch_(arch), lanes_(lanes) {
    arch.validate();
    if (lanes != 4 && lanes != 6)
        throw std::invalid_argument("JetEngine: lanes must be 4 or 6");
    U_.resize(arch.hidden.size());
    A_.resize(arch.hidden.size());
}

const Eigen::MatrixXd& JetEngine::forward(const NetworkParams& params,
                                          std::span<const double> taus,
                                          std::span<const double> ys) {
    if (taus.size() != ys.size())
        throw std::invalid_argument("JetEngine::forward: point arrays differ in length");
    const Eigen::Index n = static_cast<Eigen::Index>(taus.size());
    n_ = n;
    const Eigen::Index total = static_cast<Eigen::Index>(lanes_) * n;

    // Input lanes: value block carries the points, the ∂τ/∂y blocks are the
    // constant unit directions, all higher blocks vanish identically.
    X_.setZero(2, total);
    for (Eigen::Index i = 0; i < n; ++i) {
        X_(0, i) = taus[static_cast<std::size_t>(i)];
        X_(1, i) = ys[static_cast<std::size_t>(i)];
    }
    X_.block(0, n, 1, n).setOnes();      // lane 1: ∂τ input = (1,0)
    X_.block(1, 2 * n, 1, n).setOnes();  // lane 2: ∂y input = (0,1)

    const Eigen::MatrixXd* prev = &X_;
    for (std::size_t l = 0; l < arch_.hidden.size(); ++l) {
        const Eigen::Index m = arch_.hidden[l];
        U_[l].noalias() = params.W[l] * (*prev);
        U_[l].middleCols(0, n).colwise() += params.b[l];

        A_[l].resize(m, total);
        auto lane = [&](Eigen::MatrixXd& M, int k) { return M.middleCols(k * n, n).array(); };
        auto F = lane(A_[l], 0);
        // Vectorized sigmoid: exp saturates to 0/inf at the extremes, so
        // 1/(1+e^{-u}) lands on the exact 0/1 limits without producing NaNs.
        F = 1.0 / (1.0 + (-lane(U_[l], 0)).exp());
        // Sigmoid derivative polynomials: f' = s1, f'' = s2, f''' = s3.
        const Eigen::ArrayXXd s1 = F * (1.0 - F);
        const Eigen::ArrayXXd s2 = s1 * (1.0 - 2.0 * F);
        const auto u1 = lane(U_[l], 1), u2 = lane(U_[l], 2), u3 = lane(U_[l], 3);
        lane(A_[l], 1) = s1 * u1;
        lane(A_[l], 2) = s1 * u2;
        lane(A_[l], 3) = s2 * u2.square() + s1 * u3;
        if (lanes_ == 6) {
            const Eigen::ArrayXXd s3 = s1 * (1.0 - 6.0 * F + 6.0 * F.square());
            const auto u4 = lane(U_[l], 4), u5 = lane(U_[l], 5);
            lane(A_[l], 4) = s2 * u1 * u2 + s1 * u4;
            lane(A_[l], 5) =
                s3 * u1 * u2.square() + 2.0 * s2 * u2 * u4 + s2 * u1 * u3 + s1 * u5;
        }
        prev = &A_[l];
    }

    const std::size_t out = arch_.n_layers() - 1;
    Eigen::RowVectorXd flat = params.W[out].row(0) * (*prev);
    jets_.resize(n, lanes_);
    for (int k = 0; k < lanes_; ++k) jets_.col(k) = flat.segment(k * n, n).transpose();
    jets_.col(0).array() += params.b[out](0);
    return jets_;
}

void JetEngine::backward(const NetworkParams& params, const Eigen::MatrixXd& seeds,
                         GradBlob& grad) {
    const Eigen::Index n = n_;
    if (seeds.rows() != n || seeds.cols() != lanes_)
        throw std::invalid_argument("JetEngine::backward: seed shape mismatch");
    const std::size_t out = arch_.n_layers() - 1;
    const std::size_t top = arch_.hidden.size() - 1;

    // Output layer: jets = Wout·A_top (+ bias on the value lane). seeds is
    // column-major, so its lanes are contiguous in exactly Zbar's column
    // order; one rank-1 product and one GEMV cover all lanes.
    const Eigen::Index m_top = arch_.hidden[top];
    Eigen::Map<const Eigen::RowVectorXd> flat_seeds(seeds.data(), lanes_ * n);
    Zbar_.resize(m_top, lanes_ * n);
    Zbar_.noalias() = params.W[out].row(0).transpose() * flat_seeds;
    grad.W[out].row(0).transpose().noalias() += A_[top] * flat_seeds.transpose();
    grad.b[out](0) += seeds.col(0).sum();

    for (std::size_t li = arch_.hidden.size(); li-- > 0;) {
        const Eigen::Index m = arch_.hidden[li];
        auto lane_of = [&](Eigen::MatrixXd& M, int k) {
            return M.middleCols(k * n, n).array();
        };
        const auto F = lane_of(A_[li], 0);
        const Eigen::ArrayXXd s1 = F * (1.0 - F);
        const Eigen::ArrayXXd s2 = s1 * (1.0 - 2.0 * F);
        const Eigen::ArrayXXd s3 = s1 * (1.0 - 6.0 * F + 6.0 * F.square());
        const auto u1 = lane_of(U_[li], 1), u2 = lane_of(U_[li], 2), u3 = lane_of(U_[li], 3);
        const auto z0 = lane_of(Zbar_, 0), z1 = lane_of(Zbar_, 1), z2 = lane_of(Zbar_, 2),
                   z3 = lane_of(Zbar_, 3);

        Ubar_.resize(m, lanes_ * n);
        if (lanes_ == 4) {
            lane_of(Ubar_, 0) =
                s1 * z0 + s2 * (u1 * z1 + u2 * z2) + (s3 * u2.square() + s2 * u3) * z3;
            lane_of(Ubar_, 1) = s1 * z1;
            lane_of(Ubar_, 2) = s1 * z2 + 2.0 * s2 * u2 * z3;
            lane_of(Ubar_, 3) = s1 * z3;
        } else {
            // Adjoints of the 6-lane jet rules; s4 = f'''' enters only here.
            const Eigen::ArrayXXd s4 =
                s2 * (1.0 - 12.0 * F + 12.0 * F.square());  // s2=(f')(1-2f) ⇒ s4 rule
            const auto u4 = lane_of(U_[li], 4), u5 = lane_of(U_[li], 5);
            const auto z4 = lane_of(Zbar_, 4), z5 = lane_of(Zbar_, 5);
            lane_of(Ubar_, 0) = s1 * z0 + s2 * (u1 * z1 + u2 * z2) +
                                (s3 * u2.square() + s2 * u3) * z3 +
                                (s3 * u1 * u2 + s2 * u4) * z4 +
                                (s4 * u1 * u2.square() + 2.0 * s3 * u2 * u4 +
                                 s3 * u1 * u3 + s2 * u5) *
                                    z5;
            lane_of(Ubar_, 1) = s1 * z1 + s2 * u2 * z4 + (s3 * u2.square() + s2 * u3) * z5;
            lane_of(Ubar_, 2) = s1 * z2 + 2.0 * s2 * u2 * z3 + s2 * u1 * z4 +
                                2.0 * (s3 * u1 * u2 + s2 * u4) * z5;
            lane_of(Ubar_, 3) = s1 * z3 + s2 * u1 * z5;
            lane_of(Ubar_, 4) = s1 * z4 + 2.0 * s2 * u2 * z5;
            lane_of(Ubar_, 5) = s1 * z5;
        }

        const Eigen::MatrixXd& prev = (li == 0) ? X_ : A_[li - 1];
        grad.W[li].noalias() += Ubar_ * prev.transpose();
        grad.b[li] += Ubar_.middleCols(0, n).rowwise().sum();
        if (li > 0) {
            Zbar_.resize(arch_.hidden[li - 1], lanes_ * n);
            Zbar_.noalias() = params.W[li].transpose() * Ubar_;
        }
    }
}

GradBlob param_gradient(const NetworkParams& params, std::span<const double> taus,
                        std::span<const double> ys, const JetFunctional& fn,
                        double* value_out) {
    JetEngine engine(params.arch, 6);
    const Eigen::MatrixXd& jets = engine.forward(params, taus, ys);
    Eigen::MatrixXd seeds = Eigen::MatrixXd::Zero(jets.rows(), 6);
    const double value = fn.value_and_seeds(jets, seeds);
    if (value_out) *value_out = value;
    GradBlob grad = GradBlob::zeros_like(params);
    engine.backward(params, seeds, grad);
    return grad;
}

}  // namespace fbnet
