#include "fbnet/network.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace fbnet {

namespace {

// Deterministic normal sampler: pinned 53-bit uniforms + Box–Muller.
// std::normal_distribution is implementation-defined and would break the
// bit-identical (arch,seed)→params guarantee across standard libraries.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()(double stddev) {
        if (has_spare_) {
            has_spare_ = false;
            return spare_ * stddev;
        }
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle) * stddev;
    }

private:
    // Uniform on (0,1): (k + 0.5)/2^53 with k the top 53 bits.
    double uniform_open() {
        return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace

NetworkParams init_params(const Architecture& arch, std::uint64_t seed, double stddev) {
    arch.validate();
    if (!(stddev > 0.0)) throw std::invalid_argument("network.init_stddev must be > 0");
    NetworkParams p;
    p.arch = arch;
    p.rng_seed = seed;
    p.init_stddev = stddev;
    NormalSampler normal(seed);
    for (std::size_t l = 0; l < arch.n_layers(); ++l) {
        const int rows = arch.out_size(l), cols = arch.in_size(l);
        Eigen::MatrixXd W(rows, cols);
        for (int i = 0; i < rows; ++i)          // row-major draw order is part
            for (int j = 0; j < cols; ++j)      // of the checkpoint contract
                W(i, j) = normal(stddev);
        Eigen::VectorXd b(rows);
        for (int i = 0; i < rows; ++i) b(i) = normal(stddev);
        p.W.push_back(std::move(W));
        p.b.push_back(std::move(b));
    }
    return p;
}

double sigmoid(double d) {
    if (d >= 0.0) {
        const double e = std::exp(-d);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(d);
    return e / (1.0 + e);
}

double forward(const NetworkParams& params, double tau, double y) {
    Eigen::VectorXd a(2);
    a << tau, y;
    const std::size_t L = params.arch.n_layers();
    for (std::size_t l = 0; l + 1 < L; ++l) {
        Eigen::VectorXd u = params.W[l] * a + params.b[l];
        a = u.unaryExpr([](double d) { return sigmoid(d); });
    }
    return (params.W[L - 1] * a + params.b[L - 1])(0);
}

NetJet jet(const NetworkParams& params, double tau, double y) {
    // Six derivative lanes [v, ∂τ, ∂y, ∂yy, ∂τy, ∂τyy] propagated per layer.
    constexpr int kLanes = 6;
    Eigen::MatrixXd a(2, kLanes);
    a.setZero();
    a(0, 0) = tau;
    a(1, 0) = y;
    a(0, 1) = 1.0;  // ∂τ of the input vector
    a(1, 2) = 1.0;  // ∂y of the input vector

    const std::size_t L = params.arch.n_layers();
    for (std::size_t l = 0; l + 1 < L; ++l) {
        Eigen::MatrixXd u = params.W[l] * a;
        u.col(0) += params.b[l];
        Eigen::MatrixXd w(u.rows(), kLanes);
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            const double f = sigmoid(u(i, 0));
            const double s1 = f * (1.0 - f);
            const double s2 = s1 * (1.0 - 2.0 * f);
            const double s3 = s1 * (1.0 - 6.0 * f + 6.0 * f * f);
            const double u1 = u(i, 1), u2 = u(i, 2), u3 = u(i, 3);
            const double u4 = u(i, 4), u5 = u(i, 5);
            w(i, 0) = f;
            w(i, 1) = s1 * u1;
            w(i, 2) = s1 * u2;
            w(i, 3) = s2 * u2 * u2 + s1 * u3;
            w(i, 4) = s2 * u1 * u2 + s1 * u4;
            w(i, 5) = s3 * u1 * u2 * u2 + 2.0 * s2 * u2 * u4 + s2 * u1 * u3 + s1 * u5;
        }
        a = std::move(w);
    }
    Eigen::RowVectorXd out = params.W[L - 1].row(0) * a;
    NetJet j;
    j.n = out(0) + params.b[L - 1](0);
    j.n_tau = out(1);
    j.n_y = out(2);
    j.n_yy = out(3);
    j.n_tau_y = out(4);
    j.n_tau_yy = out(5);
    return j;
}

void save_checkpoint(const NetworkParams& params, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("checkpoint: cannot open for write: " + file.string());
    out << "fbnet-checkpoint v1\n";
    out << "hidden";
    for (int h : params.arch.hidden) out << ' ' << h;
    out << '\n';
    out << "seed " << params.rng_seed << '\n';
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", params.init_stddev);
    out << "init_stddev " << buf << '\n';
    out << "params " << params.param_count() << '\n';
    for (std::size_t l = 0; l < params.arch.n_layers(); ++l) {
        const auto& W = params.W[l];
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", W(i, j));
                out << buf << '\n';
            }
        for (Eigen::Index i = 0; i < params.b[l].size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", params.b[l](i));
            out << buf << '\n';
        }
    }
    if (!out) throw std::runtime_error("checkpoint: write failed: " + file.string());
}

NetworkParams load_checkpoint(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("checkpoint: cannot open: " + file.string());
    std::string line;
    if (!std::getline(in, line) || line != "fbnet-checkpoint v1")
        throw std::runtime_error("checkpoint: bad magic in " + file.string());

    Architecture arch;
    std::uint64_t seed = 0;
    double stddev = 0.1;
    std::size_t declared = 0;
    for (int h = 0; h < 4; ++h) {
        if (!std::getline(in, line))
            throw std::runtime_error("checkpoint: truncated header in " + file.string());
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "hidden") {
            int v;
            while (ls >> v) arch.hidden.push_back(v);
        } else if (key == "seed") {
            ls >> seed;
        } else if (key == "init_stddev") {
            ls >> stddev;
        } else if (key == "params") {
            ls >> declared;
        } else {
            throw std::runtime_error("checkpoint: unknown header key '" + key + "'");
        }
    }
    arch.validate();
    if (declared != arch.param_count())
        throw std::runtime_error("checkpoint: parameter count mismatch in " + file.string());

    NetworkParams p;
    p.arch = arch;
    p.rng_seed = seed;
    p.init_stddev = stddev;
    auto next_value = [&]() {
        if (!std::getline(in, line))
            throw std::runtime_error("checkpoint: truncated values in " + file.string());
        return std::strtod(line.c_str(), nullptr);
    };
    for (std::size_t l = 0; l < arch.n_layers(); ++l) {
        Eigen::MatrixXd W(arch.out_size(l), arch.in_size(l));
        for (Eigen::Index i = 0; i < W.rows(); ++i)
            for (Eigen::Index j = 0; j < W.cols(); ++j) W(i, j) = next_value();
        Eigen::VectorXd b(arch.out_size(l));
        for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = next_value();
        p.W.push_back(std::move(W));
        p.b.push_back(std::move(b));
    }
    return p;
}

}  // namespace fbnet
