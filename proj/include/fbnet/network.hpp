/**
 * @file network.hpp
 * @brief Feed-forward MLP 𝒩(τ,y;ν) with sigmoid hidden layers and a linear
 *        output, its deterministic initialization, and the analytic
 *        input-derivative jet the auxiliary function consumes.
 */

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace fbnet {

/**
 * Layer layout of the MLP: input width is fixed at 2 (τ,y), output width at 1.
 */
struct Architecture {
    std::vector<int> hidden;  ///< hidden-layer sizes, e.g. {512,256,128,64}

    void validate() const {
        if (hidden.empty())
            throw std::invalid_argument("network.hidden: need at least one hidden layer");
        for (int h : hidden)
            if (h < 1) throw std::invalid_argument("network.hidden: all sizes must be >= 1");
    }

    /// Number of weight matrices (hidden layers + linear output layer).
    std::size_t n_layers() const { return hidden.size() + 1; }

    /// Fan-in of layer l (0-based; layer 0 reads the 2-wide input).
    int in_size(std::size_t l) const { return l == 0 ? 2 : hidden[l - 1]; }

    /// Fan-out of layer l (the last layer emits the scalar 𝒩).
    int out_size(std::size_t l) const {
        return l == hidden.size() ? 1 : hidden[l];
    }

    /// Total number of trainable scalars (weights + biases).
    std::size_t param_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < n_layers(); ++l)
            n += static_cast<std::size_t>(out_size(l)) * in_size(l) + out_size(l);
        return n;
    }

    bool operator==(const Architecture&) const = default;
};

/**
 * Trainable state: per-layer weight matrices W[l] (out×in) and bias vectors,
 * plus the metadata that pins how they were created.
 */
struct NetworkParams {
    Architecture arch;
    std::vector<Eigen::MatrixXd> W;
    std::vector<Eigen::VectorXd> b;
    std::uint64_t rng_seed = 0;
    double init_stddev = 0.1;

    std::size_t param_count() const { return arch.param_count(); }
};

/**
 * Value of 𝒩 and the five input-derivatives the auxiliary function and the
 * boundary-coefficient functions require. n_tau_y enters a′ in Case 1;
 * n_tau_yy additionally in Case 2.
 */
struct NetJet {
    double n = 0.0;
    double n_tau = 0.0;
    double n_y = 0.0;
    double n_yy = 0.0;
    double n_tau_y = 0.0;
    double n_tau_yy = 0.0;
};

/**
 * Draw all weights and biases i.i.d. Normal(0, stddev) from a fixed-sequence
 * generator (mt19937_64 + Box–Muller over pinned 53-bit uniforms), layer by
 * layer, W row-major then b. Identical (arch, seed, stddev) yield
 * bit-identical parameters on any conforming platform.
 */
NetworkParams init_params(const Architecture& arch, std::uint64_t seed,
                          double stddev = 0.1);

/// Overflow-safe sigmoid f(d) = 1/(1+e^{−d}); finite for all finite d.
double sigmoid(double d);

/// Plain forward pass: sigmoid hidden layers, affine (linear) output.
double forward(const NetworkParams& params, double tau, double y);

/**
 * Exact analytic jet of the forward map at one point (no finite differences).
 * Propagates the six derivative lanes [𝒩, ∂τ, ∂y, ∂yy, ∂τy, ∂τyy] through
 * every layer via the chain rule on the sigmoid's derivative polynomials.
 */
NetJet jet(const NetworkParams& params, double tau, double y);

/// Text checkpoint (architecture header + %.17g parameter dump; exact round-trip).
void save_checkpoint(const NetworkParams& params, const std::filesystem::path& file);
NetworkParams load_checkpoint(const std::filesystem::path& file);

}  // namespace fbnet
