#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "odstop/matrix.hpp"

namespace odstop {

enum class Activation { relu, linear };

struct LayerSpec {
    std::size_t in = 0;
    std::size_t out = 0;
    Activation act = Activation::linear;
};

struct DenseLayer {
    Matrix weight;             // out x in
    std::vector<double> bias;  // out
    Activation act = Activation::linear;
};

// Immutable copy of all parameters plus the iteration index it was taken at.
struct ParamSnapshot {
    std::vector<DenseLayer> layers;
    std::size_t iteration = 0;
};

// Per-sample loss on network output rows. `value` must include every term of
// the loss so that scoring and training report the same numbers through one
// code path; `grad` writes d(loss)/d(output) for a single sample.
class PerSampleLoss {
public:
    virtual ~PerSampleLoss() = default;
    virtual double value(const double* y, const double* x, std::size_t dim_out,
                         std::size_t dim_in) const = 0;
    virtual void grad(const double* y, const double* x, std::size_t dim_out,
                      std::size_t dim_in, double* out) const = 0;
};

/**
 * Fully connected feed-forward network in 64-bit floats.
 *
 * Weights are initialised uniformly in +-sqrt(6 / (fan_in + fan_out)) from a
 * seeded splitmix64 stream; biases start at zero. All matrix loops run in a
 * fixed order, so for a fixed seed and input sequence every trajectory is
 * bit-identical across runs.
 */
class DenseNet {
public:
    DenseNet() = default;
    DenseNet(const std::vector<LayerSpec>& spec, std::uint64_t seed);

    std::size_t input_dim() const;
    std::size_t output_dim() const;
    std::size_t param_count() const;
    const std::vector<DenseLayer>& layers() const { return layers_; }
    std::vector<DenseLayer>& layers() { return layers_; }

    // Batched forward pass: X is batch x input_dim, result batch x output_dim.
    Matrix forward(const Matrix& X) const;

private:
    std::vector<DenseLayer> layers_;
};

// Gradient (or first/second moment) storage congruent with a net's parameters.
struct GradBuffers {
    std::vector<Matrix> w;               // per layer, same shape as weight
    std::vector<std::vector<double>> b;  // per layer, same shape as bias

    static GradBuffers zeros_like(const DenseNet& net);
    void set_zero();
};

// Computes the gradient of the mean per-sample loss over the batch and the
// pre-update mean loss itself. Throws std::runtime_error on non-finite
// gradients. The per-sample losses are mutually independent: row i of X only
// influences its own loss term.
double backward(const DenseNet& net, const Matrix& X, const PerSampleLoss& loss,
                GradBuffers& grads);

// Flattened gradient of the mean loss over X, in layer-major
// (weight row-major, then bias) order. Used for gradient diagnostics and
// finite-difference checks.
std::vector<double> flat_gradient(const DenseNet& net, const Matrix& X,
                                  const PerSampleLoss& loss);

// Adam optimiser state bound to one net's parameter shapes.
class Adam {
public:
    Adam(const DenseNet& net, double lr, double beta1 = 0.9, double beta2 = 0.999,
         double eps = 1e-8);

    // One update step from precomputed gradients. Throws std::runtime_error
    // if any parameter becomes non-finite.
    void apply(DenseNet& net, const GradBuffers& grads);

    double lr() const { return lr_; }
    long step() const { return step_; }
    const GradBuffers& m() const { return m_; }
    const GradBuffers& v() const { return v_; }

private:
    double lr_, beta1_, beta2_, eps_;
    long step_ = 0;
    GradBuffers m_, v_;
};

// backward + Adam step; returns the pre-update mean batch loss.
double backward_and_step(DenseNet& net, const Matrix& X, const PerSampleLoss& loss,
                         Adam& opt);

ParamSnapshot snapshot(const DenseNet& net, std::size_t iteration);

// Restores parameters from a snapshot. Throws std::invalid_argument if the
// snapshot's shapes do not match the net.
void restore(DenseNet& net, const ParamSnapshot& snap);

}  // namespace odstop
