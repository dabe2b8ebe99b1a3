#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "odstop/matrix.hpp"
#include "odstop/nn.hpp"

namespace odstop {

// Floor added to every per-sample loss so scores are strictly positive and
// the loss-distribution entropy is always defined.
inline constexpr double kScoreFloor = 1e-12;

enum class ModelKind { autoencoder, linear_deep_svdd };

/**
 * Unsupervised outlier detector wrapping a DenseNet.
 *
 * The outlier score of a point is its per-sample training loss (plus the
 * positivity floor): scoring and training evaluate the same loss object, so
 * the two can never disagree. Scoring is deterministic; the architectures
 * here have no stochastic layers, and none may be added to the score path.
 *
 * Supported detectors:
 *  - autoencoder: d_in -> hidden (relu) -> d_in (linear),
 *    loss = mean squared reconstruction error over features;
 *  - linear_deep_svdd: one linear layer d_in -> d_latent,
 *    loss = squared distance to a fixed center c. The center is the mean
 *    latent output of the freshly initialised net over the construction
 *    data and is never updated afterwards.
 */
class OdModel {
public:
    static OdModel new_autoencoder(std::size_t d_in, std::size_t hidden, std::uint64_t seed);
    static OdModel new_deep_svdd(std::size_t d_in, std::size_t d_latent, const Matrix& data,
                                 std::uint64_t seed);
    // Assembles a model from explicit parts (tests, serialisation).
    OdModel(ModelKind kind, DenseNet net, std::vector<double> center);

    // Per-sample scores for each row of X, every entry >= kScoreFloor.
    std::vector<double> score(const Matrix& X) const;

    // One optimiser step on the batch; returns the pre-update mean batch loss.
    double train_step(const Matrix& batch, Adam& opt);

    ParamSnapshot take_snapshot(std::size_t iteration) const;
    void restore_snapshot(const ParamSnapshot& snap);

    ModelKind kind() const { return kind_; }
    std::size_t input_dim() const { return net_.input_dim(); }
    const DenseNet& net() const { return net_; }
    const std::vector<double>& center() const { return center_; }
    const PerSampleLoss& loss() const { return *loss_; }

private:
    ModelKind kind_;
    DenseNet net_;
    std::vector<double> center_;  // empty for the autoencoder
    std::shared_ptr<const PerSampleLoss> loss_;
};

}  // namespace odstop
