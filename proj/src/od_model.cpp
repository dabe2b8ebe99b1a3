#include "odstop/od_model.hpp"

#include <stdexcept>

namespace odstop {

namespace {

// Mean squared reconstruction error over features, plus the positivity floor.
class ReconstructionLoss : public PerSampleLoss {
public:
    double value(const double* y, const double* x, std::size_t dim_out,
                 std::size_t /*dim_in*/) const override {
        double s = 0.0;
        for (std::size_t j = 0; j < dim_out; ++j) {
            const double e = y[j] - x[j];
            s += e * e;
        }
        return s / static_cast<double>(dim_out) + kScoreFloor;
    }
    void grad(const double* y, const double* x, std::size_t dim_out,
              std::size_t /*dim_in*/, double* out) const override {
        const double c = 2.0 / static_cast<double>(dim_out);
        for (std::size_t j = 0; j < dim_out; ++j) out[j] = c * (y[j] - x[j]);
    }
};

// Squared distance to a fixed center, plus the positivity floor.
class DistanceToCenterLoss : public PerSampleLoss {
public:
    explicit DistanceToCenterLoss(std::vector<double> center) : center_(std::move(center)) {}

    double value(const double* y, const double* /*x*/, std::size_t dim_out,
                 std::size_t /*dim_in*/) const override {
        double s = 0.0;
        for (std::size_t j = 0; j < dim_out; ++j) {
            const double e = y[j] - center_[j];
            s += e * e;
        }
        return s + kScoreFloor;
    }
    void grad(const double* y, const double* /*x*/, std::size_t dim_out,
              std::size_t /*dim_in*/, double* out) const override {
        for (std::size_t j = 0; j < dim_out; ++j) out[j] = 2.0 * (y[j] - center_[j]);
    }

private:
    std::vector<double> center_;
};

std::shared_ptr<const PerSampleLoss> make_loss(ModelKind kind,
                                               const std::vector<double>& center) {
    if (kind == ModelKind::autoencoder) return std::make_shared<ReconstructionLoss>();
    return std::make_shared<DistanceToCenterLoss>(center);
}

}  // namespace

OdModel::OdModel(ModelKind kind, DenseNet net, std::vector<double> center)
    : kind_(kind), net_(std::move(net)), center_(std::move(center)) {
    if (kind_ == ModelKind::linear_deep_svdd && center_.size() != net_.output_dim())
        throw std::invalid_argument("OdModel: center size does not match latent width");
    loss_ = make_loss(kind_, center_);
}

OdModel OdModel::new_autoencoder(std::size_t d_in, std::size_t hidden, std::uint64_t seed) {
    if (d_in == 0) throw std::invalid_argument("new_autoencoder: d_in must be positive");
    if (hidden == 0) throw std::invalid_argument("new_autoencoder: hidden must be positive");
    DenseNet net({{d_in, hidden, Activation::relu}, {hidden, d_in, Activation::linear}}, seed);
    return OdModel(ModelKind::autoencoder, std::move(net), {});
}

OdModel OdModel::new_deep_svdd(std::size_t d_in, std::size_t d_latent, const Matrix& data,
                               std::uint64_t seed) {
    if (d_in == 0) throw std::invalid_argument("new_deep_svdd: d_in must be positive");
    if (d_latent == 0) throw std::invalid_argument("new_deep_svdd: d_latent must be positive");
    if (data.rows == 0) throw std::invalid_argument("new_deep_svdd: empty center data");
    if (data.cols != d_in)
        throw std::invalid_argument("new_deep_svdd: data width does not match d_in");
    DenseNet net({{d_in, d_latent, Activation::linear}}, seed);
    const Matrix latent = net.forward(data);
    std::vector<double> center(d_latent, 0.0);
    for (std::size_t r = 0; r < latent.rows; ++r) {
        const double* row = latent.row(r);
        for (std::size_t j = 0; j < d_latent; ++j) center[j] += row[j];
    }
    for (double& c : center) c /= static_cast<double>(latent.rows);
    return OdModel(ModelKind::linear_deep_svdd, std::move(net), std::move(center));
}

std::vector<double> OdModel::score(const Matrix& X) const {
    if (X.rows == 0) throw std::invalid_argument("score: empty input");
    const Matrix y = net_.forward(X);
    std::vector<double> out(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r)
        out[r] = loss_->value(y.row(r), X.row(r), y.cols, X.cols);
    return out;
}

double OdModel::train_step(const Matrix& batch, Adam& opt) {
    return backward_and_step(net_, batch, *loss_, opt);
}

ParamSnapshot OdModel::take_snapshot(std::size_t iteration) const {
    return snapshot(net_, iteration);
}

void OdModel::restore_snapshot(const ParamSnapshot& snap) { restore(net_, snap); }

}  // namespace odstop
