#include "odstop/nn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "odstop/rng.hpp"

namespace odstop {

namespace {

double activate(double z, Activation a) {
    return a == Activation::relu ? (z > 0.0 ? z : 0.0) : z;
}

double activate_grad(double z, Activation a) {
    return a == Activation::relu ? (z > 0.0 ? 1.0 : 0.0) : 1.0;
}

void check_finite(const GradBuffers& g) {
    for (const auto& w : g.w)
        for (double x : w.data)
            if (!std::isfinite(x)) throw std::runtime_error("non-finite gradient");
    for (const auto& b : g.b)
        for (double x : b)
            if (!std::isfinite(x)) throw std::runtime_error("non-finite gradient");
}

}  // namespace

DenseNet::DenseNet(const std::vector<LayerSpec>& spec, std::uint64_t seed) {
    if (spec.empty()) throw std::invalid_argument("DenseNet: empty layer spec");
    Rng rng(seed);
    layers_.reserve(spec.size());
    for (std::size_t l = 0; l < spec.size(); ++l) {
        const LayerSpec& s = spec[l];
        if (s.in == 0 || s.out == 0)
            throw std::invalid_argument("DenseNet: zero-width layer " + std::to_string(l));
        if (l > 0 && s.in != spec[l - 1].out)
            throw std::invalid_argument("DenseNet: layer " + std::to_string(l) +
                                        " input width does not match previous output");
        DenseLayer layer;
        layer.weight = Matrix(s.out, s.in);
        const double limit = std::sqrt(6.0 / static_cast<double>(s.in + s.out));
        for (double& w : layer.weight.data) w = rng.uniform(-limit, limit);
        layer.bias.assign(s.out, 0.0);
        layer.act = s.act;
        layers_.push_back(std::move(layer));
    }
}

std::size_t DenseNet::input_dim() const { return layers_.front().weight.cols; }
std::size_t DenseNet::output_dim() const { return layers_.back().weight.rows; }

std::size_t DenseNet::param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.weight.data.size() + l.bias.size();
    return n;
}

Matrix DenseNet::forward(const Matrix& X) const {
    if (X.cols != input_dim())
        throw std::invalid_argument("forward: input width " + std::to_string(X.cols) +
                                    " does not match net input " + std::to_string(input_dim()));
    Matrix a = X;
    for (const auto& layer : layers_) {
        const std::size_t out_dim = layer.weight.rows;
        const std::size_t in_dim = layer.weight.cols;
        Matrix next(a.rows, out_dim);
        for (std::size_t r = 0; r < a.rows; ++r) {
            const double* arow = a.row(r);
            double* nrow = next.row(r);
            for (std::size_t o = 0; o < out_dim; ++o) {
                const double* wrow = layer.weight.row(o);
                double z = layer.bias[o];
                for (std::size_t i = 0; i < in_dim; ++i) z += wrow[i] * arow[i];
                nrow[o] = activate(z, layer.act);
            }
        }
        a = std::move(next);
    }
    return a;
}

GradBuffers GradBuffers::zeros_like(const DenseNet& net) {
    GradBuffers g;
    g.w.reserve(net.layers().size());
    g.b.reserve(net.layers().size());
    for (const auto& l : net.layers()) {
        g.w.emplace_back(l.weight.rows, l.weight.cols);
        g.b.emplace_back(l.bias.size(), 0.0);
    }
    return g;
}

void GradBuffers::set_zero() {
    for (auto& m : w)
        for (double& x : m.data) x = 0.0;
    for (auto& v : b)
        for (double& x : v) x = 0.0;
}

double backward(const DenseNet& net, const Matrix& X, const PerSampleLoss& loss,
                GradBuffers& grads) {
    if (X.rows == 0) throw std::invalid_argument("backward: empty batch");
    const auto& layers = net.layers();
    const std::size_t L = layers.size();
    const std::size_t batch = X.rows;

    // Forward pass keeping pre-activations z and activations a per layer.
    std::vector<Matrix> z(L), a(L);
    {
        const Matrix* prev = &X;
        for (std::size_t l = 0; l < L; ++l) {
            const auto& layer = layers[l];
            const std::size_t out_dim = layer.weight.rows;
            const std::size_t in_dim = layer.weight.cols;
            z[l] = Matrix(batch, out_dim);
            a[l] = Matrix(batch, out_dim);
            for (std::size_t r = 0; r < batch; ++r) {
                const double* arow = prev->row(r);
                double* zrow = z[l].row(r);
                double* orow = a[l].row(r);
                for (std::size_t o = 0; o < out_dim; ++o) {
                    const double* wrow = layer.weight.row(o);
                    double s = layer.bias[o];
                    for (std::size_t i = 0; i < in_dim; ++i) s += wrow[i] * arow[i];
                    zrow[o] = s;
                    orow[o] = activate(s, layer.act);
                }
            }
            prev = &a[l];
        }
    }

    const std::size_t dim_out = net.output_dim();
    const std::size_t dim_in = net.input_dim();
    const double inv_b = 1.0 / static_cast<double>(batch);

    // Mean loss and d(mean loss)/d(output).
    double mean_loss = 0.0;
    Matrix delta(batch, dim_out);
    {
        std::vector<double> g(dim_out);
        for (std::size_t r = 0; r < batch; ++r) {
            const double* yrow = a[L - 1].row(r);
            const double* xrow = X.row(r);
            mean_loss += loss.value(yrow, xrow, dim_out, dim_in);
            loss.grad(yrow, xrow, dim_out, dim_in, g.data());
            double* drow = delta.row(r);
            for (std::size_t o = 0; o < dim_out; ++o) drow[o] = g[o] * inv_b;
        }
        mean_loss *= inv_b;
    }

    grads.set_zero();
    // delta holds d(mean loss)/d(a_l); walk layers backwards.
    for (std::size_t li = L; li-- > 0;) {
        const auto& layer = layers[li];
        const std::size_t out_dim = layer.weight.rows;
        const std::size_t in_dim = layer.weight.cols;
        const Matrix& below = (li == 0) ? X : a[li - 1];

        for (std::size_t r = 0; r < batch; ++r) {
            double* drow = delta.row(r);
            const double* zrow = z[li].row(r);
            for (std::size_t o = 0; o < out_dim; ++o)
                drow[o] *= activate_grad(zrow[o], layer.act);
        }
        for (std::size_t r = 0; r < batch; ++r) {
            const double* drow = delta.row(r);
            const double* brow = below.row(r);
            for (std::size_t o = 0; o < out_dim; ++o) {
                const double d = drow[o];
                if (d == 0.0) continue;
                double* gw = grads.w[li].row(o);
                for (std::size_t i = 0; i < in_dim; ++i) gw[i] += d * brow[i];
                grads.b[li][o] += d;
            }
        }
        if (li > 0) {
            Matrix next_delta(batch, in_dim);
            for (std::size_t r = 0; r < batch; ++r) {
                const double* drow = delta.row(r);
                double* nrow = next_delta.row(r);
                for (std::size_t i = 0; i < in_dim; ++i) {
                    double s = 0.0;
                    for (std::size_t o = 0; o < out_dim; ++o)
                        s += drow[o] * layer.weight(o, i);
                    nrow[i] = s;
                }
            }
            delta = std::move(next_delta);
        }
    }

    check_finite(grads);
    return mean_loss;
}

std::vector<double> flat_gradient(const DenseNet& net, const Matrix& X,
                                  const PerSampleLoss& loss) {
    GradBuffers g = GradBuffers::zeros_like(net);
    backward(net, X, loss, g);
    std::vector<double> flat;
    flat.reserve(net.param_count());
    for (std::size_t l = 0; l < g.w.size(); ++l) {
        for (double x : g.w[l].data) flat.push_back(x);
        for (double x : g.b[l]) flat.push_back(x);
    }
    return flat;
}

Adam::Adam(const DenseNet& net, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps),
      m_(GradBuffers::zeros_like(net)), v_(GradBuffers::zeros_like(net)) {
    if (lr < 0.0) throw std::invalid_argument("Adam: negative learning rate");
}

void Adam::apply(DenseNet& net, const GradBuffers& grads) {
    auto& layers = net.layers();
    if (grads.w.size() != layers.size())
        throw std::invalid_argument("Adam::apply: gradient layer count mismatch");
    ++step_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));

    auto update = [&](double& p, double g, double& m, double& v) {
        m = beta1_ * m + (1.0 - beta1_) * g;
        v = beta2_ * v + (1.0 - beta2_) * g * g;
        const double mhat = m / bc1;
        const double vhat = v / bc2;
        p -= lr_ * mhat / (std::sqrt(vhat) + eps_);
        if (!std::isfinite(p))
            throw std::runtime_error("Adam::apply: parameter became non-finite");
    };

    for (std::size_t l = 0; l < layers.size(); ++l) {
        auto& layer = layers[l];
        if (!layer.weight.same_shape(grads.w[l]) || layer.bias.size() != grads.b[l].size())
            throw std::invalid_argument("Adam::apply: gradient shape mismatch at layer " +
                                        std::to_string(l));
        for (std::size_t i = 0; i < layer.weight.data.size(); ++i)
            update(layer.weight.data[i], grads.w[l].data[i], m_.w[l].data[i], v_.w[l].data[i]);
        for (std::size_t i = 0; i < layer.bias.size(); ++i)
            update(layer.bias[i], grads.b[l][i], m_.b[l][i], v_.b[l][i]);
    }
}

double backward_and_step(DenseNet& net, const Matrix& X, const PerSampleLoss& loss,
                         Adam& opt) {
    GradBuffers g = GradBuffers::zeros_like(net);
    const double mean_loss = backward(net, X, loss, g);
    opt.apply(net, g);
    return mean_loss;
}

ParamSnapshot snapshot(const DenseNet& net, std::size_t iteration) {
    return ParamSnapshot{net.layers(), iteration};
}

void restore(DenseNet& net, const ParamSnapshot& snap) {
    auto& layers = net.layers();
    if (snap.layers.size() != layers.size())
        throw std::invalid_argument("restore: layer count mismatch");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& s = snap.layers[l];
        if (!layers[l].weight.same_shape(s.weight) || layers[l].bias.size() != s.bias.size() ||
            layers[l].act != s.act)
            throw std::invalid_argument("restore: shape mismatch at layer " + std::to_string(l));
    }
    layers = snap.layers;
}

}  // namespace odstop
