// Feed-forward network: input -> 136 relu -> 136 relu -> softmax over
// the classes, trained with cross-entropy on integer labels and Adam
// (step 1e-3, moment decays 0.9/0.999, epsilon 1e-8), mini-batch 32,
// He-uniform initialization. Also the probe model for additive feature
// selection, where the input width follows the current feature subset.
#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "prosody/classify/common.hpp"
#include "prosody/rng.hpp"

namespace prosody {

struct FfnnConfig {
    int hidden = 136;
    int epochs = 5;
    int batch = 32;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Weights of the three dense layers. Kept separate from the model
// wrapper so gradients can be checked against finite differences.
struct FfnnParams {
    std::vector<Matrix> w;               // [h x d, h x h, C x h]
    std::vector<std::vector<double>> b;  // [h, h, C]

    int input_dim() const { return static_cast<int>(w[0].cols()); }
    int output_dim() const { return static_cast<int>(w[2].rows()); }
};

inline FfnnParams ffnn_init(int input_dim, int hidden, int classes,
                            std::uint64_t seed) {
    FfnnParams p;
    const std::size_t dims[3][2] = {
        {static_cast<std::size_t>(hidden), static_cast<std::size_t>(input_dim)},
        {static_cast<std::size_t>(hidden), static_cast<std::size_t>(hidden)},
        {static_cast<std::size_t>(classes), static_cast<std::size_t>(hidden)}};
    Rng rng(seed);
    for (const auto& d : dims) {
        Matrix w(d[0], d[1]);
        const double limit = std::sqrt(6.0 / static_cast<double>(d[1]));
        for (double& v : w.data()) v = rng.uniform(-limit, limit);
        p.w.push_back(std::move(w));
        p.b.emplace_back(d[0], 0.0);
    }
    return p;
}

namespace detail {

struct FfnnActivations {
    std::vector<double> z1, a1, z2, a2, z3, probs;
};

inline void ffnn_forward(const FfnnParams& p, std::span<const double> x,
                         FfnnActivations& act) {
    auto dense = [](const Matrix& w, const std::vector<double>& b,
                    std::span<const double> in, std::vector<double>& out) {
        out.assign(w.rows(), 0.0);
        for (std::size_t r = 0; r < w.rows(); ++r) {
            const auto row = w.row(r);
            double acc = b[r];
            for (std::size_t c = 0; c < w.cols(); ++c) acc += row[c] * in[c];
            out[r] = acc;
        }
    };
    auto relu = [](const std::vector<double>& z, std::vector<double>& a) {
        a.resize(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
    };
    dense(p.w[0], p.b[0], x, act.z1);
    relu(act.z1, act.a1);
    dense(p.w[1], p.b[1], act.a1, act.z2);
    relu(act.z2, act.a2);
    dense(p.w[2], p.b[2], act.a2, act.z3);

    // Softmax with max subtraction.
    double zmax = act.z3[0];
    for (double v : act.z3) zmax = std::max(zmax, v);
    act.probs.resize(act.z3.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < act.z3.size(); ++i) {
        act.probs[i] = std::exp(act.z3[i] - zmax);
        sum += act.probs[i];
    }
    for (double& v : act.probs) v /= sum;
}

}  // namespace detail

// Class probabilities for one standardized input.
inline std::vector<double> ffnn_probabilities(const FfnnParams& p,
                                              std::span<const double> x) {
    detail::FfnnActivations act;
    detail::ffnn_forward(p, x, act);
    return act.probs;
}

// Mean cross-entropy over a set of standardized rows.
inline double ffnn_loss(const FfnnParams& p, const Matrix& x,
                        const std::vector<int>& y) {
    detail::FfnnActivations act;
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        detail::ffnn_forward(p, x.row(i), act);
        double zmax = act.z3[0];
        for (double v : act.z3) zmax = std::max(zmax, v);
        double sum = 0.0;
        for (double v : act.z3) sum += std::exp(v - zmax);
        loss += std::log(sum) + zmax - act.z3[static_cast<std::size_t>(y[i])];
    }
    return loss / static_cast<double>(x.rows());
}

// Mean gradients of the cross-entropy over a batch of standardized rows,
// same shapes as the parameters.
inline FfnnParams ffnn_gradients(const FfnnParams& p, const Matrix& x,
                                 const std::vector<int>& y) {
    FfnnParams g;
    for (int l = 0; l < 3; ++l) {
        g.w.emplace_back(p.w[l].rows(), p.w[l].cols());
        g.b.emplace_back(p.b[l].size(), 0.0);
    }
    detail::FfnnActivations act;
    std::vector<double> dz3, dz2, dz1, da;
    const double inv_n = 1.0 / static_cast<double>(x.rows());

    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto row = x.row(i);
        detail::ffnn_forward(p, row, act);

        dz3 = act.probs;
        dz3[static_cast<std::size_t>(y[i])] -= 1.0;

        // Layer 3: dW3 += dz3 a2^T, backprop da2 = W3^T dz3.
        da.assign(p.w[2].cols(), 0.0);
        for (std::size_t r = 0; r < p.w[2].rows(); ++r) {
            const double d = dz3[r];
            g.b[2][r] += d * inv_n;
            auto grow = g.w[2].row(r);
            const auto wrow = p.w[2].row(r);
            for (std::size_t c = 0; c < p.w[2].cols(); ++c) {
                grow[c] += d * act.a2[c] * inv_n;
                da[c] += wrow[c] * d;
            }
        }
        dz2.resize(da.size());
        for (std::size_t r = 0; r < da.size(); ++r)
            dz2[r] = act.z2[r] > 0.0 ? da[r] : 0.0;

        da.assign(p.w[1].cols(), 0.0);
        for (std::size_t r = 0; r < p.w[1].rows(); ++r) {
            const double d = dz2[r];
            g.b[1][r] += d * inv_n;
            auto grow = g.w[1].row(r);
            const auto wrow = p.w[1].row(r);
            for (std::size_t c = 0; c < p.w[1].cols(); ++c) {
                grow[c] += d * act.a1[c] * inv_n;
                da[c] += wrow[c] * d;
            }
        }
        dz1.resize(da.size());
        for (std::size_t r = 0; r < da.size(); ++r)
            dz1[r] = act.z1[r] > 0.0 ? da[r] : 0.0;

        for (std::size_t r = 0; r < p.w[0].rows(); ++r) {
            const double d = dz1[r];
            g.b[0][r] += d * inv_n;
            auto grow = g.w[0].row(r);
            for (std::size_t c = 0; c < p.w[0].cols(); ++c)
                grow[c] += d * row[c] * inv_n;
        }
    }
    return g;
}

class FfnnModel final : public Model {
  public:
    FfnnModel(detail::FittedBase base, FfnnParams params, FfnnConfig config)
        : base_(std::move(base)),
          params_(std::move(params)),
          config_(config) {}

    Family family() const override { return Family::Ffnn; }
    int class_count() const override { return base_.class_count; }
    int feature_count() const override { return base_.feature_count; }
    std::uint64_t seed() const override { return base_.seed; }
    const detail::FittedBase& base() const { return base_; }
    const FfnnParams& params() const { return params_; }
    const FfnnConfig& config() const { return config_; }

    std::vector<double> probabilities(std::span<const double> x) const {
        check_input(x);
        return ffnn_probabilities(params_, base_.standardizer.apply(x));
    }

    int predict(std::span<const double> x) const override {
        const auto p = probabilities(x);
        return argmax_tie_low(p);
    }

  private:
    detail::FittedBase base_;
    FfnnParams params_;
    FfnnConfig config_;
};

inline ModelPtr train_ffnn(const LabeledSet& data, const FfnnConfig& config,
                           std::uint64_t seed) {
    data.validate();
    if (config.hidden < 1 || config.epochs < 0 || config.batch < 1)
        throw std::invalid_argument("train_ffnn: bad configuration");

    detail::FittedBase base;
    base.standardizer = Standardizer::fit(data.x);
    base.class_count = data.class_count;
    base.feature_count = static_cast<int>(data.dim());
    base.seed = seed;
    const Matrix x = base.standardizer.apply(data.x);

    FfnnParams params = ffnn_init(static_cast<int>(data.dim()), config.hidden,
                                  data.class_count, seed);
    // Adam moment estimates, one pair per parameter tensor.
    FfnnParams m = params, v = params;
    for (int l = 0; l < 3; ++l) {
        std::fill(m.w[l].data().begin(), m.w[l].data().end(), 0.0);
        std::fill(v.w[l].data().begin(), v.w[l].data().end(), 0.0);
        std::fill(m.b[l].begin(), m.b[l].end(), 0.0);
        std::fill(v.b[l].begin(), v.b[l].end(), 0.0);
    }

    Rng shuffle_rng(seed ^ 0x5a5a5a5a5a5a5a5aULL);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    long step = 0;
    Matrix batch_x;
    std::vector<int> batch_y;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch)) {
            const std::size_t end = std::min(
                order.size(), start + static_cast<std::size_t>(config.batch));
            batch_x = Matrix(end - start, data.dim());
            batch_y.resize(end - start);
            for (std::size_t i = start; i < end; ++i) {
                const auto row = x.row(order[i]);
                for (std::size_t j = 0; j < data.dim(); ++j)
                    batch_x.at(i - start, j) = row[j];
                batch_y[i - start] = data.y[order[i]];
            }
            const FfnnParams g = ffnn_gradients(params, batch_x, batch_y);

            ++step;
            const double bc1 = 1.0 - std::pow(config.beta1, step);
            const double bc2 = 1.0 - std::pow(config.beta2, step);
            auto adam = [&](double& theta, double& m_i, double& v_i, double grad) {
                m_i = config.beta1 * m_i + (1.0 - config.beta1) * grad;
                v_i = config.beta2 * v_i + (1.0 - config.beta2) * grad * grad;
                theta -= config.learning_rate * (m_i / bc1) /
                         (std::sqrt(v_i / bc2) + config.epsilon);
            };
            for (int l = 0; l < 3; ++l) {
                auto& wd = params.w[l].data();
                const auto& gd = g.w[l].data();
                for (std::size_t i = 0; i < wd.size(); ++i)
                    adam(wd[i], m.w[l].data()[i], v.w[l].data()[i], gd[i]);
                for (std::size_t i = 0; i < params.b[l].size(); ++i)
                    adam(params.b[l][i], m.b[l][i], v.b[l][i], g.b[l][i]);
            }
        }
    }
    return std::make_shared<FfnnModel>(std::move(base), std::move(params), config);
}

}  // namespace prosody
