#pragma once

// Small actor-critic MLP with hand-written backpropagation. All parameters
// live in one flat vector so snapshots, optimizers and checkpoints treat
// them uniformly.
//
// Flat layout (each matrix column-major):
//   for each hidden layer l: W_l [h_l x h_{l-1}], b_l [h_l]
//   policy head:  W_mu [action_dim x h_L], b_mu [action_dim]
//   value head:   W_v  [1 x h_L],          b_v  [1]
//   log_std [action_dim]

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "crowdrl/common.hpp"

namespace crowdrl {

struct Architecture {
    int obs_dim = 0;
    std::vector<int> hidden{64, 64};
    int action_dim = 2;

    friend bool operator==(const Architecture&, const Architecture&) = default;

    std::string describe() const {
        std::ostringstream os;
        os << "obs=" << obs_dim << " hidden=";
        for (std::size_t i = 0; i < hidden.size(); ++i) os << (i ? "," : "") << hidden[i];
        os << " act=" << action_dim << " activation=tanh";
        return os.str();
    }
};

template <class Scalar>
class ActorCritic {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using MatMap = Eigen::Map<Matrix>;
    using ConstMatMap = Eigen::Map<const Matrix>;
    using VecMap = Eigen::Map<Vector>;
    using ConstVecMap = Eigen::Map<const Vector>;

    struct Cache {
        std::vector<Matrix> activations;  // [0] = input, then each hidden layer
        Matrix mean;                      // action_dim x N
        Matrix value;                     // 1 x N
    };

    ActorCritic() = default;

    explicit ActorCritic(Architecture arch) : arch_(std::move(arch)) {
        if (arch_.obs_dim <= 0 || arch_.action_dim <= 0 || arch_.hidden.empty())
            throw DomainError("invalid network architecture");
        std::size_t off = 0;
        int in = arch_.obs_dim;
        for (int h : arch_.hidden) {
            if (h <= 0) throw DomainError("hidden width must be positive");
            layers_.push_back({off, off + static_cast<std::size_t>(h * in), h, in});
            off += static_cast<std::size_t>(h * in + h);
            in = h;
        }
        mu_ = {off, off + static_cast<std::size_t>(arch_.action_dim * in), arch_.action_dim, in};
        off += static_cast<std::size_t>(arch_.action_dim * in + arch_.action_dim);
        value_ = {off, off + static_cast<std::size_t>(in), 1, in};
        off += static_cast<std::size_t>(in + 1);
        log_std_offset_ = off;
        off += static_cast<std::size_t>(arch_.action_dim);
        params_ = Vector::Zero(static_cast<Eigen::Index>(off));
    }

    const Architecture& architecture() const { return arch_; }
    Eigen::Index parameter_count() const { return params_.size(); }
    Vector& parameters() { return params_; }
    const Vector& parameters() const { return params_; }

    /// Scaled-Gaussian initialization; the policy head starts near zero so initial actions are centred.
    template <class Rng>
    void initialize(Rng& rng, Scalar initial_log_std = Scalar(-0.5)) {
        std::normal_distribution<double> normal(0.0, 1.0);
        params_.setZero();
        auto fill = [&](const Layer& l, double gain) {
            const double scale = gain / std::sqrt(static_cast<double>(l.in));
            for (int i = 0; i < l.out * l.in; ++i) params_[static_cast<Eigen::Index>(l.w) + i] = Scalar(scale * normal(rng));
        };
        for (const auto& l : layers_) fill(l, 1.0);
        fill(mu_, 0.01);
        fill(value_, 1.0);
        log_std().setConstant(initial_log_std);
    }

    VecMap log_std() { return VecMap(params_.data() + log_std_offset_, arch_.action_dim); }
    ConstVecMap log_std() const { return ConstVecMap(params_.data() + log_std_offset_, arch_.action_dim); }

    /// Forward pass over a batch laid out one observation per column.
    Cache forward(const Eigen::Ref<const Matrix>& obs) const {
        if (obs.rows() != arch_.obs_dim) throw UsageError("observation arity mismatch");
        Cache c;
        c.activations.reserve(layers_.size() + 1);
        c.activations.emplace_back(obs);
        for (const auto& l : layers_) {
            Matrix z = weights(l) * c.activations.back();
            z.colwise() += bias(l);
            c.activations.emplace_back(z.array().tanh().matrix());
        }
        const Matrix& top = c.activations.back();
        c.mean = weights(mu_) * top;
        c.mean.colwise() += bias(mu_);
        c.value = weights(value_) * top;
        c.value.colwise() += bias(value_);
        return c;
    }

    /// Gradient of sum_i (d_mean[:, i] . mean[:, i] + d_value[i] value[i]) plus d_log_std . log_std.
    Vector backward(const Cache& c, const Eigen::Ref<const Matrix>& d_mean, const Eigen::Ref<const Matrix>& d_value,
                    const Eigen::Ref<const Vector>& d_log_std) const {
        Vector grad = Vector::Zero(params_.size());
        const Matrix& top = c.activations.back();
        grad_weights(grad, mu_) = d_mean * top.transpose();
        grad_bias(grad, mu_) = d_mean.rowwise().sum();
        grad_weights(grad, value_) = d_value * top.transpose();
        grad_bias(grad, value_) = d_value.rowwise().sum();
        VecMap(grad.data() + log_std_offset_, arch_.action_dim) = d_log_std;

        Matrix d_act = weights(mu_).transpose() * d_mean + weights(value_).transpose() * d_value;
        for (std::size_t k = layers_.size(); k-- > 0;) {
            const Matrix& a = c.activations[k + 1];
            Matrix dz = (d_act.array() * (Scalar(1) - a.array().square())).matrix();
            grad_weights(grad, layers_[k]) = dz * c.activations[k].transpose();
            grad_bias(grad, layers_[k]) = dz.rowwise().sum();
            if (k > 0) d_act = weights(layers_[k]).transpose() * dz;
        }
        return grad;
    }

private:
    struct Layer {
        std::size_t w = 0;  // offset of the weight matrix
        std::size_t b = 0;  // offset of the bias vector
        int out = 0;
        int in = 0;
    };

    ConstMatMap weights(const Layer& l) const { return ConstMatMap(params_.data() + l.w, l.out, l.in); }
    ConstVecMap bias(const Layer& l) const { return ConstVecMap(params_.data() + l.b, l.out); }
    static MatMap grad_weights(Vector& g, const Layer& l) { return MatMap(g.data() + l.w, l.out, l.in); }
    static VecMap grad_bias(Vector& g, const Layer& l) { return VecMap(g.data() + l.b, l.out); }

    Architecture arch_;
    std::vector<Layer> layers_;
    Layer mu_;
    Layer value_;
    std::size_t log_std_offset_ = 0;
    Vector params_;
};

/// Adam with bias correction over a flat parameter vector.
template <class Scalar>
class Adam {
public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Adam() = default;
    Adam(Eigen::Index n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-5)
        : m_(Vector::Zero(n)), v_(Vector::Zero(n)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(Vector& params, const Vector& grad) {
        ++t_;
        m_ = Scalar(beta1_) * m_ + Scalar(1 - beta1_) * grad;
        v_ = Scalar(beta2_) * v_ + Scalar(1 - beta2_) * grad.cwiseAbs2();
        const double c1 = 1.0 - std::pow(beta1_, t_);
        const double c2 = 1.0 - std::pow(beta2_, t_);
        const Scalar step = Scalar(lr_ * std::sqrt(c2) / c1);
        params.array() -= step * m_.array() / (v_.array().sqrt() + Scalar(eps_ * std::sqrt(c2)));
    }

    double learning_rate() const { return lr_; }
    void set_learning_rate(double lr) { lr_ = lr; }

private:
    Vector m_;
    Vector v_;
    double lr_ = 3e-4;
    double beta1_ = 0.9;
    double beta2_ = 0.999;
    double eps_ = 1e-5;
    long t_ = 0;
};

}  // namespace crowdrl
