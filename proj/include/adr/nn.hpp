#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "adr/rng.hpp"

namespace adr {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Categorical distribution over actions with hard masking: masked entries
/// have exactly zero probability and reject log_prob / sampling.
class MaskedCategorical {
public:
    MaskedCategorical(const Vector& logits, const std::vector<bool>& mask);

    const Vector& probs() const { return probs_; }
    double log_prob(int action) const;
    double entropy() const;
    int sample(Rng& rng) const;
    int argmax() const;

    /// d(log_prob(action))/d(logits): one-hot(action) - probs. Masked logits
    /// receive an exact zero.
    Vector log_prob_grad(int action) const;

    /// d(entropy)/d(logits) for the masked softmax.
    Vector entropy_grad() const;

private:
    Vector probs_;
    Vector log_probs_;  // -inf on masked entries
    std::vector<bool> mask_;
};

/// Policy/value network over the flat observation vector (10n+3), with two
/// wirings of the same tanh-MLP building blocks:
///
///  - flat: a shared trunk on the whole vector, linear policy head (n
///    logits) and linear value head.
///  - per_debris: one encoder MLP applied to every debris slot
///    [9 slot features, visited flag, chaser position] with shared weights,
///    mean-pooled into a context; logit_j scores [encoding_j, context]
///    through a shared head, the value head reads the context. Weight
///    sharing across slots is what makes the candidate-scoring function
///    learnable at small sample budgets.
///
/// All parameters live in one flat vector so that optimizers, gradient
/// clipping and finite-difference checks can treat the network as a plain
/// R^d point.
class MlpPolicy {
public:
    struct Topology {
        int input_dim = 0;
        std::vector<int> hidden = {64, 64};  // trunk (flat) or encoder (per_debris)
        int n_actions = 0;
        bool per_debris = false;
    };

    /// Batch forward pass products, kept for the backward pass.
    struct ForwardCache {
        Matrix input;                  // d x B (normalized)
        std::vector<Matrix> hidden;    // activations per layer, h_i x B
        Matrix logits;                 // n x B
        Eigen::RowVectorXd values;     // 1 x B
        // per_debris wiring only:
        Matrix cand_input;             // 13 x nB, candidate-major within sample
        Matrix enc1, enc2;             // encoder activations, h x nB
        Matrix context;                // h2 x B (mean pooled)
        Matrix score_in;               // 2*h2 x nB
        Matrix score_hidden;           // hs x nB
        Matrix value_hidden;           // hv x B
    };

    MlpPolicy(Topology topo, Rng& rng);

    const Topology& topology() const { return topo_; }
    int param_count() const { return static_cast<int>(theta_.size()); }
    const Vector& parameters() const { return theta_; }
    void set_parameters(const Vector& theta);

    /// Input standardization baked into the network: forward() consumes
    /// clip((x - mean) * scale, +-10). Identity until set. Training keeps the
    /// identity and normalizes observations itself; the trained statistics
    /// are baked in here for inference and checkpointing.
    void set_input_normalization(const Vector& mean, const Vector& scale);
    const Vector& input_mean() const { return in_mean_; }
    const Vector& input_scale() const { return in_scale_; }

    ForwardCache forward(const Matrix& input) const;
    void forward_single(const Vector& obs, Vector& logits, double& value) const;

    /// Accumulate dLoss/dtheta for the given upstream gradients; the cache
    /// must come from forward() on the same parameters.
    void backward(const ForwardCache& cache, const Matrix& dlogits,
                  const Eigen::RowVectorXd& dvalues, Vector& grad) const;

    void save(const std::string& path, double r_norm, double t_max,
              const std::string& config_hash) const;

private:
    friend struct MlpLayout;
    Topology topo_;
    Vector theta_;
    Vector in_mean_, in_scale_;
};

/// Welford running mean/variance over observation vectors; supplies the
/// standardization that keeps tiny-range orbital features trainable.
class RunningNormalizer {
public:
    explicit RunningNormalizer(int dim)
        : count_(0), mean_(Vector::Zero(dim)), m2_(Vector::Zero(dim)) {}

    void update(const Vector& x);
    Vector normalize(const Vector& x) const;  // clip((x-mean)/std, +-10)
    const Vector& mean() const { return mean_; }
    Vector scale() const;  // elementwise 1/std
    long count() const { return count_; }

private:
    long count_;
    Vector mean_, m2_;
};

/// Checkpoint contents: the policy plus the normalization constants and the
/// configuration fingerprint it was trained with.
struct LoadedPolicy {
    MlpPolicy policy;
    double r_norm;
    double t_max;
    std::string config_hash;
};

LoadedPolicy load_policy(const std::string& path);

/// Adam with bias correction; state matches the policy's flat layout.
class AdamOptimizer {
public:
    AdamOptimizer(int param_count, double learning_rate, double beta1 = 0.9,
                  double beta2 = 0.999, double epsilon = 1e-5);

    void step(Vector& theta, const Vector& grad);

private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    Vector m_, v_;
};

/// Scale grad in place so its l2 norm is at most max_norm; returns the
/// pre-clip norm.
double clip_global_norm(Vector& grad, double max_norm);

}  // namespace adr
