#include "adr/nn.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/QR>
#include <nlohmann/json.hpp>

#include "adr/errors.hpp"

namespace adr {

using nlohmann::json;

// ---------------------------------------------------------------------------
// MaskedCategorical

MaskedCategorical::MaskedCategorical(const Vector& logits, const std::vector<bool>& mask)
    : mask_(mask) {
    if (static_cast<std::size_t>(logits.size()) != mask.size()) {
        throw DomainError("masked distribution: logits/mask length mismatch");
    }
    const auto n = logits.size();
    double max_logit = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (mask_[static_cast<std::size_t>(i)]) max_logit = std::max(max_logit, logits[i]);
    }
    if (max_logit == -std::numeric_limits<double>::infinity()) {
        throw DomainError("masked distribution: mask allows no action");
    }

    probs_ = Vector::Zero(n);
    log_probs_ = Vector::Constant(n, -std::numeric_limits<double>::infinity());
    double z = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!mask_[static_cast<std::size_t>(i)]) continue;
        probs_[i] = std::exp(logits[i] - max_logit);
        z += probs_[i];
    }
    const double log_z = std::log(z);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!mask_[static_cast<std::size_t>(i)]) continue;
        probs_[i] /= z;
        log_probs_[i] = logits[i] - max_logit - log_z;
    }
}

double MaskedCategorical::log_prob(int action) const {
    if (action < 0 || static_cast<std::size_t>(action) >= mask_.size() ||
        !mask_[static_cast<std::size_t>(action)]) {
        throw InvalidActionError("log_prob of a masked action");
    }
    return log_probs_[action];
}

double MaskedCategorical::entropy() const {
    double h = 0.0;
    for (Eigen::Index i = 0; i < probs_.size(); ++i) {
        if (probs_[i] > 0.0) h -= probs_[i] * log_probs_[i];
    }
    return h;
}

int MaskedCategorical::sample(Rng& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    int last_allowed = -1;
    for (Eigen::Index i = 0; i < probs_.size(); ++i) {
        if (!mask_[static_cast<std::size_t>(i)]) continue;
        last_allowed = static_cast<int>(i);
        acc += probs_[i];
        if (u < acc) return static_cast<int>(i);
    }
    return last_allowed;  // u landed in the rounding tail
}

int MaskedCategorical::argmax() const {
    int best = -1;
    double best_p = -1.0;
    for (Eigen::Index i = 0; i < probs_.size(); ++i) {
        if (mask_[static_cast<std::size_t>(i)] && probs_[i] > best_p) {
            best_p = probs_[i];
            best = static_cast<int>(i);
        }
    }
    return best;
}

Vector MaskedCategorical::log_prob_grad(int action) const {
    Vector grad = -probs_;
    grad[action] += 1.0;
    return grad;  // exactly zero on masked entries since probs_ is zero there
}

Vector MaskedCategorical::entropy_grad() const {
    // dH/dz_i = -p_i (log p_i + H)
    const double h = entropy();
    Vector grad = Vector::Zero(probs_.size());
    for (Eigen::Index i = 0; i < probs_.size(); ++i) {
        if (probs_[i] > 0.0) grad[i] = -probs_[i] * (log_probs_[i] + h);
    }
    return grad;
}

// ---------------------------------------------------------------------------
// MlpPolicy

namespace {

constexpr int kCandFeatures = 13;  // 9 slot features + visited flag + chaser xyz
constexpr int kScoreHidden = 64;
constexpr int kValueHidden = 64;

// Flat-vector offsets for every tensor of the network.
struct Entry {
    int offset;
    int rows;
    int cols;
};

struct Layout {
    std::vector<Entry> weights;  // trunk (flat) or encoder (per_debris)
    std::vector<Entry> biases;
    Entry policy_w, policy_b, value_w, value_b;          // flat wiring
    Entry score_w, score_b, score_out_w, score_out_b;    // per_debris wiring
    Entry value_h_w, value_h_b, value_out_w, value_out_b;
    int total = 0;
};

Layout make_layout(const MlpPolicy::Topology& topo) {
    Layout layout{};
    int offset = 0;
    const auto add = [&offset](int rows, int cols) {
        const Entry entry{offset, rows, cols};
        offset += rows * cols;
        return entry;
    };
    int in_dim = topo.per_debris ? kCandFeatures : topo.input_dim;
    for (const int h : topo.hidden) {
        layout.weights.push_back(add(h, in_dim));
        layout.biases.push_back(add(h, 1));
        in_dim = h;
    }
    if (topo.per_debris) {
        layout.score_w = add(kScoreHidden, 2 * in_dim);
        layout.score_b = add(kScoreHidden, 1);
        layout.score_out_w = add(1, kScoreHidden);
        layout.score_out_b = add(1, 1);
        layout.value_h_w = add(kValueHidden, in_dim);
        layout.value_h_b = add(kValueHidden, 1);
        layout.value_out_w = add(1, kValueHidden);
        layout.value_out_b = add(1, 1);
    } else {
        layout.policy_w = add(topo.n_actions, in_dim);
        layout.policy_b = add(topo.n_actions, 1);
        layout.value_w = add(1, in_dim);
        layout.value_b = add(1, 1);
    }
    layout.total = offset;
    return layout;
}

using ConstMap = Eigen::Map<const Matrix>;
using MutMap = Eigen::Map<Matrix>;

ConstMap view(const Vector& theta, const Entry& e) {
    return ConstMap(theta.data() + e.offset, e.rows, e.cols);
}

MutMap view(Vector& theta, const Entry& e) {
    return MutMap(theta.data() + e.offset, e.rows, e.cols);
}

void forward_per_debris(const MlpPolicy::Topology& topo, const Vector& theta,
                        const Layout& layout, MlpPolicy::ForwardCache& cache) {
    const int n = topo.n_actions;
    const auto batch = static_cast<int>(cache.input.cols());
    const int nb = n * batch;

    // Candidate-major inputs: column k*n + j holds debris j of sample k as
    // [9 slot features, visited flag, chaser xyz].
    cache.cand_input.resize(kCandFeatures, nb);
    for (int k = 0; k < batch; ++k) {
        const auto obs = cache.input.col(k);
        for (int j = 0; j < n; ++j) {
            auto col = cache.cand_input.col(k * n + j);
            col.segment(0, 9) = obs.segment(9 * j, 9);
            col(9) = obs(9 * n + 3 + j);
            col.segment(10, 3) = obs.segment(9 * n, 3);
        }
    }

    cache.enc1 = ((view(theta, layout.weights[0]) * cache.cand_input).colwise() +
                  view(theta, layout.biases[0]).col(0))
                     .array()
                     .tanh()
                     .matrix();
    cache.enc2 = ((view(theta, layout.weights[1]) * cache.enc1).colwise() +
                  view(theta, layout.biases[1]).col(0))
                     .array()
                     .tanh()
                     .matrix();

    const auto h2 = static_cast<int>(cache.enc2.rows());
    cache.context.resize(h2, batch);
    for (int k = 0; k < batch; ++k) {
        cache.context.col(k) = cache.enc2.middleCols(k * n, n).rowwise().mean();
    }

    cache.score_in.resize(2 * h2, nb);
    cache.score_in.topRows(h2) = cache.enc2;
    for (int k = 0; k < batch; ++k) {
        cache.score_in.block(h2, k * n, h2, n) = cache.context.col(k).replicate(1, n);
    }
    cache.score_hidden = ((view(theta, layout.score_w) * cache.score_in).colwise() +
                          view(theta, layout.score_b).col(0))
                             .array()
                             .tanh()
                             .matrix();
    Eigen::RowVectorXd flat_logits =
        (view(theta, layout.score_out_w) * cache.score_hidden).row(0).array() +
        theta[layout.score_out_b.offset];
    cache.logits = Eigen::Map<const Matrix>(flat_logits.data(), n, batch);

    cache.value_hidden = ((view(theta, layout.value_h_w) * cache.context).colwise() +
                          view(theta, layout.value_h_b).col(0))
                             .array()
                             .tanh()
                             .matrix();
    cache.values = (view(theta, layout.value_out_w) * cache.value_hidden).row(0).array() +
                   theta[layout.value_out_b.offset];
}

void backward_per_debris(const MlpPolicy::Topology& topo, const Vector& theta,
                         const Layout& layout, const MlpPolicy::ForwardCache& cache,
                         const Matrix& dlogits, const Eigen::RowVectorXd& dvalues,
                         Vector& grad) {
    const int n = topo.n_actions;
    const auto batch = static_cast<int>(cache.input.cols());
    const auto h2 = static_cast<int>(cache.enc2.rows());

    // value head
    const Matrix dvh =
        (view(theta, layout.value_out_w).transpose() * dvalues).array() *
        (1.0 - cache.value_hidden.array().square());
    view(grad, layout.value_out_w) += dvalues * cache.value_hidden.transpose();
    grad[layout.value_out_b.offset] += dvalues.sum();
    view(grad, layout.value_h_w) += dvh * cache.context.transpose();
    view(grad, layout.value_h_b).col(0) += dvh.rowwise().sum();
    Matrix dcontext = view(theta, layout.value_h_w).transpose() * dvh;  // h2 x B

    // score head
    const Eigen::RowVectorXd dflat =
        Eigen::Map<const Eigen::RowVectorXd>(dlogits.data(), n * batch);
    const Matrix dsh = (view(theta, layout.score_out_w).transpose() * dflat).array() *
                       (1.0 - cache.score_hidden.array().square());
    view(grad, layout.score_out_w) += dflat * cache.score_hidden.transpose();
    grad[layout.score_out_b.offset] += dflat.sum();
    view(grad, layout.score_w) += dsh * cache.score_in.transpose();
    view(grad, layout.score_b).col(0) += dsh.rowwise().sum();
    const Matrix dscore_in = view(theta, layout.score_w).transpose() * dsh;  // 2h2 x nB

    Matrix denc2 = dscore_in.topRows(h2);
    for (int k = 0; k < batch; ++k) {
        dcontext.col(k) += dscore_in.block(h2, k * n, h2, n).rowwise().sum();
    }
    // mean pooling spreads the context gradient evenly over the slots
    for (int k = 0; k < batch; ++k) {
        denc2.middleCols(k * n, n).colwise() += (dcontext.col(k) / n).eval();
    }

    const Matrix dz2 = denc2.array() * (1.0 - cache.enc2.array().square());
    view(grad, layout.weights[1]) += dz2 * cache.enc1.transpose();
    view(grad, layout.biases[1]).col(0) += dz2.rowwise().sum();
    const Matrix dz1 =
        (view(theta, layout.weights[1]).transpose() * dz2).array() *
        (1.0 - cache.enc1.array().square());
    view(grad, layout.weights[0]) += dz1 * cache.cand_input.transpose();
    view(grad, layout.biases[0]).col(0) += dz1.rowwise().sum();
}

}  // namespace

MlpPolicy::MlpPolicy(Topology topo, Rng& rng) : topo_(std::move(topo)) {
    if (topo_.input_dim <= 0 || topo_.n_actions <= 0) {
        throw DomainError("MlpPolicy: input_dim and n_actions must be positive");
    }
    if (topo_.per_debris && topo_.input_dim != 10 * topo_.n_actions + 3) {
        throw DomainError("MlpPolicy: per-debris wiring needs input_dim == 10n+3");
    }
    if (topo_.per_debris && topo_.hidden.size() != 2) {
        throw DomainError("MlpPolicy: per-debris wiring expects two encoder layers");
    }
    const Layout layout = make_layout(topo_);
    theta_ = Vector::Zero(layout.total);
    in_mean_ = Vector::Zero(topo_.input_dim);
    in_scale_ = Vector::Ones(topo_.input_dim);

    // Orthogonal trunk (gain sqrt(2)), small policy/score output so the
    // initial distribution is near uniform, unit-gain value output.
    const auto init_orthogonal = [&rng](MutMap w, double gain) {
        Matrix gaussian(w.rows(), w.cols());
        for (int c = 0; c < w.cols(); ++c) {
            for (int r = 0; r < w.rows(); ++r) gaussian(r, c) = rng.normal();
        }
        const bool wide = w.cols() > w.rows();
        if (wide) gaussian.transposeInPlace();
        Eigen::HouseholderQR<Matrix> qr(gaussian);
        Matrix q = qr.householderQ() * Matrix::Identity(gaussian.rows(), gaussian.cols());
        const Matrix r_mat =
            qr.matrixQR().topRows(gaussian.cols()).triangularView<Eigen::Upper>();
        for (int c = 0; c < q.cols(); ++c) {  // fix signs for uniqueness
            if (r_mat(c, c) < 0.0) q.col(c) = -q.col(c);
        }
        if (wide) q.transposeInPlace();
        w = gain * q;
    };
    for (const auto& entry : layout.weights) {
        init_orthogonal(view(theta_, entry), std::sqrt(2.0));
    }
    if (topo_.per_debris) {
        init_orthogonal(view(theta_, layout.score_w), std::sqrt(2.0));
        init_orthogonal(view(theta_, layout.score_out_w), 0.01);
        init_orthogonal(view(theta_, layout.value_h_w), std::sqrt(2.0));
        init_orthogonal(view(theta_, layout.value_out_w), 1.0);
    } else {
        init_orthogonal(view(theta_, layout.policy_w), 0.01);
        init_orthogonal(view(theta_, layout.value_w), 1.0);
    }
}

void MlpPolicy::set_parameters(const Vector& theta) {
    if (theta.size() != theta_.size()) {
        throw DomainError("set_parameters: size mismatch");
    }
    theta_ = theta;
}

void MlpPolicy::set_input_normalization(const Vector& mean, const Vector& scale) {
    if (mean.size() != topo_.input_dim || scale.size() != topo_.input_dim) {
        throw DomainError("set_input_normalization: dimension mismatch");
    }
    in_mean_ = mean;
    in_scale_ = scale;
}

MlpPolicy::ForwardCache MlpPolicy::forward(const Matrix& input) const {
    if (input.rows() != topo_.input_dim) {
        throw DomainError("forward: observation dimension mismatch");
    }
    const Layout layout = make_layout(topo_);
    ForwardCache cache;
    cache.input = ((input.colwise() - in_mean_).array().colwise() * in_scale_.array())
                      .cwiseMax(-10.0)
                      .cwiseMin(10.0)
                      .matrix();
    if (topo_.per_debris) {
        forward_per_debris(topo_, theta_, layout, cache);
        return cache;
    }
    Matrix h = cache.input;
    for (std::size_t l = 0; l < layout.weights.size(); ++l) {
        h = ((view(theta_, layout.weights[l]) * h).colwise() +
             view(theta_, layout.biases[l]).col(0))
                .array()
                .tanh()
                .matrix();
        cache.hidden.push_back(h);
    }
    cache.logits =
        (view(theta_, layout.policy_w) * h).colwise() + view(theta_, layout.policy_b).col(0);
    cache.values =
        (view(theta_, layout.value_w) * h).row(0).array() + theta_[layout.value_b.offset];
    return cache;
}

void MlpPolicy::forward_single(const Vector& obs, Vector& logits, double& value) const {
    const ForwardCache cache = forward(obs);
    logits = cache.logits.col(0);
    value = cache.values(0);
}

void MlpPolicy::backward(const ForwardCache& cache, const Matrix& dlogits,
                         const Eigen::RowVectorXd& dvalues, Vector& grad) const {
    const Layout layout = make_layout(topo_);
    if (grad.size() != theta_.size()) grad = Vector::Zero(theta_.size());

    if (topo_.per_debris) {
        backward_per_debris(topo_, theta_, layout, cache, dlogits, dvalues, grad);
        return;
    }

    const Matrix& top = cache.hidden.back();
    view(grad, layout.policy_w) += dlogits * top.transpose();
    view(grad, layout.policy_b).col(0) += dlogits.rowwise().sum();
    view(grad, layout.value_w) += dvalues * top.transpose();
    grad[layout.value_b.offset] += dvalues.sum();

    // gradient flowing into the top hidden activation
    Matrix dh = view(theta_, layout.policy_w).transpose() * dlogits +
                view(theta_, layout.value_w).transpose() * dvalues;

    for (int l = static_cast<int>(layout.weights.size()) - 1; l >= 0; --l) {
        const Matrix& act = cache.hidden[static_cast<std::size_t>(l)];
        const Matrix dz = dh.array() * (1.0 - act.array().square());
        const Matrix& below =
            l == 0 ? cache.input : cache.hidden[static_cast<std::size_t>(l - 1)];
        view(grad, layout.weights[static_cast<std::size_t>(l)]) += dz * below.transpose();
        view(grad, layout.biases[static_cast<std::size_t>(l)]).col(0) += dz.rowwise().sum();
        if (l > 0) {
            dh = view(theta_, layout.weights[static_cast<std::size_t>(l)]).transpose() * dz;
        }
    }
}

void MlpPolicy::save(const std::string& path, double r_norm, double t_max,
                     const std::string& config_hash) const {
    json j;
    j["format_version"] = 1;
    j["topology"] = {{"input_dim", topo_.input_dim},
                     {"hidden", topo_.hidden},
                     {"n_actions", topo_.n_actions},
                     {"per_debris", topo_.per_debris}};
    j["normalization"] = {
        {"r_norm_km", r_norm},
        {"t_max_s", t_max},
        {"input_mean", std::vector<double>(in_mean_.data(), in_mean_.data() + in_mean_.size())},
        {"input_scale",
         std::vector<double>(in_scale_.data(), in_scale_.data() + in_scale_.size())}};
    j["config_hash"] = config_hash;
    std::vector<double> params(theta_.data(), theta_.data() + theta_.size());
    j["parameters"] = std::move(params);

    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << j.dump() << '\n';
}

LoadedPolicy load_policy(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open checkpoint: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("checkpoint JSON: ") + ex.what());
    }
    try {
        if (j.at("format_version").get<int>() != 1) {
            throw ConfigError("unsupported checkpoint format version");
        }
        MlpPolicy::Topology topo;
        topo.input_dim = j.at("topology").at("input_dim").get<int>();
        topo.hidden = j.at("topology").at("hidden").get<std::vector<int>>();
        topo.n_actions = j.at("topology").at("n_actions").get<int>();
        topo.per_debris = j.at("topology").value("per_debris", false);

        Rng dummy(0);
        MlpPolicy policy(topo, dummy);
        const auto params = j.at("parameters").get<std::vector<double>>();
        if (static_cast<int>(params.size()) != policy.param_count()) {
            throw ConfigError("checkpoint parameter count does not match topology");
        }
        Vector theta(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) {
            theta[static_cast<Eigen::Index>(i)] = params[i];
        }
        policy.set_parameters(theta);

        const auto& norm = j.at("normalization");
        if (norm.contains("input_mean")) {
            const auto mean_v = norm.at("input_mean").get<std::vector<double>>();
            const auto scale_v = norm.at("input_scale").get<std::vector<double>>();
            if (static_cast<int>(mean_v.size()) != topo.input_dim ||
                static_cast<int>(scale_v.size()) != topo.input_dim) {
                throw ConfigError("checkpoint normalization size mismatch");
            }
            Vector mean(topo.input_dim), scale(topo.input_dim);
            for (int i = 0; i < topo.input_dim; ++i) {
                mean[i] = mean_v[static_cast<std::size_t>(i)];
                scale[i] = scale_v[static_cast<std::size_t>(i)];
            }
            policy.set_input_normalization(mean, scale);
        }

        return LoadedPolicy{std::move(policy),
                            j.at("normalization").at("r_norm_km").get<double>(),
                            j.at("normalization").at("t_max_s").get<double>(),
                            j.at("config_hash").get<std::string>()};
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("checkpoint JSON: ") + ex.what());
    }
}

// ---------------------------------------------------------------------------
// RunningNormalizer

void RunningNormalizer::update(const Vector& x) {
    ++count_;
    const Vector delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta.cwiseProduct(x - mean_);
}

Vector RunningNormalizer::scale() const {
    if (count_ < 2) return Vector::Ones(mean_.size());
    const Vector var = m2_ / static_cast<double>(count_ - 1);
    return (var.array() + 1e-8).rsqrt();
}

Vector RunningNormalizer::normalize(const Vector& x) const {
    if (count_ < 2) return x;
    return ((x - mean_).cwiseProduct(scale())).cwiseMax(-10.0).cwiseMin(10.0);
}

// ---------------------------------------------------------------------------
// AdamOptimizer

AdamOptimizer::AdamOptimizer(int param_count, double learning_rate, double beta1,
                             double beta2, double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(Vector::Zero(param_count)),
      v_(Vector::Zero(param_count)) {}

void AdamOptimizer::step(Vector& theta, const Vector& grad) {
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.array().square().matrix();
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    theta.array() -= lr_ * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + eps_);
}

double clip_global_norm(Vector& grad, double max_norm) {
    const double norm = grad.norm();
    if (norm > max_norm && norm > 0.0) {
        grad *= max_norm / norm;
    }
    return norm;
}

}  // namespace adr
