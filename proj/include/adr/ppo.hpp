#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "adr/env.hpp"
#include "adr/nn.hpp"

namespace adr {

struct PpoConfig {
    double learning_rate = 3e-4;
    int n_steps = 2048;       // transitions collected per update
    int batch_size = 64;
    double gamma = 0.99;
    double gae_lambda = 0.95;
    double clip_range = 0.2;
    double vf_coef = 0.5;
    double max_grad_norm = 0.5;
    double ent_coef = 0.0;
    int epochs_per_update = 10;
    long total_episodes = 20000;
    std::uint64_t seed = 0;
    /// Stop an update's epoch loop once the mean KL(old||new) over a
    /// minibatch exceeds this; <= 0 disables the stop.
    double target_kl = 0.0;
};

struct Transition {
    Observation observation;
    std::vector<bool> mask;
    int action = 0;
    double reward = 0.0;
    bool done = false;
    double value = 0.0;     // V(s_t) under the collecting policy
    double log_prob = 0.0;  // log pi_old(a_t | s_t)
};

/// Fixed-capacity rollout storage plus the GAE products derived from it.
struct RolloutBuffer {
    std::vector<Transition> transitions;
    std::vector<double> advantages;
    std::vector<double> returns;

    bool full(int n_steps) const {
        return static_cast<int>(transitions.size()) >= n_steps;
    }
    void clear() {
        transitions.clear();
        advantages.clear();
        returns.clear();
    }
};

/// delta_t = r_t + gamma V(s_{t+1}) (1-done_t) - V(s_t);
/// A_t = delta_t + gamma lambda (1-done_t) A_{t+1}; returns_t = A_t + V(s_t).
void compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                 const std::vector<bool>& dones, double bootstrap_value, double gamma,
                 double gae_lambda, std::vector<double>& advantages,
                 std::vector<double>& returns);

void compute_gae(RolloutBuffer& buffer, double bootstrap_value, const PpoConfig& cfg);

/// min(ratio * A, clip(ratio, 1-eps, 1+eps) * A)
double clipped_surrogate(double ratio, double advantage, double epsilon);

/// One minibatch, columns of `obs` aligned with the flat vectors.
struct MiniBatch {
    Matrix obs;
    std::vector<int> actions;
    std::vector<std::vector<bool>> masks;
    Vector old_log_probs;
    Vector advantages;  // already normalized
    Vector returns;
};

struct LossTerms {
    double total = 0.0;
    double policy = 0.0;    // -mean clipped surrogate
    double value = 0.0;     // mean squared TD target error
    double entropy = 0.0;   // mean distribution entropy
    double mean_ratio = 0.0;
    double clip_fraction = 0.0;
    double approx_kl = 0.0;  // mean (ratio - 1 - log ratio)
};

/// Loss and dLoss/dtheta on one minibatch. Pure in the parameters, which is
/// what makes the finite-difference oracle possible.
LossTerms compute_loss_and_grads(const MlpPolicy& policy, const MiniBatch& batch,
                                 const PpoConfig& cfg, Vector* grad);

struct UpdateReport {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double mean_ratio_first_batch = 0.0;
    double clip_fraction = 0.0;
    double grad_norm = 0.0;  // mean pre-clip norm
    int minibatches = 0;
};

/// Clipped-surrogate update: epochs x shuffled minibatches of Adam steps
/// with per-minibatch advantage normalization and global gradient clipping.
/// Raises NumericsError on a non-finite loss.
UpdateReport ppo_update(const RolloutBuffer& buffer, MlpPolicy& policy,
                        AdamOptimizer& optimizer, const PpoConfig& cfg, Rng& rng);

struct EpisodeLogRow {
    long episode = 0;
    double cumulative_reward = 0.0;
    double ttr_seconds = 0.0;
    int steps = 0;
};

struct TrainingResult {
    MlpPolicy policy;
    std::vector<EpisodeLogRow> log;
    long updates = 0;
    long aborted_episodes = 0;  // infeasible-leg episodes dropped from the data
};

using ScenarioSampler = std::function<Scenario(Rng&)>;

/// Observation width for an n-debris scenario (10n+3).
int observation_dim(int n_debris);

MlpPolicy make_default_policy(int n_debris, Rng& rng);

/// On-policy training loop: fresh sampled scenario per episode reset,
/// one update per filled n_steps buffer. Deterministic under cfg.seed.
/// An episode that hits an infeasible leg is dropped (its collected
/// transitions discarded, a fresh scenario sampled) and counted in
/// TrainingResult::aborted_episodes; dv caps put a zero-measure set of
/// states over the limit and a long run must survive meeting one.
TrainingResult train(const ScenarioSampler& sampler, const PpoConfig& cfg,
                     const LegCostConfig& leg_cfg);

/// Greedy-decode the policy through the environment; masking keeps the
/// order a valid permutation regardless of training state.
SequenceResult policy_solve(const Scenario& scenario, const MlpPolicy& policy,
                            const LegCostConfig& leg_cfg);

void write_training_log(const std::string& path, const std::vector<EpisodeLogRow>& log);

}  // namespace adr
