#include "adr/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "adr/errors.hpp"

namespace adr {

void compute_gae(const std::vector<double>& rewards, const std::vector<double>& values,
                 const std::vector<bool>& dones, double bootstrap_value, double gamma,
                 double gae_lambda, std::vector<double>& advantages,
                 std::vector<double>& returns) {
    const std::size_t n = rewards.size();
    if (values.size() != n || dones.size() != n) {
        throw DomainError("compute_gae: sequence length mismatch");
    }
    advantages.assign(n, 0.0);
    returns.assign(n, 0.0);

    double next_advantage = 0.0;
    double next_value = bootstrap_value;
    for (std::size_t t = n; t-- > 0;) {
        const double not_done = dones[t] ? 0.0 : 1.0;
        const double delta = rewards[t] + gamma * next_value * not_done - values[t];
        next_advantage = delta + gamma * gae_lambda * not_done * next_advantage;
        advantages[t] = next_advantage;
        returns[t] = next_advantage + values[t];
        next_value = values[t];
    }
}

void compute_gae(RolloutBuffer& buffer, double bootstrap_value, const PpoConfig& cfg) {
    std::vector<double> rewards, values;
    std::vector<bool> dones;
    rewards.reserve(buffer.transitions.size());
    values.reserve(buffer.transitions.size());
    dones.reserve(buffer.transitions.size());
    for (const auto& tr : buffer.transitions) {
        rewards.push_back(tr.reward);
        values.push_back(tr.value);
        dones.push_back(tr.done);
    }
    compute_gae(rewards, values, dones, bootstrap_value, cfg.gamma, cfg.gae_lambda,
                buffer.advantages, buffer.returns);
}

double clipped_surrogate(double ratio, double advantage, double epsilon) {
    const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
    return std::min(ratio * advantage, clipped * advantage);
}

LossTerms compute_loss_and_grads(const MlpPolicy& policy, const MiniBatch& batch,
                                 const PpoConfig& cfg, Vector* grad) {
    const auto batch_size = static_cast<Eigen::Index>(batch.actions.size());
    if (batch.obs.cols() != batch_size) {
        throw DomainError("compute_loss_and_grads: batch size mismatch");
    }
    const MlpPolicy::ForwardCache cache = policy.forward(batch.obs);

    LossTerms terms;
    Matrix dlogits = Matrix::Zero(cache.logits.rows(), batch_size);
    Eigen::RowVectorXd dvalues = Eigen::RowVectorXd::Zero(batch_size);
    const double inv_b = 1.0 / static_cast<double>(batch_size);

    for (Eigen::Index k = 0; k < batch_size; ++k) {
        const MaskedCategorical dist(cache.logits.col(k), batch.masks[static_cast<std::size_t>(k)]);
        const int action = batch.actions[static_cast<std::size_t>(k)];
        const double log_prob = dist.log_prob(action);
        const double ratio = std::exp(log_prob - batch.old_log_probs[k]);
        const double adv = batch.advantages[k];

        const double surr_raw = ratio * adv;
        const double surr_clip =
            std::clamp(ratio, 1.0 - cfg.clip_range, 1.0 + cfg.clip_range) * adv;
        terms.policy -= inv_b * std::min(surr_raw, surr_clip);
        terms.mean_ratio += inv_b * ratio;
        terms.approx_kl += inv_b * (ratio - 1.0 - std::log(ratio));
        if (surr_raw > surr_clip) terms.clip_fraction += inv_b;

        const double entropy = dist.entropy();
        terms.entropy += inv_b * entropy;

        const double value_err = cache.values(k) - batch.returns[k];
        terms.value += inv_b * value_err * value_err;

        if (grad != nullptr) {
            // policy term: gradient flows only where the raw surrogate is active
            if (surr_raw <= surr_clip) {
                dlogits.col(k) -= inv_b * adv * ratio * dist.log_prob_grad(action);
            }
            if (cfg.ent_coef != 0.0) {
                dlogits.col(k) -= inv_b * cfg.ent_coef * dist.entropy_grad();
            }
            dvalues(k) = cfg.vf_coef * 2.0 * inv_b * value_err;
        }
    }

    terms.total = terms.policy + cfg.vf_coef * terms.value - cfg.ent_coef * terms.entropy;
    if (!std::isfinite(terms.total)) {
        throw NumericsError("ppo loss is not finite (policy=" + std::to_string(terms.policy) +
                            ", value=" + std::to_string(terms.value) + ")");
    }
    if (grad != nullptr) {
        grad->setZero();
        policy.backward(cache, dlogits, dvalues, *grad);
    }
    return terms;
}

UpdateReport ppo_update(const RolloutBuffer& buffer, MlpPolicy& policy,
                        AdamOptimizer& optimizer, const PpoConfig& cfg, Rng& rng) {
    const int n = static_cast<int>(buffer.transitions.size());
    if (n == 0) throw DomainError("ppo_update: empty buffer");
    if (buffer.advantages.size() != buffer.transitions.size()) {
        throw DomainError("ppo_update: advantages not computed");
    }
    const int obs_dim = policy.topology().input_dim;

    UpdateReport report;
    Vector grad = Vector::Zero(policy.param_count());
    std::vector<int> indices(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) indices[static_cast<std::size_t>(i)] = i;

    bool first_batch = true;
    bool kl_stop = false;
    for (int epoch = 0; epoch < cfg.epochs_per_update && !kl_stop; ++epoch) {
        rng.shuffle(indices);
        for (int begin = 0; begin < n; begin += cfg.batch_size) {
            const int size = std::min(cfg.batch_size, n - begin);

            MiniBatch batch;
            batch.obs.resize(obs_dim, size);
            batch.actions.resize(static_cast<std::size_t>(size));
            batch.masks.resize(static_cast<std::size_t>(size));
            batch.old_log_probs.resize(size);
            batch.advantages.resize(size);
            batch.returns.resize(size);
            for (int k = 0; k < size; ++k) {
                const int idx = indices[static_cast<std::size_t>(begin + k)];
                const Transition& tr = buffer.transitions[static_cast<std::size_t>(idx)];
                for (int d = 0; d < obs_dim; ++d) {
                    batch.obs(d, k) = tr.observation[static_cast<std::size_t>(d)];
                }
                batch.actions[static_cast<std::size_t>(k)] = tr.action;
                batch.masks[static_cast<std::size_t>(k)] = tr.mask;
                batch.old_log_probs[k] = tr.log_prob;
                batch.advantages[k] = buffer.advantages[static_cast<std::size_t>(idx)];
                batch.returns[k] = buffer.returns[static_cast<std::size_t>(idx)];
            }
            // per-minibatch advantage normalization
            const double mean = batch.advantages.mean();
            const double var =
                (batch.advantages.array() - mean).square().sum() / static_cast<double>(size);
            batch.advantages = ((batch.advantages.array() - mean) / (std::sqrt(var) + 1e-8));

            const LossTerms terms = compute_loss_and_grads(policy, batch, cfg, &grad);
            report.grad_norm += clip_global_norm(grad, cfg.max_grad_norm);

            Vector theta = policy.parameters();
            optimizer.step(theta, grad);
            policy.set_parameters(theta);

            report.policy_loss += terms.policy;
            report.value_loss += terms.value;
            report.entropy += terms.entropy;
            report.clip_fraction += terms.clip_fraction;
            report.minibatches += 1;
            if (first_batch) {
                report.mean_ratio_first_batch = terms.mean_ratio;
                first_batch = false;
            }
            if (cfg.target_kl > 0.0 && terms.approx_kl > cfg.target_kl) {
                kl_stop = true;
                break;
            }
        }
    }
    const double inv = 1.0 / std::max(1, report.minibatches);
    report.policy_loss *= inv;
    report.value_loss *= inv;
    report.entropy *= inv;
    report.clip_fraction *= inv;
    report.grad_norm *= inv;
    return report;
}

int observation_dim(int n_debris) { return 10 * n_debris + 3; }

MlpPolicy make_default_policy(int n_debris, Rng& rng) {
    MlpPolicy::Topology topo;
    topo.input_dim = observation_dim(n_debris);
    topo.hidden = {64, 64};
    topo.n_actions = n_debris;
    topo.per_debris = true;  // shared candidate scoring; see README notes
    return MlpPolicy(topo, rng);
}

TrainingResult train(const ScenarioSampler& sampler, const PpoConfig& cfg,
                     const LegCostConfig& leg_cfg) {
    Rng rng(cfg.seed);

    Scenario scenario = sampler(rng);
    const int n_debris = static_cast<int>(scenario.debris.size());
    MlpPolicy policy = make_default_policy(n_debris, rng);
    AdamOptimizer optimizer(policy.param_count(), cfg.learning_rate);

    TrainingResult result{policy, {}, 0};
    if (cfg.total_episodes <= 0) return result;

    // Observations are standardized with running statistics; the buffer
    // stores the standardized vectors so update-time inputs match exactly
    // what the collecting policy saw. The final statistics are baked into
    // the returned policy for inference on raw observations.
    RunningNormalizer normalizer(observation_dim(n_debris));

    RolloutBuffer buffer;
    ScenarioState state = make_initial_state(scenario);
    Observation obs = observe(state, leg_cfg);
    std::vector<bool> mask = action_mask(state);

    long episodes_done = 0;
    double episode_reward = 0.0;
    double episode_ttr = 0.0;
    int episode_steps = 0;
    Vector logits;
    double value = 0.0;
    Vector obs_vec(observation_dim(n_debris));

    const auto to_vec = [](const Observation& o, Vector& v) {
        for (int d = 0; d < v.size(); ++d) v[d] = o[static_cast<std::size_t>(d)];
    };

    std::size_t episode_start_in_buffer = 0;
    while (episodes_done < cfg.total_episodes) {
        to_vec(obs, obs_vec);
        normalizer.update(obs_vec);
        const Vector net_in = normalizer.normalize(obs_vec);
        result.policy.forward_single(net_in, logits, value);
        const MaskedCategorical dist(logits, mask);
        const int action = dist.sample(rng);

        StepOutcome outcome;
        try {
            outcome = step(state, action, leg_cfg);
        } catch (const EpisodeAbortError&) {
            // Discard the partial episode and move on to a fresh scenario.
            result.aborted_episodes += 1;
            buffer.transitions.resize(episode_start_in_buffer);
            episode_reward = 0.0;
            episode_ttr = 0.0;
            episode_steps = 0;
            scenario = sampler(rng);
            state = make_initial_state(scenario);
            obs = observe(state, leg_cfg);
            mask = action_mask(state);
            continue;
        }

        Transition tr;
        tr.observation.assign(net_in.data(), net_in.data() + net_in.size());
        tr.mask = mask;
        tr.action = action;
        tr.reward = outcome.reward;
        tr.done = outcome.done;
        tr.value = value;
        tr.log_prob = dist.log_prob(action);
        buffer.transitions.push_back(std::move(tr));

        episode_reward += outcome.reward;
        episode_ttr += outcome.leg_time;
        episode_steps += 1;
        obs = outcome.observation;
        mask = outcome.mask;

        if (outcome.done) {
            result.log.push_back(
                EpisodeLogRow{episodes_done, episode_reward, episode_ttr, episode_steps});
            ++episodes_done;
            episode_reward = 0.0;
            episode_ttr = 0.0;
            episode_steps = 0;
            if (episodes_done >= cfg.total_episodes) break;
            scenario = sampler(rng);
            state = make_initial_state(scenario);
            obs = observe(state, leg_cfg);
            mask = action_mask(state);
            episode_start_in_buffer = buffer.transitions.size();
        }

        if (buffer.full(cfg.n_steps)) {
            double bootstrap = 0.0;
            if (!buffer.transitions.back().done) {
                to_vec(obs, obs_vec);
                Vector tmp_logits;
                result.policy.forward_single(normalizer.normalize(obs_vec), tmp_logits,
                                             bootstrap);
            }
            compute_gae(buffer, bootstrap, cfg);
            ppo_update(buffer, result.policy, optimizer, cfg, rng);
            result.updates += 1;
            buffer.clear();
        }
    }
    result.policy.set_input_normalization(normalizer.mean(), normalizer.scale());
    return result;
}

SequenceResult policy_solve(const Scenario& scenario, const MlpPolicy& policy,
                            const LegCostConfig& leg_cfg) {
    const int n = static_cast<int>(scenario.debris.size());
    if (policy.topology().n_actions != n ||
        policy.topology().input_dim != observation_dim(n)) {
        throw DomainError("policy_solve: policy topology does not match scenario size");
    }

    ScenarioState state = make_initial_state(scenario);
    Observation obs = observe(state, leg_cfg);
    std::vector<bool> mask = action_mask(state);

    SequenceResult result;
    Vector obs_vec(observation_dim(n));
    Vector logits;
    double value = 0.0;
    for (int k = 0; k < n; ++k) {
        for (int d = 0; d < obs_vec.size(); ++d) obs_vec[d] = obs[static_cast<std::size_t>(d)];
        policy.forward_single(obs_vec, logits, value);
        const int action = MaskedCategorical(logits, mask).argmax();
        const StepOutcome outcome = step(state, action, leg_cfg);
        result.order.push_back(action);
        result.legs.push_back(outcome.plan);
        result.total_ttr += outcome.leg_time;
        obs = outcome.observation;
        mask = outcome.mask;
    }
    return result;
}

void write_training_log(const std::string& path, const std::vector<EpisodeLogRow>& log) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << "episode,cumulative_reward,ttr_seconds,steps\n";
    char buf[128];
    for (const auto& row : log) {
        std::snprintf(buf, sizeof buf, "%ld,%.12f,%.6f,%d\n", row.episode,
                      row.cumulative_reward, row.ttr_seconds, row.steps);
        out << buf;
    }
}

}  // namespace adr
