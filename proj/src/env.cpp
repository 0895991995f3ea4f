#include "adr/env.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "adr/errors.hpp"

namespace adr {

ScenarioState make_initial_state(const Scenario& scenario) {
    ScenarioState state;
    state.scenario = scenario;
    state.epoch = scenario.start_epoch;
    state.chaser = scenario.chaser_start;
    state.visited.assign(scenario.debris.size(), false);
    state.steps_done = 0;
    return state;
}

std::vector<bool> action_mask(const ScenarioState& state) {
    if (state.finished()) {
        throw TerminalStateError("action_mask: episode already finished");
    }
    std::vector<bool> mask(state.debris_count());
    for (std::size_t j = 0; j < mask.size(); ++j) mask[j] = !state.visited[j];
    return mask;
}

Observation observe(const ScenarioState& state, const LegCostConfig& cfg) {
    const std::size_t n = state.debris_count();
    Observation obs;
    obs.reserve(10 * n + 3);

    constexpr double two_pi = 2.0 * M_PI;
    for (const auto& debris : state.scenario.debris) {
        const KeplerianElements el =
            propagate_elements(debris.elements, state.epoch - debris.elements.epoch,
                               cfg.gravity);
        const StateVector sv = elements_to_state(el, cfg.gravity);
        obs.push_back(el.a / kPositionNorm);
        obs.push_back(el.e);
        obs.push_back(el.i / M_PI);
        obs.push_back(el.raan / two_pi);
        obs.push_back(el.argp / two_pi);
        obs.push_back(el.nu / two_pi);
        obs.push_back(sv.r.x() / kPositionNorm);
        obs.push_back(sv.r.y() / kPositionNorm);
        obs.push_back(sv.r.z() / kPositionNorm);
    }
    obs.push_back(state.chaser.r.x() / kPositionNorm);
    obs.push_back(state.chaser.r.y() / kPositionNorm);
    obs.push_back(state.chaser.r.z() / kPositionNorm);
    for (std::size_t j = 0; j < n; ++j) obs.push_back(state.visited[j] ? 1.0 : 0.0);
    return obs;
}

std::pair<Observation, std::vector<bool>> reset(ScenarioState& state,
                                                const Scenario& scenario,
                                                const LegCostConfig& cfg) {
    state = make_initial_state(scenario);
    return {observe(state, cfg), action_mask(state)};
}

StepOutcome step(ScenarioState& state, int action, const LegCostConfig& cfg) {
    if (state.finished()) {
        throw TerminalStateError("step: episode already finished");
    }
    const std::size_t n = state.debris_count();
    if (action < 0 || static_cast<std::size_t>(action) >= n ||
        state.visited[static_cast<std::size_t>(action)]) {
        throw InvalidActionError("step: action " + std::to_string(action) +
                                 " is masked or out of range");
    }

    const DebrisObject& target = state.scenario.debris[static_cast<std::size_t>(action)];
    const LegPlan plan = plan_leg(state.chaser, target, state.epoch, cfg);
    if (!plan.feasible) {
        throw EpisodeAbortError("step: leg to debris " + std::to_string(action) +
                                " exceeds the dv cap");
    }

    state.chaser = post_rendezvous_state(state.chaser, plan, target, cfg);
    state.epoch += plan.tof;
    state.visited[static_cast<std::size_t>(action)] = true;
    state.steps_done += 1;

    StepOutcome outcome;
    outcome.leg_time = plan.leg_time;
    outcome.plan = plan;
    outcome.done = state.finished();
    outcome.reward = -plan.leg_time / cfg.t_max + (outcome.done ? 1.0 : 0.0);
    outcome.observation = observe(state, cfg);
    outcome.mask = outcome.done ? std::vector<bool>(n, false) : action_mask(state);
    return outcome;
}

EpisodeTraceWriter::EpisodeTraceWriter(std::ostream& out) : out_(out) {
    out_ << "episode_id,step,action,T_t_seconds,reward,epoch_s\n";
}

void EpisodeTraceWriter::record(long episode_id, int step_index, int action,
                                double leg_seconds, double reward, double epoch_s) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%ld,%d,%d,%.6f,%.12f,%.6f\n", episode_id, step_index,
                  action, leg_seconds, reward, epoch_s);
    out_ << buf;
}

}  // namespace adr
