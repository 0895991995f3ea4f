#pragma once

#include <iosfwd>
#include <vector>

#include "adr/mission.hpp"

namespace adr {

/// Length normalization for observation entries [km]. Chosen so that LEO
/// positions and semi-major axes land well inside [-1, 1].
inline constexpr double kPositionNorm = 50000.0;

/// Mutable episode bookkeeping for one scenario.
struct ScenarioState {
    Scenario scenario;
    double epoch = 0.0;
    StateVector chaser;
    std::vector<bool> visited;
    int steps_done = 0;

    std::size_t debris_count() const { return scenario.debris.size(); }
    bool finished() const { return steps_done == static_cast<int>(debris_count()); }
};

/// Flat observation vector of length 10n+3: for each debris
/// [a, e, i, raan, argp, nu, x, y, z] (normalized), then the chaser position,
/// then the n visited flags.
using Observation = std::vector<double>;

struct StepOutcome {
    Observation observation;
    double reward = 0.0;
    bool done = false;
    std::vector<bool> mask;  // all false once the episode is done
    double leg_time = 0.0;   // [s]
    LegPlan plan;            // the executed leg
};

ScenarioState make_initial_state(const Scenario& scenario);

/// Entry j is true iff debris j is still unvisited. Raises TerminalStateError
/// on a finished episode.
std::vector<bool> action_mask(const ScenarioState& state);

Observation observe(const ScenarioState& state, const LegCostConfig& cfg);

/// Start an episode: returns the initial observation and the all-true mask.
std::pair<Observation, std::vector<bool>> reset(ScenarioState& state,
                                                const Scenario& scenario,
                                                const LegCostConfig& cfg);

/// Visit one debris: plans the leg, advances the chaser and the clock, and
/// pays reward -T/T_max (+1 extra on the final step). A masked action raises
/// InvalidActionError; a leg over the dv cap raises EpisodeAbortError.
StepOutcome step(ScenarioState& state, int action, const LegCostConfig& cfg);

/// Episode trace CSV: episode_id,step,action,T_t_seconds,reward,epoch_s
class EpisodeTraceWriter {
public:
    explicit EpisodeTraceWriter(std::ostream& out);
    void record(long episode_id, int step_index, int action, double leg_seconds,
                double reward, double epoch_s);

private:
    std::ostream& out_;
};

}  // namespace adr
