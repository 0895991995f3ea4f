#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adr/astro.hpp"
#include "adr/lambert.hpp"

namespace adr {

struct DebrisObject {
    int id = 0;  // index within the scenario
    std::string name;
    KeplerianElements elements;
};

/// A debris field plus the chaser's parking-orbit state.
struct Scenario {
    std::vector<DebrisObject> debris;
    StateVector chaser_start;
    double start_epoch = 0.0;
};

/// Pricing rule for a single transfer leg: scan a uniform time-of-flight
/// grid and take the smallest grid time whose two-impulse cost fits under
/// dv_cap. t_max is the reward normalization constant and must cover the
/// longest acceptable single rendezvous.
struct LegCostConfig {
    double tof_min = 300.0;    // [s]
    double tof_max = 12000.0;  // [s]
    int tof_steps = 64;
    double dv_cap = 4.0;       // [km/s], total over both impulses
    double t_max = 12000.0;    // [s]
    GravParams gravity = kEarth;
    TransferDirection direction = TransferDirection::Prograde;
};

struct LegPlan {
    int target_id = -1;
    double departure_epoch = 0.0;  // [s]
    double tof = 0.0;              // [s]
    double dv1 = 0.0;              // [km/s]
    double dv2 = 0.0;              // [km/s]
    double leg_time = 0.0;         // [s], equals tof under the no-wait model
    bool feasible = false;
};

struct SequenceResult {
    std::vector<int> order;     // visitation order of debris ids
    std::vector<LegPlan> legs;  // one per visited debris
    double total_ttr = 0.0;     // [s]
};

/// Price one leg from the chaser state at `epoch` to `target`. Grid points
/// whose Lambert geometry is singular are skipped; if no grid point fits
/// under dv_cap the minimum-total-dv point is returned with feasible=false.
/// Raises LegInfeasibleError when every grid point was skipped.
LegPlan plan_leg(const StateVector& chaser, const DebrisObject& target, double epoch,
                 const LegCostConfig& cfg);

/// Chaser state after completing `plan`: it sits on the target's orbit at
/// arrival, sharing position and velocity.
StateVector post_rendezvous_state(const StateVector& chaser, const LegPlan& plan,
                                  const DebrisObject& target, const LegCostConfig& cfg);

/// Fold plan_leg / post_rendezvous_state over a visitation order. Raises
/// SequenceInfeasibleError (with the failing leg index) when a leg does not
/// fit under the dv cap.
SequenceResult simulate_sequence(const Scenario& scenario, const std::vector<int>& order,
                                 const LegCostConfig& cfg);

bool is_permutation_of_n(const std::vector<int>& order, std::size_t n);

/// Scenario (de)serialization: JSON with parking orbit elements, debris
/// element sets, and the sampling seed. Angles in radians, lengths in km.
std::string scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);
void save_scenarios(const std::string& path, const std::vector<Scenario>& scenarios);
std::vector<Scenario> load_scenarios(const std::string& path);

}  // namespace adr
