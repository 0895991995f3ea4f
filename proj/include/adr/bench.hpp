#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adr/mission.hpp"
#include "adr/ppo.hpp"
#include "adr/solvers.hpp"
#include "adr/tle.hpp"

namespace adr {

enum class Method { Greedy, Genetic, Ppo, Exact };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

/// One (scenario, method) result row.
struct RunRecord {
    int scenario_id = 0;
    Method method = Method::Greedy;
    std::vector<int> order;
    double total_ttr = 0.0;       // [s]
    double execution_time = 0.0;  // [s], wall clock of the solve call only
    std::uint64_t seed = 0;
};

/// Count / sum / average / sample variance of one column of numbers.
struct StatsSummary {
    std::string group;
    long count = 0;
    double sum = 0.0;
    double average = 0.0;
    double variance = 0.0;  // sample variance (n-1 denominator)
};

StatsSummary summarize(const std::string& group, const std::vector<double>& values);

/// 100 * (baseline - candidate) / baseline. Positive when the candidate is
/// faster than the baseline.
double improvement_pct(double baseline_avg, double candidate_avg);

/// Parking orbit for generated scenarios; epoch comes from the scenario.
struct ParkingOrbitSpec {
    double a = 7058.0;  // [km]
    double e = 0.001;
    double i = 86.4 * M_PI / 180.0;
    double raan = 95.0 * M_PI / 180.0;
    double argp = 0.0;
    double nu = 0.0;
};

/// Seeded sampling of `count` scenarios, each holding `n_debris` distinct
/// objects drawn without replacement from the pool.
std::vector<Scenario> make_scenarios(const std::vector<TleRecord>& pool, int n_debris,
                                     int count, std::uint64_t seed,
                                     const ParkingOrbitSpec& parking,
                                     const GravParams& grav = kEarth,
                                     double reference_s = 0.0);

/// Single draw, same distribution as make_scenarios; used as the training
/// sampler so every reset sees a fresh debris subset.
Scenario sample_scenario(const std::vector<TleRecord>& pool, int n_debris, Rng& rng,
                         const ParkingOrbitSpec& parking, const GravParams& grav = kEarth,
                         double reference_s = 0.0);

struct CompareOutcome {
    std::vector<RunRecord> records;
    std::vector<StatsSummary> ttr_stats;        // per method, over total_ttr
    std::vector<StatsSummary> exec_time_stats;  // per method, over execution_time
    int infeasible_runs = 0;
    int infeasible_scenarios = 0;  // scenarios with at least one infeasible method
};

/// Run every requested method on every scenario with the same leg pricing,
/// timing exactly the solve call. Infeasible runs are recorded in the counts
/// but produce no record row.
CompareOutcome run_compare(const std::vector<Scenario>& scenarios,
                           const std::vector<Method>& methods, const LegCostConfig& leg_cfg,
                           const GaConfig& ga_cfg, const MlpPolicy* policy,
                           std::uint64_t seed);

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records_csv(std::istream& in);
void write_stats_csv(std::ostream& out, const std::vector<StatsSummary>& stats);

/// FNV-1a 64-bit digest, hex-encoded; used to fingerprint configurations.
std::string fnv1a_hex(const std::string& text);

/// Reproducibility manifest written next to every CLI output.
void write_manifest(const std::string& path, const std::string& command,
                    const std::string& config_json, std::uint64_t seed);

}  // namespace adr
