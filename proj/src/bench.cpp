#include "adr/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adr/errors.hpp"

namespace adr {

using nlohmann::json;

std::string method_name(Method m) {
    switch (m) {
        case Method::Greedy: return "greedy";
        case Method::Genetic: return "genetic";
        case Method::Ppo: return "ppo";
        case Method::Exact: return "exact";
    }
    return "unknown";
}

std::optional<Method> method_from_name(const std::string& name) {
    if (name == "greedy") return Method::Greedy;
    if (name == "genetic") return Method::Genetic;
    if (name == "ppo") return Method::Ppo;
    if (name == "exact") return Method::Exact;
    return std::nullopt;
}

StatsSummary summarize(const std::string& group, const std::vector<double>& values) {
    StatsSummary s;
    s.group = group;
    s.count = static_cast<long>(values.size());
    for (const double v : values) s.sum += v;
    if (s.count > 0) s.average = s.sum / static_cast<double>(s.count);
    if (s.count > 1) {
        double acc = 0.0;
        for (const double v : values) acc += (v - s.average) * (v - s.average);
        s.variance = acc / static_cast<double>(s.count - 1);
    }
    return s;
}

double improvement_pct(double baseline_avg, double candidate_avg) {
    if (!(baseline_avg > 0.0)) {
        throw DomainError("improvement_pct: baseline average must be positive");
    }
    return 100.0 * (baseline_avg - candidate_avg) / baseline_avg;
}

Scenario sample_scenario(const std::vector<TleRecord>& pool, int n_debris, Rng& rng,
                         const ParkingOrbitSpec& parking, const GravParams& grav,
                         double reference_s) {
    if (n_debris > static_cast<int>(pool.size())) {
        throw DomainError("sample_scenario: pool smaller than requested debris count");
    }
    Scenario scenario;
    scenario.start_epoch = 0.0;

    KeplerianElements pk;
    pk.a = parking.a;
    pk.e = parking.e;
    pk.i = parking.i;
    pk.raan = parking.raan;
    pk.argp = parking.argp;
    pk.nu = parking.nu;
    pk.epoch = scenario.start_epoch;
    scenario.chaser_start = elements_to_state(pk, grav);

    const std::vector<int> picks = rng.sample_indices(static_cast<int>(pool.size()), n_debris);
    for (int k = 0; k < n_debris; ++k) {
        const TleRecord& rec = pool[static_cast<std::size_t>(picks[static_cast<std::size_t>(k)])];
        DebrisObject d;
        d.id = k;
        d.name = rec.name;
        d.elements = tle_to_elements(rec, grav, reference_s);
        scenario.debris.push_back(std::move(d));
    }
    return scenario;
}

std::vector<Scenario> make_scenarios(const std::vector<TleRecord>& pool, int n_debris,
                                     int count, std::uint64_t seed,
                                     const ParkingOrbitSpec& parking, const GravParams& grav,
                                     double reference_s) {
    Rng rng(seed);
    std::vector<Scenario> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        out.push_back(sample_scenario(pool, n_debris, rng, parking, grav, reference_s));
    }
    return out;
}

CompareOutcome run_compare(const std::vector<Scenario>& scenarios,
                           const std::vector<Method>& methods, const LegCostConfig& leg_cfg,
                           const GaConfig& ga_cfg, const MlpPolicy* policy,
                           std::uint64_t seed) {
    for (const Method m : methods) {
        if (m == Method::Ppo && policy == nullptr) {
            throw ConfigError("run_compare: ppo requested but no policy checkpoint given");
        }
    }

    CompareOutcome outcome;
    using clock = std::chrono::steady_clock;

    for (std::size_t sid = 0; sid < scenarios.size(); ++sid) {
        const Scenario& scenario = scenarios[sid];
        bool scenario_infeasible = false;
        for (const Method method : methods) {
            GaConfig ga = ga_cfg;
            ga.seed = seed ^ (static_cast<std::uint64_t>(sid) * 0x9e3779b97f4a7c15ull);

            RunRecord rec;
            rec.scenario_id = static_cast<int>(sid);
            rec.method = method;
            rec.seed = method == Method::Genetic ? ga.seed : seed;

            try {
                const auto t0 = clock::now();
                SequenceResult result;
                switch (method) {
                    case Method::Greedy: result = greedy_solve(scenario, leg_cfg); break;
                    case Method::Genetic: result = ga_solve(scenario, leg_cfg, ga); break;
                    case Method::Exact: result = brute_force_solve(scenario, leg_cfg); break;
                    case Method::Ppo: result = policy_solve(scenario, *policy, leg_cfg); break;
                }
                const auto t1 = clock::now();
                rec.order = result.order;
                rec.total_ttr = result.total_ttr;
                rec.execution_time = std::chrono::duration<double>(t1 - t0).count();
                outcome.records.push_back(std::move(rec));
            } catch (const SequenceInfeasibleError&) {
                outcome.infeasible_runs += 1;
                scenario_infeasible = true;
            } catch (const EpisodeAbortError&) {
                outcome.infeasible_runs += 1;
                scenario_infeasible = true;
            }
        }
        if (scenario_infeasible) outcome.infeasible_scenarios += 1;
    }

    for (const Method method : methods) {
        std::vector<double> ttrs, times;
        for (const auto& rec : outcome.records) {
            if (rec.method != method) continue;
            ttrs.push_back(rec.total_ttr);
            times.push_back(rec.execution_time);
        }
        const std::string label = method_name(method);
        std::string cap = label;
        cap[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(cap[0])));
        if (cap == "Ppo") cap = "PPO";
        outcome.ttr_stats.push_back(summarize(cap + " TTR", ttrs));
        outcome.exec_time_stats.push_back(summarize(cap + " Execution Time", times));
    }
    return outcome;
}

namespace {

std::string order_to_string(const std::vector<int>& order) {
    std::string out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i > 0) out += '-';
        out += std::to_string(order[i]);
    }
    return out;
}

std::vector<int> order_from_string(const std::string& text) {
    std::vector<int> order;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, '-')) {
        if (!part.empty()) order.push_back(std::stoi(part));
    }
    return order;
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
    out << "scenario_id,method,order,total_ttr_s,execution_time_s,seed\n";
    char buf[256];
    for (const auto& rec : records) {
        std::snprintf(buf, sizeof buf, "%d,%s,%s,%.6f,%.9f,%llu\n", rec.scenario_id,
                      method_name(rec.method).c_str(), order_to_string(rec.order).c_str(),
                      rec.total_ttr, rec.execution_time,
                      static_cast<unsigned long long>(rec.seed));
        out << buf;
    }
}

std::vector<RunRecord> read_records_csv(std::istream& in) {
    std::vector<RunRecord> records;
    std::string line;
    if (!std::getline(in, line)) return records;  // header
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string sid, method, order, ttr, exec, seed;
        if (!std::getline(ss, sid, ',') || !std::getline(ss, method, ',') ||
            !std::getline(ss, order, ',') || !std::getline(ss, ttr, ',') ||
            !std::getline(ss, exec, ',') || !std::getline(ss, seed, ',')) {
            throw ParseError("records CSV: expected 6 comma-separated fields", line_no, 1);
        }
        const auto m = method_from_name(method);
        if (!m) throw ParseError("records CSV: unknown method '" + method + "'", line_no, 1);
        RunRecord rec;
        rec.scenario_id = std::stoi(sid);
        rec.method = *m;
        rec.order = order_from_string(order);
        rec.total_ttr = std::stod(ttr);
        rec.execution_time = std::stod(exec);
        rec.seed = std::stoull(seed);
        records.push_back(std::move(rec));
    }
    return records;
}

void write_stats_csv(std::ostream& out, const std::vector<StatsSummary>& stats) {
    out << "Groups,Count,Sum,Average,Variance\n";
    char buf[256];
    for (const auto& s : stats) {
        std::snprintf(buf, sizeof buf, "%s,%ld,%.9f,%.9f,%.9f\n", s.group.c_str(), s.count,
                      s.sum, s.average, s.variance);
        out << buf;
    }
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (const unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::string& config_json, std::uint64_t seed) {
    json j;
    j["command"] = command;
    j["config_hash"] = fnv1a_hex(config_json);
    j["seed"] = seed;
    j["version"] = "0.1.0";
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace adr
