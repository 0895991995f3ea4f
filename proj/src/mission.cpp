#include "adr/mission.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adr/errors.hpp"

namespace adr {

using nlohmann::json;

LegPlan plan_leg(const StateVector& chaser, const DebrisObject& target, double epoch,
                 const LegCostConfig& cfg) {
    if (std::abs(chaser.epoch - epoch) > 1e-6) {
        throw DomainError("plan_leg: chaser state epoch does not match departure epoch");
    }
    if (!(cfg.tof_min > 0.0 && cfg.tof_min < cfg.tof_max) || cfg.tof_steps < 2) {
        throw DomainError("plan_leg: invalid time-of-flight grid");
    }

    const double step = (cfg.tof_max - cfg.tof_min) / (cfg.tof_steps - 1);
    LegPlan best_dv;
    double best_dv_total = std::numeric_limits<double>::infinity();
    bool any_evaluated = false;

    for (int k = 0; k < cfg.tof_steps; ++k) {
        const double tof = cfg.tof_min + step * k;
        const StateVector target_state =
            state_at_epoch(target.elements, epoch + tof, cfg.gravity);
        LambertSolution sol;
        try {
            sol = solve_lambert(chaser.r, target_state.r, tof, cfg.gravity, cfg.direction);
        } catch (const GeometryError&) {
            continue;  // singular grid point; neighbouring times remain usable
        }
        any_evaluated = true;

        LegPlan plan;
        plan.target_id = target.id;
        plan.departure_epoch = epoch;
        plan.tof = tof;
        plan.dv1 = (sol.v1 - chaser.v).norm();
        plan.dv2 = (target_state.v - sol.v2).norm();
        plan.leg_time = tof;

        const double dv_total = plan.dv1 + plan.dv2;
        if (dv_total <= cfg.dv_cap) {
            plan.feasible = true;
            return plan;  // grid is scanned in ascending time: first hit is minimal
        }
        if (dv_total < best_dv_total) {
            best_dv_total = dv_total;
            best_dv = plan;
        }
    }

    if (!any_evaluated) {
        throw LegInfeasibleError("plan_leg: every grid point is geometrically singular");
    }
    best_dv.feasible = false;
    return best_dv;
}

StateVector post_rendezvous_state(const StateVector& chaser, const LegPlan& plan,
                                  const DebrisObject& target, const LegCostConfig& cfg) {
    (void)chaser;  // the arrival state is the target's, by the two-impulse model
    return state_at_epoch(target.elements, plan.departure_epoch + plan.tof, cfg.gravity);
}

bool is_permutation_of_n(const std::vector<int>& order, std::size_t n) {
    if (order.size() != n) return false;
    std::vector<bool> seen(n, false);
    for (const int id : order) {
        if (id < 0 || static_cast<std::size_t>(id) >= n || seen[static_cast<std::size_t>(id)]) {
            return false;
        }
        seen[static_cast<std::size_t>(id)] = true;
    }
    return true;
}

SequenceResult simulate_sequence(const Scenario& scenario, const std::vector<int>& order,
                                 const LegCostConfig& cfg) {
    const std::size_t n = scenario.debris.size();
    if (!is_permutation_of_n(order, n)) {
        throw DomainError("simulate_sequence: order is not a permutation of 0..n-1");
    }

    SequenceResult result;
    result.order = order;
    StateVector chaser = scenario.chaser_start;
    double epoch = scenario.start_epoch;

    for (std::size_t k = 0; k < n; ++k) {
        const DebrisObject& target = scenario.debris[static_cast<std::size_t>(order[k])];
        const LegPlan plan = plan_leg(chaser, target, epoch, cfg);
        if (!plan.feasible) {
            throw SequenceInfeasibleError("simulate_sequence: leg exceeds dv cap", k);
        }
        chaser = post_rendezvous_state(chaser, plan, target, cfg);
        epoch += plan.tof;
        result.legs.push_back(plan);
        result.total_ttr += plan.leg_time;
    }
    return result;
}

namespace {

json elements_to_json(const KeplerianElements& el) {
    return json{{"a_km", el.a},     {"e", el.e},       {"i_rad", el.i},
                {"raan_rad", el.raan}, {"argp_rad", el.argp}, {"nu_rad", el.nu},
                {"epoch_s", el.epoch}};
}

KeplerianElements elements_from_json(const json& j) {
    KeplerianElements el;
    el.a = j.at("a_km").get<double>();
    el.e = j.at("e").get<double>();
    el.i = j.at("i_rad").get<double>();
    el.raan = j.at("raan_rad").get<double>();
    el.argp = j.at("argp_rad").get<double>();
    el.nu = j.at("nu_rad").get<double>();
    el.epoch = j.at("epoch_s").get<double>();
    return el;
}

json scenario_to_json_obj(const Scenario& s) {
    json debris = json::array();
    for (const auto& d : s.debris) {
        json item = elements_to_json(d.elements);
        item["id"] = d.id;
        item["name"] = d.name;
        debris.push_back(std::move(item));
    }
    const KeplerianElements parking = state_to_elements(s.chaser_start, kEarth);
    return json{{"start_epoch_s", s.start_epoch},
                {"parking_orbit", elements_to_json(parking)},
                {"debris", std::move(debris)}};
}

Scenario scenario_from_json_obj(const json& j) {
    Scenario s;
    s.start_epoch = j.at("start_epoch_s").get<double>();
    KeplerianElements parking = elements_from_json(j.at("parking_orbit"));
    parking.epoch = s.start_epoch;
    s.chaser_start = elements_to_state(parking, kEarth);
    for (const auto& item : j.at("debris")) {
        DebrisObject d;
        d.id = item.at("id").get<int>();
        d.name = item.value("name", std::string{});
        d.elements = elements_from_json(item);
        s.debris.push_back(std::move(d));
    }
    return s;
}

}  // namespace

std::string scenario_to_json(const Scenario& scenario) {
    return scenario_to_json_obj(scenario).dump(2);
}

Scenario scenario_from_json(const std::string& text) {
    try {
        return scenario_from_json_obj(json::parse(text));
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("scenario JSON: ") + ex.what());
    }
}

void save_scenarios(const std::string& path, const std::vector<Scenario>& scenarios) {
    json arr = json::array();
    for (const auto& s : scenarios) arr.push_back(scenario_to_json_obj(s));
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << json{{"scenarios", std::move(arr)}}.dump(2) << '\n';
}

std::vector<Scenario> load_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("scenario JSON: ") + ex.what());
    }
    std::vector<Scenario> out;
    try {
        for (const auto& item : j.at("scenarios")) out.push_back(scenario_from_json_obj(item));
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("scenario JSON: ") + ex.what());
    }
    return out;
}

}  // namespace adr
