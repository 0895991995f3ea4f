#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "adr/errors.hpp"
#include "adr/mission.hpp"
#include "adr/rng.hpp"

namespace adr {

/// A candidate visitation order.
struct Chromosome {
    std::vector<int> genes;  // permutation of debris indices
};

struct GaConfig {
    int population_size = 100;
    int generations = 300;
    double crossover_prob = 0.7;
    double mutation_prob = 0.2;
    double shuffle_vs_flip_prob = 0.5;  // P(shuffle); otherwise flip
    int tournament_size = 3;
    std::uint64_t seed = 0;
};

/// Classic ordered crossover: the child keeps p1[cut1, cut2) in place and
/// fills the remaining slots with p2's genes, taken in p2's cyclic order
/// starting at cut2 and skipping genes already present.
Chromosome ordered_crossover(const Chromosome& p1, const Chromosome& p2, int cut1, int cut2);

Chromosome shuffle_mutation(const Chromosome& c, Rng& rng);
Chromosome shuffle_mutation(const Chromosome& c, std::uint64_t seed);
Chromosome flip_mutation(const Chromosome& c);

/// One evaluated leg of a sequencing problem.
template <typename State>
struct LegOutcome {
    bool feasible = false;
    LegPlan plan;
    State next{};
};

/// A sequencing problem with state-dependent leg costs: the solvers below
/// only see this surface, so a synthetic cost table can stand in for the
/// orbital stack in tests.
template <typename M>
concept SequencingModel = requires(const M& m, const typename M::State& s, int target) {
    typename M::State;
    { m.size() } -> std::convertible_to<int>;
    { m.start() } -> std::convertible_to<typename M::State>;
    { m.advance(s, target) } -> std::convertible_to<LegOutcome<typename M::State>>;
};

/// The real thing: legs priced by plan_leg on a scenario.
class MissionModel {
public:
    struct State {
        StateVector chaser;
        double epoch = 0.0;
    };

    MissionModel(const Scenario& scenario, const LegCostConfig& cfg)
        : scenario_(&scenario), cfg_(&cfg) {}

    int size() const { return static_cast<int>(scenario_->debris.size()); }

    State start() const {
        return State{scenario_->chaser_start, scenario_->start_epoch};
    }

    LegOutcome<State> advance(const State& s, int target) const {
        const DebrisObject& debris = scenario_->debris[static_cast<std::size_t>(target)];
        const LegPlan plan = plan_leg(s.chaser, debris, s.epoch, *cfg_);
        LegOutcome<State> out;
        out.feasible = plan.feasible;
        out.plan = plan;
        if (plan.feasible) {
            out.next.chaser = post_rendezvous_state(s.chaser, plan, debris, *cfg_);
            out.next.epoch = s.epoch + plan.tof;
        }
        return out;
    }

private:
    const Scenario* scenario_;
    const LegCostConfig* cfg_;
};

/// Test double: static node-to-node costs, node `n` being the start.
/// A negative cost marks an infeasible edge.
class TableModel {
public:
    using State = int;

    /// cost[i][j]: from node i (i == n for the start) to debris j.
    explicit TableModel(std::vector<std::vector<double>> cost)
        : cost_(std::move(cost)), n_(static_cast<int>(cost_.empty() ? 0 : cost_[0].size())) {}

    int size() const { return n_; }
    State start() const { return n_; }

    LegOutcome<State> advance(const State& from, int target) const {
        const double c = cost_[static_cast<std::size_t>(from)][static_cast<std::size_t>(target)];
        LegOutcome<State> out;
        out.plan.target_id = target;
        out.plan.tof = c;
        out.plan.leg_time = c;
        out.plan.feasible = c >= 0.0;
        out.feasible = c >= 0.0;
        out.next = target;
        return out;
    }

private:
    std::vector<std::vector<double>> cost_;
    int n_;
};

/// Walk one fixed order through a model. Returns nullopt at the first
/// infeasible leg (index reported through *failed_leg when given).
template <SequencingModel M>
std::optional<SequenceResult> evaluate_order(const M& model, const std::vector<int>& order,
                                             std::size_t* failed_leg = nullptr) {
    SequenceResult result;
    result.order = order;
    typename M::State state = model.start();
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto leg = model.advance(state, order[k]);
        if (!leg.feasible) {
            if (failed_leg != nullptr) *failed_leg = k;
            return std::nullopt;
        }
        result.legs.push_back(leg.plan);
        result.total_ttr += leg.plan.leg_time;
        state = leg.next;
    }
    return result;
}

/// Nearest-in-time heuristic: commit to the unvisited target with the
/// smallest feasible leg time, lowest index on ties.
template <SequencingModel M>
SequenceResult greedy_tour(const M& model) {
    const int n = model.size();
    SequenceResult result;
    typename M::State state = model.start();
    std::vector<bool> visited(static_cast<std::size_t>(n), false);

    for (int step_idx = 0; step_idx < n; ++step_idx) {
        int best = -1;
        double best_time = std::numeric_limits<double>::infinity();
        LegOutcome<typename M::State> best_leg;
        for (int j = 0; j < n; ++j) {
            if (visited[static_cast<std::size_t>(j)]) continue;
            const auto leg = model.advance(state, j);
            if (!leg.feasible) continue;
            if (leg.plan.leg_time < best_time) {
                best_time = leg.plan.leg_time;
                best = j;
                best_leg = leg;
            }
        }
        if (best < 0) {
            throw SequenceInfeasibleError("greedy: no feasible target remains",
                                          static_cast<std::size_t>(step_idx));
        }
        visited[static_cast<std::size_t>(best)] = true;
        result.order.push_back(best);
        result.legs.push_back(best_leg.plan);
        result.total_ttr += best_leg.plan.leg_time;
        state = best_leg.next;
    }
    return result;
}

/// Exact minimum by enumeration of all n! orders; ties resolve to the
/// lexicographically smallest order. Guarded to n <= 8.
template <SequencingModel M>
SequenceResult exhaustive_tour(const M& model) {
    const int n = model.size();
    if (n > 8) {
        throw SizeGuardError("exhaustive search limited to n <= 8, got n = " +
                             std::to_string(n));
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;

    std::optional<SequenceResult> best;
    do {
        const auto candidate = evaluate_order(model, order);
        if (candidate && (!best || candidate->total_ttr < best->total_ttr)) {
            best = candidate;
        }
    } while (std::next_permutation(order.begin(), order.end()));

    if (!best) {
        throw SequenceInfeasibleError("exhaustive: every order hits an infeasible leg", 0);
    }
    return *best;
}

/// Tournament-selection GA over visitation orders. Fitness is the negated
/// total time; infeasible tours score -inf and lose every tournament.
/// Returns the best individual seen in any generation.
template <SequencingModel M>
SequenceResult ga_tour(const M& model, const GaConfig& ga) {
    if (ga.population_size < 2) throw DomainError("ga: population_size must be >= 2");
    const int n = model.size();
    Rng rng(ga.seed);

    // Tour evaluation dominates the runtime; orders repeat heavily in small
    // populations, so memoize by gene sequence.
    std::map<std::vector<int>, double> fitness_cache;
    const auto fitness = [&](const std::vector<int>& genes) {
        const auto it = fitness_cache.find(genes);
        if (it != fitness_cache.end()) return it->second;
        const auto result = evaluate_order(model, genes);
        const double fit =
            result ? -result->total_ttr : -std::numeric_limits<double>::infinity();
        fitness_cache.emplace(genes, fit);
        return fit;
    };

    std::vector<Chromosome> population;
    population.reserve(static_cast<std::size_t>(ga.population_size));
    for (int i = 0; i < ga.population_size; ++i) {
        population.push_back(Chromosome{rng.permutation(n)});
    }

    std::vector<int> best_genes;
    double best_fit = -std::numeric_limits<double>::infinity();
    const auto track_best = [&](const std::vector<Chromosome>& pop) {
        for (const auto& c : pop) {
            const double fit = fitness(c.genes);
            if (fit > best_fit) {
                best_fit = fit;
                best_genes = c.genes;
            }
        }
    };
    track_best(population);

    const auto tournament = [&]() -> const Chromosome& {
        int winner = static_cast<int>(rng.uniform_int(0, ga.population_size - 1));
        double winner_fit = fitness(population[static_cast<std::size_t>(winner)].genes);
        for (int k = 1; k < ga.tournament_size; ++k) {
            const int challenger = static_cast<int>(rng.uniform_int(0, ga.population_size - 1));
            const double fit = fitness(population[static_cast<std::size_t>(challenger)].genes);
            if (fit > winner_fit) {
                winner = challenger;
                winner_fit = fit;
            }
        }
        return population[static_cast<std::size_t>(winner)];
    };

    for (int gen = 0; gen < ga.generations; ++gen) {
        std::vector<Chromosome> next_gen;
        next_gen.reserve(static_cast<std::size_t>(ga.population_size));
        for (int i = 0; i < ga.population_size; ++i) {
            const Chromosome& parent1 = tournament();
            const Chromosome& parent2 = tournament();
            Chromosome child = parent1;
            if (n >= 2 && rng.uniform() < ga.crossover_prob) {
                const int cut1 = static_cast<int>(rng.uniform_int(0, n - 1));
                const int cut2 = static_cast<int>(rng.uniform_int(cut1 + 1, n));
                child = ordered_crossover(parent1, parent2, cut1, cut2);
            }
            if (rng.uniform() < ga.mutation_prob) {
                child = rng.uniform() < ga.shuffle_vs_flip_prob ? shuffle_mutation(child, rng)
                                                                : flip_mutation(child);
            }
            next_gen.push_back(std::move(child));
        }
        population = std::move(next_gen);
        track_best(population);
    }

    if (best_genes.empty() || best_fit == -std::numeric_limits<double>::infinity()) {
        throw SequenceInfeasibleError("ga: no feasible tour found", 0);
    }
    // best_fit descends from a feasible evaluation, so this cannot fail
    return *evaluate_order(model, best_genes);
}

// Spec-facing wrappers over the orbital stack.
SequenceResult greedy_solve(const Scenario& scenario, const LegCostConfig& cfg);
SequenceResult brute_force_solve(const Scenario& scenario, const LegCostConfig& cfg);
SequenceResult ga_solve(const Scenario& scenario, const LegCostConfig& cfg,
                        const GaConfig& ga);

}  // namespace adr
