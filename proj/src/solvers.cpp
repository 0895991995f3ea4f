#include "adr/solvers.hpp"

#include <algorithm>

namespace adr {

Chromosome ordered_crossover(const Chromosome& p1, const Chromosome& p2, int cut1, int cut2) {
    const int n = static_cast<int>(p1.genes.size());
    if (p2.genes.size() != p1.genes.size()) {
        throw DomainError("ordered_crossover: parents differ in length");
    }
    {
        auto a = p1.genes, b = p2.genes;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) throw DomainError("ordered_crossover: parents carry different gene sets");
        for (int i = 0; i < n; ++i) {
            if (a[static_cast<std::size_t>(i)] != i) {
                throw DomainError("ordered_crossover: genes must be a permutation of 0..n-1");
            }
        }
    }
    if (!(0 <= cut1 && cut1 < cut2 && cut2 <= n)) {
        throw DomainError("ordered_crossover: cuts must satisfy 0 <= cut1 < cut2 <= n");
    }

    Chromosome child;
    child.genes.assign(static_cast<std::size_t>(n), -1);
    std::vector<bool> taken(static_cast<std::size_t>(n + 1), false);
    const auto mark = [&](int gene) { taken[static_cast<std::size_t>(gene)] = true; };

    for (int i = cut1; i < cut2; ++i) {
        child.genes[static_cast<std::size_t>(i)] = p1.genes[static_cast<std::size_t>(i)];
        mark(p1.genes[static_cast<std::size_t>(i)]);
    }
    // Fill the holes from p2, cyclically from cut2, skipping kept genes.
    int slot = cut2 % n;
    for (int k = 0; k < n; ++k) {
        const int gene = p2.genes[static_cast<std::size_t>((cut2 + k) % n)];
        if (taken[static_cast<std::size_t>(gene)]) continue;
        while (child.genes[static_cast<std::size_t>(slot)] != -1) slot = (slot + 1) % n;
        child.genes[static_cast<std::size_t>(slot)] = gene;
        mark(gene);
    }
    return child;
}

Chromosome shuffle_mutation(const Chromosome& c, Rng& rng) {
    Chromosome out = c;
    rng.shuffle(out.genes);
    return out;
}

Chromosome shuffle_mutation(const Chromosome& c, std::uint64_t seed) {
    Rng rng(seed);
    return shuffle_mutation(c, rng);
}

Chromosome flip_mutation(const Chromosome& c) {
    Chromosome out = c;
    std::reverse(out.genes.begin(), out.genes.end());
    return out;
}

SequenceResult greedy_solve(const Scenario& scenario, const LegCostConfig& cfg) {
    return greedy_tour(MissionModel(scenario, cfg));
}

SequenceResult brute_force_solve(const Scenario& scenario, const LegCostConfig& cfg) {
    return exhaustive_tour(MissionModel(scenario, cfg));
}

SequenceResult ga_solve(const Scenario& scenario, const LegCostConfig& cfg,
                        const GaConfig& ga) {
    return ga_tour(MissionModel(scenario, cfg), ga);
}

}  // namespace adr
