// Scratch harness used while bringing modules up; replaced by the real suites.
#include <cstdio>
#include <cmath>
#include <Eigen/Geometry>


#include "adr/astro.hpp"
#include "adr/lambert.hpp"
#include "adr/rng.hpp"

using namespace adr;

int main() {
    const GravParams grav = kEarth;

    // circular quarter-turn case
    {
        const double a = 7000.0;
        const double quarter = orbital_period(a, grav) / 4.0;
        const Vec3 r1(a, 0, 0), r2(0, a, 0);
        const auto sol = solve_lambert(r1, r2, quarter, grav);
        std::printf("quarter: v1 = (%.9f, %.9f, %.9f) iters=%d\n", sol.v1.x(), sol.v1.y(),
                    sol.v1.z(), sol.iterations);
        const double vc = std::sqrt(grav.mu / a);
        std::printf("expected vc = %.9f   err = %.3e\n", vc, (sol.v1 - Vec3(0, vc, 0)).norm());
    }

    // round-trip oracle: solver must recover the propagated velocities
    Rng rng(20240817);
    double worst = 0.0;
    int failures = 0;
    for (int k = 0; k < 1000; ++k) {
        KeplerianElements el{};
        el.a = rng.uniform(6800.0, 9000.0);
        el.e = rng.uniform(0.0, 0.7);
        el.i = rng.uniform(0.05, M_PI - 0.05);
        el.raan = rng.uniform(0.0, 2 * M_PI);
        el.argp = rng.uniform(0.0, 2 * M_PI);
        el.nu = rng.uniform(0.0, 2 * M_PI);
        el.epoch = 0.0;
        const StateVector s0 = elements_to_state(el, grav);
        const double period = orbital_period(el.a, grav);
        const double dt = rng.uniform(0.01, 0.8) * period;
        const StateVector s1 = propagate(s0, dt, grav);
        const auto dir = s0.r.cross(s0.v).z() >= 0.0 ? TransferDirection::Prograde
                                                     : TransferDirection::Retrograde;
        try {
            const auto sol = solve_lambert(s0.r, s1.r, dt, grav, dir);
            const double err1 = (sol.v1 - s0.v).norm() / s0.v.norm();
            const double err2 = (sol.v2 - s1.v).norm() / s1.v.norm();
            worst = std::max({worst, err1, err2});
        } catch (const std::exception& ex) {
            std::printf("case %d failed: %s  (a=%.1f e=%.3f dt=%.1f)\n", k, ex.what(), el.a,
                        el.e, dt);
            ++failures;
        }
    }
    std::printf("roundtrip worst rel err = %.3e, failures = %d\n", worst, failures);

    // propagation conservation
    {
        Rng prng(7);
        double worst_e = 0.0, worst_h = 0.0;
        for (int k = 0; k < 10000; ++k) {
            KeplerianElements el{};
            el.a = prng.uniform(6800.0, 9000.0);
            el.e = prng.uniform(0.0, 0.8);
            el.i = prng.uniform(0.0, M_PI);
            el.raan = prng.uniform(0.0, 2 * M_PI);
            el.argp = prng.uniform(0.0, 2 * M_PI);
            el.nu = prng.uniform(0.0, 2 * M_PI);
            const StateVector s0 = elements_to_state(el, grav);
            const StateVector s1 = propagate(s0, prng.uniform(-5000.0, 20000.0), grav);
            const double e0 = specific_energy(s0, grav), e1 = specific_energy(s1, grav);
            const double h0 = s0.r.cross(s0.v).norm(), h1 = s1.r.cross(s1.v).norm();
            worst_e = std::max(worst_e, std::abs(e1 - e0) / std::abs(e0));
            worst_h = std::max(worst_h, std::abs(h1 - h0) / h0);
        }
        std::printf("conservation: worst energy rel %.3e, worst |h| rel %.3e\n", worst_e, worst_h);
    }
    return 0;
}
