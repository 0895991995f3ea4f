#pragma once

// Shared helpers for the test suites: synthetic debris data shaped like a
// recent LEO breakup cloud, plus independent dynamics oracles.

#include <cmath>
#include <vector>

#include <Eigen/Geometry>

#include "adr/astro.hpp"
#include "adr/bench.hpp"
#include "adr/rng.hpp"
#include "adr/tle.hpp"

namespace adr::testing {

inline double round_to(double value, double step) {
    return std::round(value / step) * step;
}

/// Synthetic debris catalog: a cloud of objects in near-identical planes
/// (tight RAAN spread) at slightly different altitudes and phases, the
/// regime where every pairwise transfer stays under a few km/s. Values are
/// quantized to TLE field resolution so in-memory records, written files
/// and re-parsed files are bit-identical.
inline std::vector<TleRecord> make_synthetic_records(int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<TleRecord> records;
    records.reserve(static_cast<std::size_t>(count));
    const double deg = M_PI / 180.0;
    for (int k = 0; k < count; ++k) {
        TleRecord rec;
        rec.name = "DEBRIS-" + std::to_string(1000 + k);
        rec.norad_id = 90000 + k;
        rec.epoch_year = 2023;
        rec.epoch_day = round_to(rng.uniform(327.0, 330.0), 1e-8);
        rec.inclination = round_to(rng.uniform(86.1, 86.7), 1e-4) * deg;
        rec.raan = round_to(rng.uniform(91.0, 99.0), 1e-4) * deg;
        rec.eccentricity = round_to(rng.uniform(0.0005, 0.015), 1e-7);
        rec.argp = round_to(rng.uniform(0.0, 360.0), 1e-4) * deg;
        rec.mean_anomaly = round_to(rng.uniform(0.0, 360.0), 1e-4) * deg;
        // altitudes a in ~[7130, 7180] km
        const double a = rng.uniform(7130.0, 7180.0);
        const double period = 2.0 * M_PI * std::sqrt(a * a * a / kEarthMu);
        rec.mean_motion = round_to(86400.0 / period, 1e-8);
        records.push_back(std::move(rec));
    }
    return records;
}

/// Fixed-step RK4 integration of two-body gravity; the independent
/// propagation oracle for the analytic Kepler path.
inline StateVector rk4_propagate(const StateVector& s0, double dt, const GravParams& grav,
                                 double step = 0.25) {
    const auto accel = [&](const Vec3& r) -> Vec3 {
        const double rmag = r.norm();
        return -grav.mu / (rmag * rmag * rmag) * r;
    };
    Vec3 r = s0.r, v = s0.v;
    double remaining = dt;
    const double sign = dt >= 0.0 ? 1.0 : -1.0;
    while (std::abs(remaining) > 1e-12) {
        const double h = sign * std::min(step, std::abs(remaining));
        const Vec3 k1r = v, k1v = accel(r);
        const Vec3 k2r = v + 0.5 * h * k1v, k2v = accel(r + 0.5 * h * k1r);
        const Vec3 k3r = v + 0.5 * h * k2v, k3v = accel(r + 0.5 * h * k2r);
        const Vec3 k4r = v + h * k3v, k4v = accel(r + h * k3r);
        r += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        remaining -= h;
    }
    return StateVector{r, v, s0.epoch + dt};
}

/// Random elliptic elements covering the regimes the library supports.
inline KeplerianElements random_elements(Rng& rng, double e_max = 0.7) {
    KeplerianElements el;
    el.a = rng.uniform(6800.0, 9500.0);
    el.e = rng.uniform(0.0, e_max);
    el.i = rng.uniform(0.05, M_PI - 0.05);
    el.raan = rng.uniform(0.0, 2.0 * M_PI);
    el.argp = rng.uniform(0.0, 2.0 * M_PI);
    el.nu = rng.uniform(0.0, 2.0 * M_PI);
    el.epoch = 0.0;
    return el;
}

}  // namespace adr::testing
