#pragma once

#include <Eigen/Core>

namespace adr {

using Vec3 = Eigen::Vector3d;

/// Central-body gravitational parameter [km^3/s^2].
struct GravParams {
    double mu;
};

/// WGS-84 Earth gravitational parameter [km^3/s^2].
inline constexpr double kEarthMu = 398600.4418;
inline constexpr GravParams kEarth{kEarthMu};

/// Classical orbital elements, elliptic regime only (a > 0, 0 <= e < 1).
/// Angles in radians; epoch is mission-elapsed time in seconds.
struct KeplerianElements {
    double a;      // semi-major axis [km]
    double e;      // eccentricity
    double i;      // inclination [rad], in [0, pi]
    double raan;   // right ascension of ascending node [rad], [0, 2pi)
    double argp;   // argument of perigee [rad], [0, 2pi)
    double nu;     // true anomaly [rad], [0, 2pi)
    double epoch;  // mission-elapsed time [s]
};

/// Cartesian orbital state. Position in km, velocity in km/s.
struct StateVector {
    Vec3 r;
    Vec3 v;
    double epoch;  // mission-elapsed time [s]
};

/// Reduce an angle to [0, 2pi).
double wrap_two_pi(double angle);

/// Solve Kepler's equation M = E - e*sin(E) for the eccentric anomaly.
/// Newton iteration seeded at M + e*sin(M), bisection fallback; the result
/// satisfies |E - e*sin(E) - M| < 1e-12 with M reduced to [0, 2pi).
double solve_kepler(double mean_anomaly, double eccentricity);

double true_to_eccentric_anomaly(double nu, double e);
double eccentric_to_true_anomaly(double E, double e);
double true_to_mean_anomaly(double nu, double e);
double mean_to_true_anomaly(double M, double e);

/// Perifocal-to-inertial conversion of classical elements.
StateVector elements_to_state(const KeplerianElements& elems, const GravParams& grav);

/// Inverse of elements_to_state up to angle normalization. Degenerate-angle
/// convention: e < 1e-8 puts the perigee angle into nu (argp = 0); i < 1e-8
/// puts the node angle into argp (raan = 0).
KeplerianElements state_to_elements(const StateVector& state, const GravParams& grav);

/// Two-body analytic propagation by dt seconds (mean-anomaly advance).
StateVector propagate(const StateVector& state, double dt, const GravParams& grav);

/// Element-space propagation; only nu and epoch change.
KeplerianElements propagate_elements(const KeplerianElements& elems, double dt,
                                     const GravParams& grav);

/// State of the object described by `elems` at an absolute mission epoch.
StateVector state_at_epoch(const KeplerianElements& elems, double epoch,
                           const GravParams& grav);

double orbital_period(double a, const GravParams& grav);
double specific_energy(const StateVector& state, const GravParams& grav);

}  // namespace adr
