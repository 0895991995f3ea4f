#include "adr/astro.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "adr/errors.hpp"

namespace adr {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr double kCircularTol = 1e-8;    // e below this: argp undefined
constexpr double kEquatorialTol = 1e-8;  // i below this: raan undefined
constexpr double kEccMax = 1.0 - 1e-9;   // elliptic regime guard
constexpr double kMinAngMom = 1e-6;      // [km^2/s]

}  // namespace

double wrap_two_pi(double angle) {
    double w = std::fmod(angle, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;
    return w;
}

double solve_kepler(double mean_anomaly, double eccentricity) {
    if (!(eccentricity >= 0.0 && eccentricity < 1.0)) {
        throw DomainError("solve_kepler: eccentricity must be in [0, 1)");
    }
    const double m = wrap_two_pi(mean_anomaly);
    const double e = eccentricity;

    double ecc_anom = m + e * std::sin(m);
    bool converged = false;
    for (int iter = 0; iter < 50; ++iter) {
        const double f = ecc_anom - e * std::sin(ecc_anom) - m;
        if (std::abs(f) < 1e-13) {
            converged = true;
            break;
        }
        const double fp = 1.0 - e * std::cos(ecc_anom);
        ecc_anom -= f / fp;
    }
    if (!converged) {
        // Bisection fallback; f is monotone in E and brackets [0, 2pi].
        double lo = 0.0, hi = kTwoPi;
        for (int iter = 0; iter < 200; ++iter) {
            ecc_anom = 0.5 * (lo + hi);
            const double f = ecc_anom - e * std::sin(ecc_anom) - m;
            if (std::abs(f) < 1e-13 || (hi - lo) < 1e-16) break;
            if (f > 0.0) {
                hi = ecc_anom;
            } else {
                lo = ecc_anom;
            }
        }
    }
    return ecc_anom;
}

double true_to_eccentric_anomaly(double nu, double e) {
    return wrap_two_pi(2.0 * std::atan2(std::sqrt(1.0 - e) * std::sin(0.5 * nu),
                                        std::sqrt(1.0 + e) * std::cos(0.5 * nu)));
}

double eccentric_to_true_anomaly(double E, double e) {
    return wrap_two_pi(2.0 * std::atan2(std::sqrt(1.0 + e) * std::sin(0.5 * E),
                                        std::sqrt(1.0 - e) * std::cos(0.5 * E)));
}

double true_to_mean_anomaly(double nu, double e) {
    const double E = true_to_eccentric_anomaly(nu, e);
    return wrap_two_pi(E - e * std::sin(E));
}

double mean_to_true_anomaly(double M, double e) {
    return eccentric_to_true_anomaly(solve_kepler(M, e), e);
}

StateVector elements_to_state(const KeplerianElements& elems, const GravParams& grav) {
    if (!(elems.a > 0.0)) throw DomainError("elements_to_state: a must be positive");
    if (!(elems.e >= 0.0 && elems.e < 1.0)) {
        throw DomainError("elements_to_state: e must be in [0, 1)");
    }
    const double p = elems.a * (1.0 - elems.e * elems.e);
    const double cnu = std::cos(elems.nu);
    const double snu = std::sin(elems.nu);
    const double rmag = p / (1.0 + elems.e * cnu);
    const double vscale = std::sqrt(grav.mu / p);

    const Vec3 r_pf(rmag * cnu, rmag * snu, 0.0);
    const Vec3 v_pf(-vscale * snu, vscale * (elems.e + cnu), 0.0);

    const Eigen::Matrix3d rot =
        (Eigen::AngleAxisd(elems.raan, Vec3::UnitZ()) *
         Eigen::AngleAxisd(elems.i, Vec3::UnitX()) *
         Eigen::AngleAxisd(elems.argp, Vec3::UnitZ()))
            .toRotationMatrix();

    return StateVector{rot * r_pf, rot * v_pf, elems.epoch};
}

KeplerianElements state_to_elements(const StateVector& state, const GravParams& grav) {
    const double rmag = state.r.norm();
    const double vsq = state.v.squaredNorm();
    if (!(rmag > 0.0)) throw DomainError("state_to_elements: zero position vector");

    const Vec3 h = state.r.cross(state.v);
    const double hmag = h.norm();
    if (hmag < kMinAngMom) {
        throw DegenerateOrbitError("state_to_elements: near-zero angular momentum");
    }

    const double energy = 0.5 * vsq - grav.mu / rmag;
    if (!(energy < 0.0)) {
        throw OutOfScopeError("state_to_elements: non-elliptic state (energy >= 0)");
    }
    const double a = -grav.mu / (2.0 * energy);

    const Vec3 e_vec =
        ((vsq - grav.mu / rmag) * state.r - state.r.dot(state.v) * state.v) / grav.mu;
    const double e = e_vec.norm();
    if (e >= kEccMax) {
        throw OutOfScopeError("state_to_elements: eccentricity at or above parabolic");
    }

    double cos_i = h.z() / hmag;
    cos_i = std::clamp(cos_i, -1.0, 1.0);
    const double inc = std::acos(cos_i);

    const Vec3 node(-h.y(), h.x(), 0.0);  // z-hat cross h
    const bool circular = e < kCircularTol;
    const bool equatorial = inc < kEquatorialTol;

    // Angle from u to w, measured about h.
    const auto angle_about_h = [&](const Vec3& u, const Vec3& w) {
        return wrap_two_pi(std::atan2(u.cross(w).dot(h) / hmag, u.dot(w)));
    };

    double raan = 0.0, argp = 0.0, nu = 0.0;
    if (!equatorial && !circular) {
        raan = wrap_two_pi(std::atan2(node.y(), node.x()));
        argp = angle_about_h(node, e_vec);
        nu = angle_about_h(e_vec, state.r);
    } else if (!equatorial) {  // circular inclined: node angle carries the phase
        raan = wrap_two_pi(std::atan2(node.y(), node.x()));
        argp = 0.0;
        nu = angle_about_h(node, state.r);
    } else if (!circular) {  // equatorial: node undefined, fold raan into argp
        raan = 0.0;
        argp = wrap_two_pi(std::atan2(e_vec.y(), e_vec.x()));
        nu = angle_about_h(e_vec, state.r);
    } else {  // circular equatorial
        raan = 0.0;
        argp = 0.0;
        nu = wrap_two_pi(std::atan2(state.r.y(), state.r.x()));
    }

    return KeplerianElements{a, e, inc, raan, argp, nu, state.epoch};
}

KeplerianElements propagate_elements(const KeplerianElements& elems, double dt,
                                     const GravParams& grav) {
    if (dt == 0.0) return elems;
    const double n = std::sqrt(grav.mu / (elems.a * elems.a * elems.a));
    const double m0 = true_to_mean_anomaly(elems.nu, elems.e);
    const double nu = mean_to_true_anomaly(m0 + n * dt, elems.e);
    KeplerianElements out = elems;
    out.nu = nu;
    out.epoch = elems.epoch + dt;
    return out;
}

StateVector propagate(const StateVector& state, double dt, const GravParams& grav) {
    if (dt == 0.0) return state;
    const KeplerianElements elems = state_to_elements(state, grav);
    return elements_to_state(propagate_elements(elems, dt, grav), grav);
}

StateVector state_at_epoch(const KeplerianElements& elems, double epoch,
                           const GravParams& grav) {
    return elements_to_state(propagate_elements(elems, epoch - elems.epoch, grav), grav);
}

double orbital_period(double a, const GravParams& grav) {
    return kTwoPi * std::sqrt(a * a * a / grav.mu);
}

double specific_energy(const StateVector& state, const GravParams& grav) {
    return 0.5 * state.v.squaredNorm() - grav.mu / state.r.norm();
}

}  // namespace adr
