#include "adr/lambert.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "adr/errors.hpp"

namespace adr {

namespace {

constexpr double kSinThetaTol = 1e-8;   // collinearity rejection
constexpr double kTofResidualTol = 1e-9;
constexpr int kMaxIterations = 50;

// Gauss hypergeometric 2F1(3, 1; 5/2; z), |z| < 1, by direct series.
double hyp2f1b(double z) {
    double term = 1.0, sum = 1.0;
    for (int i = 0; i < 200; ++i) {
        term *= (3.0 + i) * (1.0 + i) / (2.5 + i) * z / (1.0 + i);
        const double prev = sum;
        sum += term;
        if (sum == prev) break;
    }
    return sum;
}

// Nondimensional time of flight along the x iso-curve (zero revolutions).
double x_to_tof(double x, double lambda) {
    const double u = 1.0 - x * x;
    const double dist = std::abs(x - 1.0);
    if (dist < 1e-8) {  // parabolic
        return (2.0 / 3.0) * (1.0 - lambda * lambda * lambda);
    }
    const double y = std::sqrt(1.0 - lambda * lambda * u);
    if (dist < 0.01) {  // Battin series near the parabola
        const double eta = y - lambda * x;
        const double s1 = 0.5 * (1.0 - lambda - x * eta);
        const double q = (4.0 / 3.0) * hyp2f1b(s1);
        return 0.5 * (eta * eta * eta * q + 4.0 * lambda * eta);
    }
    // Lancaster-Blanchard form, elliptic and hyperbolic branches.
    const double f = (y - lambda * x) * std::sqrt(std::abs(u));
    const double g = x * y + lambda * u;
    const double d = (u > 0.0) ? std::atan2(f, g) : std::atanh(f / g);
    return (d / std::sqrt(std::abs(u)) - x + lambda * y) / u;
}

struct TofDerivatives {
    double first, second, third;
};

TofDerivatives tof_derivatives(double x, double tof, double lambda) {
    if (std::abs(x - 1.0) < 1e-8) {
        return {0.4 * (std::pow(lambda, 5) - 1.0), 0.0, 0.0};
    }
    const double u = 1.0 - x * x;
    const double l2 = lambda * lambda;
    const double y = std::sqrt(1.0 - l2 * u);
    const double y3 = y * y * y;
    const double first = (3.0 * tof * x - 2.0 + 2.0 * l2 * lambda * x / y) / u;
    const double second = (3.0 * tof + 5.0 * x * first + 2.0 * (1.0 - l2) * l2 * lambda / y3) / u;
    const double third =
        (7.0 * x * second + 8.0 * first - 6.0 * (1.0 - l2) * l2 * l2 * lambda * x / (y3 * y * y)) / u;
    return {first, second, third};
}

double initial_guess(double tof_nd, double lambda) {
    const double t00 = std::acos(lambda) + lambda * std::sqrt(1.0 - lambda * lambda);
    const double t1 = (2.0 / 3.0) * (1.0 - lambda * lambda * lambda);
    if (tof_nd >= t00) {
        return std::pow(t00 / tof_nd, 2.0 / 3.0) - 1.0;
    }
    if (tof_nd <= t1) {
        return 2.5 * t1 * (t1 - tof_nd) / (tof_nd * (1.0 - std::pow(lambda, 5))) + 1.0;
    }
    // Maps T = t00 to x = 0 and T = t1 to x = 1.
    return std::exp(std::log(2.0) * std::log(tof_nd / t00) / std::log(t1 / t00)) - 1.0;
}

}  // namespace

LambertSolution solve_lambert(const Vec3& r1, const Vec3& r2, double tof,
                              const GravParams& grav, TransferDirection direction) {
    if (!(tof > 0.0)) throw DomainError("solve_lambert: tof must be positive");
    const double r1_mag = r1.norm();
    const double r2_mag = r2.norm();
    if (!(r1_mag > 0.0) || !(r2_mag > 0.0)) {
        throw DomainError("solve_lambert: position vectors must be nonzero");
    }

    // Scale lengths by |r1| and time by sqrt(|r1|^3/mu); mu drops to 1.
    const double lscale = r1_mag;
    const double tscale = std::sqrt(lscale * lscale * lscale / grav.mu);
    const double vscale = lscale / tscale;

    const Vec3 p1 = r1 / lscale;
    const Vec3 p2 = r2 / lscale;
    const double m1 = 1.0;
    const double m2 = r2_mag / lscale;

    const Vec3 i_r1 = p1;
    const Vec3 i_r2 = p2 / m2;
    const Vec3 crossed = i_r1.cross(i_r2);
    if (crossed.norm() < kSinThetaTol) {
        throw GeometryError("solve_lambert: transfer angle too close to 0 or pi");
    }
    const Vec3 i_h = crossed.normalized();

    const double chord = (p2 - p1).norm();
    const double semiper = 0.5 * (m1 + m2 + chord);
    double lambda = std::sqrt(1.0 - chord / semiper);

    Vec3 i_t1, i_t2;
    if (i_h.z() < 0.0) {  // transfer angle above pi for a prograde observer
        lambda = -lambda;
        i_t1 = i_r1.cross(i_h);
        i_t2 = i_r2.cross(i_h);
    } else {
        i_t1 = i_h.cross(i_r1);
        i_t2 = i_h.cross(i_r2);
    }
    if (direction == TransferDirection::Retrograde) {
        lambda = -lambda;
        i_t1 = -i_t1;
        i_t2 = -i_t2;
    }

    const double tof_nd = std::sqrt(2.0 / (semiper * semiper * semiper)) * (tof / tscale);

    // T(x) is strictly decreasing on (-1, inf) for the zero-revolution branch,
    // so the root is unique and bracketable. Householder steps do the work;
    // any step that leaves the bracket falls back to bisection.
    double x_lo = -1.0 + 1e-14;  // T -> +inf at the left pole
    double x_hi = std::max(initial_guess(tof_nd, lambda) + 1.0, 1.0);
    while (x_to_tof(x_hi, lambda) > tof_nd && x_hi < 1e12) x_hi = 2.0 * x_hi + 1.0;

    double x = std::clamp(initial_guess(tof_nd, lambda), x_lo, x_hi);
    double residual = 0.0;
    int iter = 0;
    for (; iter < kMaxIterations; ++iter) {
        const double cur_tof = x_to_tof(x, lambda);
        residual = cur_tof - tof_nd;
        if (std::abs(residual) < 1e-12 * std::max(1.0, tof_nd)) break;
        if (residual > 0.0) {
            x_lo = x;
        } else {
            x_hi = x;
        }
        const auto d = tof_derivatives(x, cur_tof, lambda);
        const double f = residual;
        const double step = f * (d.first * d.first - 0.5 * f * d.second) /
                            (d.first * (d.first * d.first - f * d.second) +
                             d.third * f * f / 6.0);
        double x_new = x - step;
        if (!std::isfinite(x_new) || x_new <= x_lo || x_new >= x_hi) {
            x_new = 0.5 * (x_lo + x_hi);
        }
        if (x_new == x) break;
        x = x_new;
    }
    if (!(std::abs(residual) < kTofResidualTol)) {
        throw ConvergenceError("solve_lambert: root finder did not reach tolerance");
    }

    // Reconstruct velocities from the converged x (Lagrange-style components).
    const double y = std::sqrt(1.0 - lambda * lambda * (1.0 - x * x));
    const double gamma = std::sqrt(semiper / 2.0);  // mu == 1 after scaling
    const double rho = (m1 - m2) / chord;
    const double sigma = std::sqrt(1.0 - rho * rho);

    const double vr1 = gamma * ((lambda * y - x) - rho * (lambda * y + x)) / m1;
    const double vr2 = -gamma * ((lambda * y - x) + rho * (lambda * y + x)) / m2;
    const double vt1 = gamma * sigma * (y + lambda * x) / m1;
    const double vt2 = gamma * sigma * (y + lambda * x) / m2;

    LambertSolution sol;
    sol.v1 = (vr1 * i_r1 + vt1 * i_t1) * vscale;
    sol.v2 = (vr2 * i_r2 + vt2 * i_t2) * vscale;
    sol.tof = tof;
    sol.iterations = iter;
    return sol;
}

}  // namespace adr
