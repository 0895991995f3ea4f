#pragma once

#include "adr/astro.hpp"

namespace adr {

enum class TransferDirection { Prograde, Retrograde };

/// One solution of the two-point boundary value problem: velocities of the
/// conic that connects r1 to r2 in exactly `tof` seconds.
struct LambertSolution {
    Vec3 v1;         // departure velocity [km/s]
    Vec3 v2;         // arrival velocity [km/s]
    double tof;      // time of flight [s]
    int iterations;  // root-finder steps taken
};

/// Zero-revolution Lambert solver, universal-variable formulation with
/// Householder iteration. Inputs are scaled by (|r1|, sqrt(mu/|r1|)) before
/// iterating. Transfer angles within |sin(theta)| < 1e-8 of 0 or pi are
/// rejected as GeometryError; non-convergence after 50 steps raises
/// ConvergenceError. The time-of-flight residual at the returned solution is
/// below 1e-9 in nondimensional units.
LambertSolution solve_lambert(const Vec3& r1, const Vec3& r2, double tof,
                              const GravParams& grav,
                              TransferDirection direction = TransferDirection::Prograde);

}  // namespace adr
