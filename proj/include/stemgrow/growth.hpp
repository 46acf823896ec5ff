#pragma once

#include "stemgrow/obstacle.hpp"
#include "stemgrow/stem.hpp"

namespace stemgrow {

// Per-node angular-velocity (or accumulated-angle) vectors aligned with the
// stem grid.
struct RotationField {
    std::vector<Vec3> omega;

    static RotationField zero(std::size_t n) {
        RotationField f;
        f.omega.assign(n, Vec3{});
        return f;
    }
    std::size_t size() const { return omega.size(); }
};

// L2 norm of a field over the uniform grid (trapezoid weights).
double field_l2_norm(const RotationField& field, double ds);

// Model constants for the smooth part of the dynamics.
struct GrowthParams {
    double kappa = 0.0;  // gravity response strength, >= 0
    double beta = 0.0;   // stiffness decay rate, >= 0
    SensingParams sensing;
    ElongationLaw law;
    // Upward direction the gravity response rotates toward. Planar (z = 0)
    // runs use +y so that the restriction to the plane is exact.
    Vec3 up{0.0, 0.0, 1.0};
};

// Kernel of the evolution equation:
//   e^{-beta(t-sigma)} [ kappa (k x up) + grad psi(P) x k ],
// additionally weighted by 1-e^{-alpha(t-sigma)} for finite alpha.
// A degenerate signed-distance gradient at P contributes zero.
Vec3 psi_kernel(double t, double sigma, const Vec3& pos, const Vec3& tangent,
                const GrowthParams& params, const ObstacleSet& set);

// Accumulated angular displacement of the growth step:
// Omega(s) = dt * trapezoid over [0, s] of the kernel along the stem.
// Zero at the root.
RotationField growth_rotation_field(const StemState& state, const GrowthParams& params,
                                    const ObstacleSet& set, double dt);

// One forward-Euler rotation step of the obstacle-free dynamics: each tangent
// is rotated by the accumulated angle, time advances by dt, positions are
// rebuilt. Tangents stay unit up to rotation round-off.
StemState apply_growth_step(StemState state, const GrowthParams& params, const ObstacleSet& set,
                            double dt);

// Max discrepancy between the planar form of the smooth dynamics and the 3D
// kernel restricted to the z = 0 plane. Requires a planar state and the
// planar up-axis convention (up = +y).
double planar_consistency_check(const StemState& state, const GrowthParams& params,
                                const ObstacleSet& set);

}  // namespace stemgrow
