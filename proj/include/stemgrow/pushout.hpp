#pragma once

#include "stemgrow/growth.hpp"
#include "stemgrow/obstacle.hpp"
#include "stemgrow/stem.hpp"

namespace stemgrow {

// Discrete positive measure on contact nodes.
struct MeasureAtom {
    std::size_t node = 0;
    double weight = 0.0;  // >= 0
};

struct ContactMeasure {
    std::vector<MeasureAtom> atoms;

    // Merges additively when an atom at the same node already exists.
    void add(std::size_t node, double weight);
    double total_mass() const;
    bool empty() const { return atoms.empty(); }
};

// Coefficients of the deformation energy. c_twist = c_bend reduces the
// weighted energy to the isotropic one.
struct EnergyWeights {
    double beta = 0.0;
    double c_twist = 1.0;
    double c_bend = 1.0;

    bool isotropic() const { return c_twist == c_bend; }
};

struct BreakdownReport {
    bool is_breakdown = false;
    bool tip_on_boundary = false;
    bool tip_perpendicular = false;
    bool straight_off_contact = false;
    double angle_defect = 0.0;               // angle between tip tangent and -n(tip)
    double max_off_contact_curvature = 0.0;  // max |k_{i+1}-k_i|/ds off the contact band
};

// Floor under the single-point multiplier denominator; below it the
// configuration is treated as breakdown-proximal rather than divided by.
inline constexpr double kSingularityFloor = 1e-10;

// Elastic deformation energy of a rotation field:
//   (1/2) * integral of e^{beta(t-sigma)} [c_twist |w_t|^2 + c_bend |w_b|^2],
// with w_t = (k.w)k the twist part and w_b the bend part; finite alpha adds
// the 1-e^{-alpha(t-sigma)} factor.
double deformation_energy(const RotationField& field, double t, const EnergyWeights& w,
                          const StemState& state);

// k(s) <- R[prefix integral of omega](s) k(s); positions rebuilt.
StemState apply_rotation_field(StemState state, const RotationField& field);

// Lagrange multiplier of the single-constraint push at node s_prime:
//   lambda = Phi(P(s')) / integral of e^{-beta(t-sigma)}
//            [ |grad Phi|^2 |P(s')-P(sigma)|^2 - (grad Phi . (P(s')-P(sigma)))^2 ],
// always <= 0. Requires Phi(P(s')) < 0. A denominator below eps_sing means
// grad Phi is parallel to all chords (the breakdown-proximal case) and raises
// BreakdownProximityError.
double single_point_multiplier(const StemState& state, const ObstacleSet& set,
                               std::size_t s_prime, double beta,
                               double eps_sing = kSingularityFloor);

// Minimizing rotation field expelling node s_prime:
//   omega(sigma) = lambda e^{-beta(t-sigma)} grad Phi(P(s')) x (P(s')-P(sigma))
// for sigma <= s', zero beyond.
RotationField single_point_field(const StemState& state, const ObstacleSet& set,
                                 std::size_t s_prime, double beta,
                                 double eps_sing = kSingularityFloor);

struct PushOutResult {
    StemState state;
    ContactMeasure measure;
    RotationField field;  // accumulated over iterations
    int iterations = 0;
    double residual_depth = 0.0;
};

// Deepest-point iteration: push the deepest penetrating node with the
// single-constraint field, accumulate field and measure, repeat until the
// penetration depth falls below tol. Throws PushFailureError when max_iter
// is exhausted, BreakdownProximityError from the multiplier.
PushOutResult push_out(const StemState& state, const ObstacleSet& set, double beta, double tol,
                       int max_iter);

// Anisotropic variant: the single-point generator splits into twist/bend
// components scaled by 1/c_twist and 1/c_bend, and lambda is derived from the
// linearized constraint by quadrature. Identical to push_out when
// c_twist = c_bend = 1.
PushOutResult weighted_push_out(const StemState& state, const ObstacleSet& set,
                                const EnergyWeights& weights, double tol, int max_iter);

// Field generated by a contact measure:
//   omega(s) = -e^{-beta(t-s)} sum_atoms weight * grad Phi(P(s')) x (P(s')-P(s))
// over atoms with s' >= s. Atoms must lie within contact_tol of the boundary.
RotationField measure_representation_field(const StemState& state, const ObstacleSet& set,
                                           const ContactMeasure& mu, double beta,
                                           double contact_tol = 1e-6);

// Distance (discrete L2) from a per-node velocity field to the cone of
// velocities generable by positive contact measures, computed by nonnegative
// least squares (projected coordinate descent). A residual near zero
// certifies membership.
double cone_membership_residual(const StemState& state, const ObstacleSet& set,
                                const std::vector<Vec3>& v, double beta,
                                double contact_tol = 1e-6);

// Recovers the unique tangent-orthogonal rotation field with
//   v(s) = integral over [0,s] of omega(sigma) x (gamma(s)-gamma(sigma)),
// by forward substitution on the causal discrete system. Requires v(0) = 0,
// a vanishing first difference at 0, and chord-orthogonal differences.
// The final node is invisible to the displacement data and is filled by
// tangent-orthogonal extrapolation.
RotationField recover_field_from_displacement(const StemState& state,
                                              const std::vector<Vec3>& v);

// Verification path for the recovery: fixed-point iteration on the Volterra
// system in a parallel-transport frame. O(ds^2)-consistent, not exact.
RotationField recover_field_fixed_point(const StemState& state, const std::vector<Vec3>& v,
                                        int max_sweeps = 200);

// Detects the breakdown configuration: tip on the boundary, tip tangent
// opposite the outward normal, and all off-contact segments straight.
BreakdownReport check_breakdown(const StemState& state, const ObstacleSet& set, double tol_angle,
                                double tol_curv, double tol_dist);

}  // namespace stemgrow
