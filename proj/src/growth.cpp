#include "stemgrow/growth.hpp"

#include <cmath>

namespace stemgrow {

double field_l2_norm(const RotationField& field, double ds) {
    if (field.omega.empty()) return 0.0;
    const QuadratureGrid grid = QuadratureGrid::uniform(0.0, ds, field.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) acc += norm2(field.omega[i]) * grid.weight(i);
    return std::sqrt(acc);
}

Vec3 psi_kernel(double t, double sigma, const Vec3& pos, const Vec3& tangent,
                const GrowthParams& params, const ObstacleSet& set) {
    if (sigma > t + 1e-12) throw UsageError("psi_kernel: sigma beyond current time");
    Vec3 g = cross(tangent, params.up) * params.kappa;
    if (params.sensing.gamma != 0.0 && !set.empty()) {
        // A gradient-degenerate node contributes nothing for this step.
        const double d = std::max(signed_distance(set, pos), 0.0);
        if (d < params.sensing.delta0) {
            if (const auto grad = try_gradient(set, pos)) {
                g += cross(*grad * eta_prime(d, params.sensing), tangent);
            }
        }
    }
    double factor = std::exp(-params.beta * (t - sigma));
    if (!params.law.infinite()) factor *= params.law.weight(t, sigma);
    return g * factor;
}

RotationField growth_rotation_field(const StemState& state, const GrowthParams& params,
                                    const ObstacleSet& set, double dt) {
    if (!(dt > 0.0)) throw UsageError("growth_rotation_field: dt must be > 0");
    const std::size_t n = state.size();
    std::vector<Vec3> kernel(n);
    for (std::size_t i = 0; i < n; ++i) {
        const StemNode& node = state.nodes[i];
        kernel[i] = psi_kernel(state.t, node.s, node.pos, node.tangent, params, set);
    }
    RotationField field;
    field.omega = cumulative_trapezoid(kernel, state.ds);
    for (Vec3& w : field.omega) w *= dt;
    return field;
}

StemState apply_growth_step(StemState state, const GrowthParams& params, const ObstacleSet& set,
                            double dt) {
    const RotationField field = growth_rotation_field(state, params, set, dt);
    for (std::size_t i = 0; i < state.size(); ++i)
        state.nodes[i].tangent = rodrigues(field.omega[i]).apply(state.nodes[i].tangent);
    state.t += dt;
    return rebuild_positions(std::move(state), params.law);
}

double planar_consistency_check(const StemState& state, const GrowthParams& params,
                                const ObstacleSet& set) {
    for (const StemNode& n : state.nodes) {
        if (n.pos.z != 0.0 || n.tangent.z != 0.0)
            throw UsageError("planar_consistency_check: state is not planar (z = 0)");
    }
    if (!(params.up == Vec3{0.0, 1.0, 0.0}))
        throw UsageError("planar_consistency_check: requires the planar up-axis (+y)");

    const std::size_t n = state.size();
    const double t = state.t;

    // Planar integrands: kappa e^{-beta(t-sigma)} k_1 and
    // e^{-beta(t-sigma)} <grad psi(P), k_perp>, k_perp = CCW quarter turn.
    std::vector<double> grav(n), cling(n);
    std::vector<Vec3> kernel3(n);
    for (std::size_t i = 0; i < n; ++i) {
        const StemNode& node = state.nodes[i];
        double factor = std::exp(-params.beta * (t - node.s));
        if (!params.law.infinite()) factor *= params.law.weight(t, node.s);
        const Vec3 kperp{-node.tangent.y, node.tangent.x, 0.0};
        grav[i] = factor * params.kappa * node.tangent.x;
        Vec3 gpsi{};
        if (params.sensing.gamma != 0.0 && !set.empty()) {
            const double d = std::max(signed_distance(set, node.pos), 0.0);
            if (d < params.sensing.delta0) {
                if (const auto grad = try_gradient(set, node.pos))
                    gpsi = *grad * eta_prime(d, params.sensing);
            }
        }
        cling[i] = factor * dot(gpsi, kperp);
        kernel3[i] = psi_kernel(t, node.s, node.pos, node.tangent, params, set);
    }
    const std::vector<double> grav_prefix = cumulative_trapezoid(grav, state.ds);
    const std::vector<double> cling_prefix = cumulative_trapezoid(cling, state.ds);
    const std::vector<Vec3> kernel_prefix = cumulative_trapezoid(kernel3, state.ds);

    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& k = state.nodes[i].tangent;
        const Vec3 kperp{-k.y, k.x, 0.0};
        const Vec3 planar = kperp * (grav_prefix[i] - cling_prefix[i]);
        const Vec3 full = cross(kernel_prefix[i], k);
        worst = std::max(worst, norm(planar - full));
    }
    return worst;
}

}  // namespace stemgrow
