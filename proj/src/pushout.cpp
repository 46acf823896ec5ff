#include "stemgrow/pushout.hpp"

#include <algorithm>
#include <cmath>

namespace stemgrow {

namespace {

// Trapezoid weight of node m on the uniform subgrid {0..last}.
double subgrid_weight(std::size_t m, std::size_t last, double ds) {
    if (last == 0) return 0.0;
    if (m == 0 || m == last) return 0.5 * ds;
    return ds;
}

Vec3 twist_part(const Vec3& w, const Vec3& k) { return k * dot(w, k); }

struct PointPush {
    double lambda = 0.0;
    RotationField field;
};

// Single-constraint push at node idx. The isotropic generator is
// e^{-beta(t-sigma)} g x chord; the weighted one splits it into twist/bend
// scaled by 1/c_twist, 1/c_bend. lambda comes from the linearized constraint
//   g . (displacement of node idx) + Phi = 0,
// whose response integral reduces to the closed form for the isotropic case.
PointPush point_push(const StemState& state, const ObstacleSet& set, std::size_t idx,
                     const EnergyWeights& w, double eps_sing) {
    if (idx >= state.size()) throw UsageError("single-point push: node index out of range");
    const Vec3& p = state.nodes[idx].pos;
    const double phi = signed_distance(set, p);
    if (!(phi < 0.0)) throw UsageError("single-point push: node is not penetrating");
    const Vec3 g = gradient(set, p);

    const double t = state.t;
    const std::size_t n = state.size();
    RotationField gen = RotationField::zero(n);
    double response = 0.0;  // g . sum of generator x chord
    for (std::size_t m = 0; m <= idx; ++m) {
        const Vec3 chord = p - state.nodes[m].pos;
        const double stiff = std::exp(-w.beta * (t - state.nodes[m].s));
        Vec3 gxc = cross(g, chord);
        if (!w.isotropic()) {
            const Vec3 tw = twist_part(gxc, state.nodes[m].tangent);
            gxc = tw / w.c_twist + (gxc - tw) / w.c_bend;
        }
        gen.omega[m] = gxc * stiff;
        response += subgrid_weight(m, idx, state.ds) * dot(g, cross(gen.omega[m], chord));
    }
    // response = -denominator of the closed form; it vanishes only when
    // grad Phi is parallel to every chord.
    if (!(response < -eps_sing))
        throw BreakdownProximityError(
            "push-out: constraint response integral below the singularity floor "
            "(grad Phi nearly parallel to all chords)");
    PointPush out;
    out.lambda = -phi / response;  // <= 0
    for (std::size_t m = 0; m <= idx; ++m) gen.omega[m] *= out.lambda;
    out.field = std::move(gen);
    return out;
}

PushOutResult push_out_impl(const StemState& state, const ObstacleSet& set,
                            const EnergyWeights& weights, double tol, int max_iter) {
    if (!(tol > 0.0)) throw UsageError("push_out: tolerance must be > 0");
    PushOutResult r;
    r.state = state;
    r.field = RotationField::zero(state.size());
    for (;;) {
        const DeepestNode deep = deepest_penetrating_node(r.state, set);
        if (deep.depth <= tol) {
            r.residual_depth = deep.depth;
            return r;
        }
        if (r.iterations >= max_iter)
            throw PushFailureError("push_out: max iterations exhausted", deep.depth);
        const PointPush push = point_push(r.state, set, deep.index, weights, kSingularityFloor);
        r.state = apply_rotation_field(std::move(r.state), push.field);
        for (std::size_t m = 0; m < r.field.size(); ++m) r.field.omega[m] += push.field.omega[m];
        r.measure.add(deep.index, -push.lambda);
        ++r.iterations;
    }
}

}  // namespace

void ContactMeasure::add(std::size_t node, double weight) {
    if (weight < 0.0) throw UsageError("ContactMeasure: negative weight");
    for (MeasureAtom& a : atoms) {
        if (a.node == node) {
            a.weight += weight;
            return;
        }
    }
    atoms.push_back({node, weight});
}

double ContactMeasure::total_mass() const {
    double m = 0.0;
    for (const MeasureAtom& a : atoms) m += a.weight;
    return m;
}

double deformation_energy(const RotationField& field, double t, const EnergyWeights& w,
                          const StemState& state) {
    if (field.size() != state.size())
        throw UsageError("deformation_energy: field not aligned with stem grid");
    const QuadratureGrid grid = state.grid();
    double acc = 0.0;
    for (std::size_t i = 0; i < field.size(); ++i) {
        const Vec3& omega = field.omega[i];
        const Vec3 tw = twist_part(omega, state.nodes[i].tangent);
        const double split = w.c_twist * norm2(tw) + w.c_bend * norm2(omega - tw);
        double factor = std::exp(w.beta * (t - state.nodes[i].s));
        if (!state.law.infinite()) factor *= state.law.weight(t, state.nodes[i].s);
        acc += grid.weight(i) * factor * split;
    }
    return 0.5 * acc;
}

StemState apply_rotation_field(StemState state, const RotationField& field) {
    if (field.size() != state.size())
        throw UsageError("apply_rotation_field: field not aligned with stem grid");
    const std::vector<Vec3> prefix = cumulative_trapezoid(field.omega, state.ds);
    for (std::size_t i = 0; i < state.size(); ++i)
        state.nodes[i].tangent = rodrigues(prefix[i]).apply(state.nodes[i].tangent);
    return rebuild_positions(std::move(state));
}

double single_point_multiplier(const StemState& state, const ObstacleSet& set,
                               std::size_t s_prime, double beta, double eps_sing) {
    EnergyWeights w;
    w.beta = beta;
    return point_push(state, set, s_prime, w, eps_sing).lambda;
}

RotationField single_point_field(const StemState& state, const ObstacleSet& set,
                                 std::size_t s_prime, double beta, double eps_sing) {
    EnergyWeights w;
    w.beta = beta;
    return point_push(state, set, s_prime, w, eps_sing).field;
}

PushOutResult push_out(const StemState& state, const ObstacleSet& set, double beta, double tol,
                       int max_iter) {
    EnergyWeights w;
    w.beta = beta;
    return push_out_impl(state, set, w, tol, max_iter);
}

PushOutResult weighted_push_out(const StemState& state, const ObstacleSet& set,
                                const EnergyWeights& weights, double tol, int max_iter) {
    if (!(weights.c_twist > 0.0 && weights.c_bend > 0.0))
        throw UsageError("weighted_push_out: energy weights must be positive");
    return push_out_impl(state, set, weights, tol, max_iter);
}

RotationField measure_representation_field(const StemState& state, const ObstacleSet& set,
                                           const ContactMeasure& mu, double beta,
                                           double contact_tol) {
    const std::size_t n = state.size();
    RotationField field = RotationField::zero(n);
    const double t = state.t;
    for (const MeasureAtom& atom : mu.atoms) {
        if (atom.node >= n) throw UsageError("measure_representation_field: atom out of range");
        const Vec3& pj = state.nodes[atom.node].pos;
        if (std::abs(signed_distance(set, pj)) > contact_tol)
            throw UsageError("measure_representation_field: atom outside the contact set");
        const Vec3 gj = gradient(set, pj);
        for (std::size_t i = 0; i <= atom.node; ++i) {
            const double stiff = std::exp(-beta * (t - state.nodes[i].s));
            field.omega[i] -= stiff * atom.weight * cross(gj, pj - state.nodes[i].pos);
        }
    }
    return field;
}

double cone_membership_residual(const StemState& state, const ObstacleSet& set,
                                const std::vector<Vec3>& v, double beta, double contact_tol) {
    const std::size_t n = state.size();
    if (v.size() != n) throw UsageError("cone_membership_residual: velocity length mismatch");
    const QuadratureGrid grid = state.grid();

    const ContactSet contact = contact_set(state, set, contact_tol);
    const auto l2 = [&](const std::vector<Vec3>& f) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += grid.weight(i) * norm2(f[i]);
        return std::sqrt(acc);
    };
    if (contact.empty()) return l2(v);

    // Basis field of a unit atom at contact node j, via prefix sums:
    //   psi_j(s_i) = -[E_j(min(i,j)) x P_i - F_j(min(i,j))]
    // with E_j, F_j cumulative trapezoids of q_j and q_j x P.
    const double t = state.t;
    const std::size_t m_atoms = contact.indices.size();
    std::vector<std::vector<Vec3>> basis(m_atoms, std::vector<Vec3>(n));
    for (std::size_t a = 0; a < m_atoms; ++a) {
        const std::size_t j = contact.indices[a];
        const Vec3& pj = state.nodes[j].pos;
        const auto gj = try_gradient(set, pj);
        if (!gj) continue;  // degenerate contact generates nothing
        std::vector<Vec3> q(n), qxp(n);
        for (std::size_t m = 0; m < n; ++m) {
            const double stiff = std::exp(-beta * (t - state.nodes[m].s));
            q[m] = stiff * cross(*gj, pj - state.nodes[m].pos);
            qxp[m] = cross(q[m], state.nodes[m].pos);
        }
        const std::vector<Vec3> E = cumulative_trapezoid(q, state.ds);
        const std::vector<Vec3> F = cumulative_trapezoid(qxp, state.ds);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t cut = std::min(i, j);
            basis[a][i] = -(cross(E[cut], state.nodes[i].pos) - F[cut]);
        }
    }

    // Nonnegative least squares on the Gram system by projected coordinate
    // descent, 1e-10 stationarity tolerance.
    std::vector<std::vector<double>> G(m_atoms, std::vector<double>(m_atoms, 0.0));
    std::vector<double> b(m_atoms, 0.0);
    for (std::size_t a = 0; a < m_atoms; ++a) {
        for (std::size_t c = a; c < m_atoms; ++c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                acc += grid.weight(i) * dot(basis[a][i], basis[c][i]);
            G[a][c] = acc;
            G[c][a] = acc;
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += grid.weight(i) * dot(v[i], basis[a][i]);
        b[a] = acc;
    }

    double bscale = 1.0;
    for (double x : b) bscale = std::max(bscale, std::abs(x));
    const double stat_tol = 1e-10 * bscale;

    std::vector<double> mu(m_atoms, 0.0);
    for (int sweep = 0; sweep < 200000; ++sweep) {
        double worst = 0.0;
        for (std::size_t a = 0; a < m_atoms; ++a) {
            if (G[a][a] <= 0.0) continue;
            double grad = -b[a];
            for (std::size_t c = 0; c < m_atoms; ++c) grad += G[a][c] * mu[c];
            const double updated = std::max(0.0, mu[a] - grad / G[a][a]);
            worst = std::max(worst, std::abs(updated - mu[a]) * G[a][a]);
            mu[a] = updated;
        }
        if (worst <= stat_tol) break;
    }

    std::vector<Vec3> resid(v);
    for (std::size_t a = 0; a < m_atoms; ++a) {
        if (mu[a] == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) resid[i] -= mu[a] * basis[a][i];
    }
    return l2(resid);
}

RotationField recover_field_from_displacement(const StemState& state,
                                              const std::vector<Vec3>& v) {
    const std::size_t n = state.size();
    if (v.size() != n)
        throw UsageError("recover_field_from_displacement: displacement length mismatch");
    RotationField field = RotationField::zero(n);
    if (n < 2) return field;

    double vscale = 0.0;
    for (const Vec3& x : v) vscale = std::max(vscale, norm(x));
    if (norm(v[0]) > 1e-8 * (1.0 + vscale))
        throw UsageError("recover_field_from_displacement: v(0) must vanish");
    if (norm(v[1] - v[0]) > 1e-8 * (1.0 + vscale) * state.ds)
        throw UsageError("recover_field_from_displacement: first difference at 0 must vanish");

    const double ds = state.ds;
    Vec3 a_prev;
    for (std::size_t i = 1; i < n; ++i) {
        const Vec3 b = state.nodes[i].pos - state.nodes[i - 1].pos;
        const double bn = norm(b);
        if (bn < 1e-14)
            throw IllConditionedFrameError("recover_field_from_displacement: degenerate chord");
        const Vec3 bhat = b / bn;
        const Vec3 c = v[i] - v[i - 1];

        // Differences must be orthogonal to the chord (the discrete form of
        // <v'(s), gamma'(s)> = 0).
        if (norm(c) > 1e-12 * (1.0 + vscale) * ds && std::abs(dot(c, bhat)) > 1e-6 * norm(c))
            throw UsageError(
                "recover_field_from_displacement: differences not orthogonal to the curve");

        const Vec3 a_min = cross(b, c) / (bn * bn);  // minimal solution of A x b = c
        const Vec3& k = state.nodes[i - 1].tangent;
        const double along = dot(bhat, k);
        if (std::abs(along) < 0.1)
            throw IllConditionedFrameError(
                "recover_field_from_displacement: chord nearly orthogonal to tangent");
        if (i == 1) {
            const double theta = -dot(a_min, k) / along;
            a_prev = a_min + theta * bhat;
            field.omega[0] = a_prev * (2.0 / ds);
        } else {
            const double theta = dot(a_prev - a_min, k) / along;
            const Vec3 a = a_min + theta * bhat;
            field.omega[i - 1] = (a - a_prev) / ds;
            a_prev = a;
        }
    }

    // The displacement data carries no information about the final node;
    // extrapolate and keep the tangent-orthogonal part.
    Vec3 tail = field.omega[n - 2];
    if (n >= 3) tail = 2.0 * field.omega[n - 2] - field.omega[n - 3];
    const Vec3& k_tip = state.nodes[n - 1].tangent;
    field.omega[n - 1] = tail - k_tip * dot(tail, k_tip);
    return field;
}

RotationField recover_field_fixed_point(const StemState& state, const std::vector<Vec3>& v,
                                        int max_sweeps) {
    const std::size_t n = state.size();
    if (v.size() != n) throw UsageError("recover_field_fixed_point: displacement length mismatch");
    if (n < 3) throw UsageError("recover_field_fixed_point: need at least 3 nodes");
    const double ds = state.ds;

    // Parallel-transport (rotation-minimizing) frame {e1 = k, e2, e3}.
    std::vector<Vec3> e2(n), e3(n);
    {
        const Vec3& k0 = state.nodes[0].tangent;
        const Vec3 seed = std::abs(k0.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
        e2[0] = normalized(seed - k0 * dot(seed, k0));
        e3[0] = cross(k0, e2[0]);
        for (std::size_t i = 1; i < n; ++i) {
            const Vec3& ka = state.nodes[i - 1].tangent;
            const Vec3& kb = state.nodes[i].tangent;
            const Vec3 axis = cross(ka, kb);
            const double sn = norm(axis);
            Vec3 carried = e2[i - 1];
            if (sn > 1e-300) {
                const double angle = std::atan2(sn, dot(ka, kb));
                carried = rodrigues(axis * (angle / sn)).apply(carried);
            }
            carried = carried - kb * dot(carried, kb);
            const double cn = norm(carried);
            if (cn < 1e-12)
                throw IllConditionedFrameError("recover_field_fixed_point: frame collapsed");
            e2[i] = carried / cn;
            e3[i] = cross(kb, e2[i]);
        }
    }

    const auto derivative = [&](const std::vector<Vec3>& f) {
        std::vector<Vec3> d(n);
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * ds);
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * ds);
        d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * ds);
        return d;
    };

    const std::vector<Vec3> vp = derivative(v);
    std::vector<Vec3> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = {0.0, dot(vp[i], e2[i]), dot(vp[i], e3[i])};
    const std::vector<Vec3> zp = derivative(z);
    const std::vector<Vec3> e2p = derivative(e2);
    const std::vector<Vec3> e3p = derivative(e3);

    std::vector<double> w2(n, 0.0), w3(n, 0.0);
    double change = 0.0;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double acc3 = 0.0, acc2 = 0.0;
            for (std::size_t m = 0; m <= i; ++m) {
                const double wgt = subgrid_weight(m, i, ds);
                acc3 += wgt * (dot(e2[m], e3p[i]) * w2[m] + dot(e3[m], e3p[i]) * w3[m]);
                acc2 += wgt * (dot(e2[m], e2p[i]) * w2[m] + dot(e3[m], e2p[i]) * w3[m]);
            }
            const double n3 = zp[i].y - acc3;
            const double n2 = -zp[i].z - acc2;
            change = std::max(change, std::max(std::abs(n3 - w3[i]), std::abs(n2 - w2[i])));
            w3[i] = n3;
            w2[i] = n2;
        }
        double scale = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            scale = std::max(scale, std::max(std::abs(w2[i]), std::abs(w3[i])));
        if (change <= 1e-13 * scale) break;
    }
    if (sweep >= max_sweeps)
        throw IllConditionedFrameError("recover_field_fixed_point: iteration did not contract");

    RotationField field = RotationField::zero(n);
    for (std::size_t i = 0; i < n; ++i) field.omega[i] = e2[i] * w2[i] + e3[i] * w3[i];
    return field;
}

BreakdownReport check_breakdown(const StemState& state, const ObstacleSet& set, double tol_angle,
                                double tol_curv, double tol_dist) {
    BreakdownReport report;
    const std::size_t n = state.size();
    if (n == 0 || set.empty()) {
        report.angle_defect = std::acos(-1.0);
        return report;
    }

    const Vec3& tip_pos = state.tip().pos;
    const double phi_tip = signed_distance(set, tip_pos);
    report.tip_on_boundary = std::abs(phi_tip) <= tol_dist;

    report.angle_defect = std::acos(-1.0);
    if (const auto normal = try_gradient(set, tip_pos)) {
        const double c = std::clamp(dot(state.tip().tangent, -*normal), -1.0, 1.0);
        report.angle_defect = std::acos(c);
    }
    report.tip_perpendicular = report.angle_defect <= tol_angle;

    std::vector<bool> in_band(n, false);
    for (std::size_t i = 0; i < n; ++i)
        in_band[i] = std::abs(signed_distance(set, state.nodes[i].pos)) <= tol_dist;
    double max_curv = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (in_band[i] || in_band[i + 1]) continue;
        const double curv = norm(state.nodes[i + 1].tangent - state.nodes[i].tangent) / state.ds;
        max_curv = std::max(max_curv, curv);
    }
    report.max_off_contact_curvature = max_curv;
    report.straight_off_contact = max_curv <= tol_curv;

    report.is_breakdown =
        report.tip_on_boundary && report.tip_perpendicular && report.straight_off_contact;
    return report;
}

}  // namespace stemgrow
