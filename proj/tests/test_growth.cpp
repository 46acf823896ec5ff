#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "stemgrow/growth.hpp"

using namespace stemgrow;

namespace {

ObstacleSet one_sphere(const Vec3& c, double r) {
    ObstacleSet set;
    set.obstacles.push_back(Obstacle::sphere(c, r));
    return set;
}

GrowthParams gravity_only(double kappa, double beta) {
    GrowthParams p;
    p.kappa = kappa;
    p.beta = beta;
    return p;
}

double angle_to(const Vec3& a, const Vec3& b) {
    return std::acos(std::clamp(dot(normalized(a), normalized(b)), -1.0, 1.0));
}

}  // namespace

TEST_CASE("psi_kernel basic values") {
    const ObstacleSet none;

    // Vertical tangent feels no gravity torque.
    CHECK(norm(psi_kernel(1.0, 0.5, {0, 0, 0.5}, {0, 0, 1}, gravity_only(1.0, 0.3), none)) ==
          0.0);

    // Unit horizontal case: k x e3 = (0,-1,0).
    const Vec3 v = psi_kernel(1.0, 1.0, {0, 0, 0}, {1, 0, 0}, gravity_only(1.0, 0.0), none);
    CHECK(norm(v - Vec3{0, -1, 0}) < 1e-15);

    // Stiffness factor: beta = 0.5, t - sigma = 2.
    const Vec3 w = psi_kernel(2.0, 0.0, {0, 0, 0}, {1, 0, 0}, gravity_only(1.0, 0.5), none);
    CHECK(norm(w - Vec3{0, -std::exp(-1.0), 0}) < 1e-15);

    // Finite alpha multiplies by the elongation weight.
    GrowthParams p = gravity_only(1.0, 0.5);
    p.law.alpha = 2.0;
    const Vec3 u = psi_kernel(2.0, 0.0, {0, 0, 0}, {1, 0, 0}, p, none);
    CHECK(norm(u - Vec3{0, -std::exp(-1.0) * (1.0 - std::exp(-4.0)), 0}) < 1e-15);
}

TEST_CASE("growth_rotation_field: vertical equilibrium and constant integrand") {
    const ObstacleSet none;
    StemState vertical = make_straight_stem(21, 0.05, {0, 0, 1});
    const RotationField f = growth_rotation_field(vertical, gravity_only(1.0, 0.7), none, 0.05);
    for (const Vec3& w : f.omega) CHECK(norm(w) == 0.0);

    // Horizontal stem, beta = 0: Omega(s) = dt * s * (0,-1,0).
    StemState horizontal = make_straight_stem(11, 0.1, {1, 0, 0});
    const double dt = 0.1;
    const RotationField g = growth_rotation_field(horizontal, gravity_only(1.0, 0.0), none, dt);
    CHECK(norm(g.omega[0]) == 0.0);  // root: empty integral
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec3 expect = Vec3{0, -1, 0} * (dt * horizontal.nodes[i].s);
        CHECK(norm(g.omega[i] - expect) < 1e-14);
    }
}

TEST_CASE("apply_growth_step: vertical stem is a fixed point") {
    const ObstacleSet none;
    StemState st = make_straight_stem(21, 0.05, {0, 0, 1});
    const StemState out = apply_growth_step(st, gravity_only(2.0, 0.4), none, 0.05);
    CHECK(out.t == doctest::Approx(st.t + 0.05));
    for (std::size_t i = 0; i < st.size(); ++i) {
        CHECK(norm(out.nodes[i].tangent - st.nodes[i].tangent) == 0.0);
        CHECK(norm(out.nodes[i].pos - st.nodes[i].pos) == 0.0);
    }
}

TEST_CASE("apply_growth_step: horizontal segment rotates toward vertical") {
    const ObstacleSet none;
    StemState st = make_straight_stem(11, 0.1, {1, 0, 0});
    const double dt = 0.05;
    const StemState out = apply_growth_step(st, gravity_only(1.0, 0.0), none, dt);

    // One-step hand computation: tip rotates by dt*s_tip about (0,-1,0).
    const double theta = dt * st.s_last();
    const Vec3 expect = rodrigues(Vec3{0, -1, 0} * theta).apply(Vec3{1, 0, 0});
    CHECK(norm(out.tip().tangent - expect) < 1e-14);
    CHECK(out.tip().tangent.z > 0.0);  // rises toward e3

    // Root tangent never changes.
    CHECK(norm(out.nodes[0].tangent - st.nodes[0].tangent) == 0.0);

    // Rotation preserves unit norms to round-off.
    for (const StemNode& n : out.nodes) CHECK(std::abs(norm(n.tangent) - 1.0) < 1e-12);
}

TEST_CASE("apply_growth_step: disabled dynamics is the identity on tangents") {
    const ObstacleSet set = one_sphere({0.4, 0.1, 0}, 0.05);
    GrowthParams p;  // kappa = 0, gamma = 0
    StemState st = make_straight_stem(9, 0.05, {1, 0, 0});
    const StemState out = apply_growth_step(st, p, set, 0.05);
    for (std::size_t i = 0; i < st.size(); ++i)
        CHECK(norm(out.nodes[i].tangent - st.nodes[i].tangent) == 0.0);
}

TEST_CASE("monotone influence: straight non-vertical stem bends upward") {
    const ObstacleSet none;
    StemState st = make_straight_stem(15, 0.05, normalized(Vec3{1, 0.3, 0.8}));
    const StemState out = apply_growth_step(st, gravity_only(1.0, 0.5), none, 0.05);
    const Vec3 up{0, 0, 1};
    for (std::size_t i = 1; i < st.size(); ++i)
        CHECK(angle_to(out.nodes[i].tangent, up) < angle_to(st.nodes[i].tangent, up));
}

TEST_CASE("planar closure: z = 0 states stay exactly planar under the +y axis") {
    GrowthParams p = gravity_only(1.0, 0.5);
    p.up = {0, 1, 0};
    p.sensing = {7.0, 0.05};
    const ObstacleSet set = one_sphere({0.1, 1.5, 0}, 0.5);

    testutil::Rng rng(13);
    StemState st = make_straight_stem(30, 0.05, {0, 1, 0});
    for (std::size_t i = 0; i < st.size(); ++i) {
        const double a = rng.range(-0.6, 0.6);
        st.nodes[i].tangent = {std::sin(a), std::cos(a), 0.0};
    }
    st = rebuild_positions(std::move(st));

    StemState cur = st;
    for (int step = 0; step < 20; ++step) {
        cur = apply_growth_step(cur, p, set, 0.05);
        for (const StemNode& n : cur.nodes) {
            CHECK(n.tangent.z == 0.0);
            CHECK(n.pos.z == 0.0);
        }
    }
}

TEST_CASE("planar consistency check against the 2D form") {
    GrowthParams p = gravity_only(1.0, 0.5);
    p.up = {0, 1, 0};
    p.sensing = {4.0, 0.05};
    const ObstacleSet set = one_sphere({0.1, 1.5, 0}, 0.5);

    // Vertical planar stem: both sides zero.
    StemState vertical = make_straight_stem(20, 0.05, {0, 1, 0});
    CHECK(planar_consistency_check(vertical, p, ObstacleSet{}) == 0.0);

    // Random planar stems: discrepancy at round-off.
    testutil::Rng rng(37);
    for (int trial = 0; trial < 5; ++trial) {
        StemState st = make_straight_stem(50, 0.05, {0, 1, 0});
        for (std::size_t i = 0; i < st.size(); ++i) {
            const double a = rng.range(-1.0, 1.0);
            st.nodes[i].tangent = {std::sin(a), std::cos(a), 0.0};
        }
        st = rebuild_positions(std::move(st));
        CHECK(planar_consistency_check(st, p, set) <= 1e-10);
    }

    // Non-planar input is a usage error.
    StemState tilted = make_straight_stem(10, 0.05, normalized(Vec3{0, 1, 0.2}));
    CHECK_THROWS_AS((void)planar_consistency_check(tilted, p, set), UsageError);

    // The planar convention requires the +y axis.
    StemState planar = make_straight_stem(10, 0.05, {0, 1, 0});
    CHECK_THROWS_AS((void)planar_consistency_check(planar, gravity_only(1.0, 0.5), set),
                    UsageError);
}

TEST_CASE("degenerate sensing gradient contributes zero for the step") {
    // Node exactly at a sphere center: psi gradient is undefined; the kernel
    // treats its clinging contribution as zero instead of failing.
    GrowthParams p;
    p.sensing = {5.0, 10.0};  // huge range so the center is inside it
    const ObstacleSet set = one_sphere({0, 0, 0}, 0.5);
    const Vec3 v = psi_kernel(1.0, 1.0, {0, 0, 0}, {1, 0, 0}, p, set);
    CHECK(norm(v) == 0.0);
}

TEST_CASE("field_l2_norm uses trapezoid weights") {
    RotationField f = RotationField::zero(3);
    f.omega[0] = {1, 0, 0};
    f.omega[1] = {1, 0, 0};
    f.omega[2] = {1, 0, 0};
    CHECK(field_l2_norm(f, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
}
