#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "stemgrow/obstacle.hpp"

using namespace stemgrow;

namespace {

ObstacleSet one_sphere(const Vec3& c, double r) {
    ObstacleSet set;
    set.obstacles.push_back(Obstacle::sphere(c, r));
    return set;
}

// Simulation-2 layout: two circles in the z=0 plane.
ObstacleSet sim2_layout() {
    ObstacleSet set;
    set.obstacles.push_back(Obstacle::sphere({0.1, 1.5, 0}, 0.5));
    set.obstacles.push_back(Obstacle::sphere({0.6, 4.0, 0}, 1.0));
    return set;
}

Vec3 finite_difference_gradient(const ObstacleSet& set, const Vec3& x, double h) {
    return {(signed_distance(set, {x.x + h, x.y, x.z}) - signed_distance(set, {x.x - h, x.y, x.z})) /
                (2 * h),
            (signed_distance(set, {x.x, x.y + h, x.z}) - signed_distance(set, {x.x, x.y - h, x.z})) /
                (2 * h),
            (signed_distance(set, {x.x, x.y, x.z + h}) - signed_distance(set, {x.x, x.y, x.z - h})) /
                (2 * h)};
}

}  // namespace

TEST_CASE("signed distance of a sphere") {
    const ObstacleSet set = one_sphere({0, 0, 0}, 0.5);
    CHECK(signed_distance(set, {1, 0, 0}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(signed_distance(set, {0.25, 0, 0}) == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(signed_distance(set, {0.5, 0, 0}) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("signed distance of the Simulation-2 union at the origin") {
    const ObstacleSet set = sim2_layout();
    const double d1 = std::hypot(0.1, 1.5) - 0.5;
    const double d2 = std::hypot(0.6, 4.0) - 1.0;
    CHECK(signed_distance(set, {0, 0, 0}) == doctest::Approx(std::min(d1, d2)).epsilon(1e-15));
}

TEST_CASE("empty set yields the +inf sentinel") {
    CHECK(signed_distance(ObstacleSet{}, {1, 2, 3}) == kNoObstacleDistance);
    CHECK(!try_gradient(ObstacleSet{}, {1, 2, 3}).has_value());
}

TEST_CASE("gradient directions") {
    const ObstacleSet sphere = one_sphere({0, 0, 0}, 0.5);
    CHECK(norm(gradient(sphere, {1, 0, 0}) - Vec3{1, 0, 0}) < 1e-15);

    ObstacleSet half;
    half.obstacles.push_back(Obstacle::half_space({0, 0, 2}, {0, 0, 1}));
    CHECK(norm(gradient(half, {5, -3, 0.5}) - Vec3{0, 0, 1}) < 1e-15);

    // Union: nearest member is the small circle directly above.
    const ObstacleSet set = sim2_layout();
    CHECK(norm(gradient(set, {0.1, 0.9, 0}) - Vec3{0, -1, 0}) < 1e-12);
}

TEST_CASE("gradient matches finite differences of the signed distance") {
    const ObstacleSet set = sim2_layout();
    testutil::Rng rng(5);
    int checked = 0;
    while (checked < 40) {
        const Vec3 x{rng.range(-2, 3), rng.range(-1, 6), rng.range(-1, 1)};
        const auto g = try_gradient(set, x);
        if (!g) continue;
        if (std::abs(signed_distance(set, x)) < 0.05) continue;  // keep away from kinks
        CHECK(norm(*g - finite_difference_gradient(set, x, 1e-6)) < 1e-6);
        ++checked;
    }
}

TEST_CASE("gradient degeneracy: sphere center and equidistance locus") {
    const ObstacleSet sphere = one_sphere({1, 1, 0}, 0.5);
    CHECK_THROWS_AS((void)gradient(sphere, {1, 1, 0}), DegenerateGradientError);

    ObstacleSet twin;
    twin.obstacles.push_back(Obstacle::sphere({-1, 0, 0}, 0.5));
    twin.obstacles.push_back(Obstacle::sphere({1, 0, 0}, 0.5));
    CHECK_THROWS_AS((void)gradient(twin, {0, 0.3, 0}), DegenerateGradientError);
    CHECK(std::isfinite(signed_distance(twin, {0, 0.3, 0})));  // distance still fine
}

TEST_CASE("gradient is unit wherever defined") {
    const ObstacleSet set = sim2_layout();
    testutil::Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec3 x{rng.range(-2, 3), rng.range(-1, 6), rng.range(-0.5, 0.5)};
        if (const auto g = try_gradient(set, x)) CHECK(std::abs(norm(*g) - 1.0) < 1e-10);
    }
}

TEST_CASE("signed distance is 1-Lipschitz") {
    const ObstacleSet set = sim2_layout();
    testutil::Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec3 x{rng.range(-2, 3), rng.range(-1, 6), rng.range(-1, 1)};
        const Vec3 y{rng.range(-2, 3), rng.range(-1, 6), rng.range(-1, 1)};
        CHECK(std::abs(signed_distance(set, x) - signed_distance(set, y)) <=
              norm(x - y) + 1e-12);
    }
}

TEST_CASE("eta: clamped exponential response") {
    SensingParams p{7.0, 0.05};
    CHECK(eta(0.0, p) == 0.0);
    CHECK(eta(0.1, p) == doctest::Approx(7.0 * (1.0 - std::exp(-0.05))).epsilon(1e-15));
    CHECK(eta(0.05, p) == eta(10.0, p));  // constant past the clamp
    CHECK_THROWS_AS((void)eta(-0.01, p), UsageError);

    SensingParams off{0.0, 0.05};
    CHECK(eta(0.02, off) == 0.0);

    // Monotone nondecreasing.
    double prev = -1.0;
    for (double d = 0.0; d <= 0.12; d += 0.004) {
        const double v = eta(d, p);
        CHECK(v >= prev);
        prev = v;
    }

    // The clamp matches in value only; the slope jumps to zero.
    CHECK(eta_prime(0.049999, p) == doctest::Approx(7.0 * std::exp(-0.049999)));
    CHECK(eta_prime(0.05, p) == 0.0);
}

TEST_CASE("psi_gradient: range, formula, and disabled clinging") {
    const ObstacleSet set = one_sphere({0, 2, 0}, 0.5);
    SensingParams p{7.0, 0.05};

    // Outside the sensing range.
    CHECK(norm(psi_gradient(set, {0, 0, 0}, p)) == 0.0);

    // Inside: gamma e^{-d} times the radial direction.
    const Vec3 x{0, 1.48, 0};
    const double d = signed_distance(set, x);
    CHECK(d > 0.0);
    CHECK(d < p.delta0);
    const Vec3 expect = Vec3{0, -1, 0} * (7.0 * std::exp(-d));
    CHECK(norm(psi_gradient(set, x, p) - expect) < 1e-12);

    // Finite-difference oracle on eta(signed_distance(.)).
    const double h = 1e-6;
    const auto psi = [&](const Vec3& q) { return eta(signed_distance(set, q), p); };
    const Vec3 fd{(psi({x.x + h, x.y, x.z}) - psi({x.x - h, x.y, x.z})) / (2 * h),
                  (psi({x.x, x.y + h, x.z}) - psi({x.x, x.y - h, x.z})) / (2 * h),
                  (psi({x.x, x.y, x.z + h}) - psi({x.x, x.y, x.z - h})) / (2 * h)};
    CHECK(norm(psi_gradient(set, x, p) - fd) < 1e-6);

    SensingParams off{0.0, 0.05};
    CHECK(norm(psi_gradient(set, x, off)) == 0.0);
}

TEST_CASE("obstacle construction validation") {
    CHECK_THROWS_AS((void)Obstacle::sphere({0, 0, 0}, 0.0), UsageError);
    CHECK_THROWS_AS((void)Obstacle::half_space({0, 0, 0}, {0, 0, 2}), UsageError);
}
