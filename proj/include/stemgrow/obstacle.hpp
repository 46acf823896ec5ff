#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "stemgrow/geom.hpp"

namespace stemgrow {

// Obstacle shapes are spheres (2D circles are spheres evaluated in the z=0
// plane) and half-spaces; the latter exist mainly for tests with analytic
// multipliers.
struct Obstacle {
    enum class Shape { Sphere, HalfSpace };

    Shape shape = Shape::Sphere;
    Vec3 center;          // sphere center
    double radius = 0.0;  // sphere radius, > 0
    Vec3 point;           // point on the half-space boundary plane
    Vec3 normal;          // unit outward normal of the half-space

    static Obstacle sphere(const Vec3& center, double radius);
    static Obstacle half_space(const Vec3& point, const Vec3& outward_normal);

    double signed_distance(const Vec3& x) const;
};

// Union of obstacles; the signed distance of the union is the pointwise
// minimum of member signed distances.
struct ObstacleSet {
    std::vector<Obstacle> obstacles;

    bool empty() const { return obstacles.empty(); }
};

// Sensing field parameters: eta(d) = gamma*(1 - e^{-d}) clamped at delta0.
struct SensingParams {
    double gamma = 0.0;    // response strength, >= 0
    double delta0 = 0.05;  // sensing range, > 0
};

inline constexpr double kNoObstacleDistance = std::numeric_limits<double>::infinity();

// Signed distance of the union: positive outside, negative inside, zero on
// the boundary. Empty set returns +inf.
double signed_distance(const ObstacleSet& set, const Vec3& x);

// Unit gradient of the signed distance (the outward normal on the boundary).
// Returns nullopt at a sphere center or on the equidistance locus of two
// members (1e-12 tie band).
std::optional<Vec3> try_gradient(const ObstacleSet& set, const Vec3& x);

// Throwing variant of try_gradient.
Vec3 gradient(const ObstacleSet& set, const Vec3& x);

// Clamped sensing response. Monotone nondecreasing, eta(0) = 0.
// Note the clamp matches only in value, not slope: eta' jumps from
// gamma*e^{-delta0} to 0 at d = delta0.
double eta(double d, const SensingParams& p);

// d/dd of eta: gamma*e^{-d} for d < delta0, 0 beyond.
double eta_prime(double d, const SensingParams& p);

// grad psi(x) = eta'(d(x)) * grad Phi(x); zero beyond the sensing range.
// Small negative distances (within push-out tolerance slack) are clamped to 0.
Vec3 psi_gradient(const ObstacleSet& set, const Vec3& x, const SensingParams& p);

}  // namespace stemgrow
