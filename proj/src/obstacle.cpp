#include "stemgrow/obstacle.hpp"

#include <cmath>
#include <cstddef>

namespace stemgrow {

namespace {
constexpr double kTieBand = 1e-12;
constexpr double kUnitTol = 1e-12;
}  // namespace

Obstacle Obstacle::sphere(const Vec3& center, double radius) {
    if (!(radius > 0.0)) throw UsageError("Obstacle::sphere: radius must be > 0");
    if (!is_finite(center)) throw UsageError("Obstacle::sphere: non-finite center");
    Obstacle o;
    o.shape = Shape::Sphere;
    o.center = center;
    o.radius = radius;
    return o;
}

Obstacle Obstacle::half_space(const Vec3& point, const Vec3& outward_normal) {
    if (!is_finite(point) || !is_finite(outward_normal))
        throw UsageError("Obstacle::half_space: non-finite parameters");
    if (std::abs(norm(outward_normal) - 1.0) > kUnitTol)
        throw UsageError("Obstacle::half_space: outward normal must be unit length");
    Obstacle o;
    o.shape = Shape::HalfSpace;
    o.point = point;
    o.normal = outward_normal;
    return o;
}

double Obstacle::signed_distance(const Vec3& x) const {
    switch (shape) {
        case Shape::Sphere:
            return norm(x - center) - radius;
        case Shape::HalfSpace:
            // Omega = {x : <x - point, normal> < 0}; positive on the outside.
            return dot(x - point, normal);
    }
    return kNoObstacleDistance;
}

double signed_distance(const ObstacleSet& set, const Vec3& x) {
    if (!is_finite(x)) throw UsageError("signed_distance: non-finite point");
    double best = kNoObstacleDistance;
    for (const Obstacle& o : set.obstacles) best = std::min(best, o.signed_distance(x));
    return best;
}

std::optional<Vec3> try_gradient(const ObstacleSet& set, const Vec3& x) {
    if (!is_finite(x)) throw UsageError("gradient: non-finite point");
    if (set.empty()) return std::nullopt;

    // Nearest member, ties broken by lowest index; a tie within 1e-12 means
    // the gradient genuinely fails to exist.
    std::size_t nearest = 0;
    double best = set.obstacles[0].signed_distance(x);
    double second = kNoObstacleDistance;
    for (std::size_t i = 1; i < set.obstacles.size(); ++i) {
        const double d = set.obstacles[i].signed_distance(x);
        if (d < best) {
            second = best;
            best = d;
            nearest = i;
        } else {
            second = std::min(second, d);
        }
    }
    if (second - best <= kTieBand) return std::nullopt;

    const Obstacle& o = set.obstacles[nearest];
    switch (o.shape) {
        case Obstacle::Shape::Sphere: {
            const Vec3 r = x - o.center;
            const double n = norm(r);
            if (n <= kTieBand) return std::nullopt;  // sphere center
            return r / n;
        }
        case Obstacle::Shape::HalfSpace:
            return o.normal;
    }
    return std::nullopt;
}

Vec3 gradient(const ObstacleSet& set, const Vec3& x) {
    const auto g = try_gradient(set, x);
    if (!g) throw DegenerateGradientError("gradient: signed-distance gradient undefined here");
    return *g;
}

double eta(double d, const SensingParams& p) {
    if (d < 0.0) throw UsageError("eta: distance must be nonnegative");
    if (p.gamma == 0.0) return 0.0;
    const double dd = std::min(d, p.delta0);
    return p.gamma * (1.0 - std::exp(-dd));
}

double eta_prime(double d, const SensingParams& p) {
    if (d < 0.0) throw UsageError("eta_prime: distance must be nonnegative");
    if (d >= p.delta0) return 0.0;
    return p.gamma * std::exp(-d);
}

Vec3 psi_gradient(const ObstacleSet& set, const Vec3& x, const SensingParams& p) {
    if (p.gamma == 0.0 || set.empty()) return {};
    const double d = std::max(signed_distance(set, x), 0.0);
    if (d >= p.delta0) return {};
    return eta_prime(d, p) * gradient(set, x);
}

}  // namespace stemgrow
