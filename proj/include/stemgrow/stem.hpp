#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "stemgrow/geom.hpp"
#include "stemgrow/obstacle.hpp"

namespace stemgrow {

// Cell-length law: cells born at time s have length density 1-e^{-alpha(t-s)}.
// alpha = +inf is the pure arc-length limit (density 1).
struct ElongationLaw {
    double alpha = std::numeric_limits<double>::infinity();

    bool infinite() const { return std::isinf(alpha); }

    // Length density of the cell born at time sigma, evaluated at time t.
    double weight(double t, double sigma) const {
        if (infinite()) return 1.0;
        return 1.0 - std::exp(-alpha * (t - sigma));
    }
};

struct StemNode {
    double s = 0.0;  // birth parameter
    Vec3 pos;        // P(t,s)
    Vec3 tangent;    // k(t,s), unit
};

// Discretized growing curve. Tangents are the primary state; positions are
// derived by rebuild_positions after every tangent update. Node parameters
// are uniform with spacing ds, s_0 = 0, s_last <= t; pos_0 is the origin.
struct StemState {
    double t = 0.0;
    double t0 = 0.0;
    double ds = 0.0;
    ElongationLaw law;
    std::vector<StemNode> nodes;

    std::size_t size() const { return nodes.size(); }
    const StemNode& tip() const { return nodes.back(); }
    double s_last() const { return nodes.back().s; }
    QuadratureGrid grid() const { return QuadratureGrid::uniform(0.0, ds, nodes.size()); }
};

// Indices of nodes with |Phi(pos)| <= tolerance.
struct ContactSet {
    std::vector<std::size_t> indices;
    double tolerance = 0.0;

    bool contains(std::size_t i) const;
    bool empty() const { return indices.empty(); }
};

// Straight-seed factory used across tests: n nodes from the origin along a
// unit direction.
StemState make_straight_stem(std::size_t n_nodes, double ds, const Vec3& direction,
                             ElongationLaw law = {});

// Positions recomputed as the cumulative trapezoid integral of
// (1-e^{-alpha(t-sigma)}) k(t,sigma); pos_0 = origin.
StemState rebuild_positions(StemState state, const ElongationLaw& law);
StemState rebuild_positions(StemState state);  // uses state.law

// Appends one node at s_last + ds carrying the tip tangent (zero tip
// curvature). Does not advance time; positions rebuilt.
StemState elongate(StemState state);

// Evaluable extension of the stem to [0, T]: the stem itself on [0, s_last]
// (piecewise linear between nodes), and P(t,t) + (s-t) P_s(t,t) beyond.
struct ExtendedCurve {
    std::vector<Vec3> positions;
    double ds = 0.0;
    double s_last = 0.0;
    double horizon = 0.0;
    Vec3 tip_velocity;  // P_s at the tip (law weight times tip tangent)

    Vec3 operator()(double s) const;
};

ExtendedCurve extend_beyond_tip(const StemState& state, double T);

// Max over nodes of -Phi(pos) where Phi < 0; zero if no node is inside.
double penetration_depth(const StemState& state, const ObstacleSet& set);

// Index and depth of the deepest penetrating node; depth 0 and index npos
// when the stem is outside.
struct DeepestNode {
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t index = npos;
    double depth = 0.0;
};
DeepestNode deepest_penetrating_node(const StemState& state, const ObstacleSet& set);

// Nodes with |Phi(pos)| <= tol.
ContactSet contact_set(const StemState& state, const ObstacleSet& set, double tol);

}  // namespace stemgrow
