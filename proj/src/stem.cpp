#include "stemgrow/stem.hpp"

#include <algorithm>
#include <cmath>

namespace stemgrow {

bool ContactSet::contains(std::size_t i) const {
    return std::find(indices.begin(), indices.end(), i) != indices.end();
}

StemState make_straight_stem(std::size_t n_nodes, double ds, const Vec3& direction,
                             ElongationLaw law) {
    if (n_nodes == 0) throw UsageError("make_straight_stem: need at least one node");
    const Vec3 k = normalized(direction);
    StemState st;
    st.ds = ds;
    st.law = law;
    st.t0 = ds * static_cast<double>(n_nodes - 1);
    st.t = st.t0;
    st.nodes.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        st.nodes[i].s = ds * static_cast<double>(i);
        st.nodes[i].tangent = k;
    }
    return rebuild_positions(std::move(st));
}

StemState rebuild_positions(StemState state, const ElongationLaw& law) {
    state.law = law;
    if (state.nodes.empty()) return state;
    state.nodes[0].pos = Vec3{};
    double w_prev = law.weight(state.t, state.nodes[0].s);
    for (std::size_t i = 1; i < state.nodes.size(); ++i) {
        const double w = law.weight(state.t, state.nodes[i].s);
        const Vec3 seg = (state.nodes[i - 1].tangent * w_prev + state.nodes[i].tangent * w) *
                         (0.5 * state.ds);
        state.nodes[i].pos = state.nodes[i - 1].pos + seg;
        w_prev = w;
    }
    return state;
}

StemState rebuild_positions(StemState state) {
    const ElongationLaw law = state.law;
    return rebuild_positions(std::move(state), law);
}

StemState elongate(StemState state) {
    if (state.nodes.empty()) throw UsageError("elongate: empty stem");
    StemNode node;
    node.s = state.s_last() + state.ds;
    node.tangent = state.tip().tangent;
    state.nodes.push_back(node);
    return rebuild_positions(std::move(state));
}

Vec3 ExtendedCurve::operator()(double s) const {
    if (s <= 0.0) return positions.front();
    if (s >= s_last) return positions.back() + tip_velocity * (s - s_last);
    const double u = s / ds;
    const auto i = static_cast<std::size_t>(u);
    const double f = u - static_cast<double>(i);
    if (i + 1 >= positions.size()) return positions.back();
    return positions[i] * (1.0 - f) + positions[i + 1] * f;
}

ExtendedCurve extend_beyond_tip(const StemState& state, double T) {
    if (state.nodes.empty()) throw UsageError("extend_beyond_tip: empty stem");
    if (T < state.t) throw UsageError("extend_beyond_tip: horizon before current time");
    ExtendedCurve c;
    c.positions.reserve(state.size());
    for (const StemNode& n : state.nodes) c.positions.push_back(n.pos);
    c.ds = state.ds;
    c.s_last = state.s_last();
    c.horizon = T;
    c.tip_velocity = state.tip().tangent * state.law.weight(state.t, state.s_last());
    return c;
}

double penetration_depth(const StemState& state, const ObstacleSet& set) {
    return deepest_penetrating_node(state, set).depth;
}

DeepestNode deepest_penetrating_node(const StemState& state, const ObstacleSet& set) {
    DeepestNode out;
    if (set.empty()) return out;
    for (std::size_t i = 0; i < state.nodes.size(); ++i) {
        const double phi = signed_distance(set, state.nodes[i].pos);
        if (phi < 0.0 && -phi > out.depth) {
            out.depth = -phi;
            out.index = i;
        }
    }
    return out;
}

ContactSet contact_set(const StemState& state, const ObstacleSet& set, double tol) {
    if (!(tol > 0.0)) throw UsageError("contact_set: tolerance must be > 0");
    ContactSet cs;
    cs.tolerance = tol;
    if (set.empty()) return cs;
    for (std::size_t i = 0; i < state.nodes.size(); ++i) {
        if (std::abs(signed_distance(set, state.nodes[i].pos)) <= tol) cs.indices.push_back(i);
    }
    return cs;
}

}  // namespace stemgrow
