#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "stemgrow/stem.hpp"

namespace testutil {

// Deterministic LCG so test values are reproducible across platforms.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed ? seed : 1) {}

    double uniform() {  // in [0,1)
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return static_cast<double>(state >> 11) * (1.0 / 9007199254740992.0);
    }
    double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    stemgrow::Vec3 vec(double scale) {
        return {range(-scale, scale), range(-scale, scale), range(-scale, scale)};
    }
};

// Smooth random unit-tangent stem: tangents are normalized perturbations of a
// base direction by low-frequency trig fields.
inline stemgrow::StemState random_smooth_stem(std::size_t n_nodes, double ds, Rng& rng,
                                              double amplitude = 0.3) {
    const double a1 = rng.range(0.5, 3.0), p1 = rng.range(0.0, 6.28);
    const double a2 = rng.range(0.5, 3.0), p2 = rng.range(0.0, 6.28);
    stemgrow::StemState st;
    st.ds = ds;
    st.t0 = ds * static_cast<double>(n_nodes - 1);
    st.t = st.t0;
    st.nodes.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const double s = ds * static_cast<double>(i);
        st.nodes[i].s = s;
        st.nodes[i].tangent = stemgrow::normalized(
            {amplitude * std::sin(a1 * s + p1), amplitude * std::cos(a2 * s + p2), 1.0});
    }
    return stemgrow::rebuild_positions(std::move(st));
}

// Smooth vector field along the grid, tangent-orthogonal, zero at the root.
inline std::vector<stemgrow::Vec3> random_perp_field(const stemgrow::StemState& st, Rng& rng,
                                                     double amplitude = 1.0) {
    const double f1 = rng.range(0.5, 2.5), q1 = rng.range(0.0, 6.28);
    const double f2 = rng.range(0.5, 2.5), q2 = rng.range(0.0, 6.28);
    const stemgrow::Vec3 c1 = rng.vec(amplitude), c2 = rng.vec(amplitude);
    std::vector<stemgrow::Vec3> field(st.size());
    for (std::size_t i = 0; i < st.size(); ++i) {
        const double s = st.nodes[i].s;
        stemgrow::Vec3 w = c1 * std::sin(f1 * s + q1) + c2 * std::cos(f2 * s + q2);
        const stemgrow::Vec3& k = st.nodes[i].tangent;
        w -= k * stemgrow::dot(w, k);
        field[i] = w;
    }
    field[0] = stemgrow::Vec3{};
    return field;
}

inline double rel_error_l2(const std::vector<stemgrow::Vec3>& a,
                           const std::vector<stemgrow::Vec3>& b, std::size_t count) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        num += stemgrow::norm2(a[i] - b[i]);
        den += stemgrow::norm2(b[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace testutil
