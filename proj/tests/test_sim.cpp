#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "stemgrow/config.hpp"
#include "stemgrow/io.hpp"
#include "stemgrow/sim.hpp"

using namespace stemgrow;

namespace {

SimConfig vertical_config(double t_end, double ds = 0.05) {
    SimConfig cfg;
    cfg.t_end = t_end;
    cfg.ds = ds;
    cfg.params.kappa = 1.0;
    cfg.params.beta = 0.5;
    cfg.params.up = {0, 1, 0};
    cfg.weights.beta = 0.5;
    cfg.curve.type = CurveSpec::Type::VerticalSegment;
    cfg.curve.length = 10 * ds;
    cfg.initial_state = build_initial_state(cfg.curve, ds, cfg.params.law, cfg.params.up);
    return cfg;
}

}  // namespace

TEST_CASE("step: no obstacle means growth plus elongation, empty measure") {
    SimConfig cfg = vertical_config(2.0);
    const StepResult sr = step(cfg.initial_state, cfg);
    CHECK(sr.state.size() == cfg.initial_state.size() + 1);
    CHECK(sr.frame.atoms.empty());
    CHECK(sr.frame.push_iterations == 0);
    CHECK(sr.frame.penetration_before_push == 0.0);
    CHECK(!sr.breakdown.has_value());
}

TEST_CASE("run: vertical stem with no obstacles stays a straight segment") {
    SimConfig cfg = vertical_config(3.0);
    const RunOutcome out = run(cfg);
    CHECK(out.status == RunStatus::completed);
    const Frame& last = out.log.frames.back();
    for (std::size_t i = 0; i < last.size(); ++i) {
        CHECK(std::abs(last.positions[i].x) < 1e-15);
        CHECK(std::abs(last.positions[i].z) == 0.0);
        CHECK(norm(last.tangents[i] - Vec3{0, 1, 0}) < 1e-15);
    }
    // Node-count law: initial nodes + one per step.
    const auto steps = static_cast<std::size_t>(std::llround((3.0 - cfg.t0()) / cfg.ds));
    CHECK(last.size() == cfg.initial_state.size() + steps);
}

TEST_CASE("run: t_end equal to t0 logs only the initial frame") {
    SimConfig cfg = vertical_config(0.5);
    REQUIRE(cfg.t0() == doctest::Approx(0.5));
    const RunOutcome out = run(cfg);
    CHECK(out.status == RunStatus::completed);
    CHECK(out.log.frames.size() == 1);
    CHECK(out.frames_written == 1);
}

TEST_CASE("run: deterministic byte-identical logs") {
    SimConfig cfg = make_preset("sim1-left");
    cfg.t_end = 3.0;
    const RunOutcome a = run(cfg);
    const RunOutcome b = run(cfg);
    CHECK(frames_to_csv(a.log) == frames_to_csv(b.log));
    CHECK(summary_to_json(a) == summary_to_json(b));
}

TEST_CASE("run: free growth is independent of push parameters") {
    SimConfig a = vertical_config(2.5);
    SimConfig b = vertical_config(2.5);
    b.push_tol = 1e-3;
    b.push_max_iter = 3;
    CHECK(frames_to_csv(run(a).log) == frames_to_csv(run(b).log));
}

TEST_CASE("run: feasibility of every logged frame") {
    SimConfig cfg = make_preset("sim1-left");
    cfg.t_end = 4.0;
    const RunOutcome out = run(cfg);
    CHECK(out.status == RunStatus::completed);
    for (const Frame& fr : out.log.frames)
        for (double phi : fr.phi) CHECK(phi >= -cfg.push_tol);
}

TEST_CASE("run: frame stride logs every k-th frame plus the final one") {
    SimConfig cfg = vertical_config(1.5);
    cfg.frame_stride = 7;
    const RunOutcome out = run(cfg);
    const auto steps = static_cast<std::size_t>(std::llround((1.5 - cfg.t0()) / cfg.ds));
    // frames: initial, k = 7, 14, and the final step.
    std::size_t expected = 1 + steps / 7 + (steps % 7 ? 1 : 0);
    CHECK(out.log.frames.size() == expected);
    CHECK(out.log.frames.back().t == doctest::Approx(1.5));
}

TEST_CASE("run: invalid initial curves are config errors") {
    SimConfig cfg = vertical_config(2.0);
    cfg.obstacles.obstacles.push_back(Obstacle::sphere({0.0, 0.3, 0}, 0.1));
    CHECK_THROWS_AS((void)run(cfg), ConfigError);  // penetrating seed

    SimConfig bad = vertical_config(2.0);
    bad.initial_state.nodes[2].tangent *= 1.1;
    CHECK_THROWS_AS((void)run(bad), ConfigError);  // non-unit tangent
}

TEST_CASE("run: head-on half-space growth terminates with breakdown") {
    SimConfig cfg = vertical_config(3.0);
    cfg.obstacles.obstacles.push_back(Obstacle::half_space({0, 1.0, 0}, {0, 1, 0}));
    const RunOutcome out = run(cfg);
    CHECK(out.status == RunStatus::breakdown);
    CHECK(out.breakdown.is_breakdown);
    CHECK(out.breakdown.tip_on_boundary);
    CHECK(out.breakdown.tip_perpendicular);
    CHECK(out.breakdown.straight_off_contact);
    CHECK(out.t_final < 3.0);
}

TEST_CASE("run: curved stem meeting a wall perpendicular is not a breakdown") {
    // Quarter-arc seed curving from horizontal to vertical, then growing
    // straight up into a wall: the tip arrives perpendicular but the free
    // arc below is curved, so the push-out resolves it and the run completes.
    SimConfig cfg;
    cfg.t_end = 2.2;
    cfg.ds = 0.05;
    cfg.params.kappa = 0.0;  // freeze the shape; growth is straight
    cfg.params.up = {0, 1, 0};
    cfg.curve.type = CurveSpec::Type::Polyline;
    const double radius = 0.6;
    for (int i = 0; i <= 64; ++i) {
        const double a = M_PI / 2 * i / 64.0;
        cfg.curve.points.push_back(
            {radius * std::sin(a), radius * (1.0 - std::cos(a)), 0.0});
    }
    cfg.initial_state = build_initial_state(cfg.curve, cfg.ds, cfg.params.law, cfg.params.up);
    // Wall shortly above the tip.
    cfg.obstacles.obstacles.push_back(
        Obstacle::half_space({0, cfg.initial_state.tip().pos.y + 0.4, 0}, {0, 1, 0}));

    const RunOutcome out = run(cfg);
    CHECK(out.status == RunStatus::completed);
    CHECK(out.penetration_final <= cfg.push_tol);
    // Contact actually happened.
    CHECK(out.max_step_measure_mass > 0.0);
}

TEST_CASE("integral_residual: trivial cases and stride validation") {
    SimConfig cfg = vertical_config(0.5);
    const RunOutcome zero_run = run(cfg);
    CHECK(integral_residual(zero_run.log, cfg) == 0.0);

    SimConfig cfg2 = vertical_config(2.0);
    const RunOutcome out = run(cfg2);
    CHECK(integral_residual(out.log, cfg2) < 1e-12);

    SimConfig cfg3 = vertical_config(2.0);
    cfg3.frame_stride = 4;
    const RunOutcome strided = run(cfg3);
    CHECK_THROWS_AS((void)integral_residual(strided.log, cfg3), UsageError);
}

TEST_CASE("integral_residual: first-order consistency on a curved free run") {
    // Parabola seed, gravity only, no obstacle: residual shrinks roughly
    // linearly with ds.
    auto make = [](double ds) {
        SimConfig cfg;
        cfg.t_end = 2.5;
        cfg.ds = ds;
        cfg.params.kappa = 1.0;
        cfg.params.beta = 0.5;
        cfg.params.up = {0, 1, 0};
        cfg.weights.beta = 0.5;
        cfg.curve.type = CurveSpec::Type::ParabolaArc;
        cfg.initial_state = build_initial_state(cfg.curve, ds, cfg.params.law, cfg.params.up);
        return cfg;
    };
    const SimConfig coarse = make(0.05);
    const SimConfig fine = make(0.025);
    const double rc = integral_residual(run(coarse).log, coarse);
    const double rf = integral_residual(run(fine).log, fine);
    CHECK(rc > 0.0);
    const double ratio = rc / rf;
    CHECK(ratio > 1.4);
    CHECK(ratio < 4.0);
}
