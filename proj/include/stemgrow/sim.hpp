#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stemgrow/growth.hpp"
#include "stemgrow/pushout.hpp"

namespace stemgrow {

// Seed curve description; the resampled StemState is built from it.
struct CurveSpec {
    enum class Type { ParabolaArc, VerticalSegment, Polyline };
    Type type = Type::VerticalSegment;
    double length = 0.0;       // VerticalSegment
    std::vector<Vec3> points;  // Polyline, first point must be the origin
};

struct SimConfig {
    double t_end = 0.0;
    double ds = 0.05;  // dt = ds
    GrowthParams params;
    EnergyWeights weights;
    ObstacleSet obstacles;
    CurveSpec curve;
    StemState initial_state;  // resampled seed, t = t0 = s_last
    double push_tol = 1e-9;
    int push_max_iter = 40;
    int frame_stride = 1;

    // Breakdown detection bands.
    double breakdown_tol_dist = 1e-6;
    double breakdown_tol_angle = 1e-2;
    double breakdown_tol_curv() const { return 1e-3 / ds; }

    double t0() const { return initial_state.t0; }
};

struct Frame {
    double t = 0.0;
    std::vector<Vec3> positions;
    std::vector<Vec3> tangents;
    std::vector<double> phi;  // signed distance per node
    std::vector<std::size_t> contact;
    std::vector<MeasureAtom> atoms;
    double penetration_before_push = 0.0;
    int push_iterations = 0;
    double push_field_norm = 0.0;  // L2 of the step's accumulated field
    double measure_mass = 0.0;

    std::size_t size() const { return positions.size(); }
};

struct FrameLog {
    double ds = 0.0;
    std::vector<Frame> frames;

    bool empty() const { return frames.empty(); }
};

enum class RunStatus { completed, breakdown, push_failure };

const char* to_string(RunStatus s);

struct RunOutcome {
    RunStatus status = RunStatus::completed;
    double t_final = 0.0;
    double penetration_final = 0.0;
    double max_step_omega_norm = 0.0;
    double max_step_measure_mass = 0.0;
    std::size_t frames_written = 0;
    BreakdownReport breakdown;
    double push_residual = 0.0;
    FrameLog log;
};

struct StepResult {
    StemState state;
    Frame frame;
    std::optional<BreakdownReport> breakdown;
};

// One splitting step: growth rotation, tip elongation, push-out, breakdown
// check. Throws PushFailureError when the push does not converge and the
// configuration is not a breakdown one.
StepResult step(const StemState& state, const SimConfig& cfg);

// Full driver from t0 to t_end; logs every frame_stride-th frame plus the
// final one. Deterministic: identical configs yield identical logs.
RunOutcome run(const SimConfig& cfg);

// A-posteriori check of the integral identity satisfied by solutions:
// reconstructs positions from the logged kernel and reaction terms
// (time-trapezoid outer integral) and returns the max node-wise mismatch.
// Requires a stride-1 log.
double integral_residual(const FrameLog& log, const SimConfig& cfg);

}  // namespace stemgrow
