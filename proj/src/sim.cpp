#include "stemgrow/sim.hpp"

#include <algorithm>
#include <cmath>

namespace stemgrow {

namespace {

Frame make_frame(const StemState& state, const SimConfig& cfg) {
    Frame f;
    f.t = state.t;
    f.positions.reserve(state.size());
    f.tangents.reserve(state.size());
    f.phi.reserve(state.size());
    for (const StemNode& n : state.nodes) {
        f.positions.push_back(n.pos);
        f.tangents.push_back(n.tangent);
        f.phi.push_back(cfg.obstacles.empty() ? kNoObstacleDistance
                                              : signed_distance(cfg.obstacles, n.pos));
    }
    if (!cfg.obstacles.empty())
        f.contact = contact_set(state, cfg.obstacles, cfg.push_tol).indices;
    return f;
}

void validate_initial_state(const SimConfig& cfg) {
    const StemState& st = cfg.initial_state;
    if (st.nodes.empty()) throw ConfigError("initial curve is empty", "initial_curve");
    if (norm(st.nodes[0].pos) > 1e-12)
        throw ConfigError("initial curve must start at the origin", "initial_curve");
    for (const StemNode& n : st.nodes) {
        if (std::abs(norm(n.tangent) - 1.0) > 1e-8)
            throw ConfigError("initial curve tangents must be unit length", "initial_curve");
    }
    if (penetration_depth(st, cfg.obstacles) > 0.0)
        throw ConfigError("initial curve penetrates an obstacle", "initial_curve");
    if (!cfg.obstacles.empty() &&
        std::abs(signed_distance(cfg.obstacles, st.nodes[0].pos)) <= 1e-12)
        throw ConfigError("initial curve starts on an obstacle boundary", "initial_curve");
    if (cfg.t_end < st.t0 - 1e-12) throw ConfigError("t_end precedes t0", "run.t_end");
    if (!(cfg.ds > 0.0)) throw ConfigError("ds must be > 0", "run.ds");
    if (!(cfg.push_tol > 0.0)) throw ConfigError("push_tol must be > 0", "run.push_tol");
    if (cfg.push_max_iter < 1) throw ConfigError("push_max_iter must be >= 1", "run.push_max_iter");
    if (cfg.frame_stride < 1) throw ConfigError("frame_stride must be >= 1", "run.frame_stride");
}

}  // namespace

const char* to_string(RunStatus s) {
    switch (s) {
        case RunStatus::completed:
            return "completed";
        case RunStatus::breakdown:
            return "breakdown";
        case RunStatus::push_failure:
            return "push_failure";
    }
    return "unknown";
}

StepResult step(const StemState& state, const SimConfig& cfg) {
    StemState grown = apply_growth_step(state, cfg.params, cfg.obstacles, cfg.ds);
    grown = elongate(std::move(grown));

    const double pre_depth = penetration_depth(grown, cfg.obstacles);

    PushOutResult pushed;
    try {
        pushed = cfg.weights.isotropic()
                     ? push_out(grown, cfg.obstacles, cfg.weights.beta, cfg.push_tol,
                                cfg.push_max_iter)
                     : weighted_push_out(grown, cfg.obstacles, cfg.weights, cfg.push_tol,
                                         cfg.push_max_iter);
    } catch (const BreakdownProximityError&) {
        // The discrete trajectory overshoots an exact breakdown contact by up
        // to one step's growth; widen the tip-distance band accordingly.
        const double band = std::max(cfg.breakdown_tol_dist, pre_depth * (1.0 + 1e-9));
        const BreakdownReport report = check_breakdown(grown, cfg.obstacles,
                                                       cfg.breakdown_tol_angle,
                                                       cfg.breakdown_tol_curv(), band);
        if (!report.is_breakdown)
            throw PushFailureError("push-out hit a breakdown-proximal configuration", pre_depth);
        StepResult out;
        out.state = std::move(grown);
        out.frame = make_frame(out.state, cfg);
        out.frame.penetration_before_push = pre_depth;
        out.breakdown = report;
        return out;
    }

    StepResult out;
    out.state = std::move(pushed.state);
    out.frame = make_frame(out.state, cfg);
    out.frame.penetration_before_push = pre_depth;
    out.frame.push_iterations = pushed.iterations;
    out.frame.atoms = pushed.measure.atoms;
    out.frame.push_field_norm = field_l2_norm(pushed.field, cfg.ds);
    out.frame.measure_mass = pushed.measure.total_mass();

    const BreakdownReport report =
        check_breakdown(out.state, cfg.obstacles, cfg.breakdown_tol_angle,
                        cfg.breakdown_tol_curv(), cfg.breakdown_tol_dist);
    if (report.is_breakdown) out.breakdown = report;
    return out;
}

RunOutcome run(const SimConfig& cfg) {
    validate_initial_state(cfg);

    RunOutcome outcome;
    StemState state = cfg.initial_state;
    const auto n_steps =
        static_cast<long long>(std::llround(std::max(0.0, cfg.t_end - state.t0) / cfg.ds));

    outcome.log.ds = cfg.ds;
    outcome.log.frames.push_back(make_frame(state, cfg));
    outcome.t_final = state.t;

    for (long long k = 1; k <= n_steps; ++k) {
        StepResult sr;
        try {
            sr = step(state, cfg);
        } catch (const PushFailureError& e) {
            outcome.status = RunStatus::push_failure;
            outcome.push_residual = e.residual_depth;
            outcome.t_final = state.t + cfg.ds;
            break;
        }
        state = std::move(sr.state);
        state.t = cfg.initial_state.t0 + cfg.ds * static_cast<double>(k);  // kill drift

        outcome.max_step_omega_norm =
            std::max(outcome.max_step_omega_norm, sr.frame.push_field_norm);
        outcome.max_step_measure_mass =
            std::max(outcome.max_step_measure_mass, sr.frame.measure_mass);

        const bool last = (k == n_steps) || sr.breakdown.has_value();
        if (k % cfg.frame_stride == 0 || last) {
            sr.frame.t = state.t;
            outcome.log.frames.push_back(std::move(sr.frame));
        }
        outcome.t_final = state.t;

        if (sr.breakdown) {
            outcome.status = RunStatus::breakdown;
            outcome.breakdown = *sr.breakdown;
            break;
        }
    }

    const Frame& final_frame = outcome.log.frames.back();
    double pen = 0.0;
    for (double phi : final_frame.phi)
        if (phi < 0.0) pen = std::max(pen, -phi);
    outcome.penetration_final = pen;
    outcome.frames_written = outcome.log.frames.size();
    return outcome;
}

double integral_residual(const FrameLog& log, const SimConfig& cfg) {
    if (log.empty()) throw UsageError("integral_residual: empty log");
    const auto& frames = log.frames;
    for (std::size_t k = 1; k < frames.size(); ++k) {
        if (std::abs(frames[k].t - frames[k - 1].t - cfg.ds) > 1e-9)
            throw UsageError("integral_residual: requires a stride-1 log");
    }

    const double ds = cfg.ds;
    const double beta = cfg.params.beta;
    const std::size_t n_total = frames.back().size();

    // Per-frame kernel prefixes: I_k(s) = C(cut) x Pext(s) - D(cut) with
    // C = cumtrap Psi, D = cumtrap Psi x P, cut = min(s, t_k).
    struct FrameData {
        std::vector<Vec3> C, D;
        std::vector<Vec3> reaction_E, reaction_F;  // flattened per atom
        std::vector<MeasureAtom> atoms;
        const Frame* frame = nullptr;
        Vec3 tip_velocity;
    };

    std::vector<FrameData> data(frames.size());
    for (std::size_t k = 0; k < frames.size(); ++k) {
        const Frame& fr = frames[k];
        const std::size_t n = fr.size();
        FrameData& fd = data[k];
        fd.frame = &fr;
        std::vector<Vec3> psi(n), psixp(n);
        for (std::size_t m = 0; m < n; ++m) {
            const double s_m = ds * static_cast<double>(m);
            psi[m] = psi_kernel(fr.t, s_m, fr.positions[m], fr.tangents[m], cfg.params,
                                cfg.obstacles);
            psixp[m] = cross(psi[m], fr.positions[m]);
        }
        fd.C = cumulative_trapezoid(psi, ds);
        fd.D = cumulative_trapezoid(psixp, ds);
        fd.tip_velocity =
            fr.tangents.back() * cfg.params.law.weight(fr.t, ds * static_cast<double>(n - 1));

        fd.atoms = fr.atoms;
        fd.reaction_E.resize(fd.atoms.size() * n);
        fd.reaction_F.resize(fd.atoms.size() * n);
        for (std::size_t a = 0; a < fd.atoms.size(); ++a) {
            const Vec3& pj = fr.positions[fd.atoms[a].node];
            const auto gj = try_gradient(cfg.obstacles, pj);
            std::vector<Vec3> q(n), qxp(n);
            for (std::size_t m = 0; m < n; ++m) {
                const double s_m = ds * static_cast<double>(m);
                q[m] = gj ? cross(*gj, pj - fr.positions[m]) * std::exp(-beta * (fr.t - s_m))
                          : Vec3{};
                qxp[m] = cross(q[m], fr.positions[m]);
            }
            const std::vector<Vec3> E = cumulative_trapezoid(q, ds);
            const std::vector<Vec3> F = cumulative_trapezoid(qxp, ds);
            std::copy(E.begin(), E.end(), fd.reaction_E.begin() + static_cast<long>(a * n));
            std::copy(F.begin(), F.end(), fd.reaction_F.begin() + static_cast<long>(a * n));
        }
    }

    const auto eval_pos = [&](const Frame& fr, const FrameData& fd, std::size_t i) {
        if (i < fr.size()) return fr.positions[i];
        const double s = ds * static_cast<double>(i);
        const double s_tip = ds * static_cast<double>(fr.size() - 1);
        return fr.positions.back() + fd.tip_velocity * (s - s_tip);
    };
    const auto kernel_term = [&](std::size_t k, std::size_t i) {
        const FrameData& fd = data[k];
        const std::size_t cut = std::min(i, fd.frame->size() - 1);
        return cross(fd.C[cut], eval_pos(*fd.frame, fd, i)) - fd.D[cut];
    };

    std::vector<Vec3> accumulated(n_total, Vec3{});
    double worst = 0.0;
    for (std::size_t k = 0; k < frames.size(); ++k) {
        if (k > 0) {
            const FrameData& fd = data[k];
            for (std::size_t i = 0; i < n_total; ++i) {
                accumulated[i] += (kernel_term(k - 1, i) + kernel_term(k, i)) * (0.5 * ds);
                for (std::size_t a = 0; a < fd.atoms.size(); ++a) {
                    const std::size_t cut = std::min(i, fd.atoms[a].node);
                    const Vec3& E = fd.reaction_E[a * fd.frame->size() + cut];
                    const Vec3& F = fd.reaction_F[a * fd.frame->size() + cut];
                    accumulated[i] -=
                        fd.atoms[a].weight * (cross(E, eval_pos(*fd.frame, fd, i)) - F);
                }
            }
        }
        const Frame& fr = frames[k];
        for (std::size_t i = 0; i < fr.size(); ++i) {
            const Vec3 reconstructed = eval_pos(frames[0], data[0], i) + accumulated[i];
            worst = std::max(worst, norm(fr.positions[i] - reconstructed));
        }
    }
    return worst;
}

}  // namespace stemgrow
