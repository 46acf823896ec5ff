#include "stemgrow/cli.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stemgrow/config.hpp"
#include "stemgrow/io.hpp"

namespace stemgrow {

namespace {

bool log_is_planar(const FrameLog& log) {
    for (const Frame& fr : log.frames)
        for (const Vec3& p : fr.positions)
            if (p.z != 0.0) return false;
    return true;
}

int execute_run(const SimConfig& cfg, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const RunOutcome outcome = run(cfg);
    write_frames(outcome.log, out_dir + "/frames.csv");
    write_summary(outcome, out_dir + "/summary.json");
    if (log_is_planar(outcome.log)) render_svg(outcome.log, cfg, out_dir + "/figure.svg");

    std::cout << "status: " << to_string(outcome.status) << "  t_final: " << outcome.t_final
              << "  frames: " << outcome.frames_written << "\n";
    switch (outcome.status) {
        case RunStatus::completed:
            return 0;
        case RunStatus::breakdown:
            return 2;
        case RunStatus::push_failure:
            return 3;
    }
    return 0;
}

bool check(const char* name, bool ok) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
    return ok;
}

int execute_verify(SimConfig cfg) {
    // Short run: at most 20 steps past t0.
    cfg.t_end = std::min(cfg.t_end, cfg.initial_state.t0 + 20.0 * cfg.ds);
    cfg.frame_stride = 1;

    const RunOutcome a = run(cfg);
    const RunOutcome b = run(cfg);

    bool ok = true;

    bool orth = true;
    for (int i = 0; i < 100 && orth; ++i) {
        const Vec3 w{std::sin(0.7 * i) * 2.0, std::cos(1.3 * i), std::sin(2.1 * i + 0.5)};
        const Rot3 r = rodrigues(w);
        for (int row = 0; row < 3 && orth; ++row) {
            for (int col = 0; col < 3; ++col) {
                double acc = 0.0;
                for (int m = 0; m < 3; ++m) acc += r.m[m][row] * r.m[m][col];
                if (std::abs(acc - (row == col ? 1.0 : 0.0)) > 1e-12) orth = false;
            }
        }
    }
    ok &= check("rotation orthogonality (1e-12)", orth);

    double drift = 0.0;
    for (const Frame& fr : a.log.frames)
        for (const Vec3& k : fr.tangents) drift = std::max(drift, std::abs(norm(k) - 1.0));
    ok &= check("unit tangents (1e-8)", drift <= 1e-8);

    bool feasible = true;
    for (const Frame& fr : a.log.frames)
        for (double phi : fr.phi)
            if (phi < -cfg.push_tol) feasible = false;
    ok &= check("frame feasibility (penetration <= push_tol)", feasible);

    bool planar_seed = true;
    for (const StemNode& n : cfg.initial_state.nodes)
        if (n.tangent.z != 0.0) planar_seed = false;
    if (planar_seed) ok &= check("planarity closure (exact zero z)", log_is_planar(a.log));

    ok &= check("determinism (byte-identical reruns)",
                frames_to_csv(a.log) == frames_to_csv(b.log));

    bool counts = true;
    for (std::size_t k = 0; k < a.log.frames.size(); ++k) {
        const std::size_t expected =
            cfg.initial_state.size() +
            static_cast<std::size_t>(std::llround((a.log.frames[k].t - cfg.t0()) / cfg.ds));
        if (a.log.frames[k].size() != expected) counts = false;
    }
    ok &= check("node-count law (one node per step)", counts);

    return ok ? 0 : 1;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"stemgrow: growth of tree stems and vines under gravity response,\n"
                 "obstacle attraction, and hard obstacle constraints"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", preset_name;

    CLI::App* run_cmd = app.add_subcommand("run", "run a simulation from a config file");
    run_cmd->add_option("--config", config_path, "config file (JSON)")->required();
    run_cmd->add_option("--out", out_dir, "output directory");

    CLI::App* preset_cmd = app.add_subcommand("preset", "run a built-in scenario");
    preset_cmd
        ->add_option("--name", preset_name,
                     "one of: sim1-left sim1-right sim2-gamma7 sim2-gamma4 sim2-gamma3")
        ->required();
    preset_cmd->add_option("--out", out_dir, "output directory");

    CLI::App* verify_cmd = app.add_subcommand("verify", "run the invariant suite on a short run");
    verify_cmd->add_option("--config", config_path, "config file (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run_cmd->parsed()) return execute_run(parse_config(config_path), out_dir);
        if (preset_cmd->parsed()) return execute_run(make_preset(preset_name), out_dir);
        if (verify_cmd->parsed()) return execute_verify(parse_config(config_path));
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace stemgrow
