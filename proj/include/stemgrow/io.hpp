#pragma once

#include <string>

#include "stemgrow/sim.hpp"

namespace stemgrow {

// frames.csv: header "frame_index,t,s,x,y,z,kx,ky,kz,phi,in_contact", rows
// sorted by (frame_index, s), numbers printed with 17 significant digits
// (lossless for binary doubles).
std::string frames_to_csv(const FrameLog& log);
void write_frames(const FrameLog& log, const std::string& path);

// summary.json with keys {status, t_final, penetration_final,
// max_step_omega_norm, max_step_measure_mass, frames_written}.
std::string summary_to_json(const RunOutcome& outcome);
void write_summary(const RunOutcome& outcome, const std::string& path);

struct SvgOptions {
    int stride = 10;  // every stride-th logged frame is drawn as a snapshot
    double width = 640.0;
    double height = 640.0;
    double padding = 0.1;  // viewport padding fraction
};

// Static figure for planar (z = 0) runs: obstacle circles as outlined discs,
// stem snapshots as thin polylines, final stem emphasized. Deterministic
// bytes for fixed inputs.
std::string render_svg_string(const FrameLog& log, const SimConfig& cfg,
                              const SvgOptions& options = {});
void render_svg(const FrameLog& log, const SimConfig& cfg, const std::string& path,
                const SvgOptions& options = {});

// Temp-file + rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace stemgrow
