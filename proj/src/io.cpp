#include "stemgrow/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace stemgrow {

namespace {

// 17 significant digits round-trip binary doubles exactly.
std::string num17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string num2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string frames_to_csv(const FrameLog& log) {
    if (log.empty()) throw UsageError("write_frames: empty log");
    std::string out = "frame_index,t,s,x,y,z,kx,ky,kz,phi,in_contact\n";
    for (std::size_t k = 0; k < log.frames.size(); ++k) {
        const Frame& fr = log.frames[k];
        std::vector<bool> in_contact(fr.size(), false);
        for (std::size_t idx : fr.contact) in_contact[idx] = true;
        for (std::size_t i = 0; i < fr.size(); ++i) {
            const double s = static_cast<double>(i) * log.ds;
            out += std::to_string(k);
            out += ',';
            out += num17(fr.t);
            out += ',';
            out += num17(s);
            out += ',';
            out += num17(fr.positions[i].x);
            out += ',';
            out += num17(fr.positions[i].y);
            out += ',';
            out += num17(fr.positions[i].z);
            out += ',';
            out += num17(fr.tangents[i].x);
            out += ',';
            out += num17(fr.tangents[i].y);
            out += ',';
            out += num17(fr.tangents[i].z);
            out += ',';
            out += num17(fr.phi[i]);
            out += ',';
            out += in_contact[i] ? '1' : '0';
            out += '\n';
        }
    }
    return out;
}

void write_frames(const FrameLog& log, const std::string& path) {
    write_file_atomic(path, frames_to_csv(log));
}

std::string summary_to_json(const RunOutcome& outcome) {
    nlohmann::json j;
    j["status"] = to_string(outcome.status);
    j["t_final"] = outcome.t_final;
    j["penetration_final"] = outcome.penetration_final;
    j["max_step_omega_norm"] = outcome.max_step_omega_norm;
    j["max_step_measure_mass"] = outcome.max_step_measure_mass;
    j["frames_written"] = outcome.frames_written;
    return j.dump(2) + "\n";
}

void write_summary(const RunOutcome& outcome, const std::string& path) {
    write_file_atomic(path, summary_to_json(outcome));
}

std::string render_svg_string(const FrameLog& log, const SimConfig& cfg,
                              const SvgOptions& options) {
    if (log.empty()) throw UsageError("render_svg: empty log");
    for (const Frame& fr : log.frames) {
        for (const Vec3& p : fr.positions)
            if (p.z != 0.0) throw UsageError("render_svg: non-planar log (z != 0)");
    }
    if (options.stride < 1) throw UsageError("render_svg: stride must be >= 1");

    std::vector<std::size_t> drawn;
    for (std::size_t k = 0; k < log.frames.size(); k += options.stride) drawn.push_back(k);
    if (drawn.empty() || drawn.back() != log.frames.size() - 1)
        drawn.push_back(log.frames.size() - 1);

    double minx = 0.0, maxx = 0.0, miny = 0.0, maxy = 0.0;
    bool first = true;
    const auto include = [&](double x, double y) {
        if (first) {
            minx = maxx = x;
            miny = maxy = y;
            first = false;
            return;
        }
        minx = std::min(minx, x);
        maxx = std::max(maxx, x);
        miny = std::min(miny, y);
        maxy = std::max(maxy, y);
    };
    for (std::size_t k : drawn)
        for (const Vec3& p : log.frames[k].positions) include(p.x, p.y);
    for (const Obstacle& o : cfg.obstacles.obstacles) {
        if (o.shape != Obstacle::Shape::Sphere) continue;
        include(o.center.x - o.radius, o.center.y - o.radius);
        include(o.center.x + o.radius, o.center.y + o.radius);
    }
    if (first) include(0.0, 0.0);
    if (maxx - minx < 1e-9) maxx = minx + 1.0;
    if (maxy - miny < 1e-9) maxy = miny + 1.0;

    const double padx = options.width * options.padding;
    const double pady = options.height * options.padding;
    const double scale = std::min((options.width - 2.0 * padx) / (maxx - minx),
                                  (options.height - 2.0 * pady) / (maxy - miny));
    const auto sx = [&](double x) { return padx + (x - minx) * scale; };
    const auto sy = [&](double y) { return options.height - pady - (y - miny) * scale; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num2(options.width) +
           "\" height=\"" + num2(options.height) + "\" viewBox=\"0 0 " + num2(options.width) +
           " " + num2(options.height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (const Obstacle& o : cfg.obstacles.obstacles) {
        if (o.shape != Obstacle::Shape::Sphere) continue;
        svg += "<circle cx=\"" + num2(sx(o.center.x)) + "\" cy=\"" + num2(sy(o.center.y)) +
               "\" r=\"" + num2(o.radius * scale) +
               "\" fill=\"#f2f2f2\" stroke=\"#555555\" stroke-width=\"1.5\"/>\n";
    }

    const auto polyline = [&](const Frame& fr, const char* stroke, const char* width) {
        std::string pts;
        for (const Vec3& p : fr.positions) {
            pts += num2(sx(p.x));
            pts += ',';
            pts += num2(sy(p.y));
            pts += ' ';
        }
        if (!pts.empty()) pts.pop_back();
        return std::string("<polyline points=\"") + pts + "\" fill=\"none\" stroke=\"" + stroke +
               "\" stroke-width=\"" + width + "\"/>\n";
    };
    for (std::size_t k : drawn) {
        if (k == log.frames.size() - 1) continue;
        svg += polyline(log.frames[k], "#a8c8a8", "1");
    }
    svg += polyline(log.frames.back(), "#15641c", "2.5");
    svg += "</svg>\n";
    return svg;
}

void render_svg(const FrameLog& log, const SimConfig& cfg, const std::string& path,
                const SvgOptions& options) {
    write_file_atomic(path, render_svg_string(log, cfg, options));
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out.is_open()) throw Error("cannot open for writing: " + tmp);
        out << content;
        if (!out.good()) throw Error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("rename failed: " + tmp + " -> " + path);
}

}  // namespace stemgrow
