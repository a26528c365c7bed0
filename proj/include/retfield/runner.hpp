#pragma once

#include "retfield/config.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace retfield {

struct RunOptions {
    unsigned threads = 1;                 ///< 0 = one per hardware thread
    std::optional<std::string> output_dir;  ///< overrides config.output.directory
};

struct RunReport {
    /// Deterministic summary (no timings); written as report.json.
    nlohmann::ordered_json report;
    /// Wall-clock seconds per task; written as timings.json.
    nlohmann::ordered_json timings;
    bool any_error = false;
    std::filesystem::path output_dir;
};

/// Runs the tasks in order and writes the artifacts. A task that throws is
/// recorded with status "error" and the remaining tasks still run.
RunReport run_tasks(const RunConfig& config, const RunOptions& options = {});

/// Exact CSV schema: r,t,Ex,Ey,Ez,term{1,2,3}{x,y,z},representation.
/// Rows sorted by (r, t); %.17g floats.
void emit_waveform_csv(const WaveformSeries& series, const std::filesystem::path& path);
std::string waveform_csv(const WaveformSeries& series);

/// r_mid,t_star_lo,t_star_hi,v per segment.
std::string velocity_csv(const VelocityProfile& profile);

/// %.17g
std::string format_double(double v);

}  // namespace retfield
