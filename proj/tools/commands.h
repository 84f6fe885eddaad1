#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

namespace fssecm::cli {

struct run_options {
    double smooth_ghz = 0.0;   // 0 disables smoothing
};

// Runs one of analyze, sweep, angular, synth, fit. Returns the process exit
// status; on failure a single "error: <category>: <message>" line goes to err.
int run(std::string_view command, const std::filesystem::path& config_path,
        const std::filesystem::path& output_dir, const run_options& options, std::ostream& err);

} // namespace fssecm::cli
