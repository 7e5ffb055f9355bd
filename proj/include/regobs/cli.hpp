#pragma once

#include <filesystem>
#include <string>

#include "regobs/sim.hpp"

namespace regobs::cli {

inline constexpr const char* kToolVersion = "1.0.0";

/// Exit codes shared by all subcommands.
enum ExitCode {
    kOk = 0,
    kValidation = 2,    // missing file, schema violation, step guard
    kInternal = 3,
    kInfeasibleGain = 4,
    kBadRecord = 5,
    kImplicationViolated = 6,
};

/// Parses and schema-validates a scenario config (JSON, version 1, unknown
/// keys rejected). Throws ValidationError listing JSON pointer paths.
Scenario parse_config(const std::filesystem::path& path);

/// Canonical JSON form of a scenario; parse -> serialize -> parse is a
/// fixed point.
std::string serialize_config(const Scenario& s);

int cmd_analyze(const std::filesystem::path& config, const std::filesystem::path& out_dir);
int cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& out_dir);
int cmd_reconstruct(const std::filesystem::path& config, const std::filesystem::path& record,
                    const std::filesystem::path& out_dir);
int cmd_sweep(const std::filesystem::path& config, int nx, int ny,
              const std::filesystem::path& out_dir);
int cmd_compare_regions(const std::filesystem::path& config,
                        const std::filesystem::path& out_dir);

}  // namespace regobs::cli
