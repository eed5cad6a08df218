#pragma once

// The four computational commands. Each computes its whole file set in
// memory and commits it in one step, so a failure leaves no partial output.

#include "transmonlab/io/config.hpp"
#include "transmonlab/io/output.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace tlab::io {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int validation = 1;
inline constexpr int numerical = 2;
inline constexpr int partial = 3;
}  // namespace exit_code

const char* version();

struct CommandResult {
    int exit_code = exit_code::ok;
    std::vector<std::filesystem::path> files;
    std::vector<std::string> messages;  // warnings and per-item failures
};

// Exit code for a library error: 1 for configuration, geometry, parameter
// and setup problems, 2 for meshing and numerical failures.
int exit_code_for(const std::exception& e);

// Staged output of one command; `sets` holds one OutputSet per independent
// file group (one per chip for `chip`, a single one otherwise).
struct StagedRun {
    std::vector<OutputSet> sets;
    std::vector<std::string> messages;
    int exit_code = exit_code::ok;
};

StagedRun stage_spectrum(const RunConfig& config);
StagedRun stage_chip(const RunConfig& config);
StagedRun stage_fem(const RunConfig& config);
StagedRun stage_converge(const RunConfig& config);
StagedRun stage(const RunConfig& config);

// stage() followed by commit of every set.
CommandResult run_command(const RunConfig& config);

// Config loading, --out / --format overrides, execution and error reporting.
int run_cli(Command command, const std::filesystem::path& config_path,
            const std::optional<std::filesystem::path>& out_dir, const std::optional<std::string>& format,
            std::ostream& out, std::ostream& err);

// `presets list`: human-readable text, or the builtin presets as JSON in the
// preset-file schema.
std::string presets_listing();
nlohmann::json presets_json();

}  // namespace tlab::io
