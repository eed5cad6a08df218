#pragma once

// Run configuration: a JSON document with `schema_version`, an optional
// `output` block and the block of the command being run. Every problem is
// reported as a ConfigError naming the field path, e.g. "fem.mesh.grading".

#include "transmonlab/adaptive.hpp"
#include "transmonlab/chipsets.hpp"
#include "transmonlab/fem.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tlab::io {

inline constexpr int kSchemaVersion = 1;

enum class Command { spectrum, chip, fem, converge };
const char* to_string(Command command);
Command parse_command(const std::string& name);

enum class OutputFormat { csv, svg, both };
const char* to_string(OutputFormat format);
OutputFormat parse_format(const std::string& name);

struct SpectrumConfig {
    std::vector<double> ratios{1.0, 5.0, 10.0, 50.0};
    double ec = 0.25;      // GHz; the normalized bands do not depend on it
    int ng_samples = 101;
    int levels = 5;
    int cutoff = 0;        // 0: default per ratio
};

struct ChipConfig {
    std::vector<chips::ChipPreset> chips;
    std::vector<double> ratio_grid = chips::default_ratio_grid();
    std::vector<double> ec_grid = chips::default_ec_grid();
};

enum class GeometryKind { pads, parallel_plate, custom };
const char* to_string(GeometryKind kind);

struct FemConfig {
    std::string label;
    std::string material_preset = "Al-on-Si";
    GeometryKind geometry_kind = GeometryKind::pads;
    fem::Geometry2D geometry;
    fem::MaterialLibrary materials;
    double drive_voltage = 1.0;
    double target_h = fem::kDefaultTargetH;
    double grading = fem::kDefaultGrading;
    int refinements = 0;  // uniform 1:4 splits after meshing
    fem::MeshOptions mesh;
    fem::SolveOptions solve;
    double surface_layer_nm = 10.0;
    std::size_t raster_nx = 160;
    std::size_t raster_ny = 100;
    std::optional<fem::Rect> window;  // empty: the whole airbox
    bool export_mesh = false;
};

struct ConvergeConfig {
    std::string material_preset = "Al-on-Si";
    std::vector<adaptive::QubitVariant> variants;
    adaptive::ConvergenceSettings settings;
    unsigned threads = 0;  // 0: environment cap or hardware concurrency
};

struct RunConfig {
    Command command = Command::spectrum;
    int schema_version = kSchemaVersion;
    std::filesystem::path output_dir = "out";
    OutputFormat format = OutputFormat::both;
    bool deterministic = true;  // reserved; runs are always deterministic
    SpectrumConfig spectrum;
    ChipConfig chip;
    FemConfig fem;
    ConvergeConfig converge;
    nlohmann::json resolved;  // every effective setting, echoed into the metadata

    bool csv() const noexcept { return format != OutputFormat::svg; }
    bool svg() const noexcept { return format != OutputFormat::csv; }
};

// Relative preset file paths resolve against `base_dir`.
RunConfig parse_config(const nlohmann::json& doc, Command command, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path, Command command);

// Chip presets in the preset-file schema:
// {"name": ..., "provenance": ..., "qubits": [{"label", "ej", "ec", "resonator_freq", "g0"}]}
nlohmann::json to_json(const chips::ChipPreset& chip);
chips::ChipPreset chip_from_json(const nlohmann::json& doc, const std::string& path = "chip");

}  // namespace tlab::io
