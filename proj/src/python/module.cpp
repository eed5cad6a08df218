#include "transmonlab/adaptive.hpp"
#include "transmonlab/chipsets.hpp"
#include "transmonlab/errors.hpp"
#include "transmonlab/fem.hpp"
#include "transmonlab/io/commands.hpp"
#include "transmonlab/transmon.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace tlab;

namespace {

py::dict spectrum_dict(const transmon::Spectrum& s) {
    py::dict d;
    d["energies"] = s.energies;
    d["vectors"] = s.vectors;
    d["cutoff"] = s.params.cutoff;
    return d;
}

py::dict series_dict(const chips::Series& s) {
    py::dict d;
    d["qubit"] = s.qubit;
    d["x_name"] = s.x_name;
    d["y_name"] = s.y_name;
    d["x"] = s.x;
    d["y"] = s.y;
    d["notes"] = s.notes;
    return d;
}

chips::ChipPreset chip_arg(const py::object& chip) {
    if (py::isinstance<py::str>(chip)) return chips::find_chip_preset(chip.cast<std::string>());
    const auto text = py::module_::import("json").attr("dumps")(chip).cast<std::string>();
    return io::chip_from_json(nlohmann::json::parse(text));
}

py::dict sweep(const std::string& kind, const py::object& chip, std::optional<std::vector<double>> grid) {
    const auto preset = chip_arg(chip);
    chips::SweepResult r;
    if (kind == "dispersion") r = chips::run_dispersion_sweep(preset, grid.value_or(chips::default_ratio_grid()));
    else if (kind == "anharmonicity") r = chips::run_anharmonicity_sweep(preset, grid.value_or(chips::default_ec_grid()));
    else if (kind == "coupling") r = chips::run_coupling_sweep(preset, grid.value_or(chips::default_ratio_grid()));
    else throw ParameterError("sweep kind must be dispersion, anharmonicity or coupling", "chip");
    py::list series;
    for (const auto& s : r.series) series.append(series_dict(s));
    py::dict d;
    d["series"] = series;
    d["min_cutoff"] = r.metadata.min_cutoff;
    d["max_cutoff"] = r.metadata.max_cutoff;
    d["provenance"] = r.metadata.provenance;
    return d;
}

py::dict pad_solution(const std::string& preset_name, double target_h, double grading, double voltage,
                      double surface_layer_nm, bool penetration, double gap, double pad_width) {
    const auto& preset = fem::find_material_preset(preset_name);
    auto params = fem::pad_params_for(preset);
    params.penetration = penetration;
    params.gap = gap;
    params.pad_width = pad_width;
    fem::Mesh2D mesh;
    fem::FieldSolution sol;
    fem::ParticipationReport rep;
    double c_gauss = 0.0;
    {
        py::gil_scoped_release release;
        mesh = fem::triangulate(fem::build_pad_geometry(params), target_h, grading);
        sol = fem::assemble_and_solve(mesh, fem::library_for(preset), voltage);
        rep = fem::participation(sol, mesh, surface_layer_nm);
        c_gauss = fem::gauss_capacitance(sol, mesh);
    }
    py::dict fractions;
    for (std::size_t k = 0; k < fem::kParticipationClasses; ++k) {
        fractions[fem::to_string(static_cast<fem::ParticipationClass>(k))] = rep.fraction[k];
    }
    const auto peak = mesh.centroid(fem::peak_field_triangle(sol));
    py::dict d;
    d["capacitance"] = sol.capacitance();
    d["gauss_capacitance"] = c_gauss;
    d["total_energy"] = sol.total_energy;
    d["participation"] = fractions;
    d["lossy_surface"] = rep.lossy_surface();
    d["node_count"] = mesh.node_count();
    d["triangle_count"] = mesh.triangle_count();
    d["solver_iterations"] = sol.stats.iterations;
    d["peak_field_at"] = py::make_tuple(peak.x, peak.y);
    return d;
}

py::dict run_command(const std::string& command, const py::object& config, const std::string& out_dir,
                     const std::string& format) {
    const auto text = py::module_::import("json").attr("dumps")(config).cast<std::string>();
    auto rc = io::parse_config(nlohmann::json::parse(text), io::parse_command(command));
    rc.output_dir = out_dir;
    rc.resolved["output"]["dir"] = out_dir;
    if (!format.empty()) {
        rc.format = io::parse_format(format);
        rc.resolved["output"]["format"] = format;
    }
    io::CommandResult result;
    {
        py::gil_scoped_release release;
        result = io::run_command(rc);
    }
    std::vector<std::string> files;
    for (const auto& f : result.files) files.push_back(f.string());
    py::dict d;
    d["exit_code"] = result.exit_code;
    d["files"] = files;
    d["messages"] = result.messages;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Transmon spectra, chip sweeps and 2D electrostatics";
    m.attr("__version__") = io::version();

    auto base = py::register_exception<Error>(m, "TransmonlabError", PyExc_RuntimeError);
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
    py::register_exception<MeshError>(m, "MeshError", base.ptr());
    py::register_exception<SetupError>(m, "SetupError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    m.def("solve", [](double ej, double ec, double ng, int levels, int cutoff) {
        return spectrum_dict(transmon::solve(ej, ec, ng, levels, cutoff));
    }, py::arg("ej"), py::arg("ec"), py::arg("ng") = 0.0, py::arg("levels") = 5, py::arg("cutoff") = 0,
          "Lowest levels (GHz) and charge-basis eigenvectors.");
    m.def("normalized_bands", [](double ratio, double ec, int samples, int levels, int cutoff) {
        const auto b = transmon::normalized_bands(ratio, ec, samples, levels, cutoff);
        py::dict d;
        d["ng"] = b.ng_grid;
        d["bands"] = b.bands;
        d["e01_at_half"] = b.e01_at_half;
        d["cutoff"] = b.cutoff;
        return d;
    }, py::arg("ej_over_ec"), py::arg("ec") = 0.25, py::arg("samples") = 101, py::arg("levels") = 5,
          py::arg("cutoff") = 0);
    m.def("charge_dispersion", [](double ej, double ec, int i, int j, int cutoff) {
        return transmon::charge_dispersion(ej, ec, {i, j}, cutoff);
    }, py::arg("ej"), py::arg("ec"), py::arg("i") = 0, py::arg("j") = 1, py::arg("cutoff") = 0);
    m.def("anharmonicity", &transmon::anharmonicity, py::arg("ej"), py::arg("ec"), py::arg("cutoff") = 0);
    m.def("transition_frequency", &transmon::transition_frequency, py::arg("ej"), py::arg("ec"), py::arg("cutoff") = 0);
    m.def("qubit_frequency", &transmon::qubit_frequency, py::arg("ej"), py::arg("ec"));
    m.def("ec_from_capacitance", &transmon::ec_from_capacitance, py::arg("c_total"));

    m.def("chip_presets", [] {
        const auto text = io::presets_json().dump();
        return py::module_::import("json").attr("loads")(text);
    }, "Builtin chip and material presets in the preset-file schema.");
    m.def("sweep", &sweep, py::arg("kind"), py::arg("chip"), py::arg("grid") = std::nullopt,
          "Run a dispersion, anharmonicity or coupling sweep over a preset name or preset dict.");

    m.def("pad_solution", &pad_solution, py::arg("material_preset") = "Al-on-Si",
          py::arg("target_h") = fem::kDefaultTargetH, py::arg("grading") = fem::kDefaultGrading,
          py::arg("drive_voltage") = 1.0, py::arg("surface_layer_nm") = 10.0, py::arg("penetration") = true,
          py::arg("gap") = 10.0, py::arg("pad_width") = 50.0,
          "Mesh, solve and report capacitance (F/m) and participation for the coplanar pad cross section.");

    m.def("run_command", &run_command, py::arg("command"), py::arg("config"), py::arg("out_dir"),
          py::arg("format") = "", "Run spectrum/chip/fem/converge with a config dict; returns exit code and files.");
}
