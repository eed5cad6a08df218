#include "transmonlab/io/commands.hpp"

#include "transmonlab/errors.hpp"
#include "transmonlab/io/svg.hpp"
#include "transmonlab/transmon.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#ifndef TRANSMONLAB_VERSION
#define TRANSMONLAB_VERSION "0.0.0"
#endif

namespace tlab::io {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json metadata(const RunConfig& config, const std::vector<std::string>& files, json numerics, json provenance,
              const std::vector<std::string>& warnings) {
    return {{"schema_version", kSchemaVersion},
            {"tool", "transmonlab"},
            {"version", version()},
            {"command", to_string(config.command)},
            {"timestamp", utc_timestamp()},
            {"config", config.resolved},
            {"numerics", std::move(numerics)},
            {"provenance", std::move(provenance)},
            {"files", files},
            {"warnings", warnings}};
}

// Adds the metadata file last so it can list every data file of the set.
void finish_set(OutputSet& set, const RunConfig& config, const std::string& name, json numerics, json provenance,
                const std::vector<std::string>& warnings) {
    auto files = set.names();
    files.push_back(name);
    set.add(name, metadata(config, files, std::move(numerics), std::move(provenance), warnings).dump(2) + "\n");
}

// spectrum

}  // namespace

StagedRun stage_spectrum(const RunConfig& config) {
    const auto& c = config.spectrum;
    StagedRun run;
    OutputSet set(config.output_dir);
    json per_ratio = json::array();
    for (double ratio : c.ratios) {
        const auto bands = transmon::normalized_bands(ratio, c.ec, c.ng_samples, c.levels, c.cutoff);
        const std::string stem = "spectrum_ratio_" + format_number(ratio);
        if (config.csv()) {
            std::vector<std::string> header{"ng"};
            for (int m = 0; m < c.levels; ++m) header.push_back("band" + std::to_string(m));
            CsvTable table(header);
            for (std::size_t k = 0; k < bands.ng_grid.size(); ++k) {
                std::vector<double> row{bands.ng_grid[k]};
                for (const auto& band : bands.bands) row.push_back(band[k]);
                table.add_numbers(row);
            }
            set.add(stem + ".csv", table.str());
        }
        if (config.svg()) {
            LineChart chart{"Transmon levels vs offset charge, EJ/EC = " + format_number(ratio), "offset charge n_g",
                            "(E_m - min E_0) / E_01(n_g = 1/2)", false, {}};
            for (std::size_t m = 0; m < bands.bands.size(); ++m) {
                chart.series.push_back({"m = " + std::to_string(m), bands.ng_grid, bands.bands[m], false});
            }
            set.add(stem + ".svg", render_svg(chart));
        }
        per_ratio.push_back({{"ej_over_ec", ratio},
                             {"cutoff", bands.cutoff},
                             {"e01_at_half_GHz", bands.e01_at_half},
                             {"band0_peak_to_peak", *std::max_element(bands.bands[0].begin(), bands.bands[0].end()) -
                                                        *std::min_element(bands.bands[0].begin(), bands.bands[0].end())}});
    }
    json numerics = {{"eigensolver", "implicit QL, 30 iterations per row"}, {"ratios", per_ratio}};
    finish_set(set, config, "spectrum_metadata.json", numerics,
               {"bands normalized by the exact E_01 at n_g = 1/2; band 0 minimum shifted to zero"}, {});
    run.sets.push_back(std::move(set));
    return run;
}

// chip

namespace {

void add_rows(CsvTable& table, const std::string& chip, const chips::SweepResult& r) {
    std::vector<const chips::Series*> order;
    for (const auto& s : r.series) order.push_back(&s);
    std::stable_sort(order.begin(), order.end(),
                     [](const chips::Series* a, const chips::Series* b) { return a->qubit < b->qubit; });
    for (const auto* s : order) {
        for (std::size_t i = 0; i < s->x.size(); ++i) {
            table.add_row({chip, s->qubit, s->x_name, format_number(s->x[i]), s->y_name, format_number(s->y[i]),
                           s->notes.empty() ? "" : s->notes[i]});
        }
    }
}

json sweep_numerics(const chips::SweepMetadata& m) {
    return {{"sweep", m.sweep},
            {"min_cutoff", m.min_cutoff},
            {"max_cutoff", m.max_cutoff},
            {"eigensolver_iterations_per_row", m.eigensolver_iterations_per_row},
            {"near_resonance_GHz", m.near_resonance_ghz},
            {"x_convention", m.x_convention}};
}

LineChart sweep_chart(const chips::SweepResult& r, std::string title, std::string x_label, std::string y_label,
                      bool log_y) {
    LineChart chart{std::move(title), std::move(x_label), std::move(y_label), log_y, {}};
    for (const auto& s : r.series) chart.series.push_back({s.qubit, s.x, s.y, false});
    return chart;
}

}  // namespace

StagedRun stage_chip(const RunConfig& config) {
    const auto& c = config.chip;
    StagedRun run;
    int failures = 0;
    for (const auto& chip : c.chips) {
        try {
            const auto disp = chips::run_dispersion_sweep(chip, c.ratio_grid);
            const auto anh = chips::run_anharmonicity_sweep(chip, c.ec_grid);
            const auto coup = chips::run_coupling_sweep(chip, c.ratio_grid);

            OutputSet set(config.output_dir);
            if (config.csv()) {
                CsvTable table({"chip", "qubit", "x_name", "x_value", "y_name", "y_value", "note"});
                add_rows(table, chip.name, disp);
                add_rows(table, chip.name, anh);
                add_rows(table, chip.name, coup);
                set.add(chip.name + "_sweeps.csv", table.str());
            }
            if (config.svg()) {
                set.add(chip.name + "_dispersion.svg",
                        render_svg(sweep_chart(disp, chip.name + ": charge dispersion of E_01", "EJ / EC",
                                               "dispersion (MHz)", true)));
                set.add(chip.name + "_anharmonicity.svg",
                        render_svg(sweep_chart(anh, chip.name + ": anharmonicity", "EC (GHz)", "alpha (GHz)", false)));
                LineChart bare{"bare coupling g01 = g0 |<0|n|1>|", "EJ / EC", "g01 (GHz)", false, {}};
                LineChart dispersive{"dispersive shift (gaps: near resonance)", "EJ / EC", "chi (GHz)", false, {}};
                for (const auto& s : coup.series) {
                    (s.y_name == "chi_GHz" ? dispersive : bare).series.push_back({s.qubit, s.x, s.y, false});
                }
                set.add(chip.name + "_coupling.svg",
                        render_svg(chip.name + ": qubit-resonator coupling", std::vector<LineChart>{bare, dispersive}));
            }

            json qubits = json::array();
            std::vector<double> dispersions;
            for (const auto& q : chip.qubits) {
                dispersions.push_back(chips::dispersion_mhz(q.ej, q.ec));
                qubits.push_back({{"label", q.label},
                                  {"ej_over_ec", q.ratio()},
                                  {"dispersion_MHz", dispersions.back()},
                                  {"alpha_GHz", transmon::anharmonicity(q.ej, q.ec)}});
            }
            json slopes = json::object();
            for (const auto& s : anh.series) slopes[s.qubit] = chips::fit_line(s.x, s.y).slope;
            const auto pooled = chips::pooled_fit(anh);
            json numerics = {{"sweeps", {sweep_numerics(disp.metadata), sweep_numerics(anh.metadata),
                                         sweep_numerics(coup.metadata)}},
                             {"qubits", qubits},
                             {"dispersion_coefficient_of_variation", chips::coefficient_of_variation(dispersions)},
                             {"alpha_slopes", slopes},
                             {"alpha_pooled_fit",
                              {{"slope", pooled.slope}, {"intercept", pooled.intercept}, {"rms_residual", pooled.rms_residual}}}};
            std::vector<std::string> warnings;
            for (const auto& s : coup.series) {
                for (std::size_t i = 0; i < s.notes.size(); ++i) {
                    if (!s.notes[i].empty()) warnings.push_back(s.qubit + " " + s.y_name + " at EJ/EC = " + format_number(s.x[i]) + ": " + s.notes[i]);
                }
            }
            finish_set(set, config, chip.name + "_metadata.json", numerics,
                       {{"preset", chip.provenance}, {"sweeps", disp.metadata.provenance}}, warnings);
            run.sets.push_back(std::move(set));
        } catch (const Error& e) {
            ++failures;
            run.messages.push_back(chip.name + ": " + e.what());
            run.exit_code = exit_code_for(e);
        }
    }
    if (failures > 0 && failures < static_cast<int>(c.chips.size())) run.exit_code = exit_code::partial;
    return run;
}

// fem

StagedRun stage_fem(const RunConfig& config) {
    const auto& c = config.fem;
    StagedRun run;
    fem::Mesh2D mesh = fem::triangulate(c.geometry, c.target_h, c.grading, c.mesh);
    for (int k = 0; k < c.refinements; ++k) mesh = fem::refine_uniform(mesh);
    const auto sol = fem::assemble_and_solve(mesh, c.materials, c.drive_voltage, c.solve);
    const auto rep = fem::participation(sol, mesh, c.surface_layer_nm);
    const double c_gauss = fem::gauss_capacitance(sol, mesh);
    const auto raster = fem::field_maps(sol, mesh, c.raster_nx, c.raster_ny, c.window);
    const std::size_t peak = fem::peak_field_triangle(sol);
    const auto peak_at = mesh.centroid(peak);
    const auto stats = fem::statistics(mesh);

    OutputSet set(config.output_dir);
    const std::string stem = c.label;
    if (config.csv()) {
        CsvTable table({"x", "y", "e_norm", "energy_density"});
        for (std::size_t j = 0; j < raster.ny; ++j) {
            for (std::size_t i = 0; i < raster.nx; ++i) {
                const std::size_t k = j * raster.nx + i;
                table.add_numbers({raster.x[i], raster.y[j], raster.e_norm[k], raster.energy_density[k]});
            }
        }
        set.add(stem + "_field.csv", table.str());
    }
    if (config.svg()) {
        Heatmap map{c.label + ": electric field magnitude", "x (um)", "y (um)", "|E| (V/m)", raster.nx, raster.ny,
                    raster.window.x0, raster.window.y0, raster.window.x1, raster.window.y1, raster.e_norm, true};
        set.add(stem + "_e_norm.svg", render_svg(map));
        map.title = c.label + ": electric energy density";
        map.value_label = "u (J/m^3)";
        map.values = raster.energy_density;
        set.add(stem + "_energy_density.svg", render_svg(map));
    }

    json fractions = json::object(), energies = json::object();
    double sum = 0.0;
    for (std::size_t k = 0; k < fem::kParticipationClasses; ++k) {
        const char* name = fem::to_string(static_cast<fem::ParticipationClass>(k));
        fractions[name] = rep.fraction[k];
        energies[name] = rep.energy[k];
        sum += rep.fraction[k];
    }
    const json report = {{"schema_version", kSchemaVersion},
                         {"label", c.label},
                         {"material_preset", c.material_preset},
                         {"drive_voltage_V", sol.drive_voltage},
                         {"surface_layer_thickness_nm", rep.surface_layer_thickness_nm},
                         {"fractions", fractions},
                         {"fraction_sum", sum},
                         {"lossy_surface", rep.lossy_surface()},
                         {"energies_J_per_m", energies},
                         {"total_energy_J_per_m", rep.total_energy},
                         {"capacitance_F_per_m", sol.capacitance()},
                         {"gauss_capacitance_F_per_m", c_gauss},
                         {"peak_field", {{"x_um", peak_at.x}, {"y_um", peak_at.y}, {"e_norm_V_per_m", sol.e_norm[peak]}}}};
    set.add(stem + "_participation.json", report.dump(2) + "\n");
    if (c.export_mesh) {
        std::ostringstream os;
        fem::write_mesh(os, mesh);
        set.add(stem + "_mesh.txt", os.str());
    }

    std::vector<std::string> warnings = c.geometry.warnings;
    warnings.insert(warnings.end(), sol.warnings.begin(), sol.warnings.end());
    json numerics = {{"mesh",
                      {{"nodes", stats.nodes},
                       {"triangles", stats.triangles},
                       {"min_angle_deg", stats.min_angle_deg},
                       {"min_area_um2", stats.min_area},
                       {"max_area_um2", stats.max_area}}},
                     {"solver",
                      {{"method", "Jacobi-preconditioned conjugate gradients"},
                       {"unknowns", sol.stats.unknowns},
                       {"iterations", sol.stats.iterations},
                       {"relative_residual", sol.stats.relative_residual},
                       {"rel_tol", c.solve.rel_tol}}},
                     {"gauss_contour_margin_fraction", 0.382}};
    json provenance = {{"materials", "builtin preset '" + c.material_preset +
                                         "': literature oxide and penetration values, overridable"}};
    finish_set(set, config, stem + "_metadata.json", numerics, provenance, warnings);
    run.messages = warnings;
    run.sets.push_back(std::move(set));
    return run;
}

// converge

StagedRun stage_converge(const RunConfig& config) {
    const auto& c = config.converge;
    StagedRun run;
    const auto outcomes = adaptive::multi_qubit_convergence(c.variants, c.settings, c.threads);

    OutputSet set(config.output_dir);
    std::vector<const adaptive::QubitOutcome*> ok;
    json qubits = json::array();
    for (const auto& o : outcomes) {
        json entry = {{"label", o.label}};
        if (!o.report) {
            run.messages.push_back(o.label + ": " + o.error);
            entry["error"] = o.error;
            entry["error_stage"] = o.error_stage;
            qubits.push_back(entry);
            continue;
        }
        ok.push_back(&o);
        const auto& r = *o.report;
        if (!r.converged) {
            run.messages.push_back(o.label + ": not converged after " + std::to_string(r.passes.size()) + " passes");
        }
        entry["converged"] = r.converged;
        entry["passes_to_converge"] = r.passes_to_converge ? json(*r.passes_to_converge) : json(nullptr);
        json iters = json::array(), nodes = json::array();
        for (const auto& p : r.passes) {
            iters.push_back(p.solver_iterations);
            nodes.push_back(p.node_count);
        }
        entry["solver_iterations"] = iters;
        entry["final_fq_GHz"] = r.passes.back().fq;
        qubits.push_back(entry);

        if (config.csv()) {
            CsvTable table({"pass", "node_count", "capacitance_F_per_m", "ec_GHz", "fq_GHz", "delta_rel"});
            for (const auto& p : r.passes) {
                table.add_row({std::to_string(p.pass_index), std::to_string(p.node_count), format_number(p.capacitance),
                               format_number(p.ec), format_number(p.fq),
                               p.delta_rel ? format_number(*p.delta_rel) : ""});
            }
            set.add("converge_" + o.label + ".csv", table.str());
        }
    }
    if (ok.empty()) {
        run.exit_code = exit_code::numerical;
        return run;
    }

    if (config.csv()) {
        std::vector<std::string> header{"pass"};
        std::size_t rows = 0;
        for (const auto* o : ok) {
            header.push_back(o->label + "_fq_GHz");
            rows = std::max(rows, o->report->passes.size());
        }
        CsvTable table(header);
        for (std::size_t k = 0; k < rows; ++k) {
            std::vector<std::string> row{std::to_string(k + 1)};
            for (const auto* o : ok) {
                const auto& passes = o->report->passes;
                row.push_back(k < passes.size() ? format_number(passes[k].fq) : "");
            }
            table.add_row(row);
        }
        set.add("converge_aggregate.csv", table.str());
    }
    if (config.svg()) {
        LineChart chart{"Qubit frequency vs adaptive pass", "pass", "f_q (GHz)", false, {}};
        for (const auto* o : ok) {
            LineSeries s{o->label, {}, {}, false};
            for (const auto& p : o->report->passes) {
                s.x.push_back(p.pass_index);
                s.y.push_back(p.fq);
            }
            chart.series.push_back(std::move(s));
        }
        set.add("converge_fq.svg", render_svg(chart));
    }
    const auto& st = c.settings;
    json numerics = {{"criterion", "|f_q(k) - f_q(k-1)| / f_q(k-1) <= tol"},
                     {"tol", st.tol},
                     {"max_passes", st.max_passes},
                     {"pass_target_h_um", [&] {
                          json h = json::array();
                          for (int k = 1; k <= st.max_passes; ++k) h.push_back(adaptive::pass_target_h(st, k));
                          return h;
                      }()},
                     {"solver_rel_tol", st.solve.rel_tol},
                     {"qubits", qubits}};
    json provenance = {{"frequency_model", "C_3D = C' * depth_um, E_C = e^2 / (2 C_3D h), f_q = sqrt(8 E_J E_C) - E_C"},
                       {"materials", "builtin preset '" + c.material_preset + "'"}};
    finish_set(set, config, "converge_metadata.json", numerics, provenance, run.messages);
    run.sets.push_back(std::move(set));
    return run;
}

StagedRun stage(const RunConfig& config) {
    switch (config.command) {
        case Command::spectrum: return stage_spectrum(config);
        case Command::chip: return stage_chip(config);
        case Command::fem: return stage_fem(config);
        case Command::converge: return stage_converge(config);
    }
    throw ConfigError("unknown command");
}

CommandResult run_command(const RunConfig& config) {
    ensure_writable_directory(config.output_dir);
    StagedRun staged = stage(config);
    CommandResult result;
    result.exit_code = staged.exit_code;
    result.messages = std::move(staged.messages);
    for (const auto& set : staged.sets) {
        for (auto& p : set.commit()) result.files.push_back(std::move(p));
    }
    return result;
}

const char* version() { return TRANSMONLAB_VERSION; }

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const GeometryError*>(&e) ||
        dynamic_cast<const ParameterError*>(&e) || dynamic_cast<const SetupError*>(&e)) {
        return exit_code::validation;
    }
    return exit_code::numerical;
}

int run_cli(Command command, const fs::path& config_path, const std::optional<fs::path>& out_dir,
            const std::optional<std::string>& format, std::ostream& out, std::ostream& err) {
    try {
        RunConfig config = load_config(config_path, command);
        if (out_dir) {
            config.output_dir = *out_dir;
            config.resolved["output"]["dir"] = out_dir->string();
        }
        if (format) {
            config.format = parse_format(*format);
            config.resolved["output"]["format"] = *format;
        }
        const CommandResult result = run_command(config);
        for (const auto& m : result.messages) err << "warning: " << m << "\n";
        for (const auto& f : result.files) out << f.string() << "\n";
        return result.exit_code;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

json presets_json() {
    json chips_j = json::array();
    for (const auto* chip : {&chips::builtin_presets().chip4, &chips::builtin_presets().chip8}) {
        chips_j.push_back(to_json(*chip));
    }
    json materials = json::array();
    for (const auto& p : fem::builtin_material_presets()) {
        materials.push_back({{"name", p.name},
                             {"conductor",
                              {{"name", p.conductor.name},
                               {"oxide_thickness_um", p.conductor.oxide_thickness_um},
                               {"oxide_permittivity", p.conductor.oxide_permittivity},
                               {"london_penetration_nm", p.conductor.london_penetration_nm}}},
                             {"substrate",
                              {{"name", p.substrate.name}, {"relative_permittivity", p.substrate.relative_permittivity}}}});
    }
    return {{"chips", chips_j}, {"materials", materials}};
}

std::string presets_listing() {
    std::ostringstream os;
    char buf[256];
    os << "chip presets\n";
    for (const auto* chip : {&chips::builtin_presets().chip4, &chips::builtin_presets().chip8}) {
        os << "  " << chip->name << " (" << chip->qubits.size() << " qubits): " << chip->provenance << "\n";
        for (const auto& q : chip->qubits) {
            std::snprintf(buf, sizeof buf,
                          "    %-4s EJ %8.4f GHz  EC %7.4f GHz  EJ/EC %7.3f  dispersion %8.3f MHz  resonator %7.4f GHz  g0 %.3f GHz\n",
                          q.label.c_str(), q.ej, q.ec, q.ratio(), chips::dispersion_mhz(q.ej, q.ec), q.resonator_freq,
                          q.g0);
            os << buf;
        }
    }
    os << "material presets\n";
    for (const auto& p : fem::builtin_material_presets()) {
        std::snprintf(buf, sizeof buf,
                      "  %-9s conductor %s (oxide %g nm, eps_r %g; penetration %g nm), substrate %s (eps_r %g)\n",
                      p.name.c_str(), p.conductor.name.c_str(), p.conductor.oxide_thickness_um * 1e3,
                      p.conductor.oxide_permittivity, p.conductor.london_penetration_nm, p.substrate.name.c_str(),
                      p.substrate.relative_permittivity);
        os << buf;
    }
    return os.str();
}

}  // namespace tlab::io
