#include "transmonlab/adaptive.hpp"

#include "transmonlab/errors.hpp"
#include "transmonlab/transmon.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace tlab::adaptive {

void validate(const ConvergenceSettings& s) {
    auto bad = [](const std::string& what) { throw ParameterError(what, "converge"); };
    if (s.max_passes < 2) bad("max_passes must be >= 2");
    if (!(s.tol > 0.0) || !std::isfinite(s.tol)) bad("tol must be positive");
    if (!(s.ej > 0.0) || !std::isfinite(s.ej)) bad("ej must be positive");
    if (!(s.depth_um > 0.0) || !std::isfinite(s.depth_um)) bad("depth must be positive");
    if (!(s.initial_h > 0.0) || !std::isfinite(s.initial_h)) bad("initial element size must be positive");
    if (!(s.grading >= 1.0)) bad("grading must be >= 1");
    if (!(s.drive_voltage != 0.0) || !std::isfinite(s.drive_voltage)) bad("drive voltage must be nonzero");
}

double pass_target_h(const ConvergenceSettings& s, int pass_index) {
    return s.initial_h * std::pow(kRefinementRatio, pass_index - 1);
}

PassRecord run_pass(const fem::Geometry2D& geometry, const fem::MaterialLibrary& materials,
                    const ConvergenceSettings& s, int pass_index, double target_h, double grading) {
    PassRecord rec;
    rec.pass_index = pass_index;
    rec.target_h = target_h;
    rec.grading = grading;
    const auto mesh = fem::triangulate(geometry, target_h, grading, s.mesh);
    const auto sol = fem::assemble_and_solve(mesh, materials, s.drive_voltage, s.solve);
    rec.node_count = mesh.node_count();
    rec.capacitance = sol.capacitance();
    rec.ec = transmon::ec_from_capacitance(rec.capacitance * s.depth_um * 1e-6);
    rec.fq = transmon::qubit_frequency(s.ej, rec.ec);
    rec.solver_iterations = sol.stats.iterations;
    return rec;
}

ConvergenceReport run_convergence(const fem::Geometry2D& geometry, const fem::MaterialLibrary& materials,
                                  const ConvergenceSettings& settings, const std::string& label) {
    validate(settings);
    ConvergenceReport rep;
    rep.label = label;
    rep.criterion = settings.tol;
    rep.settings = settings;
    for (int k = 1; k <= settings.max_passes; ++k) {
        PassRecord rec;
        try {
            rec = run_pass(geometry, materials, settings, k, pass_target_h(settings, k), settings.grading);
        } catch (const Error&) {
            rethrow_with_context("pass " + std::to_string(k) + ": ");
        }
        if (!rep.passes.empty()) {
            const double prev = rep.passes.back().fq;
            rec.delta_rel = std::abs(rec.fq - prev) / std::abs(prev);
        }
        rep.passes.push_back(rec);
        if (rec.delta_rel && *rec.delta_rel <= settings.tol) {
            rep.converged = true;
            rep.passes_to_converge = k;
            break;
        }
    }
    return rep;
}

unsigned worker_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("TRANSMONLAB_NUM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(std::min<long>(v, 1024));
    }
    return hw;
}

std::vector<QubitOutcome> multi_qubit_convergence(const std::vector<QubitVariant>& variants,
                                                  const ConvergenceSettings& settings, unsigned threads) {
    if (variants.empty()) throw ParameterError("at least one qubit variant is required", "converge");
    validate(settings);
    std::vector<QubitOutcome> out(variants.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < variants.size(); i = next++) {
            const auto& v = variants[i];
            out[i].label = v.label;
            ConvergenceSettings s = settings;
            s.ej = v.ej;
            try {
                out[i].report = run_convergence(v.geometry, v.materials, s, v.label);
            } catch (const Error& e) {
                out[i].error = e.what();
                out[i].error_stage = e.stage();
            } catch (const std::exception& e) {
                out[i].error = e.what();
                out[i].error_stage = "internal";
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads == 0 ? worker_threads() : threads,
                                                       static_cast<unsigned>(variants.size())));
    if (n == 1) {
        work();
        return out;
    }
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    return out;
}

std::vector<QubitVariant> pad_width_variants(const fem::PadGeometryParams& base, const fem::MaterialLibrary& materials,
                                             int count, double spread, double ej, const std::string& prefix) {
    if (count < 1) throw ParameterError("variant count must be >= 1", "converge");
    if (!(spread >= 0.0 && spread < 1.0)) throw ParameterError("spread must lie in [0, 1)", "converge");
    std::vector<QubitVariant> out;
    for (int i = 0; i < count; ++i) {
        const double offset = count == 1 ? 0.0 : -spread + 2.0 * spread * i / (count - 1);
        auto p = base;
        p.pad_width = base.pad_width * (1.0 + offset);
        out.push_back({prefix + std::to_string(i + 1), fem::build_pad_geometry(p), materials, ej});
    }
    return out;
}

}  // namespace tlab::adaptive
