#include "transmonlab/io/config.hpp"

#include "transmonlab/errors.hpp"
#include "transmonlab/io/output.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>

namespace tlab::io {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

// Typed access to one JSON object; finish() rejects keys nobody asked for.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }
    const std::string& where() const noexcept { return path_; }
    std::string path(const std::string& key) const { return join(path_, key); }

    const json* child(const std::string& key) {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    double number(const std::string& key, double fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        return as_number(*v, path(key));
    }

    long long integer(const std::string& key, long long fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        if (!v->is_number_integer() && !v->is_number_unsigned()) fail(path(key), "expected an integer");
        return v->get<long long>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        if (!v->is_boolean()) fail(path(key), "expected true or false");
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        if (!v->is_string()) fail(path(key), "expected a string");
        return v->get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) {
        const json* v = child(key);
        if (!v) return fallback;
        if (!v->is_array()) fail(path(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v->size(); ++i) out.push_back(as_number((*v)[i], index(path(key), i)));
        return out;
    }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!used_.count(key)) fail(path(key), "unknown field");
        }
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) fail(path, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(path, "must be finite");
        return d;
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) fail(path, what);
}

void check_file_name(const std::string& name, const std::string& path) {
    require(!name.empty(), path, "must not be empty");
    for (char c : name) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        require(ok, path, "'" + name + "' may only hold letters, digits, '-', '_' and '.'");
    }
    require(name[0] != '.', path, "must not start with '.'");
}

void check_grid(const std::vector<double>& grid, const std::string& path, double min_value) {
    require(!grid.empty(), path, "must not be empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        require(grid[i] >= min_value, index(path, i), "must be >= " + format_number(min_value));
        if (i) require(grid[i] > grid[i - 1], index(path, i), "grid must be strictly ascending");
    }
}

// Runs `f`, turning library validation errors into ConfigErrors at `path`.
template <class F>
auto at_path(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        fail(path, e.message());
    }
}

fem::Point read_point(const json& v, const std::string& path) {
    require(v.is_array() && v.size() == 2, path, "expected [x, y]");
    return {Fields::as_number(v[0], index(path, 0)), Fields::as_number(v[1], index(path, 1))};
}

fem::Rect read_rect(const json& v, const std::string& path) {
    require(v.is_array() && v.size() == 4, path, "expected [x0, y0, x1, y1]");
    fem::Rect r{Fields::as_number(v[0], index(path, 0)), Fields::as_number(v[1], index(path, 1)),
                Fields::as_number(v[2], index(path, 2)), Fields::as_number(v[3], index(path, 3))};
    require(r.x1 > r.x0 && r.y1 > r.y0, path, "needs x1 > x0 and y1 > y0");
    return r;
}

json rect_json(const fem::Rect& r) { return json::array({r.x0, r.y0, r.x1, r.y1}); }

fem::Terminal read_terminal(const std::string& s, const std::string& path) {
    if (s == "none") return fem::Terminal::none;
    if (s == "ground") return fem::Terminal::ground;
    if (s == "driven") return fem::Terminal::driven;
    fail(path, "expected none, ground or driven (got '" + s + "')");
}

fem::RegionKind read_region_kind(const std::string& s, const std::string& path) {
    for (auto k : {fem::RegionKind::substrate, fem::RegionKind::conductor, fem::RegionKind::oxide,
                   fem::RegionKind::penetration}) {
        if (s == fem::to_string(k)) return k;
    }
    fail(path, "expected substrate, conductor, oxide or penetration (got '" + s + "')");
}

fem::PadGeometryParams read_pads(Fields& g, fem::PadGeometryParams p) {
    p.pad_width = g.number("pad_width", p.pad_width);
    p.pad_thickness = g.number("pad_thickness", p.pad_thickness);
    p.gap = g.number("gap", p.gap);
    p.substrate_depth = g.number("substrate_depth", p.substrate_depth);
    p.substrate_width = g.number("substrate_width", p.substrate_width);
    if (const json* v = g.child("airbox")) p.airbox = read_rect(*v, g.path("airbox"));
    p.oxide_thickness = g.number("oxide_thickness", p.oxide_thickness);
    p.penetration_depth = g.number("penetration_depth", p.penetration_depth);
    p.penetration = g.boolean("penetration", p.penetration);
    p.left_terminal = read_terminal(g.string("left_terminal", fem::to_string(p.left_terminal)), g.path("left_terminal"));
    p.right_terminal =
        read_terminal(g.string("right_terminal", fem::to_string(p.right_terminal)), g.path("right_terminal"));
    return p;
}

json pads_json(const fem::PadGeometryParams& p) {
    return {{"pad_width", p.pad_width},
            {"pad_thickness", p.pad_thickness},
            {"gap", p.gap},
            {"substrate_depth", p.substrate_depth},
            {"substrate_width", p.substrate_width},
            {"airbox", rect_json(p.airbox)},
            {"oxide_thickness", p.oxide_thickness},
            {"penetration_depth", p.penetration_depth},
            {"penetration", p.penetration},
            {"left_terminal", fem::to_string(p.left_terminal)},
            {"right_terminal", fem::to_string(p.right_terminal)}};
}

fem::Geometry2D read_custom_geometry(Fields& g) {
    fem::Geometry2D geo;
    const json* box = g.child("airbox");
    require(box != nullptr, g.path("airbox"), "missing");
    geo.airbox = read_rect(*box, g.path("airbox"));
    geo.background_material = g.string("background_material", fem::kVacuum);
    const json* regions = g.child("regions");
    require(regions != nullptr && regions->is_array(), g.path("regions"), "expected an array of regions");
    for (std::size_t i = 0; i < regions->size(); ++i) {
        const std::string rp = index(g.path("regions"), i);
        Fields r((*regions)[i], rp);
        fem::Region region;
        region.name = r.string("name", "");
        require(!region.name.empty(), r.path("name"), "missing");
        region.kind = read_region_kind(r.string("kind", ""), r.path("kind"));
        region.material = r.string("material", "");
        require(!region.material.empty(), r.path("material"), "missing");
        region.terminal = read_terminal(r.string("terminal", "none"), r.path("terminal"));
        const json* outline = r.child("outline");
        require(outline != nullptr && outline->is_array(), r.path("outline"), "expected an array of [x, y] points");
        for (std::size_t k = 0; k < outline->size(); ++k) {
            region.outline.push_back(read_point((*outline)[k], index(r.path("outline"), k)));
        }
        r.finish();
        geo.regions.push_back(std::move(region));
    }
    if (const json* pts = g.child("refinement_points")) {
        require(pts->is_array(), g.path("refinement_points"), "expected an array of [x, y] points");
        for (std::size_t k = 0; k < pts->size(); ++k) {
            geo.refinement_points.push_back(read_point((*pts)[k], index(g.path("refinement_points"), k)));
        }
    }
    at_path(g.path("regions"), [&] {
        fem::validate(geo);
        return 0;
    });
    return geo;
}

json geometry_json(const fem::Geometry2D& g) {
    json regions = json::array();
    for (const auto& r : g.regions) {
        json outline = json::array();
        for (const auto& p : r.outline) outline.push_back({p.x, p.y});
        regions.push_back({{"name", r.name},
                           {"kind", fem::to_string(r.kind)},
                           {"material", r.material},
                           {"terminal", fem::to_string(r.terminal)},
                           {"outline", outline}});
    }
    json points = json::array();
    for (const auto& p : g.refinement_points) points.push_back({p.x, p.y});
    return {{"airbox", rect_json(g.airbox)},
            {"background_material", g.background_material},
            {"regions", regions},
            {"refinement_points", points}};
}

void read_materials(Fields& block, fem::MaterialLibrary& lib) {
    const json* m = block.child("materials");
    if (!m) return;
    const std::string mp = block.path("materials");
    require(m->is_object(), mp, "expected an object keyed by material name");
    for (const auto& [name, value] : m->items()) {
        Fields f(value, join(mp, name));
        fem::MaterialSpec spec;
        if (auto it = lib.find(name); it != lib.end()) spec = it->second;
        spec.name = name;
        const std::string role = f.string("role", spec.role == fem::MaterialRole::conductor ? "conductor" : "dielectric");
        if (role == "conductor") spec.role = fem::MaterialRole::conductor;
        else if (role == "dielectric") spec.role = fem::MaterialRole::dielectric;
        else fail(f.path("role"), "expected conductor or dielectric");
        spec.relative_permittivity = f.number("relative_permittivity", spec.relative_permittivity);
        spec.oxide_thickness_um = f.number("oxide_thickness_um", spec.oxide_thickness_um);
        spec.oxide_permittivity = f.number("oxide_permittivity", spec.oxide_permittivity);
        spec.london_penetration_nm = f.number("london_penetration_nm", spec.london_penetration_nm);
        f.finish();
        at_path(join(mp, name), [&] {
            fem::validate(spec);
            return 0;
        });
        lib[name] = spec;
    }
}

json materials_json(const fem::MaterialLibrary& lib) {
    json out = json::object();
    for (const auto& [name, m] : lib) {
        out[name] = {{"role", m.role == fem::MaterialRole::conductor ? "conductor" : "dielectric"},
                     {"relative_permittivity", m.relative_permittivity},
                     {"oxide_thickness_um", m.oxide_thickness_um},
                     {"oxide_permittivity", m.oxide_permittivity},
                     {"london_penetration_nm", m.london_penetration_nm}};
    }
    return out;
}

void check_materials_cover(const fem::Geometry2D& g, const fem::MaterialLibrary& lib, const std::string& path) {
    auto known = [&](const std::string& name) { return lib.count(name) > 0; };
    require(known(g.background_material), path, "unknown material '" + g.background_material + "'");
    for (const auto& r : g.regions) {
        require(known(r.material), path, "region '" + r.name + "' uses unknown material '" + r.material + "'");
    }
}

void read_mesh_options(Fields& m, fem::MeshOptions& o) {
    o.min_angle_deg = m.number("min_angle_deg", o.min_angle_deg);
    o.size_gradient = m.number("size_gradient", o.size_gradient);
    const long long budget = m.integer("max_vertices", static_cast<long long>(o.max_vertices));
    require(budget > 0, m.path("max_vertices"), "must be > 0");
    o.max_vertices = static_cast<std::size_t>(budget);
    o.mirror = m.boolean("mirror", o.mirror);
    require(o.min_angle_deg > 0.0 && o.min_angle_deg <= 30.0, m.path("min_angle_deg"), "must lie in (0, 30]");
    require(o.size_gradient > 0.0, m.path("size_gradient"), "must be > 0");
}

json mesh_options_json(const fem::MeshOptions& o) {
    return {{"min_angle_deg", o.min_angle_deg},
            {"size_gradient", o.size_gradient},
            {"max_vertices", o.max_vertices},
            {"mirror", o.mirror}};
}

void read_solver(Fields& block, fem::SolveOptions& s) {
    const json* v = block.child("solver");
    if (!v) return;
    Fields f(*v, block.path("solver"));
    s.rel_tol = f.number("rel_tol", s.rel_tol);
    require(s.rel_tol > 0.0 && s.rel_tol < 1.0, f.path("rel_tol"), "must lie in (0, 1)");
    const long long it = f.integer("max_iterations", static_cast<long long>(s.max_iterations));
    require(it >= 0, f.path("max_iterations"), "must be >= 0");
    s.max_iterations = static_cast<std::size_t>(it);
    f.finish();
}

json solver_json(const fem::SolveOptions& s) {
    return {{"rel_tol", s.rel_tol}, {"max_iterations", s.max_iterations}};
}

// Default raster window: the gap and the pad edges facing it.
fem::Rect gap_window(const fem::PadGeometryParams& p) {
    const double half = 0.5 * p.gap + std::min(p.pad_width, 2.0 * p.gap);
    return {-half, -0.6 * half, half, 0.4 * half};
}

SpectrumConfig read_spectrum(Fields& s) {
    SpectrumConfig c;
    c.ratios = s.numbers("ratios", c.ratios);
    require(!c.ratios.empty(), s.path("ratios"), "must not be empty");
    std::set<std::string> names;
    for (std::size_t i = 0; i < c.ratios.size(); ++i) {
        require(c.ratios[i] > 0.0, index(s.path("ratios"), i), "must be > 0");
        require(names.insert(format_number(c.ratios[i])).second, index(s.path("ratios"), i), "duplicate ratio");
    }
    c.ec = s.number("ec", c.ec);
    require(c.ec > 0.0, s.path("ec"), "must be > 0");
    c.ng_samples = static_cast<int>(s.integer("ng_samples", c.ng_samples));
    require(c.ng_samples >= 2 && c.ng_samples <= 100001, s.path("ng_samples"), "must lie in [2, 100001]");
    c.levels = static_cast<int>(s.integer("levels", c.levels));
    require(c.levels >= 1 && c.levels <= 20, s.path("levels"), "must lie in [1, 20]");
    c.cutoff = static_cast<int>(s.integer("cutoff", c.cutoff));
    require(c.cutoff >= 0, s.path("cutoff"), "must be >= 0 (0 picks the default)");
    if (c.cutoff > 0) {
        require(2 * c.cutoff + 1 >= c.levels, s.path("cutoff"), "basis smaller than the number of levels");
    }
    s.finish();
    return c;
}

json spectrum_json(const SpectrumConfig& c) {
    return {{"ratios", c.ratios}, {"ec", c.ec}, {"ng_samples", c.ng_samples}, {"levels", c.levels}, {"cutoff", c.cutoff}};
}

chips::ChipPreset read_chip_entry(const json& v, const std::string& path, const fs::path& base_dir) {
    if (v.is_string()) {
        return at_path(path, [&] { return chips::find_chip_preset(v.get<std::string>()); });
    }
    if (v.is_object() && v.contains("file")) {
        Fields f(v, path);
        const fs::path file = base_dir / f.string("file", "");
        f.finish();
        std::ifstream in(file);
        require(static_cast<bool>(in), f.path("file"), "cannot open " + file.string());
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            fail(f.path("file"), std::string("invalid JSON: ") + e.what());
        }
        return chip_from_json(doc, file.string());
    }
    return chip_from_json(v, path);
}

ChipConfig read_chip(Fields& s, const fs::path& base_dir) {
    ChipConfig c;
    const json* presets = s.child("presets");
    if (presets == nullptr) {
        c.chips = {chips::builtin_presets().chip4, chips::builtin_presets().chip8};
    } else {
        require(presets->is_array() && !presets->empty(), s.path("presets"),
                "expected a non-empty array of preset names or objects");
        std::set<std::string> names;
        for (std::size_t i = 0; i < presets->size(); ++i) {
            const std::string p = index(s.path("presets"), i);
            c.chips.push_back(read_chip_entry((*presets)[i], p, base_dir));
            require(names.insert(c.chips.back().name).second, p, "duplicate chip name '" + c.chips.back().name + "'");
        }
    }
    c.ratio_grid = s.numbers("ratio_grid", c.ratio_grid);
    check_grid(c.ratio_grid, s.path("ratio_grid"), 1e-9);
    c.ec_grid = s.numbers("ec_grid", c.ec_grid);
    check_grid(c.ec_grid, s.path("ec_grid"), 1e-9);
    s.finish();
    return c;
}

json chip_config_json(const ChipConfig& c) {
    json presets = json::array();
    for (const auto& chip : c.chips) presets.push_back(to_json(chip));
    return {{"presets", presets}, {"ratio_grid", c.ratio_grid}, {"ec_grid", c.ec_grid}};
}

// Shared by fem and converge: material preset, geometry and material overrides.
struct Setup {
    std::string material_preset;
    GeometryKind kind = GeometryKind::pads;
    fem::PadGeometryParams pads;
    fem::Geometry2D geometry;
    fem::MaterialLibrary materials;
    json geometry_echo;
};

Setup read_setup(Fields& s, bool allow_other_kinds) {
    Setup out;
    out.material_preset = s.string("material_preset", "Al-on-Si");
    const auto& preset = at_path(s.path("material_preset"),
                                 [&]() -> const fem::MaterialPreset& { return fem::find_material_preset(out.material_preset); });
    out.materials = fem::library_for(preset);
    out.pads = fem::pad_params_for(preset);

    json empty = json::object();
    const json* gj = s.child("geometry");
    Fields g(gj ? *gj : empty, s.path("geometry"));
    const std::string kind = g.string("kind", "pads");
    if (kind == "pads") {
        out.kind = GeometryKind::pads;
    } else if (kind == "parallel_plate" && allow_other_kinds) {
        out.kind = GeometryKind::parallel_plate;
    } else if (kind == "custom" && allow_other_kinds) {
        out.kind = GeometryKind::custom;
    } else {
        fail(g.path("kind"), allow_other_kinds ? "expected pads, parallel_plate or custom" : "only pads are supported here");
    }

    switch (out.kind) {
        case GeometryKind::pads:
            out.pads = read_pads(g, out.pads);
            out.geometry = at_path(g.where(), [&] { return fem::build_pad_geometry(out.pads); });
            out.geometry_echo = pads_json(out.pads);
            break;
        case GeometryKind::parallel_plate: {
            fem::ParallelPlateParams p;
            p.width = g.number("width", p.width);
            p.separation = g.number("separation", p.separation);
            p.plate_thickness = g.number("plate_thickness", p.plate_thickness);
            p.substrate_depth = g.number("substrate_depth", p.substrate_depth);
            out.geometry = at_path(g.where(), [&] { return fem::build_parallel_plate(p); });
            out.materials["plate"] = fem::MaterialSpec{"plate", 1.0, fem::MaterialRole::conductor, 0.0, 1.0, 0.0};
            out.geometry_echo = {{"width", p.width},
                                 {"separation", p.separation},
                                 {"plate_thickness", p.plate_thickness},
                                 {"substrate_depth", p.substrate_depth}};
            break;
        }
        case GeometryKind::custom:
            out.geometry = read_custom_geometry(g);
            out.geometry_echo = geometry_json(out.geometry);
            break;
    }
    out.geometry_echo["kind"] = to_string(out.kind);
    g.finish();
    read_materials(s, out.materials);
    check_materials_cover(out.geometry, out.materials, s.path("geometry"));
    return out;
}

FemConfig read_fem(Fields& s, json& echo) {
    FemConfig c;
    Setup setup = read_setup(s, true);
    c.material_preset = setup.material_preset;
    c.geometry_kind = setup.kind;
    c.geometry = std::move(setup.geometry);
    c.materials = std::move(setup.materials);
    c.label = s.string("label", c.material_preset);
    check_file_name(c.label, s.path("label"));
    c.drive_voltage = s.number("drive_voltage", c.drive_voltage);
    require(c.drive_voltage != 0.0, s.path("drive_voltage"), "must be nonzero");

    json empty = json::object();
    const json* mj = s.child("mesh");
    Fields m(mj ? *mj : empty, s.path("mesh"));
    c.target_h = m.number("target_h", c.target_h);
    require(c.target_h > 0.0, m.path("target_h"), "must be > 0");
    c.grading = m.number("grading", c.grading);
    require(c.grading >= 1.0, m.path("grading"), "must be >= 1");
    c.refinements = static_cast<int>(m.integer("refinements", 0));
    require(c.refinements >= 0 && c.refinements <= 4, m.path("refinements"), "must lie in [0, 4]");
    read_mesh_options(m, c.mesh);
    m.finish();
    read_solver(s, c.solve);

    c.surface_layer_nm = s.number("surface_layer_nm", c.surface_layer_nm);
    require(c.surface_layer_nm > 0.0, s.path("surface_layer_nm"), "must be > 0");

    const json* rj = s.child("raster");
    Fields r(rj ? *rj : empty, s.path("raster"));
    const long long nx = r.integer("nx", static_cast<long long>(c.raster_nx));
    const long long ny = r.integer("ny", static_cast<long long>(c.raster_ny));
    require(nx >= 2 && nx <= 4000, r.path("nx"), "must lie in [2, 4000]");
    require(ny >= 2 && ny <= 4000, r.path("ny"), "must lie in [2, 4000]");
    c.raster_nx = static_cast<std::size_t>(nx);
    c.raster_ny = static_cast<std::size_t>(ny);
    if (const json* w = r.child("window")) {
        c.window = read_rect(*w, r.path("window"));
    } else if (c.geometry_kind == GeometryKind::pads) {
        c.window = gap_window(setup.pads);
    }
    r.finish();
    c.export_mesh = s.boolean("export_mesh", c.export_mesh);
    s.finish();

    echo = {{"label", c.label},
            {"material_preset", c.material_preset},
            {"geometry", setup.geometry_echo},
            {"materials", materials_json(c.materials)},
            {"drive_voltage", c.drive_voltage},
            {"mesh", mesh_options_json(c.mesh)},
            {"solver", solver_json(c.solve)},
            {"surface_layer_nm", c.surface_layer_nm},
            {"raster", {{"nx", c.raster_nx}, {"ny", c.raster_ny}}},
            {"export_mesh", c.export_mesh}};
    echo["mesh"]["target_h"] = c.target_h;
    echo["mesh"]["grading"] = c.grading;
    echo["mesh"]["refinements"] = c.refinements;
    if (c.window) echo["raster"]["window"] = rect_json(*c.window);
    return c;
}

ConvergeConfig read_converge(Fields& s, json& echo) {
    ConvergeConfig c;
    Setup setup = read_setup(s, false);
    c.material_preset = setup.material_preset;
    auto& st = c.settings;
    st.ej = s.number("ej", st.ej);
    st.depth_um = s.number("depth_um", st.depth_um);
    st.max_passes = static_cast<int>(s.integer("max_passes", st.max_passes));
    st.tol = s.number("tol", st.tol);
    st.initial_h = s.number("initial_h", st.initial_h);
    st.grading = s.number("grading", st.grading);
    st.drive_voltage = s.number("drive_voltage", st.drive_voltage);
    json empty = json::object();
    if (const json* mj = s.child("mesh")) {
        Fields m(*mj, s.path("mesh"));
        read_mesh_options(m, st.mesh);
        m.finish();
    }
    read_solver(s, st.solve);
    at_path(s.where(), [&] {
        adaptive::validate(st);
        return 0;
    });
    const long long threads = s.integer("threads", 0);
    require(threads >= 0 && threads <= 1024, s.path("threads"), "must lie in [0, 1024]");
    c.threads = static_cast<unsigned>(threads);

    json qubits_echo = json::array();
    const json* qj = s.child("qubits");
    if (qj != nullptr && qj->is_array()) {
        require(!qj->empty(), s.path("qubits"), "needs at least one qubit");
        std::set<std::string> labels;
        for (std::size_t i = 0; i < qj->size(); ++i) {
            const std::string qp = index(s.path("qubits"), i);
            Fields q((*qj)[i], qp);
            adaptive::QubitVariant v;
            v.label = q.string("label", "Q" + std::to_string(i + 1));
            check_file_name(v.label, q.path("label"));
            require(labels.insert(v.label).second, q.path("label"), "duplicate label '" + v.label + "'");
            v.ej = q.number("ej", st.ej);
            require(v.ej > 0.0, q.path("ej"), "must be > 0");
            fem::PadGeometryParams p = setup.pads;
            p.pad_width = q.number("pad_width", p.pad_width);
            p.gap = q.number("gap", p.gap);
            q.finish();
            v.geometry = at_path(qp, [&] { return fem::build_pad_geometry(p); });
            v.materials = setup.materials;
            qubits_echo.push_back({{"label", v.label}, {"ej", v.ej}, {"pad_width", p.pad_width}, {"gap", p.gap}});
            c.variants.push_back(std::move(v));
        }
    } else {
        Fields q(qj ? *qj : empty, s.path("qubits"));
        const long long count = q.integer("count", 4);
        require(count >= 1 && count <= 64, q.path("count"), "must lie in [1, 64]");
        const double spread = q.number("spread", 0.05);
        require(spread >= 0.0 && spread < 1.0, q.path("spread"), "must lie in [0, 1)");
        const std::string prefix = q.string("prefix", "Q");
        check_file_name(prefix + "1", q.path("prefix"));
        q.finish();
        c.variants = at_path(s.path("qubits"), [&] {
            return adaptive::pad_width_variants(setup.pads, setup.materials, static_cast<int>(count), spread, st.ej,
                                                prefix);
        });
        for (const auto& v : c.variants) {
            // pad extent: union of the conductor core and its penetration shell
            double x0 = 1e300, x1 = -1e300;
            for (const auto& r : v.geometry.regions) {
                if (r.name != "metal_right" && r.name != "penetration_right") continue;
                const auto b = fem::rectangle_bounds(r.outline);
                x0 = std::min(x0, b.x0);
                x1 = std::max(x1, b.x1);
            }
            qubits_echo.push_back({{"label", v.label}, {"ej", v.ej}, {"pad_width", x1 - x0}, {"gap", setup.pads.gap}});
        }
        echo["qubit_family"] = {{"count", count}, {"spread", spread}, {"prefix", prefix}};
    }
    s.finish();

    echo["material_preset"] = c.material_preset;
    echo["geometry"] = setup.geometry_echo;
    echo["materials"] = materials_json(setup.materials);
    echo["qubits"] = qubits_echo;
    echo["ej"] = st.ej;
    echo["depth_um"] = st.depth_um;
    echo["max_passes"] = st.max_passes;
    echo["tol"] = st.tol;
    echo["initial_h"] = st.initial_h;
    echo["grading"] = st.grading;
    echo["drive_voltage"] = st.drive_voltage;
    echo["mesh"] = mesh_options_json(st.mesh);
    echo["solver"] = solver_json(st.solve);
    echo["threads"] = c.threads;
    return c;
}

}  // namespace

const char* to_string(Command command) {
    switch (command) {
        case Command::spectrum: return "spectrum";
        case Command::chip: return "chip";
        case Command::fem: return "fem";
        case Command::converge: return "converge";
    }
    return "?";
}

Command parse_command(const std::string& name) {
    for (auto c : {Command::spectrum, Command::chip, Command::fem, Command::converge}) {
        if (name == to_string(c)) return c;
    }
    throw ConfigError("unknown command '" + name + "' (expected spectrum, chip, fem or converge)");
}

const char* to_string(OutputFormat format) {
    switch (format) {
        case OutputFormat::csv: return "csv";
        case OutputFormat::svg: return "svg";
        case OutputFormat::both: return "both";
    }
    return "?";
}

OutputFormat parse_format(const std::string& name) {
    for (auto f : {OutputFormat::csv, OutputFormat::svg, OutputFormat::both}) {
        if (name == to_string(f)) return f;
    }
    throw ConfigError("format: expected csv, svg or both (got '" + name + "')");
}

const char* to_string(GeometryKind kind) {
    switch (kind) {
        case GeometryKind::pads: return "pads";
        case GeometryKind::parallel_plate: return "parallel_plate";
        case GeometryKind::custom: return "custom";
    }
    return "?";
}

json to_json(const chips::ChipPreset& chip) {
    json qubits = json::array();
    for (const auto& q : chip.qubits) {
        qubits.push_back(
            {{"label", q.label}, {"ej", q.ej}, {"ec", q.ec}, {"resonator_freq", q.resonator_freq}, {"g0", q.g0}});
    }
    return {{"name", chip.name}, {"provenance", chip.provenance}, {"qubits", qubits}};
}

chips::ChipPreset chip_from_json(const json& doc, const std::string& path) {
    Fields f(doc, path);
    chips::ChipPreset chip;
    chip.name = f.string("name", "");
    check_file_name(chip.name, f.path("name"));
    chip.provenance = f.string("provenance", "user-supplied preset");
    const json* qubits = f.child("qubits");
    require(qubits != nullptr && qubits->is_array() && !qubits->empty(), f.path("qubits"),
            "expected a non-empty array of qubits");
    for (std::size_t i = 0; i < qubits->size(); ++i) {
        Fields q((*qubits)[i], index(f.path("qubits"), i));
        chips::QubitPreset p;
        p.label = q.string("label", "");
        p.ej = q.number("ej", 0.0);
        p.ec = q.number("ec", 0.0);
        p.resonator_freq = q.number("resonator_freq", 0.0);
        p.g0 = q.number("g0", 0.0);
        q.finish();
        chip.qubits.push_back(p);
    }
    f.finish();
    at_path(path, [&] {
        chips::validate(chip);
        return 0;
    });
    return chip;
}

RunConfig parse_config(const json& doc, Command command, const fs::path& base_dir) {
    Fields top(doc, "");
    RunConfig rc;
    rc.command = command;
    const json* version = top.child("schema_version");
    require(version != nullptr, "schema_version", "missing");
    require(version->is_number_integer(), "schema_version", "expected an integer");
    rc.schema_version = version->get<int>();
    require(rc.schema_version == kSchemaVersion, "schema_version",
            "unsupported version " + std::to_string(rc.schema_version) + " (expected " +
                std::to_string(kSchemaVersion) + ")");
    rc.deterministic = top.boolean("deterministic", true);
    require(rc.deterministic, "deterministic", "only deterministic runs are supported");

    json empty = json::object();
    const json* oj = top.child("output");
    Fields out(oj ? *oj : empty, "output");
    rc.output_dir = out.string("dir", rc.output_dir.string());
    require(!rc.output_dir.empty(), "output.dir", "must not be empty");
    const std::string format = out.string("format", to_string(rc.format));
    at_path("output.format", [&] {
        rc.format = parse_format(format);
        return 0;
    });
    out.finish();

    for (auto other : {Command::spectrum, Command::chip, Command::fem, Command::converge}) {
        if (other != command && top.has(to_string(other))) {
            fail(to_string(other), std::string("block for another command (running ") + to_string(command) + ")");
        }
    }

    const std::string key = to_string(command);
    const json* block = top.child(key);
    Fields fields(block ? *block : empty, key);
    json echo;
    switch (command) {
        case Command::spectrum:
            rc.spectrum = read_spectrum(fields);
            echo = spectrum_json(rc.spectrum);
            break;
        case Command::chip:
            rc.chip = read_chip(fields, base_dir);
            echo = chip_config_json(rc.chip);
            break;
        case Command::fem: rc.fem = read_fem(fields, echo); break;
        case Command::converge: rc.converge = read_converge(fields, echo); break;
    }
    top.finish();

    rc.resolved = {{"schema_version", rc.schema_version},
                   {"deterministic", rc.deterministic},
                   {"output", {{"dir", rc.output_dir.string()}, {"format", to_string(rc.format)}}},
                   {key, echo}};
    return rc;
}

RunConfig load_config(const fs::path& path, Command command) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": invalid JSON: " + e.what());
    }
    return parse_config(doc, command, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

}  // namespace tlab::io
