#include "transmonlab/materials.hpp"

#include "transmonlab/errors.hpp"

#include <cmath>

namespace tlab::fem {

const std::vector<MaterialPreset>& builtin_material_presets() {
    static const std::vector<MaterialPreset> presets = [] {
        const MaterialSpec silicon{"Si", 11.7, MaterialRole::dielectric, 0.0, 1.0, 0.0};
        std::vector<MaterialPreset> out;
        out.push_back({"Al-on-Si", {"Al", 1.0, MaterialRole::conductor, 0.003, 9.8, 16.0}, silicon});
        out.push_back({"Nb-on-Si", {"Nb", 1.0, MaterialRole::conductor, 0.005, 33.0, 39.0}, silicon});
        return out;
    }();
    return presets;
}

const MaterialPreset& find_material_preset(const std::string& name) {
    std::string known;
    for (const auto& p : builtin_material_presets()) {
        if (p.name == name) return p;
        known += (known.empty() ? "" : ", ") + p.name;
    }
    throw ConfigError("unknown material preset '" + name + "' (known: " + known + ")");
}

void validate(const MaterialSpec& spec) {
    if (spec.name.empty()) throw ParameterError("material needs a name", "materials");
    if (spec.role == MaterialRole::dielectric) {
        if (!(spec.relative_permittivity >= 1.0) || !std::isfinite(spec.relative_permittivity)) {
            throw ParameterError("dielectric '" + spec.name + "' needs relative permittivity >= 1", "materials");
        }
        return;
    }
    if (!(spec.oxide_thickness_um >= 0.0) || !(spec.london_penetration_nm >= 0.0)) {
        throw ParameterError("conductor '" + spec.name + "' has a negative layer thickness", "materials");
    }
    if (spec.oxide_thickness_um > 0.0 && !(spec.oxide_permittivity >= 1.0)) {
        throw ParameterError("oxide of '" + spec.name + "' needs relative permittivity >= 1", "materials");
    }
}

std::string oxide_material_name(const MaterialSpec& conductor) { return conductor.name + "-oxide"; }

std::string penetration_material_name(const MaterialSpec& conductor) { return conductor.name + "-penetration"; }

MaterialLibrary library_for(const MaterialPreset& preset) {
    validate(preset.conductor);
    validate(preset.substrate);
    MaterialLibrary lib;
    lib[kVacuum] = MaterialSpec{kVacuum, 1.0, MaterialRole::dielectric, 0.0, 1.0, 0.0};
    lib[preset.substrate.name] = preset.substrate;
    lib[preset.conductor.name] = preset.conductor;
    lib[oxide_material_name(preset.conductor)] =
        MaterialSpec{oxide_material_name(preset.conductor), preset.conductor.oxide_permittivity,
                     MaterialRole::dielectric, 0.0, 1.0, 0.0};
    lib[penetration_material_name(preset.conductor)] =
        MaterialSpec{penetration_material_name(preset.conductor), 1.0, MaterialRole::dielectric, 0.0, 1.0, 0.0};
    return lib;
}

}  // namespace tlab::fem
