#pragma once

#include <map>
#include <string>
#include <vector>

namespace tlab::fem {

enum class MaterialRole { conductor, dielectric };

// Conductor-only fields (oxide, penetration depth) are ignored for dielectrics.
struct MaterialSpec {
    std::string name;
    double relative_permittivity = 1.0;
    MaterialRole role = MaterialRole::dielectric;
    double oxide_thickness_um = 0.0;
    double oxide_permittivity = 1.0;
    double london_penetration_nm = 0.0;
};

// Superconductor + substrate pairing. Oxide and penetration numbers are common
// literature values, not measured ones, and every field may be overridden.
struct MaterialPreset {
    std::string name;
    MaterialSpec conductor;
    MaterialSpec substrate;
};

using MaterialLibrary = std::map<std::string, MaterialSpec>;

inline const std::string kVacuum = "vacuum";

const std::vector<MaterialPreset>& builtin_material_presets();
// Throws ConfigError listing the known names.
const MaterialPreset& find_material_preset(const std::string& name);

// Throws ParameterError: dielectric permittivity < 1, negative thickness, ...
void validate(const MaterialSpec& spec);

// Names used for the derived layer materials of a conductor.
std::string oxide_material_name(const MaterialSpec& conductor);
std::string penetration_material_name(const MaterialSpec& conductor);

// vacuum, substrate, conductor, and the conductor's oxide / penetration layer
// materials (penetration layer is a relative permittivity 1 dielectric).
MaterialLibrary library_for(const MaterialPreset& preset);

}  // namespace tlab::fem
