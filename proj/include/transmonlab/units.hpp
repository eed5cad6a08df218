#pragma once

// SI constants (CODATA 2018 exact values where defined).
namespace tlab::units {

inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double planck = 6.62607015e-34;              // J s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m

inline constexpr double um = 1e-6;  // metres per micrometre
inline constexpr double nm = 1e-9;
inline constexpr double ghz = 1e9;

}  // namespace tlab::units
