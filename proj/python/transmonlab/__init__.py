"""Transmon spectra, chip-level sweeps and 2D electrostatics of coplanar pads."""

from ._core import (
    ConfigError,
    GeometryError,
    MeshError,
    NumericalError,
    ParameterError,
    SetupError,
    TransmonlabError,
    __version__,
    anharmonicity,
    charge_dispersion,
    chip_presets,
    ec_from_capacitance,
    normalized_bands,
    pad_solution,
    qubit_frequency,
    run_command,
    solve,
    sweep,
    transition_frequency,
)

__all__ = [
    "ConfigError",
    "GeometryError",
    "MeshError",
    "NumericalError",
    "ParameterError",
    "SetupError",
    "TransmonlabError",
    "__version__",
    "anharmonicity",
    "charge_dispersion",
    "chip_presets",
    "ec_from_capacitance",
    "normalized_bands",
    "pad_solution",
    "qubit_frequency",
    "run_command",
    "solve",
    "sweep",
    "transition_frequency",
]
