"""Spectral flows and orbit diagnostics on the Heisenberg group and the Hardy space."""

from ._core import (
    ConfigError,
    FrequencyGrid,
    HardyFunction,
    HeisOrbitFit,
    NumericalError,
    OrbitFit,
    RadialField,
    RadialGridSpec,
    RadialSpectralGrid,
    SymmetryElement,
    __version__,
    apply_symmetry,
    compose,
    cubic_projection,
    delta_functional,
    distance_to_orbit,
    evolve_limit,
    gap_closed_form,
    ground_state_profile,
    heis,
    l4norm4,
    oracle_suite,
    read_hardy,
    read_radial,
    sobolev2,
    solve_ground_state,
    synthesize,
    write_hardy,
    write_radial,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
