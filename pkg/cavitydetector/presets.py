"""Built-in run configurations for the reference parameter sets.

Every preset is plain configuration text and goes through
:func:`parser.parse_config` like a user file. Cutoffs of the heavier
presets are desk-scale; ``--cutoff-l`` and ``--cutoff-n`` raise them to
converged values.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError

ACCELERATIONS = "5e-5, 5e-4, 5e-3, 5e-2, 0.5, 200"


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    text: str


def _preset(name: str, description: str, text: str) -> Preset:
    return Preset(name=name, description=description, text=text.strip() + "\n")


PRESETS: dict[str, Preset] = {
    preset.name: preset
    for preset in (
        _preset(
            "accelerated_ratio",
            "resonant share of P for an accelerated crossing, rho/L = 1/2, "
            "OmegaL = 5.75, 20, 50 (cutoffs N_l = 200, N_n = 1e4)",
            f"""
[run]
scenario = ratio_table
[cavity]
radius_ratios = 0.5
[detector]
gaps = 5.75, 20, 50
initial_states = excited, ground
[trajectory]
kind = uniform_acceleration
values = {ACCELERATIONS}
[cutoffs]
radial = 200
longitudinal = 10000
""",
        ),
        _preset(
            "fibre_bound",
            "lower bound on the l > 1 / l = 1 ratio F against rho/L at v = 0.005, "
            "for OmegaL = 20 and OmegaL resonant with (1, 1) "
            "(converged values need N_l = 250, N_n = 1e8)",
            """
[run]
scenario = fibre
[cavity]
radius_ratios = 0.5, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6
[detector]
gaps = 20, resonant
initial_states = ground
[trajectory]
kind = constant_velocity
values = 0.005
[cutoffs]
radial = 50
longitudinal = 100000
[numerics]
extrapolate = true
""",
        ),
        _preset(
            "reduced_acceleration",
            "1+1D resonant share against aL for four (mL, OmegaL) pairs, closest mode",
            f"""
[run]
scenario = table_1d
[detector]
gaps = 3.14, 3.95, 5.74, 48.19
initial_states = excited, ground
[trajectory]
kind = uniform_acceleration
values = {ACCELERATIONS}
[cutoffs]
longitudinal = 2000
[reduced]
masses = 0, 2.41, 4.81, 48.1
selection = closest
""",
        ),
        _preset(
            "reduced_gap",
            "1+1D resonant share against OmegaL at aL = 5e-5, closest mode",
            """
[run]
scenario = table_1d
[detector]
gaps = 3.14, 10, 50, 100, 3.95, 10, 50, 100, 5.74, 10, 50, 100, 48.19, 49, 70, 111
initial_states = excited, ground
[trajectory]
kind = uniform_acceleration
values = 5e-5
[cutoffs]
longitudinal = 2000
[reduced]
masses = 0, 0, 0, 0, 2.41, 2.41, 2.41, 2.41, 4.81, 4.81, 4.81, 4.81, 48.09, 48.09, 48.09, 48.09
selection = closest
""",
        ),
        _preset(
            "reduced_gap_window",
            "1+1D resonant share against OmegaL at aL = 5e-5, 20% window",
            """
[run]
scenario = table_1d
[detector]
gaps = 3.14, 10, 50, 100, 3.95, 10, 50, 100, 5.74, 10, 50, 100, 48.19, 49, 70, 111
initial_states = ground
[trajectory]
kind = uniform_acceleration
values = 5e-5
[cutoffs]
longitudinal = 2000
[numerics]
threshold = 0.2
[reduced]
masses = 0, 0, 0, 0, 2.41, 2.41, 2.41, 2.41, 4.81, 4.81, 4.81, 4.81, 48.1, 48.1, 48.1, 48.1
selection = window
""",
        ),
        _preset(
            "accelerated_spectrum",
            "per-mode N and E for accelerated crossings, rho/L = 1/2, OmegaL = 20",
            """
[run]
scenario = spectrum
[cavity]
radius_ratios = 0.5
[detector]
gaps = 20
initial_states = excited, ground
[trajectory]
kind = uniform_acceleration
values = 5e-5, 0.05, 0.5, 200
[cutoffs]
radial = 20
longitudinal = 400
""",
        ),
        _preset(
            "matched_spectrum",
            "per-mode N and E for constant-velocity crossings matched to accelerations 5e-5 to 200",
            """
[run]
scenario = spectrum
[cavity]
radius_ratios = 0.5
[detector]
gaps = 20
initial_states = excited, ground
[trajectory]
kind = constant_velocity
values = 5e-5, 0.05, 0.5, 200
matched = true
[cutoffs]
radial = 20
longitudinal = 400
""",
        ),
        _preset(
            "galilean_error",
            "relative error of the Galilean approximation per mode, rho/L = 1/2, OmegaL = 50",
            """
[run]
scenario = nr_error
[cavity]
radius_ratios = 0.5
[detector]
gaps = 50
initial_states = excited, ground
[trajectory]
kind = uniform_acceleration
values = 5e-5, 5e-3, 0.05
[cutoffs]
radial = 10
longitudinal = 20
""",
        ),
        _preset(
            "velocity_ratio",
            "excited-state resonant share against constant velocity, rho/L = 1/2, OmegaL = 20",
            """
[run]
scenario = ratio_table
[cavity]
radius_ratios = 0.5
[detector]
gaps = 20
initial_states = excited
[trajectory]
kind = constant_velocity
values = 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 0.99
[cutoffs]
radial = 100
longitudinal = 2000
""",
        ),
        _preset(
            "thin_cavity_energy",
            "per-branch energies of thin cavities next to the massless 1+1D energies",
            """
[run]
scenario = fibre_energy
sweep = paired
[cavity]
radius_ratios = 0.02, 0.006666666666666667, 0.02
[detector]
gaps = 120.2, 360.7, 120.2
initial_states = excited, ground
[trajectory]
kind = uniform_acceleration
values = 5e-5, 5e-5, 0.5
[cutoffs]
radial = 3
longitudinal = 200
""",
        ),
        _preset(
            "parameter_space",
            "resonant share across extreme regimes of OmegaL, aL and rho/L",
            """
[run]
scenario = ratio_table
sweep = paired
[cavity]
radius_ratios = 5e5, 1e-3, 0.5, 0.5, 0.5, 5e-4, 1e3, 1e3
[detector]
gaps = 2e-5, 20, 50, 50, 50, 1e4, 10, 10
initial_states = excited, ground
[trajectory]
kind = uniform_acceleration
values = 5e-11, 5e-5, 5e-5, 5e-4, 5e-3, 5e-2, 5e-5, 5e-4
[cutoffs]
radial = 200, 200, 200, 200, 200, 200, 4000, 4000
longitudinal = 10000
""",
        ),
    )
}

# Short names of the reference parameter sets
ALIASES: dict[str, str] = {
    "table1": "accelerated_ratio",
    "table3": "fibre_bound",
    "table4": "reduced_acceleration",
    "table5": "reduced_gap",
    "table6": "reduced_gap_window",
    "fig2": "accelerated_spectrum",
    "fig3": "matched_spectrum",
    "fig4": "galilean_error",
    "fig5": "velocity_ratio",
    "fig6": "thin_cavity_energy",
}

PRESETS.update(
    {
        alias: Preset(name=alias, description=f"same as {target}", text=PRESETS[target].text)
        for alias, target in ALIASES.items()
    }
)


def get_preset(name: str) -> Preset:
    """Look up a preset by name.

    Raises:
        ConfigError: If no preset has that name
    """
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r} (available: {', '.join(PRESETS)})"
        ) from None
