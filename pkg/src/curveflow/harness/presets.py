"""Built-in experiment catalog."""

from __future__ import annotations

import math

from .config import ConfigError, ExperimentConfig

RUN_CHECKS = ["area_conservation", "length_monotonicity", "rotation_conservation"]
IMMORTAL_CHECKS = RUN_CHECKS + [
    {"name": "expected_status", "options": {"expected": ["converged"]}},
    "dissipation_identity", "defect_decay", "kosc_decay", "centroid_convergence",
    "immortal_isoperimetry", "inequalities",
]
BLOWUP_CHECKS = RUN_CHECKS + [
    {"name": "expected_status", "options": {"expected": ["blown_up"]}},
    "blowup_exponent", "blowup_consistency",
]

# Symmetric curves are scaled so that the limiting N-fold circle has radius 1.
UNIT_DOUBLE = 4 * math.pi


def _figure_eight(m: int) -> ExperimentConfig:
    return ExperimentConfig(
        name=f"blowup_figure_eight_m{m}", generator="figure_eight", M=256,
        flow={"m": m, "t_end": 10.0}, log_every=0.01, checks=list(BLOWUP_CHECKS))


def preset_catalog() -> list[ExperimentConfig]:
    return [
        ExperimentConfig(
            name="stationary_circle", generator="circle",
            generator_params={"N": 2, "r": 1.0}, M=256,
            # zero thresholds switch off convergence so the drift is measured up to t_end
            flow={"m": 0, "t_end": 1.0, "converge_kosc": 0.0, "converge_speed": 0.0},
            log_every=0.1,
            checks=RUN_CHECKS + ["stationarity", "inequalities",
                                 {"name": "expected_status", "options": {"expected": ["reached_t_end"]}}]),
        ExperimentConfig(
            name="circularity_acsf_ellipse", generator="ellipse",
            generator_params={"a": 2.0, "b": 1.0}, M=256,
            flow={"m": 0, "t_end": 20.0}, log_every=0.01, symmetry=[1, 2],
            checks=IMMORTAL_CHECKS + ["symmetry_preservation"]),
        ExperimentConfig(
            name="circularity_sdf_symmetric", generator="al_symmetric",
            generator_params={"sym": [2, 3], "eps": 0.05, "scale": UNIT_DOUBLE}, M=256,
            flow={"m": 1, "t_end": 30.0}, log_every=0.01, symmetry=[2, 3],
            checks=IMMORTAL_CHECKS + ["symmetry_preservation"]),
        ExperimentConfig(
            name="circularity_m2_symmetric", generator="al_symmetric",
            generator_params={"sym": [2, 3], "eps": 0.05, "scale": UNIT_DOUBLE}, M=256,
            flow={"m": 2, "t_end": 30.0}, log_every=0.01, symmetry=[2, 3],
            checks=IMMORTAL_CHECKS + ["symmetry_preservation"]),
        _figure_eight(0),
        _figure_eight(1),
        _figure_eight(2),
        ExperimentConfig(
            name="blowup_limacon_m0", generator="limacon", generator_params={"b": 0.5},
            # the inner loop needs M = 1024 to stay resolved up to max|k| L0 = 200
            M=1024, flow={"m": 0, "t_end": 10.0, "blowup_kmax": 200.0}, log_every=0.001,
            checks=list(BLOWUP_CHECKS)),
        ExperimentConfig(
            name="blowup_zero_area_trefoil_m1", generator="zero_area_symmetric",
            generator_params={"sym": [2, 3]}, M=256, flow={"m": 1, "t_end": 1.0},
            log_every=1e-7, symmetry=[2, 3],
            checks=BLOWUP_CHECKS + ["symmetry_preservation"]),
        ExperimentConfig(
            name="inequality_property_suite", generator="perturbed_circle",
            generator_params={"N": 1, "modes": [[2, 0.1], [3, 0.07]]}, M=256,
            flow={"m": 0, "t_end": 0.05}, log_every=0.01, seed=20240901,
            checks=["inequality_suite", "inequalities"]),
        ExperimentConfig(
            name="identity_crosscheck_suite", generator="ellipse",
            generator_params={"a": 2.0, "b": 1.0}, M=256,
            flow={"m": 0, "t_end": 1.0}, log_every=0.01,
            checks=RUN_CHECKS + ["dissipation_identity", "kosc_identity", "kosc_identity_suite"]),
        ExperimentConfig(
            name="symmetry_preservation", generator="al_symmetric",
            generator_params={"sym": [1, 2], "eps": 0.2, "scale": 2 * math.pi}, M=256,
            flow={"m": 1, "t_end": 20.0}, log_every=0.01, symmetry=[1, 2],
            checks=RUN_CHECKS + ["symmetry_preservation", "immortal_isoperimetry",
                                 {"name": "expected_status", "options": {"expected": ["converged"]}}]),
        ExperimentConfig(
            name="centroid_perturbed_circle", generator="perturbed_circle",
            generator_params={"N": 1, "modes": [[2, 0.1], [3, 0.07]]}, M=256,
            flow={"m": 0, "t_end": 40.0}, log_every=0.01,
            checks=IMMORTAL_CHECKS),
    ]


def preset_names() -> list[str]:
    return [c.name for c in preset_catalog()]


def get_preset(name: str) -> ExperimentConfig:
    for c in preset_catalog():
        if c.name == name:
            return c
    raise ConfigError(f"unknown preset {name!r}; known: {preset_names()}")
