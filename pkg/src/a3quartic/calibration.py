"""Frozen residual gates.

The implied constants of the summation lemmas are not known, so each gate
is an empirical constant: 1.5 times the largest normalized residual seen on
a calibration set, rounded up to two significant figures.  Validation runs
on a disjoint set.  The rule is the same for every gate.
"""
from dataclasses import dataclass

MARGIN = 1.5


@dataclass(frozen=True)
class Gate:
    name: str
    bound: float
    calibration_max: float
    calibrated_on: str
    validated_on: str


GATES = {
    "lemma12": Gate(
        "lemma12", 0.22, 0.1454,
        "a, b <= 20; X in {1e2, 1e3, 1e4}; psi and psi', all and even n; delta = 1/2",
        "20 < a, b <= 50, same X and variants (observed max 0.187); weighted sums "
        "with g in {1, 1/t, t^-1/2} on [1, X] and [X/2, X]"),
    "lemma_inter": Gate(
        "lemma_inter", 1.6, 1.0143,
        "inter_suite('calibration'): 40 sampled eta' at B in {1e3, 1e4}",
        "inter_suite('validation'): sampled eta' at B in {1e4, 1e5} plus fixed cases"),
    "sum_eta7": Gate(
        "sum_eta7", 0.20, 0.1301,
        "sum7_suite('calibration'): B in {1e4, 1e5}",
        "sum7_suite('validation'): B in {1e5, 1e6}"),
    "sum_eta6": Gate(
        "sum_eta6", 0.20, 0.1309,
        "sum6_suite('calibration'): B in {1e4, 1e5}",
        "sum6_suite('validation'): B in {1e5, 1e6}"),
}

SUITE_GATE = {"inter": "lemma_inter", "sum7": "sum_eta7", "sum6": "sum_eta6"}
