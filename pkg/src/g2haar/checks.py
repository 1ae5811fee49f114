"""Verification suite shared by the ``verify`` command and the tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from g2haar.algebra import build_structure_constants, get_backend
from g2haar.geometry import (
    CONJUGATION_IDENTITIES,
    analytic_sigma_current,
    base_metric_at,
    conjugation_residuals,
    numeric_sigma_current,
    round_s6_metric_at,
    s5_brace_metric,
    s5_embed,
    s5_pullback_metric,
)
from g2haar.parametrization import ALPHA_RANGES

DEFAULT_TOLERANCES = {
    "jacobi": 1e-12,
    "antisymmetry": 0.0,
    "su3_closure": 0.0,
    "c9_centralizer": 0.0,
    "commutator": 1e-10,
    "gram": 1e-10,
    "generator_antisymmetry": 1e-12,
    "conjugation": 1e-10,
    "current": 1e-6,
    "s6_metric": 1e-8,
    "s5_norm": 1e-14,
    "s5_pullback": 1e-6,
    "moments_sigma": 3.0,
    "invariance_z": 4.0,
    "metric_spread": 1e-4,
    "volume": 1e-10,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.value)) and self.value <= self.tolerance

    def as_dict(self) -> dict:
        return {"check": self.name, "value": self.value, "tolerance": self.tolerance,
                "pass": self.passed}


def random_alphas(count: int, seed: int, margin: float = 0.0) -> np.ndarray:
    lo, hi = np.array(ALPHA_RANGES).T
    u = np.random.default_rng(seed).uniform(margin, 1.0 - margin, size=(count, 6))
    return lo + (hi - lo) * u


def current_oracle_residual(count: int = 100, seed: int = 0, h: float = 1e-6, backend=None) -> float:
    worst = 0.0
    for a in random_alphas(count, seed):
        diff = numeric_sigma_current(a, h, backend).J - analytic_sigma_current(a).J
        worst = max(worst, float(np.abs(diff).max()))
    return worst


def s6_metric_residual(count: int = 200, seed: int = 0) -> float:
    return max(float(np.abs(base_metric_at(a).M - round_s6_metric_at(a).M).max())
               for a in random_alphas(count, seed))


def s5_residuals(count: int = 1000, seed: int = 0, h: float = 1e-6) -> tuple[float, float]:
    alphas = random_alphas(count, seed)
    z = s5_embed(alphas)
    norm = float(np.abs(np.sum(np.abs(z) ** 2, axis=-1) - 1.0).max())
    pull = max(float(np.abs(s5_pullback_metric(a, h) - s5_brace_metric(a)).max())
               for a in alphas[:200])
    return norm, pull


def verify_suite(backend="adjoint", seed: int = 0, step: float = 1e-6,
                 tolerances: dict | None = None) -> list[CheckResult]:
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    sc = build_structure_constants()
    f = sc.f
    b = get_backend(backend)

    out = [
        CheckResult("structure_antisymmetry", sc.antisymmetry_residual(), tol["antisymmetry"]),
        CheckResult("jacobi", sc.jacobi_residual(), tol["jacobi"]),
        CheckResult("su3_closure", float(np.abs(f[:8, :8, 8:]).max()), tol["su3_closure"]),
        CheckResult("c9_centralizer", float(np.abs(f[8, :3, :]).max()), tol["c9_centralizer"]),
        CheckResult(f"{b.kind}_generator_antisymmetry",
                    float(np.abs(b.generators + b.generators.transpose(0, 2, 1)).max()),
                    tol["generator_antisymmetry"]),
        CheckResult(f"{b.kind}_commutator", b.commutator_residual(f)[0], tol["commutator"]),
        CheckResult(f"{b.kind}_gram", float(np.abs(b.gram() - np.eye(14)).max()), tol["gram"]),
    ]
    conj = conjugation_residuals(backend=b)
    out += [CheckResult(f"conjugation[{name}]", conj[name], tol["conjugation"])
            for name in CONJUGATION_IDENTITIES]
    out.append(CheckResult("current_oracle", current_oracle_residual(100, seed, step, b), tol["current"]))
    out.append(CheckResult("s6_metric", s6_metric_residual(200, seed), tol["s6_metric"]))
    norm, pull = s5_residuals(1000, seed, step)
    out.append(CheckResult("s5_norm", norm, tol["s5_norm"]))
    out.append(CheckResult("s5_pullback", pull, tol["s5_pullback"]))
    return out
