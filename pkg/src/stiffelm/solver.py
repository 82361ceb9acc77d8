"""Train / predict / evaluate pipeline and the reference problems."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import linalg
from .assembly import LinearSystem, OdeProblem, assemble_fit, assemble_ode
from .basis import ElmConfig, EncodedBasis, basis_values, build_basis

DEFAULT_EVAL_POINTS = 10_001


@dataclass(frozen=True)
class Metrics:
    mae: float
    mse: float
    max_abs_err: float

    def to_dict(self) -> dict:
        return {"mae": self.mae, "mse": self.mse, "max_abs_err": self.max_abs_err}


@dataclass(frozen=True)
class ConditioningReport:
    rank: int
    raw_condition: float
    effective_condition: float
    log10_det_proxy: float
    spectrum: linalg.SingularSpectrum = field(repr=False)
    sparsity: float
    weight_stats: tuple[float, float]
    residual_stats: tuple[float, float]

    def summary(self) -> dict:
        """Scalar fields only; the spectrum is persisted separately."""
        return {
            "rank": self.rank,
            "raw_condition": self.raw_condition,
            "effective_condition": self.effective_condition,
            "log10_det_proxy": self.log10_det_proxy,
            "rank_tolerance": self.spectrum.rank_tolerance,
            "sparsity": self.sparsity,
            "weight_mean": self.weight_stats[0],
            "weight_std": self.weight_stats[1],
            "residual_mean": self.residual_stats[0],
            "residual_std": self.residual_stats[1],
        }


@dataclass
class SolveResult:
    beta: np.ndarray = field(repr=False)
    xs: np.ndarray = field(repr=False)
    predictions: np.ndarray = field(repr=False)
    metrics: Optional[Metrics]
    report: ConditioningReport
    train_seconds: float
    system: Optional[LinearSystem] = field(default=None, repr=False)
    exact: Optional[np.ndarray] = field(default=None, repr=False)


def conditioning_report(system: LinearSystem, beta: np.ndarray, spectrum: linalg.SingularSpectrum) -> ConditioningReport:
    raw, effective = linalg.condition_number(spectrum)
    residual = system.T - system.H @ beta
    return ConditioningReport(
        rank=linalg.numerical_rank(spectrum),
        raw_condition=raw,
        effective_condition=effective,
        log10_det_proxy=linalg.log10_det_proxy(spectrum),
        spectrum=spectrum,
        sparsity=float(np.count_nonzero(system.H == 0) / system.H.size),
        weight_stats=(float(beta.mean()), float(beta.std())),
        residual_stats=(float(residual.mean()), float(residual.std())),
    )


def train(system: LinearSystem, rank_tol_factor: float = 1.0):
    """Solve ``H beta = T`` by pseudoinverse.

    Returns ``(beta, report, train_seconds)``; the timing covers the SVD and
    the solve, not assembly or diagnostics.
    """
    start = time.perf_counter()
    u, spectrum, v = linalg.svd(system.H, rank_tol_factor)
    beta = linalg.solve_from_svd(u, spectrum, v, system.T)
    seconds = time.perf_counter() - start
    return beta, conditioning_report(system, beta, spectrum), seconds


def predict(basis: EncodedBasis, beta, xs) -> np.ndarray:
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (basis.nodes,):
        raise ValueError(f"beta must have length {basis.nodes}, got shape {beta.shape}")
    return basis_values(basis, xs) @ beta


def evaluate(predictions, oracle: Callable, xs) -> Metrics:
    pred = np.asarray(predictions, dtype=np.float64)
    ref = np.asarray(oracle(np.asarray(xs, dtype=np.float64)), dtype=np.float64)
    if pred.shape != ref.shape:
        raise ValueError(f"predictions {pred.shape} and oracle values {ref.shape} differ in shape")
    err = pred - ref
    return Metrics(float(np.mean(np.abs(err))), float(np.mean(err * err)), float(np.max(np.abs(err))))


def exact_ade_solution(epsilon: float, x):
    """Exact solution of ``u' = epsilon u''``, ``u(0)=0``, ``u(1)=1``.

    For positive ``epsilon`` the closed form is rewritten as
    ``exp((x-1)/eps) * (1 - exp(-x/eps)) / (1 - exp(-1/eps))`` so nothing
    overflows however small ``epsilon`` gets.
    """
    if epsilon == 0:
        raise ValueError("epsilon must be non-zero")
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(under="ignore"):
        if epsilon > 0:
            u = np.exp((x - 1.0) / epsilon) * (-np.expm1(-x / epsilon)) / (-np.expm1(-1.0 / epsilon))
        else:
            u = np.expm1(x / epsilon) / np.expm1(1.0 / epsilon)
    return u[()] if u.ndim == 0 else u


def multiscale_target(x):
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(under="ignore"):
        return np.sin(10 * x) + 0.2 * np.cos(20 * x + 50 * x * x) + np.exp(-100 * x * x) * np.sin(200 * x)


def solve_ode(config: ElmConfig, problem: OdeProblem, oracle: Optional[Callable] = None,
              eval_points: int = DEFAULT_EVAL_POINTS, rank_tol_factor: float = 1.0,
              basis: Optional[EncodedBasis] = None) -> SolveResult:
    """Assemble, train and evaluate on a dense uniform grid distinct from the collocation set."""
    basis = basis if basis is not None else build_basis(config)
    system = assemble_ode(basis, problem)
    beta, report, seconds = train(system, rank_tol_factor)
    xs = np.linspace(0.0, 1.0, eval_points)
    pred = predict(basis, beta, xs)
    metrics = exact = None
    if oracle is not None:
        exact = np.asarray(oracle(xs), dtype=np.float64)
        metrics = evaluate(pred, oracle, xs)
    return SolveResult(beta, xs, pred, metrics, report, seconds, system, exact)


def solve_ade(config: ElmConfig, epsilon: float, collocation=("uniform", 1000), **kwargs) -> SolveResult:
    problem = OdeProblem.advection_diffusion(epsilon, collocation)
    return solve_ode(config, problem, oracle=lambda x: exact_ade_solution(epsilon, x), **kwargs)


def fit_samples(config: ElmConfig, xs, ys, rank_tol_factor: float = 1.0,
                basis: Optional[EncodedBasis] = None) -> SolveResult:
    """Least-squares fit of samples ``(xs, ys)``; metrics are measured on the samples themselves."""
    basis = basis if basis is not None else build_basis(config)
    system = assemble_fit(basis, xs, ys)
    beta, report, seconds = train(system, rank_tol_factor)
    pred = system.H @ beta
    ys = system.T
    err = pred - ys
    metrics = Metrics(float(np.mean(np.abs(err))), float(np.mean(err * err)), float(np.max(np.abs(err))))
    return SolveResult(beta, np.asarray(xs, dtype=np.float64), pred, metrics, report, seconds, system, ys)


@dataclass
class SweepRow:
    epsilon: float
    mae: float = np.nan
    rank: int = -1
    raw_condition: float = np.nan
    effective_condition: float = np.nan
    error: Optional[str] = None
    result: Optional[SolveResult] = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.error is None


def sweep_epsilon(config: ElmConfig, epsilons, collocation=("uniform", 1000),
                  rank_tol_factor: float = 1.0, eval_points: int = DEFAULT_EVAL_POINTS,
                  keep_results: bool = False) -> list[SweepRow]:
    """One ADE solve per epsilon with a fixed architecture; failures are recorded, not raised."""
    basis = build_basis(config)
    rows = []
    for eps in epsilons:
        eps = float(eps)
        row = SweepRow(eps)
        try:
            if not eps > 0:
                raise ValueError(f"epsilon must be positive, got {eps}")
            res = solve_ade(config, eps, collocation, eval_points=eval_points,
                            rank_tol_factor=rank_tol_factor, basis=basis)
            if not np.isfinite(res.metrics.mae):
                raise FloatingPointError("non-finite error metric")
        except (ValueError, FloatingPointError, linalg.DecompositionError) as exc:
            row.error = f"{type(exc).__name__}: {exc}"
        else:
            row.mae = res.metrics.mae
            row.rank = res.report.rank
            row.raw_condition = res.report.raw_condition
            row.effective_condition = res.report.effective_condition
            if keep_results:
                res.system = None
                row.result = res
        rows.append(row)
    return rows
