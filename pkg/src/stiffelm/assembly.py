"""Assembly of the linear system ``H beta = T``.

ODE problems contribute one residual row per collocation point and one
boundary row per boundary condition, in that order.  Data fits contribute
one row per sample.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .basis import EncodedBasis, basis_rows, basis_values

RESIDUAL, BOUNDARY, DATA = "residual", "boundary", "data"


@dataclass(frozen=True)
class OdeProblem:
    """``a0*u + a1*u' + a2*u'' = rhs`` on ``[0, 1]`` with Dirichlet conditions.

    ``collocation`` is ``("uniform", n)`` or ``("random", n, seed)``.
    """

    coeffs: tuple[float, float, float]
    rhs: float = 0.0
    boundary_conditions: tuple[tuple[float, float], ...] = ()
    collocation: tuple = ("uniform", 1000)

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if len(coeffs) != 3:
            raise ValueError("coeffs must be (a0, a1, a2)")
        bcs = tuple((float(x), float(v)) for x, v in self.boundary_conditions)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "boundary_conditions", bcs)
        object.__setattr__(self, "collocation", tuple(self.collocation))
        if not any(coeffs):
            raise ValueError("at least one coefficient must be non-zero")
        if len(bcs) != self.order:
            raise ValueError(
                f"an order-{self.order} equation needs {self.order} boundary conditions, got {len(bcs)}")
        for x, _ in bcs:
            if not 0.0 <= x <= 1.0:
                raise ValueError(f"boundary location {x} lies outside [0, 1]")
        arity = {"uniform": 2, "random": 3}.get(self.collocation[0] if self.collocation else None)
        if arity != len(self.collocation):
            raise ValueError(f"collocation must be ('uniform', n) or ('random', n, seed), got {self.collocation}")
        if int(self.collocation[1]) < 1:
            raise ValueError("need at least one collocation point")

    @property
    def order(self) -> int:
        return max(i for i, c in enumerate(self.coeffs) if c != 0)

    @classmethod
    def advection_diffusion(cls, epsilon: float, collocation=("uniform", 1000)) -> "OdeProblem":
        """``u' = epsilon * u''`` with ``u(0) = 0``, ``u(1) = 1``."""
        if epsilon == 0:
            raise ValueError("epsilon must be non-zero")
        return cls((0.0, 1.0, -float(epsilon)), 0.0, ((0.0, 0.0), (1.0, 1.0)), collocation)

    def collocation_points(self) -> np.ndarray:
        n = int(self.collocation[1])
        if self.collocation[0] == "uniform":
            return np.linspace(0.0, 1.0, n)
        rng = np.random.default_rng(self.collocation[2])
        return np.sort(rng.uniform(0.0, 1.0, n))

    def to_dict(self) -> dict:
        return {
            "coeffs": list(self.coeffs),
            "rhs": self.rhs,
            "boundary_conditions": [list(bc) for bc in self.boundary_conditions],
            "collocation": list(self.collocation),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OdeProblem":
        return cls(tuple(d["coeffs"]), d["rhs"], tuple(tuple(bc) for bc in d["boundary_conditions"]),
                   tuple(d["collocation"]))


@dataclass(frozen=True)
class LinearSystem:
    H: np.ndarray = field(repr=False)
    T: np.ndarray = field(repr=False)
    row_kinds: np.ndarray = field(repr=False)
    row_weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.H.shape[0]
        if not (self.T.shape == (n,) and self.row_kinds.shape == (n,) and self.row_weights.shape == (n,)):
            raise ValueError("H, T, row_kinds and row_weights disagree on the number of rows")

    @property
    def shape(self) -> tuple[int, int]:
        return self.H.shape


def assemble_ode(basis: EncodedBasis, problem: OdeProblem) -> LinearSystem:
    a0, a1, a2 = problem.coeffs
    rows = basis_rows(basis, problem.collocation_points())
    residual = a0 * rows.phi
    if a1:
        residual = residual + a1 * rows.dphi
    if a2:
        residual = residual + a2 * rows.d2phi
    n = residual.shape[0]
    bcs = problem.boundary_conditions
    if bcs:
        bx = np.array([x for x, _ in bcs])
        H = np.vstack([residual, basis_values(basis, bx)])
    else:
        H = residual
    T = np.concatenate([np.full(n, float(problem.rhs)), [v for _, v in bcs]])
    kinds = np.array([RESIDUAL] * n + [BOUNDARY] * len(bcs))
    return LinearSystem(H, T, kinds, np.ones(H.shape[0]))


def assemble_fit(basis: EncodedBasis, xs, ys) -> LinearSystem:
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.ndim != 1 or xs.shape != ys.shape:
        raise ValueError(f"xs and ys must be 1-D and equal length, got {xs.shape} and {ys.shape}")
    if xs.size < 1:
        raise ValueError("need at least one sample")
    n = xs.shape[0]
    return LinearSystem(basis_values(basis, xs), ys.copy(), np.array([DATA] * n), np.ones(n))


def apply_row_weights(system: LinearSystem, residual_w: float = 1.0, boundary_w: float = 1.0,
                      data_w: float = 1.0) -> LinearSystem:
    """Scale each row of ``H`` and entry of ``T`` by the weight of its row kind."""
    weights = {RESIDUAL: residual_w, BOUNDARY: boundary_w, DATA: data_w}
    for kind, w in weights.items():
        if not w > 0:
            raise ValueError(f"{kind} weight must be positive, got {w}")
    scale = np.array([weights[k] for k in system.row_kinds], dtype=np.float64)
    return replace(system, H=system.H * scale[:, None], T=system.T * scale,
                   row_weights=system.row_weights * scale)
