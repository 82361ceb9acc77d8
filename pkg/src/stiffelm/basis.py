"""Frozen random first layer with optional shifted Gaussian encoding.

Each hidden node ``i`` computes

    z_i(x) = w_i * x * g_i(x) + b_i,    g_i(x) = exp(-(x - mu_i)**2 / d)

and the network output is ``sum_i beta_i * phi(z_i(x))``.  With encoding
``"none"`` the factor ``g_i`` is identically one and this is a plain ELM.
First and second input-derivatives are computed analytically so that
differential operators can be applied to the basis exactly.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

# exp() of anything below this is subnormal or zero in float64
UNDERFLOW_EXPONENT = -745.0

ENCODINGS = ("none", "gaussian")
ACTIVATIONS = ("tanh", "sine")
DISTRIBUTIONS = ("uniform", "normal")


@dataclass(frozen=True)
class ElmConfig:
    """Hyperparameters that fully determine an :class:`EncodedBasis`.

    ``weight_params`` is ``(lo, hi)`` for ``"uniform"`` and ``(mean, std)``
    for ``"normal"``; weights and biases are drawn from the same law.
    """

    nodes: int = 1000
    encoding: str = "gaussian"
    filter_width: float = 1e-4
    activation: str = "tanh"
    weight_dist: str = "uniform"
    weight_params: tuple[float, float] = (-1.0, 1.0)
    seed: int = 1

    def __post_init__(self):
        object.__setattr__(self, "weight_params", tuple(float(p) for p in self.weight_params))
        if int(self.nodes) != self.nodes or self.nodes < 2:
            raise ValueError(f"nodes must be an integer >= 2, got {self.nodes}")
        if self.encoding not in ENCODINGS:
            raise ValueError(f"unknown encoding {self.encoding!r}; expected one of {ENCODINGS}")
        if self.encoding == "gaussian" and not self.filter_width > 0:
            raise ValueError(f"filter_width must be positive, got {self.filter_width}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}; expected one of {ACTIVATIONS}")
        if self.weight_dist not in DISTRIBUTIONS:
            raise ValueError(f"unknown weight_dist {self.weight_dist!r}; expected one of {DISTRIBUTIONS}")
        if len(self.weight_params) != 2 or not all(np.isfinite(self.weight_params)):
            raise ValueError("weight_params must be two finite numbers")
        lo, hi = self.weight_params
        if self.weight_dist == "uniform" and not lo < hi:
            raise ValueError(f"uniform bounds need lo < hi, got {self.weight_params}")
        if self.weight_dist == "normal" and not hi > 0:
            raise ValueError(f"normal std must be positive, got {hi}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["weight_params"] = list(self.weight_params)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ElmConfig":
        return cls(**{**d, "weight_params": tuple(d["weight_params"])})


@dataclass(frozen=True)
class EncodedBasis:
    config: ElmConfig
    weights: np.ndarray = field(repr=False)
    biases: np.ndarray = field(repr=False)
    centers: np.ndarray = field(repr=False)

    @property
    def nodes(self) -> int:
        return self.weights.shape[0]


class BasisRow(NamedTuple):
    phi: np.ndarray
    dphi: np.ndarray
    d2phi: np.ndarray


def build_basis(config: ElmConfig) -> EncodedBasis:
    rng = np.random.default_rng(config.seed)
    a, b = config.weight_params
    if config.weight_dist == "uniform":
        weights = rng.uniform(a, b, config.nodes)
        biases = rng.uniform(a, b, config.nodes)
    else:
        weights = rng.normal(a, b, config.nodes)
        biases = rng.normal(a, b, config.nodes)
    centers = np.arange(config.nodes) / (config.nodes - 1)
    for arr in (weights, biases, centers):
        arr.setflags(write=False)
    return EncodedBasis(config, weights, biases, centers)


def encoding_value(x, center, d: float):
    """``exp(-(x - center)**2 / d)``, exactly zero once the exponent drops below -745."""
    expo = -np.square(np.asarray(x, dtype=np.float64) - center) / d
    out = np.where(expo < UNDERFLOW_EXPONENT, 0.0, np.exp(np.maximum(expo, UNDERFLOW_EXPONENT)))
    return out[()] if out.ndim == 0 else out


def _encoding_terms(basis: EncodedBasis, x: np.ndarray):
    """Encoding factor and its first two derivatives, shape ``(len(x), nodes)``."""
    if basis.config.encoding == "none":
        g = np.ones((x.shape[0], basis.nodes))
        return g, np.zeros_like(g), np.zeros_like(g)
    d = basis.config.filter_width
    r = x[:, None] - basis.centers
    g = encoding_value(r, 0.0, d)
    g1 = (-2.0 / d) * r * g
    g2 = (-2.0 / d + 4.0 * r * r / (d * d)) * g
    return g, g1, g2


def _preactivations(basis: EncodedBasis, xs: np.ndarray):
    x = np.asarray(xs, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise ValueError("inputs must be finite")
    g, g1, g2 = _encoding_terms(basis, x)
    xc = x[:, None]
    w = basis.weights
    z = w * xc * g + basis.biases
    dz = w * (g + xc * g1)
    d2z = w * (2.0 * g1 + xc * g2)
    return z, dz, d2z


def preactivation(basis: EncodedBasis, x: float, node: int) -> tuple[float, float, float]:
    """Pre-activation of one node and its first two derivatives in ``x``."""
    if not 0 <= node < basis.nodes:
        raise IndexError(f"node {node} out of range for {basis.nodes} nodes")
    z, dz, d2z = _preactivations(basis, np.array([x]))
    return float(z[0, node]), float(dz[0, node]), float(d2z[0, node])


def _activate(name: str, z: np.ndarray):
    if name == "tanh":
        p = np.tanh(z)
        p1 = 1.0 - p * p
        return p, p1, -2.0 * p * p1
    p = np.sin(z)
    return p, np.cos(z), -p


def basis_rows(basis: EncodedBasis, xs) -> BasisRow:
    """Vectorised :func:`basis_row`: each field has shape ``(len(xs), nodes)``."""
    z, dz, d2z = _preactivations(basis, xs)
    p, p1, p2 = _activate(basis.config.activation, z)
    return BasisRow(p, p1 * dz, p2 * dz * dz + p1 * d2z)


def basis_values(basis: EncodedBasis, xs, chunk: int = 2048) -> np.ndarray:
    """Only the basis values ``phi``, computed in row chunks to bound memory."""
    x = np.asarray(xs, dtype=np.float64).reshape(-1)
    out = np.empty((x.shape[0], basis.nodes))
    for start in range(0, x.shape[0], chunk):
        xc = x[start:start + chunk]
        g, _, _ = _encoding_terms(basis, xc)
        z = basis.weights * xc[:, None] * g + basis.biases
        out[start:start + chunk] = np.tanh(z) if basis.config.activation == "tanh" else np.sin(z)
    return out


def basis_row(basis: EncodedBasis, x: float) -> BasisRow:
    rows = basis_rows(basis, np.array([x], dtype=np.float64))
    return BasisRow(rows.phi[0], rows.dphi[0], rows.d2phi[0])


def forward(basis: EncodedBasis, beta, x: float) -> float:
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (basis.nodes,):
        raise ValueError(f"beta must have length {basis.nodes}, got shape {beta.shape}")
    return float(basis_row(basis, x).phi @ beta)
