"""Beta wavelet filter bank over the normalized Laplacian.

A filter of order (p, q) is the polynomial
``(p+q+1)!/(2 p! q!) * (L/2)^p (I - L/2)^q`` applied to node features, always
matrix-free through repeated Laplacian matvecs. The bank stacks the C+1
filters with p+q=C.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .spectral import laplacian_matmat, laplacian_operator

MAX_ORDER = 12  # factorial overflow guard; practical C <= 3


def beta_coefficient(p: int, q: int) -> float:
    """1 / (2 B(p+1, q+1)) as an exact integer ratio converted to float."""
    if p < 0 or q < 0:
        raise ValueError("p and q must be nonnegative")
    if p + q > MAX_ORDER:
        raise ValueError(f"p + q must be <= {MAX_ORDER}, got {p + q}")
    return math.factorial(p + q + 1) / (2 * math.factorial(p) * math.factorial(q))


def apply_wavelet(g: Graph, X: np.ndarray, p: int, q: int) -> np.ndarray:
    """coefficient * (L/2)^p (I - L/2)^q X, right-to-left so the float output
    is deterministic (the factors commute)."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] != g.n:
        raise ValueError(f"feature rows {X.shape[0]} != node count {g.n}")
    coeff = beta_coefficient(p, q)
    op = laplacian_operator(g)
    Y = X.copy()
    for _ in range(q):
        Y = Y - 0.5 * laplacian_matmat(op, Y)
    for _ in range(p):
        Y = 0.5 * laplacian_matmat(op, Y)
    return coeff * Y


@dataclass(frozen=True)
class WaveletBankOutput:
    C: int
    blocks: list  # C+1 matrices, ordered W_{0,C}, W_{1,C-1}, ..., W_{C,0}

    @property
    def concatenated(self) -> np.ndarray:
        return np.concatenate(self.blocks, axis=1)

    @property
    def orders(self):
        return [(p, self.C - p) for p in range(self.C + 1)]


def wavelet_bank(g: Graph, X: np.ndarray, C: int) -> WaveletBankOutput:
    """All C+1 filters with p+q=C applied to X; concatenated width d*(C+1)."""
    if not 1 <= C <= MAX_ORDER:
        raise ValueError(f"C must be in [1, {MAX_ORDER}], got {C}")
    blocks = [apply_wavelet(g, X, p, C - p) for p in range(C + 1)]
    return WaveletBankOutput(C=C, blocks=blocks)
