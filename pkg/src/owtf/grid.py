"""Phase-space grid arithmetic, weights and weighted mixed norms on Z_N x Z_N.

Phase fields are ``(N, N)`` arrays indexed ``F[k, l]`` with ``k`` the time
index (inner, L^p) and ``l`` the frequency index (outer, L^q).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, InvalidGridError, SpecError

__all__ = [
    "DEFAULT_TOL",
    "PhaseGrid",
    "WeightGrid",
    "MixedNormParams",
    "SubmultiplicativeCheck",
    "centered_rep",
    "unit_weight",
    "polynomial_weight",
    "parse_weight",
    "check_submultiplicative",
    "moderate_constant",
    "moderate_constant_pair",
    "mixed_norm",
    "conjugate_exponent",
    "parse_exponent",
    "translate",
    "reflect",
    "cyclic_convolve",
]

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-12

SUBMULTIPLICATIVE = "submultiplicative-candidate"
MODERATE = "moderate-candidate"


@dataclass(frozen=True)
class PhaseGrid:
    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise InvalidGridError(f"grid side must be an integer >= 2, got {self.N!r}")

    @property
    def odd(self) -> bool:
        return self.N % 2 == 1

    def add(self, z1, z2):
        return ((z1[0] + z2[0]) % self.N, (z1[1] + z2[1]) % self.N)

    def sub(self, z1, z2):
        return ((z1[0] - z2[0]) % self.N, (z1[1] - z2[1]) % self.N)

    def neg(self, z):
        return ((-z[0]) % self.N, (-z[1]) % self.N)

    def points(self):
        """All phase points in row-major order."""
        return [(k, l) for k in range(self.N) for l in range(self.N)]


def centered_rep(t, N: int):
    """Representative of ``t mod N`` in ``[-floor(N/2), ceil(N/2) - 1]``.

    Works elementwise on integer arrays.
    """
    if N < 2:
        raise InvalidGridError(f"grid side must be >= 2, got {N}")
    lo = N // 2
    r = (np.asarray(t) + lo) % N - lo
    if np.ndim(r) == 0:
        return int(r)
    return r


def _centered_axes(N: int):
    c = centered_rep(np.arange(N), N)
    return c[:, None], c[None, :]


@dataclass(frozen=True, eq=False)
class WeightGrid:
    """Positive weight on the phase grid.

    ``symmetric`` records whether ``w(-z) == w(z)`` holds exactly. For even N
    the centered range is lopsided, so weights built from signed
    representatives can fail it; the radial constructors here do not.
    """

    values: np.ndarray
    kind: str = SUBMULTIPLICATIVE
    label: str = "custom"
    symmetric: bool = field(init=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise DimensionMismatchError(f"weight must be square N x N, got shape {vals.shape}")
        PhaseGrid(vals.shape[0])
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError("weight values must be finite and strictly positive")
        if self.kind not in (SUBMULTIPLICATIVE, MODERATE):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        vals = vals.copy()
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "symmetric", bool(np.array_equal(vals, reflect(vals))))
        if self.kind == SUBMULTIPLICATIVE and not self.symmetric:
            log.debug("weight %s is not negation-symmetric (N=%d)", self.label, self.N)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def grid(self) -> PhaseGrid:
        return PhaseGrid(self.N)

    def reciprocal(self) -> "WeightGrid":
        return WeightGrid(1.0 / self.values, kind=MODERATE, label=f"1/({self.label})")

    def as_moderate(self) -> "WeightGrid":
        return WeightGrid(self.values, kind=MODERATE, label=self.label)


def unit_weight(grid: PhaseGrid | int, kind: str = SUBMULTIPLICATIVE) -> WeightGrid:
    N = grid.N if isinstance(grid, PhaseGrid) else PhaseGrid(grid).N
    return WeightGrid(np.ones((N, N)), kind=kind, label="one")


def polynomial_weight(grid: PhaseGrid | int, s: float, kind: str = SUBMULTIPLICATIVE) -> WeightGrid:
    """``(1 + c_k^2 + c_l^2)^(s/2)`` with ``c`` the centered representatives."""
    if s < 0:
        raise ValueError(f"polynomial weight exponent must be >= 0, got {s}")
    N = grid.N if isinstance(grid, PhaseGrid) else PhaseGrid(grid).N
    ck, cl = _centered_axes(N)
    vals = (1.0 + ck**2 + cl**2) ** (s / 2.0)
    return WeightGrid(vals, kind=kind, label=f"poly:{s:g}")


def parse_weight(spec: str, N: int, kind: str = SUBMULTIPLICATIVE) -> WeightGrid:
    """Build a weight from ``"one"``, ``"poly:<s>"`` or ``"file:<path>"``."""
    spec = spec.strip()
    if spec == "one":
        return unit_weight(N, kind)
    if spec.startswith("poly:"):
        try:
            s = float(spec[5:])
        except ValueError as exc:
            raise SpecError(f"bad polynomial weight spec {spec!r}") from exc
        return polynomial_weight(N, s, kind)
    if spec.startswith("file:"):
        from .io import read_array

        arr = read_array(spec[5:])
        if arr.shape != (N, N):
            raise DimensionMismatchError(f"weight file has shape {arr.shape}, expected {(N, N)}")
        if np.any(arr.imag != 0):
            raise SpecError("weight file must hold real values")
        return WeightGrid(arr.real, kind=kind, label=spec)
    raise SpecError(f"unknown weight spec {spec!r}")


@dataclass(frozen=True)
class SubmultiplicativeCheck:
    passed: bool
    worst_ratio: float
    worst_pair: tuple[tuple[int, int], tuple[int, int]]


def _worst_ratio(num: np.ndarray, v: np.ndarray, den: np.ndarray):
    """max over (z1, z2) of num(z1+z2) / (v(z1) den(z2)), first maximiser in row-major order."""
    N = num.shape[0]
    best = -np.inf
    pair = ((0, 0), (0, 0))
    for k1 in range(N):
        for l1 in range(N):
            ratios = np.roll(num, (-k1, -l1), axis=(0, 1)) / (v[k1, l1] * den)
            idx = int(np.argmax(ratios))
            r = ratios.flat[idx]
            if r > best:
                best = float(r)
                pair = ((k1, l1), divmod(idx, N))
    return best, pair


def check_submultiplicative(v: WeightGrid, tol: float = DEFAULT_TOL) -> SubmultiplicativeCheck:
    """Exhaustive check of ``v(z1+z2) <= v(z1) v(z2)`` over the grid."""
    worst, pair = _worst_ratio(v.values, v.values, v.values)
    return SubmultiplicativeCheck(worst <= 1.0 + tol, worst, pair)


def moderate_constant_pair(m: WeightGrid, v: WeightGrid):
    """``(C, (z1, z2))`` with ``C = max m(z1+z2) / (v(z1) m(z2))`` and an attaining pair."""
    if m.N != v.N:
        raise DimensionMismatchError(f"weights on different grids: {m.N} vs {v.N}")
    return _worst_ratio(m.values, v.values, m.values)


def moderate_constant(m: WeightGrid, v: WeightGrid) -> float:
    """Smallest constant C with ``m(z1+z2) <= C v(z1) m(z2)`` on the grid."""
    return moderate_constant_pair(m, v)[0]


@dataclass(frozen=True)
class MixedNormParams:
    p: float
    q: float
    m: WeightGrid

    def __post_init__(self):
        for name in ("p", "q"):
            val = float(getattr(self, name))
            if math.isnan(val) or val < 1:
                raise ValueError(f"exponent {name} must lie in [1, inf], got {val}")
            object.__setattr__(self, name, val)

    @classmethod
    def unweighted(cls, p, q, N: int) -> "MixedNormParams":
        return cls(parse_exponent(p), parse_exponent(q), unit_weight(N, MODERATE))

    def dual(self) -> "MixedNormParams":
        return MixedNormParams(conjugate_exponent(self.p), conjugate_exponent(self.q), self.m.reciprocal())


def parse_exponent(x) -> float:
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "infinity", "∞"):
            return math.inf
        return float(s)
    return float(x)


def conjugate_exponent(p: float) -> float:
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _lp(a: np.ndarray, p: float, axis):
    if math.isinf(p):
        return a.max(axis=axis)
    if p == 1:
        return a.sum(axis=axis)
    if p == 2:
        return np.sqrt((a * a).sum(axis=axis))
    return (a**p).sum(axis=axis) ** (1.0 / p)


def mixed_norm(F: np.ndarray, params: MixedNormParams) -> float:
    """Weighted L^{p,q} norm: inner exponent over ``k`` (axis 0), outer over ``l``."""
    F = np.asarray(F)
    if F.shape != params.m.values.shape:
        raise DimensionMismatchError(f"field shape {F.shape} does not match weight {params.m.values.shape}")
    a = np.abs(F) * params.m.values
    # Rescale to dodge overflow/underflow in large p; the norm is homogeneous.
    scale = a.max()
    if scale == 0:
        return 0.0
    inner = _lp(a / scale, params.p, axis=0)
    return float(scale * _lp(inner, params.q, axis=0))


def translate(F: np.ndarray, z) -> np.ndarray:
    """``(T_z F)(w) = F(w - z)`` with cyclic indices."""
    return np.roll(F, (int(z[0]), int(z[1])), axis=(0, 1))


def reflect(F: np.ndarray) -> np.ndarray:
    """``F(-z mod N)``."""
    return np.roll(F[::-1, ::-1], 1, axis=(0, 1))


def cyclic_convolve(F: np.ndarray, G: np.ndarray) -> np.ndarray:
    """``(F * G)(z) = sum_w F(w) G(z - w)`` on Z_N x Z_N."""
    F = np.asarray(F)
    G = np.asarray(G)
    if F.shape != G.shape:
        raise DimensionMismatchError(f"cannot convolve shapes {F.shape} and {G.shape}")
    out = np.fft.ifft2(np.fft.fft2(F) * np.fft.fft2(G))
    if np.isrealobj(F) and np.isrealobj(G):
        return out.real
    return out
