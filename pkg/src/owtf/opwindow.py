"""Operator windows: the operator STFT ``V_S psi(z) = S pi(z)^* psi`` and the
norm equivalence between its weighted mixed norm and the modulation norm.

Vector fields are ``(N, N, N)`` arrays, ``Psi[k, l]`` being the signal attached
to the phase point ``(k, l)``.

Discrete sandwich constants
---------------------------
With ``B`` the SVD nuclear bound of ``S`` (see :func:`nuclear_bound`),
``C = C_v^m``, ``C' = C_v^v`` and ``G = ||phi0||_{M^1_v}``::

    C_upper = (C / N) B
    C_lower = N^2 ||S||_HS^2 / (C C' B G)

The upper bound is the SVD expansion plus the window-change estimate
``||V_phi psi||_{L^{p,q}_m} <= (C/N) ||phi||_{M^1_v} ||psi||_{M^{p,q}_m}``.
The lower bound writes ``psi = V_S^* V_S psi / (N ||S||_HS^2)``, dominates
``|V_phi0 V_S^* Psi|`` by a cyclic convolution of ``||Psi||`` with
``||V_S phi0(-.)||``, applies the weighted Young inequality (constant ``C``) and
bounds ``||V_S phi0||_{L^1_v}`` by the upper estimate with ``m = v`` (constant
``C'``). For weights with ``v(0) = 1`` and genuinely submultiplicative ``v``,
``C' = 1``.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateWindowError, DimensionMismatchError, WindowCountError
from .grid import (
    DEFAULT_TOL,
    MixedNormParams,
    WeightGrid,
    check_submultiplicative,
    mixed_norm,
    moderate_constant,
)
from .tfshift import adjoint_shifts, as_signal, gaussian_window, m1v_norm, mod_norm

__all__ = [
    "SVD_CUTOFF",
    "as_operator",
    "rank_one",
    "hs_norm",
    "op_stft",
    "op_stft_adjoint",
    "field_norms",
    "field_mixed_norm",
    "nuclear_bound",
    "EquivalenceConstants",
    "equivalence_constants",
    "EquivalenceReport",
    "equivalence_report",
    "random_signals",
    "multiwindow_op",
]

log = logging.getLogger(__name__)

SVD_CUTOFF = 1e-13


def as_operator(S, N: int | None = None) -> np.ndarray:
    S = np.asarray(S, dtype=complex)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DimensionMismatchError(f"operator must be a square matrix, got shape {S.shape}")
    if N is not None and S.shape[0] != N:
        raise DimensionMismatchError(f"operator acts on C^{S.shape[0]}, expected C^{N}")
    return S


def rank_one(xi, phi) -> np.ndarray:
    """Matrix of ``xi (x) phi : psi -> <psi, phi> xi``."""
    return np.outer(as_signal(xi), np.conj(as_signal(phi)))


def hs_norm(S) -> float:
    return float(np.linalg.norm(as_operator(S)))


def _as_field(Psi, N: int | None = None) -> np.ndarray:
    Psi = np.asarray(Psi, dtype=complex)
    if Psi.ndim != 3 or not (Psi.shape[0] == Psi.shape[1] == Psi.shape[2]):
        raise DimensionMismatchError(f"vector field must have shape (N, N, N), got {Psi.shape}")
    if N is not None and Psi.shape[0] != N:
        raise DimensionMismatchError(f"vector field lives on N={Psi.shape[0]}, expected {N}")
    return Psi


def op_stft(S, psi) -> np.ndarray:
    S = as_operator(S)
    psi = as_signal(psi, S.shape[0])
    return adjoint_shifts(psi) @ S.T


def op_stft_adjoint(S, Psi) -> np.ndarray:
    """``sum_z pi(z) S^* Psi(z)``."""
    S = as_operator(S)
    N = S.shape[0]
    Psi = _as_field(Psi, N)
    Y = Psi @ np.conj(S)  # Y[k, l] = S^* Psi[k, l]
    # sum over l of the modulations first, then the translations
    Z = N * np.fft.ifft(Y, axis=1)  # Z[k, t, s] = sum_l e^{2 pi i l t / N} Y[k, l, s]
    t = np.arange(N)
    k = np.arange(N)[:, None]
    return Z[k, t[None, :], (t[None, :] - k) % N].sum(axis=0)


def field_norms(Psi) -> np.ndarray:
    """Scalar field ``z -> ||Psi(z)||_2``."""
    return np.linalg.norm(_as_field(Psi), axis=2)


def field_mixed_norm(Psi, params: MixedNormParams) -> float:
    Psi = _as_field(Psi, params.m.N)
    return mixed_norm(field_norms(Psi), params)


def nuclear_bound(S, v: WeightGrid, cutoff: float = SVD_CUTOFF) -> float:
    """SVD-induced upper bound on the nuclear norm of ``S^*`` into M^1_v.

    ``S = sum_n s_n u_n (x) w_n`` gives ``sum_n s_n ||w_n||_{M^1_v}``; singular
    values below ``cutoff * s_1`` are dropped.
    """
    S = as_operator(S, v.N)
    _, s, Vh = np.linalg.svd(S)
    if s[0] == 0:
        return 0.0
    keep = s >= cutoff * s[0]
    return float(sum(sn * m1v_norm(np.conj(w), v) for sn, w in zip(s[keep], Vh[keep])))


@dataclass(frozen=True)
class EquivalenceConstants:
    c_lower: float
    c_upper: float
    c_vm: float
    c_vv: float
    nuclear_bound: float
    hs_norm: float
    gauss_m1v: float
    v_submultiplicative: bool


def equivalence_constants(S, m: WeightGrid, v: WeightGrid) -> EquivalenceConstants:
    S = as_operator(S, v.N)
    if m.N != v.N:
        raise DimensionMismatchError(f"weights on different grids: {m.N} vs {v.N}")
    hs = hs_norm(S)
    if hs == 0:
        raise DegenerateWindowError("the zero operator is not an admissible window")
    N = v.N
    sub = check_submultiplicative(v)
    if not sub.passed:
        log.info(
            "v=%s is not submultiplicative on Z_%d (worst ratio %.6g at %s); constants stay valid",
            v.label, N, sub.worst_ratio, sub.worst_pair,
        )
    if not v.symmetric:
        log.warning("v=%s is not negation-symmetric; the lower constant is not guaranteed", v.label)
    c_vm = moderate_constant(m, v)
    c_vv = sub.worst_ratio
    B = nuclear_bound(S, v)
    G = m1v_norm(gaussian_window(N), v)
    return EquivalenceConstants(
        c_lower=N**2 * hs**2 / (c_vm * c_vv * B * G),
        c_upper=c_vm / N * B,
        c_vm=c_vm,
        c_vv=c_vv,
        nuclear_bound=B,
        hs_norm=hs,
        gauss_m1v=G,
        v_submultiplicative=sub.passed,
    )


def random_signals(N: int, count: int, seed: int) -> np.ndarray:
    """``count`` i.i.d. complex standard normal signals (E|x_t|^2 = 1)."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    x = rng.standard_normal((count, N, 2))
    return (x[..., 0] + 1j * x[..., 1]) / np.sqrt(2.0)


@dataclass
class EquivalenceReport:
    p: float
    q: float
    m_label: str
    v_label: str
    N: int
    constants: EquivalenceConstants
    count: int
    seed: int
    ratios: np.ndarray = field(repr=False)
    tol: float = DEFAULT_TOL

    @property
    def ratio_min(self) -> float:
        return float(self.ratios.min())

    @property
    def ratio_median(self) -> float:
        return float(np.median(self.ratios))

    @property
    def ratio_max(self) -> float:
        return float(self.ratios.max())

    @property
    def verdict(self) -> bool:
        lo = self.constants.c_lower * (1 - self.tol)
        hi = self.constants.c_upper * (1 + self.tol)
        return bool(self.constants.c_lower <= self.constants.c_upper and np.all((self.ratios >= lo) & (self.ratios <= hi)))

    def to_dict(self) -> dict:
        return {
            "params": {"p": _num(self.p), "q": _num(self.q), "m": self.m_label, "v": self.v_label, "N": self.N},
            "constants": {k: (_num(val) if isinstance(val, float) else val) for k, val in asdict(self.constants).items()},
            "samples": {"count": self.count, "seed": self.seed},
            "ratios": {"min": self.ratio_min, "median": self.ratio_median, "max": self.ratio_max},
            "verdict": self.verdict,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["sample", "ratio", "c_lower", "c_upper", "inside"])
        lo, hi = self.constants.c_lower, self.constants.c_upper
        for i, r in enumerate(self.ratios):
            inside = lo * (1 - self.tol) <= r <= hi * (1 + self.tol)
            w.writerow([i, repr(float(r)), repr(lo), repr(hi), int(inside)])
        return out.getvalue()


def _num(x: float):
    return "inf" if np.isinf(x) else x


def equivalence_report(
    S,
    params: MixedNormParams,
    v: WeightGrid,
    seed: int,
    count: int,
    tol: float = DEFAULT_TOL,
) -> EquivalenceReport:
    """Sample the ratio ``||V_S psi||_{L^{p,q}_m} / ||psi||_{M^{p,q}_m}`` and test the sandwich."""
    if count < 1:
        raise ValueError("count must be >= 1")
    S = as_operator(S, v.N)
    consts = equivalence_constants(S, params.m, v)
    ratios = np.empty(count)
    for i, psi in enumerate(random_signals(v.N, count, seed)):
        denom = mod_norm(psi, params)
        assert denom > 0, "nonzero signal with vanishing modulation norm"
        ratios[i] = field_mixed_norm(op_stft(S, psi), params) / denom
    return EquivalenceReport(
        p=params.p, q=params.q, m_label=params.m.label, v_label=v.label, N=v.N,
        constants=consts, count=count, seed=seed, ratios=ratios, tol=tol,
    )


def multiwindow_op(windows) -> np.ndarray:
    """``S = sum_n e_n (x) phi_n``, so that ``||V_S psi(z)||^2 = sum_n |V_{phi_n} psi(z)|^2``."""
    windows = [as_signal(w) for w in windows]
    if not windows:
        raise WindowCountError("at least one window is required")
    N = windows[0].shape[0]
    if len(windows) > N:
        raise WindowCountError(f"{len(windows)} windows exceed the capacity N={N}")
    S = np.zeros((N, N), dtype=complex)
    for n, w in enumerate(windows):
        S[n] = np.conj(as_signal(w, N))
    return S
