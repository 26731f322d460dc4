"""Operator convolutions, localization operators and smoothed spectrograms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, SpecError
from .grid import PhaseGrid, centered_rep, cyclic_convolve, reflect
from .opwindow import as_operator
from .tfshift import all_shifts, as_signal, stft, tf_shift_matrix

__all__ = [
    "MaskField",
    "parse_mask",
    "op_conv",
    "op_conv_direct",
    "localization",
    "smoothed_spectrogram",
]


@dataclass(frozen=True, eq=False)
class MaskField:
    """Phase-space mask ``f``; ``nonnegative`` is a hint that ``f * (phi (x) phi)`` is PSD."""

    values: np.ndarray
    label: str = "custom"
    nonnegative: bool = field(init=False)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise DimensionMismatchError(f"mask must be N x N, got shape {vals.shape}")
        PhaseGrid(vals.shape[0])
        object.__setattr__(self, "values", vals)
        nonneg = bool(np.all(np.isreal(vals)) and np.all(np.real(vals) >= 0))
        object.__setattr__(self, "nonnegative", nonneg)

    @property
    def N(self) -> int:
        return self.values.shape[0]


def _mask(f, N: int | None = None) -> np.ndarray:
    vals = f.values if isinstance(f, MaskField) else np.asarray(f)
    if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
        raise DimensionMismatchError(f"mask must be N x N, got shape {vals.shape}")
    if N is not None and vals.shape[0] != N:
        raise DimensionMismatchError(f"mask lives on N={vals.shape[0]}, expected {N}")
    return vals


def parse_mask(spec: str, N: int) -> MaskField:
    """``ones``, ``delta``, ``disk:<radius>``, ``gauss:<sigma>`` or ``file:<path>``."""
    PhaseGrid(N)
    spec = spec.strip()
    c = centered_rep(np.arange(N), N)
    r2 = c[:, None] ** 2 + c[None, :] ** 2
    try:
        if spec == "ones":
            return MaskField(np.ones((N, N)), spec)
        if spec == "delta":
            f = np.zeros((N, N))
            f[0, 0] = 1.0
            return MaskField(f, spec)
        if spec.startswith("disk:"):
            radius = float(spec[5:])
            return MaskField((r2 <= radius**2).astype(float), spec)
        if spec.startswith("gauss:"):
            sigma = float(spec[6:])
            if sigma <= 0:
                raise SpecError("gauss mask needs sigma > 0")
            return MaskField(np.exp(-r2 / (2 * sigma**2)), spec)
    except ValueError as exc:
        raise SpecError(f"bad mask spec {spec!r}") from exc
    if spec.startswith("file:"):
        from .io import read_array

        arr = read_array(spec[5:])
        if arr.shape != (N, N):
            raise DimensionMismatchError(f"mask file has shape {arr.shape}, expected {(N, N)}")
        return MaskField(arr.real if np.all(arr.imag == 0) else arr, spec)
    raise SpecError(f"unknown mask spec {spec!r}")


def op_conv(f, S) -> np.ndarray:
    """``f * S = sum_z f(z) pi(z) S pi(z)^*`` in O(N^3).

    Entrywise ``(f * S)(t, s) = sum_k F[k, t - s] S(t - k, s - k)`` with
    ``F[k, d] = sum_l f(k, l) e^{2 pi i l d / N}``.
    """
    S = as_operator(S)
    N = S.shape[0]
    f = _mask(f, N)
    F = N * np.fft.ifft(f, axis=1)
    t = np.arange(N)
    diff = (t[:, None] - t[None, :]) % N
    out = np.zeros((N, N), dtype=complex)
    for k in range(N):
        out += F[k][diff] * np.roll(S, (k, k), axis=(0, 1))
    return out


def op_conv_direct(f, S) -> np.ndarray:
    """Reference O(N^5) sum of conjugated matrices."""
    S = as_operator(S)
    N = S.shape[0]
    f = _mask(f, N)
    out = np.zeros((N, N), dtype=complex)
    for k in range(N):
        for l in range(N):
            if f[k, l] != 0:
                P = tf_shift_matrix((k, l), N)
                out += f[k, l] * P @ S @ P.conj().T
    return out


def localization(f, phi1, phi2) -> np.ndarray:
    """``A psi = sum_z f(z) V_{phi1} psi(z) pi(z) phi2`` as a matrix.

    Built from its own definition, not through :func:`op_conv`; the two agree
    with ``f * (phi2 (x) phi1)``.
    """
    phi1 = as_signal(phi1)
    phi2 = as_signal(phi2, phi1.shape[0])
    N = phi1.shape[0]
    f = _mask(f, N)
    P1 = all_shifts(phi1).reshape(N * N, N)
    P2 = all_shifts(phi2).reshape(N * N, N)
    # V_{phi1} psi(z) = <psi, pi(z) phi1> = conj(P1[z]) . psi
    return (P2.T * f.reshape(-1)) @ np.conj(P1)


def smoothed_spectrogram(f, phi, psi) -> np.ndarray:
    """``reflect(f) * |V_phi psi|^2`` (cyclic), the Cohen distribution of the localization operator with mask f."""
    phi = as_signal(phi)
    psi = as_signal(psi, phi.shape[0])
    f = _mask(f, phi.shape[0])
    return cyclic_convolve(reflect(f), np.abs(stft(psi, phi)) ** 2)
