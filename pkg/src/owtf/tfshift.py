"""Time-frequency shifts, the STFT, the reference Gaussian and modulation norms.

Conventions on Z_N::

    pi(k, l) psi(t) = exp(2 pi i l t / N) psi(t - k)
    V_phi psi(k, l) = <psi, pi(k, l) phi> = sum_t psi(t) conj(phi(t - k)) exp(-2 pi i l t / N)
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DimensionMismatchError
from .grid import MixedNormParams, PhaseGrid, WeightGrid, centered_rep, mixed_norm

__all__ = [
    "as_signal",
    "tf_shift",
    "tf_shift_matrix",
    "adjoint_shifts",
    "all_shifts",
    "stft",
    "gaussian_window",
    "m1v_norm",
    "mod_norm",
]

GAUSS_TERMS = 3


def as_signal(psi, N: int | None = None) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise DimensionMismatchError(f"signal must be one-dimensional, got shape {psi.shape}")
    PhaseGrid(psi.shape[0])
    if N is not None and psi.shape[0] != N:
        raise DimensionMismatchError(f"signal has length {psi.shape[0]}, expected {N}")
    return psi


def _same_grid(*signals):
    n = signals[0].shape[0]
    for s in signals[1:]:
        if s.shape[0] != n:
            raise DimensionMismatchError(f"signals live on different grids: {n} vs {s.shape[0]}")
    return n


def tf_shift(z, psi) -> np.ndarray:
    psi = as_signal(psi)
    N = psi.shape[0]
    k, l = int(z[0]) % N, int(z[1]) % N
    t = np.arange(N)
    return np.exp(2j * np.pi * l * t / N) * np.roll(psi, k)


def tf_shift_matrix(z, N: int) -> np.ndarray:
    """Matrix of ``pi(z)`` acting on C^N."""
    PhaseGrid(N)
    return np.stack([tf_shift(z, e) for e in np.eye(N)], axis=1)


def adjoint_shifts(psi) -> np.ndarray:
    """``out[k, l] = pi(k, l)^* psi`` for every phase point, shape (N, N, N).

    ``pi(k, l)^* psi(t) = exp(-2 pi i l (t + k) / N) psi(t + k)``.
    """
    psi = as_signal(psi)
    N = psi.shape[0]
    idx = (np.arange(N)[:, None] + np.arange(N)[None, :]) % N  # idx[k, t] = t + k
    phase = np.exp(-2j * np.pi * np.outer(np.arange(N), np.arange(N)) / N)  # [l, s]
    return phase[:, idx].transpose(1, 0, 2) * psi[idx][:, None, :]


def all_shifts(phi) -> np.ndarray:
    """``out[k, l] = pi(k, l) phi``, shape (N, N, N)."""
    phi = as_signal(phi)
    N = phi.shape[0]
    t = np.arange(N)
    idx = (t[None, :] - t[:, None]) % N  # idx[k, t] = t - k
    mod = np.exp(2j * np.pi * np.outer(t, t) / N)  # [l, t]
    return mod[None, :, :] * phi[idx][:, None, :]


def stft(psi, phi) -> np.ndarray:
    """Discrete STFT ``V[k, l]``; one N-point DFT per time shift ``k``."""
    psi = as_signal(psi)
    phi = as_signal(phi)
    N = _same_grid(psi, phi)
    t = np.arange(N)
    idx = (t[None, :] - t[:, None]) % N
    return np.fft.fft(psi[None, :] * np.conj(phi[idx]), axis=1)


@lru_cache(maxsize=64)
def _gaussian(N: int, terms: int) -> np.ndarray:
    c = centered_rep(np.arange(N), N).astype(float)
    j = np.arange(-terms, terms + 1)[:, None]
    g = np.exp(-np.pi * (c[None, :] + j * N) ** 2 / N).sum(axis=0)
    g /= np.linalg.norm(g)
    g.flags.writeable = False
    return g


def gaussian_window(grid: PhaseGrid | int, terms: int = GAUSS_TERMS) -> np.ndarray:
    """Periodized, L2-normalized Gaussian ``exp(-pi t^2 / N)`` on Z_N.

    The width sqrt(N) balances time and frequency spread under the N-point
    DFT; ``terms`` periodization images on each side suffice to machine
    precision for N >= 4.
    """
    N = grid.N if isinstance(grid, PhaseGrid) else PhaseGrid(grid).N
    return _gaussian(N, terms).astype(complex)


def m1v_norm(phi, v: WeightGrid) -> float:
    """``sum_z |V_{phi0} phi(z)| v(z)``."""
    phi = as_signal(phi, v.N)
    return float((np.abs(stft(phi, gaussian_window(v.N))) * v.values).sum())


def mod_norm(psi, params: MixedNormParams) -> float:
    psi = as_signal(psi, params.m.N)
    return mixed_norm(stft(psi, gaussian_window(psi.shape[0])), params)
