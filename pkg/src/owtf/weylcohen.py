"""Discrete Weyl calculus and Cohen's class on Z_N x Z_N, N odd.

Half-integer points are avoided by working with ``h = 2^{-1} mod N``: the
continuum ``t/2`` becomes ``h t mod N``. Normalizations (see
:mod:`owtf.constants`)::

    W(psi, phi)(x, w) = sum_t psi(x + h t) conj(phi(x - h t)) e^{-2 pi i w t / N}
    k_{L_a}(x, y)     = (1/N) sum_w a(h (x + y), w) e^{2 pi i w (x - y) / N}
    <L_a phi, psi>    = (1/N) sum_z a(z) conj(W(psi, phi)(z))
    F_W(T)(z)         = N tr(T rho(z)^*),  rho(k, l) = e^{-2 pi i h k l / N} pi(k, l)
    F_W(T)            = F_sigma(a_T)
"""

from __future__ import annotations

import numpy as np

from . import constants
from .errors import DimensionMismatchError, NotHermitianError, NotPositiveError, UnsupportedGridError
from .grid import translate
from .opwindow import as_operator
from .tfshift import adjoint_shifts, as_signal, tf_shift_matrix

__all__ = [
    "HERMITIAN_TOL",
    "NEGATIVITY_TOL",
    "half",
    "wigner",
    "weyl_quantize",
    "weyl_symbol",
    "translate_symbol",
    "symplectic_ft",
    "rho_matrix",
    "spreading",
    "calibrate_spreading_scale",
    "calibrate_duality_factor",
    "cohen",
    "psd_sqrt",
]

HERMITIAN_TOL = 1e-10
NEGATIVITY_TOL = 1e-10


def half(N: int) -> int:
    """Inverse of 2 modulo odd N."""
    if N % 2 == 0:
        raise UnsupportedGridError(f"Weyl calculus needs odd N (2 is not invertible mod {N})")
    return (N + 1) // 2


def _symbol(a) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"symbol must be N x N, got shape {a.shape}")
    return a


def _antidiagonal_index(N: int):
    """``(x0 + h t, x0 - h t)`` index arrays of shape (N, N), indexed ``[x0, t]``."""
    h = half(N)
    x0 = np.arange(N)[:, None]
    t = np.arange(N)[None, :]
    return (x0 + h * t) % N, (x0 - h * t) % N


def wigner(psi, phi) -> np.ndarray:
    """Cross-Wigner distribution ``W(psi, phi)[x, w]``."""
    psi = as_signal(psi)
    phi = as_signal(phi, psi.shape[0])
    xp, xm = _antidiagonal_index(psi.shape[0])
    return np.fft.fft(psi[xp] * np.conj(phi[xm]), axis=1)


def weyl_quantize(a) -> np.ndarray:
    """Kernel matrix of the Weyl operator ``L_a``."""
    a = _symbol(a)
    N = a.shape[0]
    h = half(N)
    B = np.fft.ifft(a, axis=1)  # B[x0, t] = (1/N) sum_w a(x0, w) e^{2 pi i w t / N}
    x = np.arange(N)[:, None]
    y = np.arange(N)[None, :]
    return B[(h * (x + y)) % N, (x - y) % N]


def weyl_symbol(T) -> np.ndarray:
    """Weyl symbol of ``T``; the exact inverse of :func:`weyl_quantize`."""
    T = as_operator(T)
    xp, xm = _antidiagonal_index(T.shape[0])
    return np.fft.fft(T[xp, xm], axis=1)


def translate_symbol(a, z) -> np.ndarray:
    return translate(_symbol(a), z)


def symplectic_ft(f) -> np.ndarray:
    """``F_sigma f(x, w) = sum f(x', w') e^{-2 pi i (x' w - x w') / N}`` (any N)."""
    f = np.asarray(f, dtype=complex)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise DimensionMismatchError(f"phase field must be N x N, got shape {f.shape}")
    N = f.shape[0]
    # axis 0: x' -> w with e^{-}; axis 1: w' -> x with e^{+}; result indexed [w, x]
    g = N * np.fft.ifft(np.fft.fft(f, axis=0), axis=1)
    return g.T


def rho_matrix(z, N: int) -> np.ndarray:
    """Symmetrized shift ``e^{-2 pi i h k l / N} pi(k, l)``."""
    h = half(N)
    k, l = int(z[0]) % N, int(z[1]) % N
    return np.exp(-2j * np.pi * h * k * l / N) * tf_shift_matrix((k, l), N)


def _raw_spreading(T: np.ndarray) -> np.ndarray:
    """``tr(T rho(z)^*)`` for all z."""
    N = T.shape[0]
    h = half(N)
    t = np.arange(N)[None, :]
    k = np.arange(N)[:, None]
    D = T[t, (t - k) % N]  # D[k, t] = T[t, t - k]
    phase = np.exp(2j * np.pi * h * (k * np.arange(N)[None, :]) / N)  # [k, l]
    return phase * np.fft.fft(D, axis=1)


def spreading(T) -> np.ndarray:
    """Spreading function ``F_W(T)``; satisfies ``F_W(T) = F_sigma(a_T)``."""
    T = as_operator(T)
    return constants.spreading_scale(T.shape[0]) * _raw_spreading(T)


def calibrate_spreading_scale(N: int = 3, seed: int = 0) -> float:
    """Brute-force the scale c with ``c tr(T rho(z)^*) = F_sigma(a_T)(z)``.

    Builds every ``rho(z)`` explicitly, so it is independent of the fast path.
    """
    rng = np.random.default_rng(seed)
    T = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    raw = np.array([[np.trace(T @ rho_matrix((k, l), N).conj().T) for l in range(N)] for k in range(N)])
    target = symplectic_ft(weyl_symbol(T))
    c = np.vdot(raw, target) / np.vdot(raw, raw)
    if np.abs(c * raw - target).max() > 1e-9 * np.abs(target).max():
        raise RuntimeError("spreading calibration is not a pure scale factor")
    return float(c.real)


def calibrate_duality_factor(N: int = 3, seed: int = 0) -> float:
    """Brute-force the factor c in ``<L_a phi, psi> = c sum_z a(z) conj(W(psi, phi)(z))``."""
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(3):
        a = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        phi = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        psi = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        lhs = np.vdot(psi, weyl_quantize(a) @ phi)
        W = np.array(
            [[sum(psi[(x + half(N) * t) % N] * np.conj(phi[(x - half(N) * t) % N]) * np.exp(-2j * np.pi * w * t / N)
                  for t in range(N)) for w in range(N)] for x in range(N)]
        )
        ratios.append(lhs / np.sum(a * np.conj(W)))
    if np.ptp(np.abs(ratios)) > 1e-9 or max(abs(r.imag) for r in ratios) > 1e-9:
        raise RuntimeError("Weyl duality calibration is not a pure scale factor")
    return float(np.mean(ratios).real)


def cohen(T, psi) -> np.ndarray:
    """``Q_T(psi)(z) = <T pi(z)^* psi, pi(z)^* psi>`` (complex array; real for Hermitian T)."""
    T = as_operator(T)
    psi = as_signal(psi, T.shape[0])
    Phi = adjoint_shifts(psi)
    return np.einsum("klt,klt->kl", Phi @ T.T, np.conj(Phi))


def psd_sqrt(T, tol: float = NEGATIVITY_TOL, herm_tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Positive square root; eigenvalues in ``[-tol ||T||, 0)`` are clipped to zero."""
    T = as_operator(T)
    scale = np.linalg.norm(T, 2)
    if scale == 0:
        return np.zeros_like(T)
    if np.abs(T - T.conj().T).max() > herm_tol * scale:
        raise NotHermitianError("psd_sqrt needs a self-adjoint operator")
    w, V = np.linalg.eigh((T + T.conj().T) / 2)
    if w[0] < -tol * scale:
        raise NotPositiveError(f"operator has eigenvalue {w[0]:.3e} below -{tol:g} * ||T||")
    R = (V * np.sqrt(np.clip(w, 0, None))) @ V.conj().T
    return (R + R.conj().T) / 2
