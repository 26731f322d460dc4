"""Signals and operators from short spec strings (shared by the CLI and tests).

Signals:   ``gauss``, ``delta[:<k>]``, ``random:<seed>``, ``file:<path>``
Operators: ``rankone:gauss``, ``multiwindow:<k>``, ``random:<seed>[:<rank>]``,
           ``weyl:<symbol-file>``, ``locop:<mask-spec>``, ``schwartz``,
           ``sqrt:<operator-spec>``, ``zero``, ``file:<path>``
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, SpecError
from .grid import PhaseGrid, centered_rep
from .io import read_array
from .locops import localization, parse_mask
from .opwindow import multiwindow_op, random_signals, rank_one
from .tfshift import gaussian_window, tf_shift
from .weylcohen import psd_sqrt, weyl_quantize

__all__ = ["parse_signal", "parse_operator", "schwartz_psd", "random_operator"]


def _int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise SpecError(f"{what}: expected an integer, got {text!r}") from exc


def parse_signal(spec: str, N: int | None) -> np.ndarray:
    spec = spec.strip()
    if spec.startswith("file:"):
        arr = read_array(spec[5:])
        if arr.ndim != 1:
            raise DimensionMismatchError(f"signal file must be rank 1, got shape {arr.shape}")
        if N is not None and arr.shape[0] != N:
            raise DimensionMismatchError(f"signal file has length {arr.shape[0]}, expected {N}")
        return arr
    if N is None:
        raise SpecError(f"signal spec {spec!r} needs --n")
    PhaseGrid(N)
    if spec == "gauss":
        return gaussian_window(N)
    if spec == "delta" or spec.startswith("delta:"):
        k = _int(spec[6:], "delta position") if ":" in spec else 0
        e = np.zeros(N, dtype=complex)
        e[k % N] = 1.0
        return e
    if spec.startswith("random:"):
        return random_signals(N, 1, _int(spec[7:], "random seed"))[0]
    raise SpecError(f"unknown signal spec {spec!r}")


def random_operator(N: int, seed: int, rank: int | None = None) -> np.ndarray:
    """Complex Gaussian matrix; with ``rank`` a sum of ``rank`` random rank-one terms."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if rank is None:
        x = rng.standard_normal((N, N, 2))
        return (x[..., 0] + 1j * x[..., 1]) / np.sqrt(2)
    x = rng.standard_normal((2, rank, N, 2))
    left = (x[0, ..., 0] + 1j * x[0, ..., 1]) / np.sqrt(2)
    right = (x[1, ..., 0] + 1j * x[1, ..., 1]) / np.sqrt(2)
    return sum(rank_one(u, w) for u, w in zip(left, right))


def schwartz_psd(N: int) -> np.ndarray:
    """Positive operator with Gaussian kernel ``g(x) exp(-pi (c_x - c_y)^2 / N) g(y)``.

    The inner factor is a positive-definite kernel on the centered
    representatives and the outer Gaussian envelope keeps it PSD.
    """
    c = centered_rep(np.arange(N), N).astype(float)
    g = np.exp(-np.pi * c**2 / N)
    K = np.exp(-np.pi * (c[:, None] - c[None, :]) ** 2 / N)
    return (g[:, None] * K * g[None, :]).astype(complex)


def parse_operator(spec: str, N: int | None) -> np.ndarray:
    spec = spec.strip()
    head, _, rest = spec.partition(":")
    if head == "file":
        arr = read_array(rest)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionMismatchError(f"operator file must be square, got shape {arr.shape}")
        if N is not None and arr.shape[0] != N:
            raise DimensionMismatchError(f"operator file acts on C^{arr.shape[0]}, expected C^{N}")
        return arr
    if head == "weyl":
        a = read_array(rest)
        if N is not None and a.shape != (N, N):
            raise DimensionMismatchError(f"symbol file has shape {a.shape}, expected {(N, N)}")
        return weyl_quantize(a)
    if N is None:
        raise SpecError(f"operator spec {spec!r} needs --n")
    PhaseGrid(N)
    phi0 = gaussian_window(N)
    if spec == "rankone:gauss":
        return rank_one(phi0, phi0)
    if head == "multiwindow":
        k = _int(rest, "window count")
        return multiwindow_op([tf_shift((j, 0), phi0) for j in range(k)])
    if head == "random":
        seed, _, rank = rest.partition(":")
        return random_operator(N, _int(seed, "random seed"), _int(rank, "rank") if rank else None)
    if head == "locop":
        return localization(parse_mask(rest, N), phi0, phi0)
    if spec == "schwartz":
        return schwartz_psd(N)
    if head == "sqrt":
        return psd_sqrt(parse_operator(rest, N))
    if spec == "zero":
        return np.zeros((N, N), dtype=complex)
    raise SpecError(f"unknown operator spec {spec!r}")
