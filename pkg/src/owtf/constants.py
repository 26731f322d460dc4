"""Normalization factors picked up by the continuum identities on Z_N x Z_N.

With counting measure on the phase space every integral becomes a plain sum,
and the identities that hold with constant 1 on R^{2d} acquire powers of N.
All of them live here so that no module hard-codes its own normalization.

==========================  =========================================  ======
identity                    discrete form                              factor
==========================  =========================================  ======
Moyal                       sum |V_phi psi|^2 = c |psi|^2 |phi|^2      N
operator Moyal              sum ||V_S psi(z)||^2 = c |S|_HS^2 |psi|^2  N
operator-STFT inversion     V_S^* V_S = c |S|_HS^2 I                   N
twirl                       sum_z pi(z) A pi(z)^* = c tr(A) I          N
window change               ||V_phi psi|| <= c C |phi|_M1v |psi|_M     1/N
Weyl/Wigner duality         <L_a phi, psi> = c sum a conj(W(psi,phi))  1/N
spreading scale             F_W(T)(z) = c tr(T rho(z)^*)               N
symplectic FT squared       F_sigma F_sigma f = c f                    N^2
==========================  =========================================  ======

The Weyl duality and spreading factors are derived in closed form and then
cross-checked by brute-force calibration (see :func:`owtf.weylcohen.calibrate_spreading_scale`
and :func:`owtf.weylcohen.calibrate_duality_factor`).
"""

from __future__ import annotations

__all__ = [
    "moyal_factor",
    "twirl_factor",
    "window_change_factor",
    "weyl_duality_factor",
    "spreading_scale",
    "symplectic_square_factor",
    "ledger",
]


def moyal_factor(n: int) -> float:
    return float(n)


def twirl_factor(n: int) -> float:
    return float(n)


def window_change_factor(n: int) -> float:
    return 1.0 / n


def weyl_duality_factor(n: int) -> float:
    return 1.0 / n


def spreading_scale(n: int) -> float:
    return float(n)


def symplectic_square_factor(n: int) -> float:
    return float(n) ** 2


def ledger(n: int) -> dict[str, float]:
    """All factors for grid side ``n``, as embedded in every CLI report."""
    return {
        "moyal": moyal_factor(n),
        "operator_moyal": twirl_factor(n),
        "inversion": twirl_factor(n),
        "window_change": window_change_factor(n),
        "weyl_duality": weyl_duality_factor(n),
        "spreading_scale": spreading_scale(n),
        "symplectic_square": symplectic_square_factor(n),
    }
