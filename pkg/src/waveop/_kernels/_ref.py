"""Pure-NumPy fallback for the stepping kernel.

Same contract as the compiled extension in ``_core.pyx``: advance a complex
matrix state through ``n_steps`` classical RK4 steps of the bilinear ODE

    d(rho)/dt = a @ rho + rho @ b + sum_m coeffs[m] * kl[m] @ rho @ kr[m]

All prefactors (including any -i) are folded into ``a``, ``b`` and
``coeffs`` by the caller.
"""

from __future__ import annotations

import numpy as np


def rk4_bilinear(a, b, coeffs, kl, kr, rho, dt, n_steps):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    coeffs = np.asarray(coeffs, dtype=complex)
    kl = np.asarray(kl, dtype=complex)
    kr = np.asarray(kr, dtype=complex)
    rho = np.array(rho, dtype=complex)

    def rhs(r):
        out = a @ r + r @ b
        for m in range(coeffs.shape[0]):
            out += coeffs[m] * (kl[m] @ r @ kr[m])
        return out

    h = float(dt)
    for _ in range(int(n_steps)):
        k1 = rhs(rho)
        k2 = rhs(rho + (0.5 * h) * k1)
        k3 = rhs(rho + (0.5 * h) * k2)
        k4 = rhs(rho + h * k3)
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return rho
