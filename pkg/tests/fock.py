"""Truncated Fock-space oracle for single-mode moments.

Built from explicit matrices so it shares nothing with the closed forms under
test: â is the (dim x dim) lowering matrix and states are number-basis vectors.
"""

import math

import numpy as np


def lowering(dim: int) -> np.ndarray:
    a = np.zeros((dim, dim), dtype=complex)
    for n in range(1, dim):
        a[n - 1, n] = math.sqrt(n)
    return a


def coherent(a0: complex, dim: int) -> np.ndarray:
    """Normalised truncation of exp(-|a0|²/2) Σ a0ⁿ/√n! |n⟩."""
    vec = np.zeros(dim, dtype=complex)
    vec[0] = 1.0
    for n in range(1, dim):
        vec[n] = vec[n - 1] * a0 / math.sqrt(n)
    return vec / np.linalg.norm(vec)


def operator(c0: float, mu: complex, dim: int) -> np.ndarray:
    a = lowering(dim)
    return c0 * np.eye(dim) + mu * a + np.conj(mu) * a.conj().T


def moments(c0: float, mu: complex, a0: complex = 0j, dim: int = 20) -> tuple[float, float]:
    op = operator(c0, mu, dim)
    psi = coherent(a0, dim)
    mean = np.vdot(psi, op @ psi).real
    # ‖(O - ⟨O⟩)ψ‖² avoids the cancellation in ⟨O²⟩ - ⟨O⟩²
    w = op @ psi - mean * psi
    return float(mean), float(np.vdot(w, w).real)


def dimension_for(a0: complex) -> int:
    return max(20, int(4 * abs(a0) ** 2 + 40 * abs(a0) + 20))
