"""Static description of the transverse-field Ising chain.

The chain of n spins with periodic boundary conditions interpolates
between a pure transverse field (sweep parameter g = 0) and a pure
ferromagnetic coupling (g = 1).  After the Jordan-Wigner mapping the
even fermion-parity sector decouples into independent momentum pairs
(k, -k) on the antiperiodic grid k in pi*(1+2Z)/(a*n), |k*a| < pi.
This module provides the grid, the per-mode coefficients and energies,
gaps, the ground-state energy, and the transverse-field matrix element
connecting the ground state to a single (k, -k) quasiparticle pair.

Conventions (fixed here, documented rather than inferred): spin-down
basis ordering with sigma^x_j = 1 - 2 c_j^dag c_j and Fourier transform
c_j = sum_k c_k exp(-i k j a) / sqrt(n).  These fix the *phase* of the
pair matrix element; only its magnitude is convention independent and
only the magnitude is cross-checked against dense diagonalization.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChainSpec",
    "ModeCoefficients",
    "CouplingConstant",
    "momentum_grid",
    "mode_alpha",
    "mode_beta",
    "mode_epsilon",
    "mode_epsilon_dg",
    "mode_coefficients",
    "fundamental_gap",
    "ground_energy",
    "excitation_matrix_element",
]


@dataclass(frozen=True)
class ChainSpec:
    """Chain of ``n`` spins with lattice spacing ``a``.

    ``n`` must be even so that every grid momentum +k is paired with -k;
    odd n would leave unpaired momenta and break the (k, -k) channel
    structure of the excitation matrix element.
    """

    n: int
    a: float = 1.0

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise ValueError(f"n must be an integer >= 2, got {self.n!r}")
        if self.n % 2 != 0:
            raise ValueError(f"n must be even, got n={self.n}")
        if not self.a > 0:
            raise ValueError(f"lattice spacing a must be positive, got {self.a}")

    @property
    def smallest_momentum(self) -> float:
        """The lowest positive grid momentum pi/(a*n)."""
        return np.pi / (self.a * self.n)


@dataclass(frozen=True)
class ModeCoefficients:
    """Per-mode coefficients (alpha_k, beta_k) and energy epsilon_k."""

    alpha: float
    beta: float
    epsilon: float


@dataclass(frozen=True)
class CouplingConstant:
    """Dimensionless system-bath coupling strength.

    First-order response theory assumes a weak coupling; values above
    0.1 are accepted with a warning, non-positive values are rejected.
    """

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"coupling lambda must be positive, got {self.lam}")
        if self.lam > 0.1:
            warnings.warn(
                f"coupling lambda={self.lam} is large; first-order response "
                "theory assumes lambda << 1",
                stacklevel=2,
            )


def momentum_grid(spec: ChainSpec) -> np.ndarray:
    """Antiperiodic momentum grid, sorted ascending.

    Returns the n momenta k = pi*(2m+1)/(a*n) with |k*a| < pi.  The grid
    is symmetric under k -> -k and contains no k = 0 or |k*a| = pi.
    """
    odd = 2 * np.arange(spec.n) + 1 - spec.n
    return np.pi * odd / (spec.a * spec.n)


def mode_alpha(ka, g):
    """Diagonal mode coefficient alpha = 2 - 4 g cos^2(ka/2)."""
    return 2.0 - 4.0 * np.asarray(g) * np.cos(np.asarray(ka) / 2.0) ** 2


def mode_beta(ka, g):
    """Pairing mode coefficient beta = 2 g sin(ka)."""
    return 2.0 * np.asarray(g) * np.sin(np.asarray(ka))


def mode_epsilon(ka, g):
    """Single-particle energy 2*sqrt(1 - 4 g (1-g) cos^2(ka/2)).

    Evaluated in the cancellation-free arrangement
    2*sqrt(sin^2(ka/2) + (1-2g)^2 cos^2(ka/2)), which is algebraically
    identical but stays accurate near g = 1/2 for small momenta.
    """
    ka = np.asarray(ka)
    g = np.asarray(g)
    s = np.sin(ka / 2.0)
    c = np.cos(ka / 2.0)
    return 2.0 * np.sqrt(s * s + ((1.0 - 2.0 * g) * c) ** 2)


def mode_epsilon_dg(ka, g):
    """d(epsilon)/dg = 8 cos^2(ka/2) (2g-1) / epsilon."""
    ka = np.asarray(ka)
    x = 2.0 * np.asarray(g) - 1.0
    return 8.0 * np.cos(ka / 2.0) ** 2 * x / mode_epsilon(ka, g)


def _check_on_grid(spec: ChainSpec, k: float) -> float:
    grid = momentum_grid(spec)
    i = np.argmin(np.abs(grid - k))
    if abs(grid[i] - k) > 1e-12 * (1.0 + abs(k)):
        raise ValueError(f"k={k} is not on the momentum grid of n={spec.n}, a={spec.a}")
    return float(grid[i])


def mode_coefficients(spec: ChainSpec, k: float, g: float) -> ModeCoefficients:
    """Coefficients (alpha, beta) and energy epsilon of grid mode k at sweep value g."""
    k = _check_on_grid(spec, k)
    ka = k * spec.a
    return ModeCoefficients(
        alpha=float(mode_alpha(ka, g)),
        beta=float(mode_beta(ka, g)),
        epsilon=float(mode_epsilon(ka, g)),
    )


def fundamental_gap(spec: ChainSpec, g: float):
    """Gap 2*epsilon_k of the lowest-momentum pair channel, k = pi/(a*n).

    Minimal at g = 1/2 with value 4*sin(pi/(2n)) = O(1/n).
    """
    return 2.0 * mode_epsilon(spec.smallest_momentum * spec.a, g)


def ground_energy(spec: ChainSpec, g: float) -> float:
    """Energy -(1/2) sum_k epsilon_k of the quasiparticle vacuum."""
    ka = momentum_grid(spec) * spec.a
    return float(-0.5 * np.sum(mode_epsilon(ka, g)))


def excitation_matrix_element(spec: ChainSpec, k: float, g: float) -> complex:
    """Matrix element <s| sum_j sigma^x_j |0> for the pair s = (k, -k).

    Returns 4i g sin(ka) / epsilon_k(g) for k > 0 on the grid; the
    energy gap of this channel is 2*epsilon_k.  The elements of k and
    -k differ only by the sign of sin(ka); channel probabilities depend
    on the magnitude alone.

    The magnitude 4 g |sin(ka)| / epsilon_k is verified against dense
    diagonalization (tests); the phase is fixed by the Jordan-Wigner
    ordering convention in the module docstring and is not observable.
    """
    k = _check_on_grid(spec, k)
    if k <= 0:
        raise ValueError(f"pair channels are labelled by positive k, got k={k}")
    ka = k * spec.a
    return 4.0j * g * np.sin(ka) / mode_epsilon(ka, g)
