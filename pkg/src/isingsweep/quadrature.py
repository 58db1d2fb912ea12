"""Panel-adaptive quadrature for highly oscillatory integrals.

Evaluates ``I = int_a^b f(x) exp(i*Phi(x)) dx`` given only ``f`` and the
phase derivative ``Phi'``; the phase itself is reconstructed per panel
by spectral antidifferentiation, so huge absolute phases never enter.

Each panel samples ``f`` and ``Phi'`` at Chebyshev-Lobatto nodes.
Panels whose accumulated phase is small are integrated directly by
Clenshaw-Curtis on the full oscillatory integrand (this is what happens
automatically around stationary points, where ``Phi'`` passes through
zero).  Rapidly oscillating panels use Levin collocation, whose cost is
independent of the oscillation count: solve ``p' + i Phi' p = f`` and
evaluate ``p exp(i Phi)`` at the panel ends.  Every panel estimate is
paired with a half-order estimate on the nested node subset; panels are
bisected depth-first, left to right, until the error budget is met.

Naive composite quadrature would cost O(total phase) evaluations and
make long-sweep amplitude scans intractable; this scheme costs
O(panels * order) with the panel count set by the smoothness of ``f``
and ``Phi'`` alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as _cheb

__all__ = ["OscillatoryResult", "QuadratureError", "oscillatory_integral"]

# Panels with |accumulated phase| below this are integrated directly by
# Clenshaw-Curtis; above it Levin collocation takes over.  Order 32
# resolves ~3 oscillations per panel with ample margin.
_CC_PHASE_LIMIT = 6.0 * np.pi


class QuadratureError(RuntimeError):
    """Oscillatory quadrature failed to converge; carries diagnostics."""


@dataclass
class OscillatoryResult:
    value: complex
    error: float
    panels: int
    evaluations: int


@lru_cache(maxsize=None)
def _panel_setup(order: int):
    """Nodes and transform/differentiation matrices for one panel order.

    Returns ascending Chebyshev-Lobatto nodes on [-1, 1], the
    values->Chebyshev-coefficient matrix, and the differentiation
    matrix acting on values at those nodes.
    """
    j = np.arange(order + 1)
    x = -np.cos(np.pi * j / order)  # ascending
    vand = _cheb.chebvander(x, order)
    to_coeffs = np.linalg.inv(vand)
    # Differentiation matrix: D = V' * V^-1 with V'[i, j] = T_j'(x_i).
    dvand = np.zeros_like(vand)
    for deg in range(order + 1):
        c = np.zeros(order + 1)
        c[deg] = 1.0
        dvand[:, deg] = _cheb.chebval(x, _cheb.chebder(c))
    diff = dvand @ to_coeffs
    return x, to_coeffs, diff


def _rel_phase(dphi_vals: np.ndarray, half_width: float, to_coeffs: np.ndarray, x: np.ndarray):
    """Phase relative to the panel's left edge from Phi' samples."""
    coeffs = to_coeffs @ dphi_vals
    anti = _cheb.chebint(coeffs) * half_width
    return _cheb.chebval(x, anti) - _cheb.chebval(-1.0, anti)


def _cc_integral(vals: np.ndarray, half_width: float, to_coeffs: np.ndarray) -> complex:
    """Clenshaw-Curtis integral of sampled values over the panel."""
    coeffs = to_coeffs @ vals
    anti = _cheb.chebint(coeffs)
    return half_width * (_cheb.chebval(1.0, anti) - _cheb.chebval(-1.0, anti))


def _panel_value(f_vals, dphi_vals, phi_rel, phase_left, half_width, order) -> complex:
    """One panel estimate: Clenshaw-Curtis or Levin depending on phase."""
    x, to_coeffs, diff = _panel_setup(order)
    span = np.ptp(phi_rel)
    if span <= _CC_PHASE_LIMIT:
        w = f_vals * np.exp(1j * (phase_left + phi_rel))
        return _cc_integral(w, half_width, to_coeffs)
    # Levin collocation: (d/dx + i Phi') p = f on the panel.
    A = diff / half_width + 1j * np.diag(dphi_vals)
    p, *_ = np.linalg.lstsq(A, f_vals.astype(complex), rcond=None)
    ends = np.exp(1j * (phase_left + phi_rel[[0, -1]]))
    return p[-1] * ends[1] - p[0] * ends[0]


def oscillatory_integral(
    amplitude,
    phase_derivative,
    a: float,
    b: float,
    abs_tol: float,
    *,
    order: int = 32,
    max_panels: int = 20000,
    phase_left: float = 0.0,
) -> OscillatoryResult:
    """Integrate amplitude(x) * exp(i * Phi(x)) over [a, b].

    ``amplitude`` and ``phase_derivative`` must accept arrays.  The
    phase is taken as ``phase_left + int_a^x Phi'``.  ``abs_tol`` is an
    absolute accuracy budget distributed over panels.
    """
    if not b > a:
        raise ValueError(f"empty or reversed interval [{a}, {b}]")
    if not abs_tol > 0:
        raise ValueError("abs_tol must be positive")
    if order % 2 != 0:
        raise ValueError("order must be even (nested half-order error check)")

    x_hi, tc_hi, _ = _panel_setup(order)
    x_lo, tc_lo, _ = _panel_setup(order // 2)
    width_total = b - a

    total = 0.0 + 0.0j
    err_total = 0.0
    panels = 0
    evals = 0
    worst = (0.0, a, b)  # (error, left, right) of the worst accepted panel

    # Depth-first, left to right so the accumulated phase stays exact.
    stack = [(a, b, 42)]  # (left, right, remaining depth)
    phase_acc = phase_left
    while stack:
        left, right, depth = stack.pop()
        hw = 0.5 * (right - left)
        mid = 0.5 * (right + left)
        pts = mid + hw * x_hi
        f_hi = np.asarray(amplitude(pts), dtype=complex)
        d_hi = np.asarray(phase_derivative(pts), dtype=float)
        evals += pts.size
        phi_hi = _rel_phase(d_hi, hw, tc_hi, x_hi)
        span = np.ptp(phi_hi)
        # A stationary point inside a rapidly oscillating panel defeats
        # Levin collocation; keep bisecting until direct integration
        # takes over around it.
        saddle_inside = d_hi.min() < 0.0 < d_hi.max() and span > _CC_PHASE_LIMIT
        if saddle_inside and depth > 0:
            stack.append((mid, right, depth - 1))
            stack.append((left, mid, depth - 1))
            continue
        I_hi = _panel_value(f_hi, d_hi, phi_hi, phase_acc, hw, order)
        # Nested half-order estimate on every other node.
        sub = slice(None, None, 2)
        phi_lo = _rel_phase(d_hi[sub], hw, tc_lo, x_lo)
        I_lo = _panel_value(f_hi[sub], d_hi[sub], phi_lo, phase_acc, hw, order // 2)
        err = abs(I_hi - I_lo)
        budget = abs_tol * (right - left) / width_total
        if err <= budget:
            total += I_hi
            err_total += err
            phase_acc += phi_hi[-1]
            panels += 1
            if err > worst[0]:
                worst = (err, left, right)
            if panels > max_panels:
                raise QuadratureError(
                    f"oscillatory quadrature used more than {max_panels} panels on "
                    f"[{a}, {b}]; worst panel [{worst[1]:.6g}, {worst[2]:.6g}] "
                    f"error {worst[0]:.3e}, phase span {span:.3e} rad"
                )
        elif depth == 0:
            raise QuadratureError(
                f"oscillatory quadrature did not converge on panel "
                f"[{left:.9g}, {right:.9g}] (width {right - left:.3e}): "
                f"error {err:.3e} vs budget {budget:.3e}, "
                f"phase span {span:.3e} rad over the panel"
            )
        else:
            stack.append((mid, right, depth - 1))
            stack.append((left, mid, depth - 1))

    return OscillatoryResult(value=total, error=err_total, panels=panels, evaluations=evals)
