"""Sweep schedules g(t) and the step-wise spatial interpolation path.

Three homogeneous schedule kinds drive the uniform sweep: constant
speed (g = t/T) and two gap-adapted kinds with dg/dt proportional to
the fundamental gap or its square, normalized so g(T) = 1.  The
adapted kinds are tabulated once at construction by integrating the
autonomous rate equation and queried through a monotone interpolant;
their velocity is always reported from the defining rate equation, not
by differencing.

The step-wise path replaces transverse-field terms by ferromagnetic
bonds one site at a time on an open chain: step 1 turns the fields on
sites 1 and 2 into the first bond, every later step j converts the
field on site j+1 into bond (j, j+1).  Within a step the weights
interpolate linearly; consecutive steps share their boundary weights
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import PchipInterpolator

from .chain import ChainSpec, fundamental_gap, mode_epsilon

__all__ = [
    "Schedule",
    "LinearSchedule",
    "GapAdaptedSchedule",
    "StepWisePath",
    "StepWiseSweep",
    "make_schedule",
    "schedule_from_dict",
    "stepwise_hamiltonian_weights",
    "runtime_for_adiabaticity",
]

_POWERS = {"linear": 0, "gap-adapted-1": 1, "gap-adapted-2": 2}


class Schedule:
    """Common interface of the homogeneous g(t) schedules."""

    kind: str
    total_time: float
    spec: ChainSpec | None

    def g_of_t(self, t):
        raise NotImplementedError

    def g_dot(self, t):
        raise NotImplementedError

    def velocity_of_g(self, g):
        """dg/dt as a function of g (closed form, exact)."""
        raise NotImplementedError

    def _check_time(self, t):
        t = np.asarray(t, dtype=float)
        slop = 1e-12 * self.total_time
        if np.any(t < -slop) or np.any(t > self.total_time + slop):
            raise ValueError(f"t outside [0, {self.total_time}]")
        return np.clip(t, 0.0, self.total_time)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "total_time": self.total_time}
        if self.spec is not None:
            d["n"] = self.spec.n
            d["a"] = self.spec.a
        return d


class LinearSchedule(Schedule):
    """Constant-speed interpolation g(t) = t/T."""

    kind = "linear"

    def __init__(self, total_time: float, spec: ChainSpec | None = None):
        if not total_time > 0:
            raise ValueError(f"total_time must be positive, got {total_time}")
        self.total_time = float(total_time)
        self.spec = spec

    def g_of_t(self, t):
        return self._check_time(t) / self.total_time

    def g_dot(self, t):
        self._check_time(t)
        return np.broadcast_to(1.0 / self.total_time, np.shape(t)).copy() if np.ndim(t) else 1.0 / self.total_time

    def velocity_of_g(self, g):
        return np.broadcast_to(1.0 / self.total_time, np.shape(g)).copy() if np.ndim(g) else 1.0 / self.total_time

    def time_of_g(self, g):
        return np.asarray(g) * self.total_time


class GapAdaptedSchedule(Schedule):
    """Schedule with dg/dt = c * DeltaE(g)^power, c fixed by g(T) = 1.

    DeltaE is the fundamental gap of the lowest momentum pair, so the
    sweep slows down near the critical point g = 1/2.  Construction
    integrates the rate equation once (tolerance 1e-10) and tabulates
    (t, g); queries interpolate the tabulation monotonically.
    """

    def __init__(self, spec: ChainSpec, total_time: float, power: int, resolution: int = 8193):
        if power not in (1, 2):
            raise ValueError(f"power must be 1 or 2, got {power}")
        if not total_time > 0:
            raise ValueError(f"total_time must be positive, got {total_time}")
        self.kind = f"gap-adapted-{power}"
        self.spec = spec
        self.total_time = float(total_time)
        self.power = power
        self.resolution = int(resolution)

        inv_gap_p, _ = quad(
            lambda g: fundamental_gap(spec, g) ** (-power),
            0.0, 1.0, points=[0.5], limit=200, epsabs=0.0, epsrel=1e-13,
        )
        self._norm_integral = inv_gap_p
        self.rate_constant = inv_gap_p / self.total_time  # c in dg/dt = c*DeltaE^p

        sol = solve_ivp(
            lambda t, y: self.rate_constant * fundamental_gap(spec, y[0]) ** power,
            (0.0, self.total_time), [0.0],
            method="DOP853", rtol=1e-11, atol=1e-13,
            t_eval=np.linspace(0.0, self.total_time, self.resolution),
        )
        if not sol.success:
            raise RuntimeError(f"schedule tabulation failed: {sol.message}")
        g_tab = np.maximum.accumulate(np.clip(sol.y[0], 0.0, 1.0))
        self._t_tab = sol.t
        self._g_tab = g_tab
        self._interp = PchipInterpolator(self._t_tab, self._g_tab)

    def g_of_t(self, t):
        t = self._check_time(t)
        return np.clip(self._interp(t), 0.0, 1.0)

    def g_dot(self, t):
        return self.velocity_of_g(self.g_of_t(t))

    def velocity_of_g(self, g):
        return self.rate_constant * fundamental_gap(self.spec, np.asarray(g)) ** self.power

    def time_of_g(self, g):
        g = np.asarray(g, dtype=float)
        gu, idx = np.unique(self._g_tab, return_index=True)
        inv = PchipInterpolator(gu, self._t_tab[idx])
        return np.clip(inv(np.clip(g, 0.0, 1.0)), 0.0, self.total_time)

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["resolution"] = self.resolution
        return d


def make_schedule(kind: str, total_time: float, spec: ChainSpec | None = None,
                  resolution: int = 8193) -> Schedule:
    """Build a homogeneous schedule by kind name."""
    if kind == "linear":
        return LinearSchedule(total_time, spec)
    if kind in ("gap-adapted-1", "gap-adapted-2"):
        if spec is None:
            raise ValueError(f"{kind} needs a ChainSpec for the fundamental gap")
        return GapAdaptedSchedule(spec, total_time, power=_POWERS[kind], resolution=resolution)
    raise ValueError(f"unknown schedule kind {kind!r}")


def schedule_from_dict(d: dict):
    """Rebuild a schedule (or step-wise sweep) from its JSON description."""
    kind = d["kind"]
    if kind == "step-wise":
        return StepWiseSweep(int(d["n"]), float(d["total_time"]))
    spec = None
    if d.get("n") is not None:
        spec = ChainSpec(int(d["n"]), float(d.get("a", 1.0)))
    return make_schedule(kind, float(d["total_time"]), spec,
                         resolution=int(d.get("resolution", 8193)))


@dataclass(frozen=True)
class StepWisePath:
    """One point of the step-wise spatial sweep: step index and local parameter."""

    n: int
    step: int
    s: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if not 1 <= self.step <= self.n - 1:
            raise ValueError(f"step must be in 1..{self.n - 1}, got {self.step}")
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"s must be in [0, 1], got {self.s}")


def stepwise_hamiltonian_weights(path: StepWisePath) -> tuple[np.ndarray, np.ndarray]:
    """Transverse weights h_j and open-chain bond weights J_j at a path point.

    Defines H = -sum_j h_j sigma^x_j - sum_j J_j sigma^z_j sigma^z_{j+1}
    with n-1 bonds and no closing bond.  Step 1 fades the fields on
    sites 1 and 2 together while bond 1 grows; step j >= 2 fades the
    field on site j+1 while bond j grows.
    """
    n, step, s = path.n, path.step, path.s
    h = np.ones(n)
    J = np.zeros(n - 1)
    if step == 1:
        h[0] = h[1] = 1.0 - s
        J[0] = s
    else:
        h[:step] = 0.0
        h[step] = 1.0 - s
        J[: step - 1] = 1.0
        J[step - 1] = s
    return h, J


class StepWiseSweep:
    """Step-wise path traversed in time: equal duration per step, linear in s."""

    kind = "step-wise"

    def __init__(self, n: int, total_time: float):
        if n < 2:
            raise ValueError(f"n must be >= 2, got {n}")
        if not total_time > 0:
            raise ValueError(f"total_time must be positive, got {total_time}")
        self.n = int(n)
        self.total_time = float(total_time)
        self.n_steps = self.n - 1

    def path_at(self, t: float) -> StepWisePath:
        if not 0.0 <= t <= self.total_time * (1 + 1e-12):
            raise ValueError(f"t outside [0, {self.total_time}]")
        frac = min(t / self.total_time, 1.0) * self.n_steps
        step = min(int(frac), self.n_steps - 1)
        return StepWisePath(self.n, step + 1, frac - step)

    def weights_at(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        return stepwise_hamiltonian_weights(self.path_at(t))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "total_time": self.total_time, "n": self.n}


def runtime_for_adiabaticity(kind: str, n: int, epsilon_adiab: float, a: float = 1.0) -> float:
    """Run time T keeping the lowest channel's adiabaticity ratio below a target.

    The per-mode ratio |<s|dH/dt|0>| / DeltaE_s0^2 equals
    g_dot * |sin(k a)| / epsilon_k^3; for all three kinds it peaks at
    the critical point, giving the closed forms

        T = 2^p * J_p * sin(pi/n) / (epsilon_min^(3-p) * epsilon_adiab)

    with p = 0, 1, 2 for linear / gap-adapted-1 / gap-adapted-2,
    J_p = int_0^1 DeltaE^-p dg and epsilon_min = 2 sin(pi/(2n)).
    Asymptotically T = O(n^2), O(n log n), O(n) over 1/epsilon_adiab.
    """
    if kind not in _POWERS:
        raise ValueError(f"unknown schedule kind {kind!r}")
    if not epsilon_adiab > 0:
        raise ValueError(f"epsilon_adiab must be positive, got {epsilon_adiab}")
    spec = ChainSpec(n, a)
    p = _POWERS[kind]
    if p == 0:
        norm = 1.0
    else:
        norm, _ = quad(
            lambda g: fundamental_gap(spec, g) ** (-p),
            0.0, 1.0, points=[0.5], limit=200, epsabs=0.0, epsrel=1e-13,
        )
    eps_min = mode_epsilon(np.pi / n, 0.5)
    return float(2.0**p * norm * np.sin(np.pi / n) * eps_min ** (p - 3) / epsilon_adiab)
