import numpy as np
import pytest

from isingsweep.chain import ChainSpec, mode_alpha, momentum_grid
from isingsweep.dynamics import (
    BogoliubovState,
    _integrate_single_mode,
    adiabatic_overlap,
    adiabatic_solution,
    excitation_probability,
    instantaneous_pair,
    integrate_modes,
)
from isingsweep.oracle import (
    UniformSweepPath,
    embed_sector_vector,
    schrodinger_evolve,
    spectrum,
    uniform_hamiltonian,
)
from isingsweep.schedules import LinearSchedule, Schedule


class FrozenSchedule(Schedule):
    """g held constant; for decoupled-mode sanity checks."""

    kind = "frozen"

    def __init__(self, g0, total_time):
        self.g0 = g0
        self.total_time = total_time
        self.spec = None

    def g_of_t(self, t):
        return self.g0 * np.ones_like(np.asarray(t, dtype=float)) if np.ndim(t) else self.g0

    def g_dot(self, t):
        return 0.0

    def velocity_of_g(self, g):
        return 0.0


def test_initial_condition_is_polarized_ground_state():
    spec = ChainSpec(8)
    sched = LinearSchedule(50.0, spec)
    for k in momentum_grid(spec)[momentum_grid(spec) > 0]:
        u, v = adiabatic_solution(spec, float(k), sched, 0.0)
        assert u == pytest.approx(1.0, abs=1e-14)
        assert v == pytest.approx(0.0, abs=1e-14)


def test_closed_form_normalized_everywhere():
    spec = ChainSpec(8)
    rng = np.random.default_rng(7)
    for _ in range(50):
        k = rng.choice(momentum_grid(spec))
        g = rng.uniform(0, 1)
        u, v = instantaneous_pair(spec, k, g, theta=rng.uniform(0, 7))
        assert abs(u) ** 2 + abs(v) ** 2 == pytest.approx(1.0, abs=1e-14)


def test_pair_amplitude_at_critical_point_n2():
    # ka = pi/2 at the critical point: alpha=1, beta=1, eps=sqrt(2),
    # giving |v|^2 = 1/(4 + 2 sqrt(2))
    spec = ChainSpec(2)
    u, v = instantaneous_pair(spec, np.pi / 2, 0.5)
    assert abs(v) ** 2 == pytest.approx(1.0 / (4.0 + 2.0 * np.sqrt(2.0)), rel=1e-14)
    assert abs(u) ** 2 + abs(v) ** 2 == pytest.approx(1.0, abs=1e-15)


def test_frozen_field_mode_decouples():
    # at g = 0 the pairing term vanishes: u picks up exp(i alpha t) only
    spec = ChainSpec(4)
    sched = FrozenSchedule(0.0, 5.0)
    ka = np.pi / 4
    t_grid = np.linspace(0.0, 5.0, 11)
    y = _integrate_single_mode(spec, sched, ka, t_grid, rtol=1e-11)
    expected = np.exp(1j * mode_alpha(ka, 0.0) * t_grid)
    np.testing.assert_allclose(y[0], expected, atol=1e-9)
    np.testing.assert_allclose(y[1], 0.0, atol=1e-12)


def test_excitation_probability_limits():
    spec = ChainSpec(8)
    kpos = momentum_grid(spec)[momentum_grid(spec) > 0]
    g = 0.37
    ug, vg = instantaneous_pair(spec, kpos, g)
    gs = BogoliubovState(t=0.0, g=g, k=kpos, u=ug, v=vg, theta=np.zeros_like(kpos))
    p = excitation_probability(gs, spec, g)
    assert max(p.values()) < 1e-28
    # orthogonal (excited) pair has probability one
    exc = BogoliubovState(t=0.0, g=g, k=kpos, u=-np.conj(vg), v=np.conj(ug),
                          theta=np.zeros_like(kpos))
    p = excitation_probability(exc, spec, g)
    assert min(p.values()) == pytest.approx(1.0, abs=1e-14)


def test_norm_conservation_and_adiabatic_limit():
    spec = ChainSpec(6)
    sched = LinearSchedule(400.0, spec)
    t_grid = np.linspace(0.0, 400.0, 9)
    traj = integrate_modes(spec, sched, t_grid, rtol=1e-10)
    assert traj.max_norm_drift <= 10 * 1e-10
    # very slow sweep: final excitation probabilities vanish
    assert traj.p[:, -1].max() < 1e-4


def test_mode_order_independence_bitwise():
    spec = ChainSpec(6)
    sched = LinearSchedule(20.0, spec)
    t_grid = np.linspace(0.0, 20.0, 5)
    traj = integrate_modes(spec, sched, t_grid, rtol=1e-10)
    # integrating any single mode in isolation reproduces its row exactly
    for i, k in enumerate(traj.k[::-1]):
        idx = len(traj.k) - 1 - i
        y = _integrate_single_mode(spec, sched, float(k) * spec.a, t_grid, rtol=1e-10)
        np.testing.assert_array_equal(y[0], traj.u[idx])
        np.testing.assert_array_equal(y[1], traj.v[idx])


def test_negative_momentum_gives_same_probability():
    spec = ChainSpec(6)
    sched = LinearSchedule(15.0, spec)
    t_grid = np.linspace(0.0, 15.0, 4)
    k = momentum_grid(spec)[momentum_grid(spec) > 0][0]
    y_pos = _integrate_single_mode(spec, sched, k * spec.a, t_grid, rtol=1e-11)
    y_neg = _integrate_single_mode(spec, sched, -k * spec.a, t_grid, rtol=1e-11)
    ug, vg = instantaneous_pair(spec, k, 1.0)
    p_pos = abs(ug * y_pos[1][-1] - vg * y_pos[0][-1]) ** 2
    ugm, vgm = instantaneous_pair(spec, -k, 1.0)
    p_neg = abs(ugm * y_neg[1][-1] - vgm * y_neg[0][-1]) ** 2
    assert p_pos == pytest.approx(p_neg, rel=1e-9)


def test_total_excitation_matches_dense_evolution_n4():
    # sum over channels against the full many-body excited population
    n, T = 4, 30.0
    spec = ChainSpec(n)
    sched = LinearSchedule(T, spec)
    t_grid = np.linspace(0.0, T, 7)
    traj = integrate_modes(spec, sched, t_grid, rtol=1e-12)

    w0, V0 = spectrum(uniform_hamiltonian(n, 0.0), sector="even", eigenvectors=True)
    psi0 = embed_sector_vector(V0[:, 0], n, "even").astype(complex)
    tt, states = schrodinger_evolve(UniformSweepPath(spec, sched), psi0, T,
                                    rtol=1e-12, t_eval=t_grid)
    for i in (3, 5, 6):
        g = float(sched.g_of_t(t_grid[i]))
        wg, Vg = spectrum(uniform_hamiltonian(n, g), sector="even", eigenvectors=True)
        gs = embed_sector_vector(Vg[:, 0], n, "even")
        p_dense = 1.0 - abs(np.vdot(gs, states[:, i])) ** 2
        p_modes = sum(excitation_probability(traj.state_at(i), spec, g).values())
        assert abs(p_dense - p_modes) < 1e-6


def test_landau_zener_decay_of_lowest_mode():
    # ln p_k is affine in T (ka)^2 with the two-level sweep rate constant
    spec = ChainSpec(8)
    k1 = np.pi / 8
    s, c = np.sin(k1 / 2), np.cos(k1 / 2)
    Ts = np.array([20.0, 30.0, 40.0, 55.0, 70.0])
    ps = []
    for T in Ts:
        traj = integrate_modes(spec, LinearSchedule(T, spec), np.linspace(0, T, 3), rtol=1e-11)
        ps.append(excitation_probability(traj.final_state(), spec, 1.0)[k1])
    slope, _ = np.polyfit(Ts * k1**2, np.log(ps), 1)
    assert slope == pytest.approx(-np.pi * s**2 / (c * k1**2), rel=0.15)


def test_adiabatic_overlap_near_unity():
    spec = ChainSpec(4)
    T = 600.0
    sched = LinearSchedule(T, spec)
    traj = integrate_modes(spec, sched, np.linspace(0.0, T, 5), rtol=1e-11)
    ov = adiabatic_overlap(spec, sched, traj.final_state())
    assert np.all(ov >= 1 - 1e-3)


def test_trajectory_csv_round_trip(tmp_path):
    spec = ChainSpec(4)
    sched = LinearSchedule(5.0, spec)
    traj = integrate_modes(spec, sched, np.linspace(0.0, 5.0, 3), rtol=1e-10)
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "t,g,k,re_u,im_u,re_v,im_v,p_k"
    assert len(rows) == 1 + 3 * 2  # header + times * positive modes
