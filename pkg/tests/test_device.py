import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from mtjsng.device import (
    CONSTANTS,
    DeviceParams,
    MtjState,
    PulseSpec,
    SwitchingStats,
    Transition,
    current_density,
    derive_anisotropy_field,
    expected_switching_time,
    pulse_width_for_probability,
    resistance,
    switching_distribution,
    switching_pdf_unnormalized,
    switching_probability,
    switching_stats,
)
from mtjsng.errors import DomainError, ParameterError, SubcriticalDrive, UndefinedConditional

AP2P = Transition.AP_TO_P
P2AP = Transition.P_TO_AP


def scipy_oracle(bias, tr, params, width):
    """P_sw and Ex(t_sw) from scipy quad on an independently coded density."""
    r = params.ra / params.area * ((1 + params.tmr) if tr is AP2P else 1.0)
    j = abs(bias) / (r * params.area)
    jx = j - (params.j_c0_aptop if tr is AP2P else params.j_c0_ptoap)
    k = params.eta * CONSTANTS.mu_b / (CONSTANTS.e * params.m_s * params.t_f)

    def dens(t):
        s = math.sin(math.pi / 2 * math.exp(-k * jx * t)) ** 2
        return math.exp(-params.delta * s) * jx * s

    upper = 400e-9
    kw = dict(epsabs=0, epsrel=1e-13, limit=500)
    pts = np.linspace(0, 20e-9, 41)[1:-1]
    total = integrate.quad(dens, 0, 20e-9, points=pts, **kw)[0] + integrate.quad(dens, 20e-9, upper, **kw)[0]
    mass = integrate.quad(dens, 0, width, **kw)[0]
    mom = integrate.quad(lambda t: t * dens(t), 0, width, **kw)[0]
    return mass / total, mom / mass


# -- parameters and electrical model --------------------------------------


def test_defaults_lab_units(params):
    u = params.lab_units()
    assert u["width_nm"] == pytest.approx(20)
    assert u["length_nm"] == pytest.approx(58)
    assert u["m_s_emu_cc"] == pytest.approx(1222)
    assert u["j_c0_ptoap_ma_cm2"] == pytest.approx(7.55)
    assert u["j_c0_aptop_ma_cm2"] == pytest.approx(4.10)
    assert params.j_c0_ptoap > params.j_c0_aptop


@given(
    w=st.floats(1, 500),
    m=st.floats(100, 3000),
    ra=st.floats(0.1, 50),
    j=st.floats(0.1, 100),
)
def test_unit_round_trip(w, m, ra, j):
    p = DeviceParams.from_lab_units(width_nm=w, m_s_emu_cc=m, ra_ohm_um2=ra, j_c0_ptoap_ma_cm2=j + 1, j_c0_aptop_ma_cm2=j)
    u = p.lab_units()
    for key, val in dict(width_nm=w, m_s_emu_cc=m, ra_ohm_um2=ra, j_c0_aptop_ma_cm2=j).items():
        assert u[key] == pytest.approx(val, rel=1e-12)


@pytest.mark.parametrize(
    "field, value",
    [("width", 0.0), ("t_f", -1e-9), ("delta", 0.0), ("eta", 1.5), ("eta", 0.0), ("tmr", -0.1), ("ra", 0.0)],
)
def test_invalid_params_rejected(field, value):
    with pytest.raises(ParameterError):
        DeviceParams(**{field: value})


def test_pulse_validation():
    with pytest.raises(ParameterError):
        PulseSpec(1.0, -1e-9)
    with pytest.raises(ParameterError):
        PulseSpec(float("nan"), 1e-9)


def test_anisotropy_field_matches_cgs_hand_calc(params):
    # Δ = H_K M_s V / (2 k_B T), in CGS: erg = Oe * emu.
    kbt_erg = 1.380649e-16 * 300
    v_cc = 20e-7 * 58e-7 * 2.5e-7
    hk_oe = 2 * 47.5 * kbt_erg / (1222 * v_cc)
    assert hk_oe == pytest.approx(1110.35, rel=1e-4)
    hk = derive_anisotropy_field(params)
    assert hk * 4 * math.pi / 1e3 == pytest.approx(hk_oe, rel=1e-9)
    assert 1.05e3 < hk_oe < 1.15e3


def test_anisotropy_field_scaling(params):
    hk = derive_anisotropy_field(params)
    assert derive_anisotropy_field(DeviceParams(delta=2 * params.delta)) == pytest.approx(2 * hk, rel=1e-12)
    assert derive_anisotropy_field(DeviceParams(t_f=2 * params.t_f)) == pytest.approx(hk / 2, rel=1e-12)


def test_resistance(params):
    assert resistance(params, MtjState.P) == pytest.approx(5 / 1.16e-3, rel=1e-12)
    assert resistance(params, MtjState.P) == pytest.approx(4310, rel=1e-3)
    assert resistance(params.with_tmr(0.0), MtjState.AP) == resistance(params, MtjState.P)
    assert resistance(params.with_tmr(1.0), MtjState.AP) == pytest.approx(2 * resistance(params, MtjState.P))


def test_current_density(params):
    j = current_density(params, PulseSpec(1.2, 0), MtjState.P)
    assert j / 1e10 == pytest.approx(1.2 / 4310.3448 / 1.16e-11 / 1e6, rel=1e-6)
    assert 23.5 < j / 1e10 < 24.5
    assert current_density(params, PulseSpec(0.0, 0), MtjState.P) == 0
    assert current_density(params, PulseSpec(-2.4, 0), MtjState.P) == pytest.approx(2 * j)


def test_transition_tags(params):
    assert AP2P.source is MtjState.AP and AP2P.destination is MtjState.P
    assert P2AP.source is MtjState.P and P2AP.destination is MtjState.AP
    assert P2AP.j_c0(params) == params.j_c0_ptoap


# -- switching density ----------------------------------------------------


def test_subcritical_drive_named(params):
    with pytest.raises(SubcriticalDrive, match="0.2"):
        switching_probability(PulseSpec(0.2, 1e-9), AP2P, params)


def test_pdf_at_zero(params):
    dist = switching_distribution(1.2, AP2P, params)
    v = switching_pdf_unnormalized(0.0, PulseSpec(1.2, 1e-9), AP2P, params)
    assert v == pytest.approx(math.exp(-params.delta) * dist.j_excess, rel=1e-14)
    assert switching_pdf_unnormalized(1e-6, PulseSpec(1.2, 1e-9), AP2P, params) < 1e-100


def test_pdf_unimodal(params):
    t = np.arange(0, 10e-9 + 1e-15, 1e-12)
    d = switching_pdf_unnormalized(t, PulseSpec(1.2, 1e-9), AP2P, params)
    sign = np.sign(np.diff(d))
    sign = sign[sign != 0]
    assert np.count_nonzero(np.diff(sign)) == 1
    assert sign[0] > 0 and sign[-1] < 0


@pytest.mark.parametrize("bias, tr, width", [(1.2, AP2P, 2.73e-9), (1.2, AP2P, 1.0e-9), (-0.8, P2AP, 4.33e-9), (0.6, AP2P, 3e-9)])
def test_against_scipy_oracle(params, bias, tr, width):
    p, ex = scipy_oracle(bias, tr, params, width)
    assert switching_probability(PulseSpec(bias, width), tr, params) == pytest.approx(p, rel=1e-8)
    assert expected_switching_time(PulseSpec(bias, width), tr, params) == pytest.approx(ex, rel=1e-8)


def test_probability_edges(params):
    dist = switching_distribution(1.2, AP2P, params)
    assert dist.probability(0.0) == 0.0
    assert dist.probability(dist.t_inf) >= 1 - 1e-9
    assert dist.probability(10 * dist.t_inf) == 1.0


@pytest.mark.parametrize("c", [1e6, 1e-6])
def test_normalisation_invariance(params, c):
    for bias, tr, w in [(1.2, AP2P, 2.73e-9), (-0.8, P2AP, 4.33e-9)]:
        pulse = PulseSpec(bias, w)
        assert switching_probability(pulse, tr, params, scale=c) == pytest.approx(
            switching_probability(pulse, tr, params), rel=1e-12
        )
        assert expected_switching_time(pulse, tr, params, scale=c) == pytest.approx(
            expected_switching_time(pulse, tr, params), rel=1e-12
        )


@settings(max_examples=25, deadline=None)
@given(bias=st.floats(0.5, 1.6), w1=st.floats(0, 8e-9), w2=st.floats(0, 8e-9))
def test_monotone_in_width(params, bias, w1, w2):
    lo, hi = sorted((w1, w2))
    dist = switching_distribution(bias, AP2P, params)
    assert dist.probability(lo) <= dist.probability(hi)
    if dist.probability(lo) > 1e-12 and lo > 0:
        assert 0 < dist.expected_time(lo) < lo
        assert dist.expected_time(lo) <= dist.expected_time(hi) * (1 + 1e-12)


def test_conditional_undefined_at_zero_width(params):
    with pytest.raises(UndefinedConditional):
        expected_switching_time(PulseSpec(1.2, 0.0), AP2P, params)
    stats = switching_stats(PulseSpec(1.2, 0.0), AP2P, params)
    assert stats == SwitchingStats(0.0, None, stats.j)


def test_expected_time_squeezed(params):
    for w in (1e-12, 1e-11, 1e-10):
        ex = expected_switching_time(PulseSpec(1.2, w), AP2P, params)
        assert 0 < ex < w


@pytest.mark.parametrize("q", [0.01, 0.3, 0.5, 0.9, 0.99])
def test_inverse_round_trip(params, q):
    w = pulse_width_for_probability(1.2, AP2P, q, params)
    assert abs(switching_probability(PulseSpec(1.2, w), AP2P, params) - q) <= 1e-6


def test_inverse_domain(params):
    dist = switching_distribution(1.2, AP2P, params)
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            dist.width_for_probability(bad)


def test_width_examples_after_calibration(params):
    assert pulse_width_for_probability(1.2, AP2P, 0.5, params) == pytest.approx(1.49e-9, rel=0.10)
    assert pulse_width_for_probability(1.2, AP2P, 0.99, params) == pytest.approx(2.73e-9, rel=0.10)


def test_expected_time_vs_rejection_sampling(params):
    # Rejection-sample the unnormalized density on [0, 2.73 ns] as an oracle.
    width = 2.73e-9
    pulse = PulseSpec(1.2, width)
    rng = np.random.default_rng(2024)
    grid = np.linspace(0, width, 20001)
    peak = switching_pdf_unnormalized(grid, pulse, AP2P, params).max() * 1.01
    accepted = []
    while sum(a.size for a in accepted) < 1_000_000:
        t = rng.uniform(0, width, 2_000_000)
        y = rng.uniform(0, peak, t.size)
        accepted.append(t[y < switching_pdf_unnormalized(t, pulse, AP2P, params)])
    t = np.concatenate(accepted)[:1_000_000]
    sem = t.std(ddof=1) / math.sqrt(t.size)
    assert abs(t.mean() - expected_switching_time(pulse, AP2P, params)) < 3 * sem


@pytest.mark.parametrize("seed", range(5))
def test_time_sampling_fraction_matches_cdf(params, seed):
    # Sample switching instants from the whole density by rejection, then
    # count those inside a random pulse width.
    rng = np.random.default_rng(seed)
    tr = AP2P if seed % 2 else P2AP
    bias = rng.uniform(0.6, 1.5) * (1 if tr is AP2P else -1)
    dist = switching_distribution(bias, tr, params)
    width = rng.uniform(0.3, 1.5) * dist.width_for_probability(0.5)
    t_hi = dist.width_for_probability(1 - 1e-7)
    peak = dist.pdf(np.linspace(0, t_hi, 20001)).max() * 1.01
    n = 100_000
    got = []
    while sum(g.size for g in got) < n:
        t = rng.uniform(0, t_hi, 4 * n)
        y = rng.uniform(0, peak, t.size)
        got.append(t[y < dist.pdf(t)])
    t = np.concatenate(got)[:n]
    p = dist.probability(width)
    frac = np.mean(t <= width)
    assert abs(frac - p) <= 4 * math.sqrt(p * (1 - p) / n) + 1e-7


def test_inverse_cdf_sampler(params):
    dist = switching_distribution(1.2, AP2P, params)
    w = 2.0e-9
    u = np.linspace(0.0005, 0.9995, 1000)
    t = dist.sample(u, w)
    assert np.all((t >= 0) & (t <= w))
    assert np.all(np.diff(t) >= 0)
    target = u * dist.mass(w)
    got = np.array([dist.mass(x) for x in t])
    assert np.max(np.abs(got - target)) / dist.total_mass <= 1e-12
