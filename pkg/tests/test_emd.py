import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stvsi.emd import (
    EmdConfig,
    count_zero_crossings,
    decompose,
    decompose_values,
    envelope,
    envelopes,
    find_extrema,
    is_imf,
    mean_envelope,
    oscillatory_component,
    sift,
)
from stvsi.errors import InsufficientExtrema, TooShort
from stvsi.trajectory import AnalysisWindow


def corr(a, b):
    return float(np.corrcoef(a, b)[0, 1])


def two_tone(n=3000, dt=1e-3, seed=0):
    r = np.random.default_rng(seed)
    t = np.arange(n) * dt
    f1 = r.uniform(4, 8)
    f2 = r.uniform(0.8, 1.6)
    a1, a2 = r.uniform(0.05, 0.3, 2)
    trend = 1 + r.uniform(-0.3, 0.3) * t
    return trend + a1 * np.sin(2 * np.pi * f1 * t + r.uniform(0, 6)) + a2 * np.sin(
        2 * np.pi * f2 * t + r.uniform(0, 6)
    )


def test_extrema_ramp():
    mx, mn = find_extrema(np.linspace(0, 1, 50))
    assert len(mx) == 0 and len(mn) == 0


def test_extrema_sine_positions():
    t = np.arange(0, 2, 0.01)
    mx, mn = find_extrema(np.sin(2 * np.pi * t))
    assert len(mx) == 2 and len(mn) == 2
    assert np.all(np.abs(t[mx] - np.array([0.25, 1.25])) <= 0.01 + 1e-12)
    assert np.all(np.abs(t[mn] - np.array([0.75, 1.75])) <= 0.01 + 1e-12)


def test_extrema_plateau_midpoint():
    mx, mn = find_extrema([0, 1, 1, 1, 0])
    assert list(mx) == [2] and len(mn) == 0


def test_extrema_edges_excluded():
    mx, mn = find_extrema([5, 1, 2, 1, 5])
    assert list(mx) == [2] and list(mn) == [1, 3]


def test_extrema_too_short():
    with pytest.raises(TooShort):
        find_extrema([1, 2])


def test_zero_crossings():
    assert count_zero_crossings([1, -1, 1, 0, -1]) == 3
    assert is_imf(np.sin(np.linspace(0, 6 * np.pi, 300)))


def test_envelope_constant_amplitude():
    t = np.arange(0, 3, 1e-3)
    x = 0.3 * np.cos(2 * np.pi * 2 * t)
    mx, _ = find_extrema(x)
    up = envelope(x, mx)
    mid = slice(len(t) // 4, 3 * len(t) // 4)
    assert np.max(np.abs(up[mid] - 0.3)) < 0.02 * 0.3


def test_envelope_two_extrema_is_line():
    x = np.zeros(20)
    x[4], x[15] = 1.0, 3.0
    line = envelope(x, [4, 15], boundary="none")
    expected = 1.0 + (np.arange(20) - 4) * 2.0 / 11
    assert np.allclose(line, expected, atol=1e-12)


def test_envelope_insufficient():
    with pytest.raises(InsufficientExtrema):
        envelope(np.ones(10), [3], boundary="none")


def test_envelope_decaying():
    t = np.arange(0, 3, 1e-3)
    x = np.exp(-t) * np.sin(2 * np.pi * 3 * t)
    up, _ = envelopes(x)
    mid = (t > 0.75) & (t < 2.25)
    rel = np.abs(up[mid] / np.exp(-t[mid]) - 1)
    assert rel.max() < 0.05


def test_mean_envelope_of_sine_small():
    t = np.arange(0, 3, 1e-3)
    x = np.sin(2 * np.pi * 2 * t)
    assert np.sqrt(np.mean(mean_envelope(x) ** 2)) < 0.02


def test_sift_pure_sine():
    t = np.arange(0, 3, 1e-3)
    x = np.sin(2 * np.pi * 2 * t)
    imf = sift(x)
    assert corr(imf.values, x) > 0.99


def test_sift_two_tone_separates_fast_tone():
    t = np.arange(0, 4, 1e-3)
    fast = np.sin(2 * np.pi * 5 * t)
    imf = sift(fast + np.sin(2 * np.pi * 0.5 * t))
    inner = slice(len(t) // 8, -len(t) // 8)
    assert corr(imf.values[inner], fast[inner]) > 0.95


def test_sift_single_iteration_contract():
    t = np.arange(0, 2, 1e-3)
    x = np.sin(2 * np.pi * 5 * t) + 0.5 * np.sin(2 * np.pi * 1 * t)
    imf = sift(x, EmdConfig(max_sift_iters=1))
    assert imf.sift_iters == 1
    assert np.array_equal(imf.values, x - mean_envelope(x))


def test_sift_needs_extrema():
    with pytest.raises(InsufficientExtrema):
        sift(np.linspace(0, 1, 100))


def test_decompose_monotone_recovery_no_imfs():
    t = np.arange(0, 3, 1e-3)
    v = 1 - 0.3 * np.exp(-t)
    d = decompose(AnalysisWindow.from_values(v, 1e-3))
    assert d.n_imfs == 0
    assert np.array_equal(d.residual, v)
    assert np.all(oscillatory_component(d) == 0)


def test_decompose_damped_oscillation_single_mode():
    t = np.arange(0, 3, 1e-3)
    v = np.exp(-0.5 * t) * (1 + 0.2 * np.cos(2 * np.pi * 1.5 * t))
    d = decompose_values(v)
    assert d.n_imfs >= 1
    dominant = max(d.imfs, key=lambda m: np.sum(m.values**2))
    energies = sorted((np.sum(m.values**2) for m in d.imfs), reverse=True)
    assert dominant.index == 1
    if len(energies) > 1:
        assert energies[1] < 0.01 * energies[0]
    mx, mn = find_extrema(d.residual)
    assert len(mx) < 2 or len(mn) < 2
    # residual follows the exponential trend away from the edges
    inner = slice(300, -300)
    assert np.max(np.abs(d.residual[inner] - np.exp(-0.5 * t[inner]))) < 0.02


def test_decompose_two_tone_ramp():
    t = np.arange(0, 4, 1e-3)
    v = 1 + 0.1 * t + 0.2 * np.sin(2 * np.pi * 6 * t) + 0.2 * np.sin(2 * np.pi * 1 * t)
    d = decompose_values(v)
    assert d.n_imfs >= 2
    assert np.max(np.abs(d.imf_matrix().sum(axis=0) + d.residual - v)) < 1e-9
    assert np.all(np.diff(d.residual[200:-200]) > 0)


def test_decompose_too_short():
    with pytest.raises(TooShort):
        decompose_values(np.ones(10))


def test_oscillatory_component_identity():
    v = two_tone(seed=3)
    d = decompose_values(v)
    osc = oscillatory_component(d)
    assert np.allclose(osc, v - d.residual, atol=1e-12)
    assert np.allclose(osc, sum(m.values for m in d.imfs), atol=0)


def test_decompose_deterministic():
    v = two_tone(seed=4)
    a, b = decompose_values(v), decompose_values(v.copy())
    assert a.n_imfs == b.n_imfs
    assert np.array_equal(a.residual, b.residual)
    for x, y in zip(a.imfs, b.imfs):
        assert np.array_equal(x.values, y.values)


def test_mirror_boundary_also_decomposes():
    v = two_tone(seed=5)
    d = decompose_values(v, EmdConfig(boundary="mirror"))
    assert np.max(np.abs(d.imf_matrix().sum(axis=0) + d.residual - v)) < 1e-9


def test_config_validation():
    with pytest.raises(ValueError):
        EmdConfig(sd_tol=0)
    with pytest.raises(ValueError):
        EmdConfig(max_imfs=0)
    with pytest.raises(ValueError):
        EmdConfig(boundary="periodic")


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.01, 100))
def test_amplitude_equivariance(seed, c):
    v = two_tone(n=1500, seed=seed)
    a, b = decompose_values(v), decompose_values(c * v)
    assert a.n_imfs == b.n_imfs
    scale = c * np.max(np.abs(v))
    assert np.max(np.abs(c * a.residual - b.residual)) <= 1e-9 * scale
    for x, y in zip(a.imfs, b.imfs):
        assert np.max(np.abs(c * x.values - y.values)) <= 1e-9 * scale
