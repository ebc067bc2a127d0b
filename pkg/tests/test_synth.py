import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lrjs.config import STANDARD_PHANTOM_FS, STANDARD_PHANTOM_M, standard_phantom
from lrjs.imaging import envelope
from lrjs.model import FourierSupport, Scheme, signed_bins
from lrjs.operators import PartialFourierOp, analyze
from lrjs.synth import (
    Cyst,
    PhantomSpec,
    cyst_regions,
    gen_lowrank_jointsparse,
    gen_pattern,
    gen_phantom_rf,
    standard_instance,
)

SUP128 = FourierSupport.from_band(128, 3.5e6, 37.5e6)


def test_rank_zero_is_zero_frame():
    x, d = gen_lowrank_jointsparse(128, 16, SUP128, 0, 8)
    assert not x.data.any() and not d.data.any()


def test_full_rank_full_support():
    sup = FourierSupport.from_band(32, 1.0, 6.0)
    _, d = gen_lowrank_jointsparse(32, 40, sup, sup.k, sup.k, seed=3)
    assert np.linalg.matrix_rank(d.data) == sup.k


def test_standard_instance_structure():
    x, d = standard_instance(seed=1)
    assert d.support.k == 24 and x.shape == (128, 64)
    s = np.linalg.svd(d.data, compute_uv=False)
    assert np.all(s[3:] < 1e-10 * s[0]) and s[2] > 1e-3 * s[0]
    assert int(np.count_nonzero(np.linalg.norm(d.data, axis=1) > 0)) == 8
    assert d.conjugate_asymmetry() <= 1e-14


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), r=st.integers(1, 4), extra=st.integers(0, 6))
def test_rank_and_row_chain(seed, r, extra):
    kk = r + extra + (r + extra) % 2  # in-band bins only come in conjugate pairs
    x, d = gen_lowrank_jointsparse(128, 24, SUP128, r, kk, seed=seed)
    sx = np.linalg.svd(x.data, compute_uv=False)
    sd = np.linalg.svd(d.data, compute_uv=False)
    rank_x = int(np.count_nonzero(sx > 1e-10 * sx[0]))
    rank_d = int(np.count_nonzero(sd > 1e-10 * sd[0]))
    assert rank_x <= rank_d <= r
    dx = analyze(PartialFourierOp(SUP128), x).data
    norms = np.linalg.norm(dx, axis=1)
    assert int(np.count_nonzero(norms > 1e-10 * norms.max())) <= kk
    # x is exactly band-limited and real
    np.testing.assert_allclose(dx, d.data, atol=1e-12)


def test_infeasible_rank_raises():
    with pytest.raises(ValueError, match="conjugate"):
        gen_lowrank_jointsparse(128, 64, SUP128, 3, 7)
    with pytest.raises(ValueError):
        gen_lowrank_jointsparse(128, 64, SUP128, 5, 4)
    with pytest.raises(ValueError):
        gen_lowrank_jointsparse(128, 64, SUP128, 3, 25)


def test_generators_deterministic():
    a, da = standard_instance(seed=7)
    b, db = standard_instance(seed=7)
    assert np.array_equal(a.data, b.data) and np.array_equal(da.data, db.data)
    p1, p2 = gen_pattern(50, 20, 0.3, seed=4), gen_pattern(50, 20, 0.3, seed=4)
    assert np.array_equal(p1.flat, p2.flat)
    spec = PhantomSpec(background_density=2.0, seed=9)
    f1, f2 = gen_phantom_rf(spec, 25e6, 512), gen_phantom_rf(spec, 25e6, 512)
    assert np.array_equal(f1.data, f2.data)


def test_pattern_counts():
    assert gen_pattern(10, 7, 1.0, scheme=Scheme.UNIFORM_GLOBAL).size == 70
    assert gen_pattern(10, 7, 1.0).size == 70
    assert gen_pattern(40, 25, 0.10, scheme=Scheme.UNIFORM_GLOBAL).size == 100
    p = gen_pattern(10, 9, 0.5, scheme=Scheme.UNIFORM_PER_CHANNEL, seed=2)
    assert np.array_equal(np.bincount(p.cols, minlength=9), np.full(9, 5))
    with pytest.raises(ValueError):
        gen_pattern(10, 9, 0.0)


@settings(max_examples=40, deadline=None)
@given(m=st.integers(2, 40), n=st.integers(1, 20), sr=st.floats(0.05, 1.0), seed=st.integers(0, 99))
def test_global_pattern_size_property(m, n, sr, seed):
    count = round(sr * m * n)
    if count < 1:
        return
    p = gen_pattern(m, n, sr, scheme=Scheme.UNIFORM_GLOBAL, seed=seed)
    assert p.size == count and len(set(p.flat.tolist())) == count


def test_phantom_without_scatterers_is_zero():
    spec = PhantomSpec(background_density=0.0)
    assert not gen_phantom_rf(spec, 25e6, 256).data.any()


def test_equidistant_scatterer_gives_identical_channels():
    # elements are symmetric about x=0, so channel j and n-1-j see x=0 identically
    spec = PhantomSpec(background_density=0.0, scatterers=((0.0, 10.0, 1.0),), n_elements=8)
    x = gen_phantom_rf(spec, 25e6, 512).data
    assert x.any()
    np.testing.assert_array_equal(x[:, 2], x[:, 5])
    np.testing.assert_array_equal(x[:, 0], x[:, 7])


def test_default_pulse_mostly_in_band():
    spec = PhantomSpec(background_density=3.0, seed=1)  # bandwidth 0.6 default
    x = gen_phantom_rf(spec, 25e6, 1024).data
    power = np.abs(np.fft.fft(x, axis=0)) ** 2
    f = np.abs(signed_bins(1024)) * 25e6 / 1024
    inband = (f >= 0.5 * spec.fc) & (f <= 1.5 * spec.fc)
    frac_out = power[~inband].sum(axis=0) / power.sum(axis=0)
    assert np.all(frac_out < 0.05)


def test_nyquist_violation():
    with pytest.raises(ValueError):
        gen_phantom_rf(PhantomSpec(fc=10e6), 25e6, 128)


def test_cyst_is_darker_than_background():
    spec = standard_phantom(seed=0)
    x = gen_phantom_rf(spec, STANDARD_PHANTOM_FS, STANDARD_PHANTOM_M)
    env = envelope(x)
    reg = cyst_regions(spec, STANDARD_PHANTOM_FS, STANDARD_PHANTOM_M)
    (r0, c0, h, w), (b0, d0, bh, bw) = reg.target, reg.background
    assert env[r0:r0 + h, c0:c0 + w].mean() < 0.5 * env[b0:b0 + bh, d0:d0 + bw].mean()


def test_cyst_multiplier_applied():
    spec = PhantomSpec(background_density=5.0, cysts=(Cyst(0.0, 15.0, 4.0, 0.0),), seed=3)
    pts = spec.draw_scatterers()
    assert not np.any(np.hypot(pts[:, 0], pts[:, 1] - 15.0) <= 4.0)
    with pytest.raises(ValueError):
        PhantomSpec(cysts=(Cyst(0.0, 15.0, 4.0, -1.0),))
