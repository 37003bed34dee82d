"""Property-based checks over randomly drawn channels and symbols."""
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from ciprec.geometry import NONSTRICT, STRICT, beamformer_from_dual, build_kernel, kkt_residuals
from ciprec.iterative import solve_iterative
from ciprec.qp import SimplexQp, project_simplex, solve_active_set_enum
from ciprec.signal_model import SUPPORTED_ORDERS, detect, make_constellation
from ciprec.zf import zf_precode

from _instances import instance, rel

PROFILE = settings(max_examples=150, deadline=None)

shapes = st.tuples(st.integers(1, 6), st.integers(0, 3)).map(lambda t: (t[0], t[0] + t[1]))


@PROFILE
@given(seed=st.integers(0, 2**32 - 1), shape=shapes, M=st.sampled_from((4, 8, 16)),
       mode=st.sampled_from((STRICT, NONSTRICT)), p0=st.floats(0.1, 10.0))
def test_closed_form_solution_is_feasible_and_optimal(seed, shape, M, mode, p0):
    K, Nt = shape
    H, s, const = instance(seed, K, Nt, M)
    k = build_kernel(H, s, p0, mode, const.threshold_angle)
    assert np.abs(k.V_inv @ k.a - 1).max() <= 1e-8
    res = solve_iterative(k)
    bf, dual = beamformer_from_dual(k, res.u)
    assert abs(bf.power - p0) <= 1e-10 * p0
    assert np.abs(H @ bf.W @ s - dual.Lambda * s).max() <= 1e-9 * max(1.0, math.sqrt(p0))
    r = kkt_residuals(dual)
    assert r["simplex"] <= 1e-8 and r["slackness"] <= 1e-8 and r["q_min"] >= -1e-9
    ref = solve_active_set_enum(SimplexQp.from_kernel(k))
    assert rel(dual.objective, ref.objective) <= 1e-8
    _, f = zf_precode(H, s, p0)
    assert dual.t_star >= 1 / f - 1e-9


@PROFILE
@given(seed=st.integers(0, 2**32 - 1), shape=shapes, M=st.sampled_from((4, 8)))
def test_relaxation_never_hurts(seed, shape, M):
    K, Nt = shape
    H, s, const = instance(seed, K, Nt, M)
    t = {}
    for mode in (STRICT, NONSTRICT):
        k = build_kernel(H, s, 1.0, mode, const.threshold_angle)
        t[mode] = beamformer_from_dual(k, solve_iterative(k).u)[1].t_star
    assert t[NONSTRICT] >= t[STRICT] - 1e-9


@settings(max_examples=300, deadline=None)
@given(y=st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=12))
def test_projection_lands_on_simplex(y):
    p = project_simplex(np.array(y))
    assert p.min() >= 0 and abs(p.sum() - 1) <= 1e-9
    np.testing.assert_allclose(project_simplex(p), p, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(M=st.sampled_from(SUPPORTED_ORDERS), phase=st.floats(-10, 10), scale=st.floats(1e-3, 1e3))
def test_detection_is_phase_only(M, phase, scale):
    c = make_constellation(M)
    r = np.array([np.exp(1j * phase)])
    np.testing.assert_array_equal(detect(scale * r, c)[1], detect(r, c)[1])
