"""Built-in nonlinearities: values, derivatives, inverses, assumption checks."""

import numpy as np
import pytest

from mcsvortex import builtin, check_assumptions


def test_u1_values():
    m = builtin("u1", s=1.0)
    t = np.array([0.0, 0.5, 2.5])
    f, fp, fpp = m.eval(t)
    np.testing.assert_allclose(f, t)
    np.testing.assert_allclose(fp, 1.0)
    np.testing.assert_allclose(fpp, 0.0)
    assert m.f_at_zero == 0.0
    assert m.s == 1.0


def test_cp1_values():
    m = builtin("cp1", s=0.0)
    f, fp, fpp = m.eval(np.array([3.0]))
    assert f[0] == pytest.approx(0.5)
    assert fp[0] == pytest.approx(0.125)
    assert fpp[0] == pytest.approx(-0.0625)
    assert m.f_at_zero == pytest.approx(-1.0)
    assert m.sup_f == 1.0


def test_power_values():
    m = builtin("power", alpha=2.0, s=1.0)
    f, fp, fpp = m.eval(np.array([1.5]))
    assert f[0] == pytest.approx(2.25)
    assert fp[0] == pytest.approx(3.0)
    assert fpp[0] == pytest.approx(2.0)
    half = builtin("power", alpha=0.5, s=1.0)
    f, fp, fpp = half.eval(np.array([4.0]))
    assert f[0] == pytest.approx(2.0)
    assert fp[0] == pytest.approx(0.25)
    assert fpp[0] == pytest.approx(-0.03125)


def test_comb_is_derivative_of_fp_times_t():
    # comb = f'' t + f' = (f' t)'; finite-difference cross-check
    t = np.linspace(0.2, 5.0, 50)
    h = 1e-6
    for name, kwargs in [("u1", {}), ("cp1", {}), ("power", {"alpha": 2.0})]:
        m = builtin(name, **kwargs)
        fd = (m.fp(t + h) * (t + h) - m.fp(t - h) * (t - h)) / (2 * h)
        np.testing.assert_allclose(m.comb(t), fd, rtol=1e-6, atol=1e-6)


@pytest.mark.parametrize(
    "name, kwargs, ys",
    [
        ("u1", {}, [0.2, 1.0, 7.5]),
        ("cp1", {}, [-0.8, 0.0, 0.9]),
        ("power", {"alpha": 2.0}, [0.25, 1.0, 16.0]),
        ("power", {"alpha": 0.5}, [0.5, 1.0, 3.0]),
    ],
)
def test_f_inverse_round_trip(name, kwargs, ys):
    m = builtin(name, **kwargs)
    for y in ys:
        t = m.f_inverse(y)
        assert float(m.f(np.array(t))) == pytest.approx(y, abs=1e-10)


@pytest.mark.parametrize(
    "name, kwargs, msg",
    [
        ("u1", {"s": 0.0}, r"\(f1\) violated"),
        ("u1", {"s": -2.0}, r"\(f1\) violated"),
        ("cp1", {"s": 1.5}, r"\(f1\) violated"),
        ("cp1", {"s": -1.0}, r"\(f1\) violated"),
        ("power", {"s": 0.0}, r"\(f1\) violated"),
        ("power", {"alpha": 0.0}, "alpha"),
        ("u1", {"beta": 1.0}, "unknown u1 parameters"),
        ("nosuch", {}, "unknown model"),
    ],
)
def test_builtin_validation(name, kwargs, msg):
    with pytest.raises(ValueError, match=msg):
        builtin(name, **kwargs)


@pytest.mark.parametrize(
    "name, kwargs",
    [("u1", {}), ("cp1", {}), ("power", {"alpha": 2.0}), ("power", {"alpha": 0.5})],
)
def test_assumption_certificates(name, kwargs):
    m = builtin(name, **kwargs)
    rep = check_assumptions(m)
    assert rep.monotone
    assert rep.range_ok
    assert rep.declared_class_ok
    assert rep.ok
    assert any(name in line or "passed" in line for line in rep.summary_lines())


def test_u1_is_class_a_with_unit_ratio():
    rep = check_assumptions(builtin("u1"))
    assert rep.class_a
    assert rep.ratio_a_max == pytest.approx(1.0, rel=1e-12)


def test_cp1_is_class_b_with_interior_peak():
    rep = check_assumptions(builtin("cp1"))
    assert rep.class_b
    assert rep.bound_b_edge_ok
    assert np.isfinite(rep.bound_b_max)


def test_check_assumptions_validation():
    m = builtin("u1")
    with pytest.raises(ValueError, match="t_min"):
        check_assumptions(m, t_max=1.0, t_min=2.0)
    with pytest.raises(ValueError, match="sample"):
        check_assumptions(m, samples=10)
