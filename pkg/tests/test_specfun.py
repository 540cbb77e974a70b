import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dma_nearfield import specfun
from dma_nearfield.specfun import QuadratureError, erfi, fresnel, fresnel_c, fresnel_s, quadrature_oracle

finite = dict(allow_nan=False, allow_infinity=False)
coord = st.floats(-10, 10, **finite)


def mp_erfi(z):
    return complex(mpmath.erfi(mpmath.mpc(z.real, z.imag)))


def mp_fresnel(x):
    return float(mpmath.fresnelc(x)), float(mpmath.fresnels(x))


class TestErfi:
    def test_zero(self, kernels):
        assert kernels.erfi(0j) == 0

    @pytest.mark.parametrize("z", [0.3, 1.0, 2.5 - 1j, 1.4 + 1.4j, -3 + 7j, 12 + 11j, 0.01j, 25 - 24j, 1.49 + 0.05j])
    def test_matches_mpmath(self, kernels, z):
        got, ref = kernels.erfi(complex(z)), mp_erfi(complex(z))
        assert abs(got - ref) <= 1e-12 * abs(ref)

    def test_random_against_mpmath(self, kernels):
        rng = np.random.default_rng(3)
        mod = rng.uniform(0, 26, 300)
        arg = rng.uniform(0, 2 * math.pi, 300)
        worst = 0.0
        for z in mod * np.exp(1j * arg):
            if (z * z).real > 700:
                continue
            ref = mp_erfi(complex(z))
            worst = max(worst, abs(kernels.erfi(complex(z)) - ref) / abs(ref))
        assert worst < 1e-12

    def test_real_axis_is_real_integral(self):
        ref = quadrature_oracle("exp_sq", 0.0, 1.0, c=1.0) * 2 / math.sqrt(math.pi)
        assert erfi(1.0) == pytest.approx(ref, rel=1e-13)
        assert erfi(1.0).imag == 0.0

    def test_odd_example(self):
        z = 1.3 + 0.7j
        assert erfi(-z) == pytest.approx(-erfi(z), rel=1e-15)

    @given(coord, coord)
    def test_odd(self, x, y):
        z = complex(x, y)
        assert abs(erfi(-z) + erfi(z)) <= 4e-16 * max(1.0, abs(erfi(z)))

    @given(coord, coord)
    def test_conjugate_symmetry(self, x, y):
        z = complex(x, y)
        assert abs(erfi(z.conjugate()) - erfi(z).conjugate()) <= 4e-16 * max(1.0, abs(erfi(z)))

    @given(st.floats(-1e-3, 1e-3, **finite), st.floats(-1e-3, 1e-3, **finite))
    def test_small_argument_slope(self, x, y):
        z = complex(x, y)
        assert erfi(z) == pytest.approx(2 / math.sqrt(math.pi) * z * (1 + z * z / 3), rel=1e-10, abs=1e-300)

    def test_overflow_signalled(self, kernels):
        with pytest.raises(OverflowError):
            kernels.erfi(30 + 0j)
        with pytest.raises(OverflowError):
            kernels.erfi(complex(27, 1))

    def test_large_but_representable(self, kernels):
        z = complex(26.5, 0.1)
        ref = mp_erfi(z)
        assert math.isfinite(abs(kernels.erfi(z)))
        assert abs(kernels.erfi(z) - ref) <= 1e-12 * abs(ref)

    def test_nonfinite_rejected(self, kernels):
        with pytest.raises(ValueError):
            kernels.erfi(complex(math.nan, 0))

    def test_array_input(self):
        zs = np.array([[0.5, 1j], [2 - 1j, -0.25]])
        out = erfi(zs)
        assert out.shape == (2, 2)
        assert out[1, 0] == erfi(2 - 1j)

    def test_faddeeva_matches_scipy(self, kernels):
        from scipy.special import wofz
        rng = np.random.default_rng(11)
        for z in rng.uniform(-20, 20, 200) + 1j * rng.uniform(-20, 20, 200):
            if (z * z).real < -700 and z.imag < 0:
                continue
            ref = wofz(z)
            assert abs(kernels.faddeeva(complex(z)) - ref) <= 5e-13 * abs(ref)


class TestFresnel:
    def test_zero(self, kernels):
        assert kernels.fresnel(0.0) == (0.0, 0.0)

    @pytest.mark.parametrize("x", [1e-5, 0.1, 0.8, 1.0, 1.49, 1.51, 3.3, 10.0, 49.9])
    def test_matches_mpmath(self, kernels, x):
        c, s = kernels.fresnel(x)
        rc, rs = mp_fresnel(x)
        assert c == pytest.approx(rc, rel=1e-12)
        assert s == pytest.approx(rs, rel=1e-12)

    def test_matches_quadrature_at_one(self):
        c = quadrature_oracle("fresnel_cos", 0.0, 1.0)
        s = quadrature_oracle("fresnel_sin", 0.0, 1.0)
        assert fresnel_c(1.0) == pytest.approx(c.real, rel=1e-13)
        assert fresnel_s(1.0) == pytest.approx(s.real, rel=1e-13)

    def test_odd(self):
        assert fresnel_c(-0.8) == -fresnel_c(0.8)
        assert fresnel_s(-0.8) == -fresnel_s(0.8)

    @given(st.floats(-50, 50, **finite))
    def test_odd_property(self, x):
        c, s = fresnel(x)
        cn, sn = fresnel(-x)
        assert (cn, sn) == (-c, -s)

    @pytest.mark.parametrize("x", [1e-2, 1e-4, 1e-6, 1e-8])
    def test_small_argument(self, x):
        c, s = fresnel(x)
        assert c / x == pytest.approx(1.0, abs=1e-3)
        assert abs(s / x ** 3) < 1.0

    def test_large_argument_limit(self):
        c, s = fresnel(1e6)
        assert c == pytest.approx(0.5, abs=1e-6)
        assert s == pytest.approx(0.5, abs=1e-6)

    def test_unit_convention(self):
        x = 1.7
        c, s = fresnel(x, "unit")
        assert c == pytest.approx(quadrature_oracle(lambda t: math.cos(t * t), 0, x).real, rel=1e-12)
        assert s == pytest.approx(quadrature_oracle(lambda t: math.sin(t * t), 0, x).real, rel=1e-12)

    def test_unknown_convention(self):
        with pytest.raises(ValueError):
            fresnel(1.0, "degrees")

    def test_nonfinite_rejected(self, kernels):
        with pytest.raises(ValueError):
            kernels.fresnel(math.inf)

    def test_vectorised(self):
        xs = np.linspace(0, 5, 7)
        assert np.array_equal(fresnel_c(xs), [fresnel(x)[0] for x in xs])


class TestQuadratureOracle:
    def test_zero(self):
        assert quadrature_oracle("zero", -1.0, 3.0) == 0

    def test_exp_sq_matches_erfi(self):
        assert quadrature_oracle("exp_sq", 0.0, 1.0).real == pytest.approx(
            erfi(1.0).real * math.sqrt(math.pi) / 2, rel=1e-14)

    def test_quadratic_phase_is_kernel(self):
        from dma_nearfield.gain import kernel_K
        # K(x, 0) integrates exp(i x^2 u^2); at x = 1 the phase rate is 1
        assert abs(quadrature_oracle("quadratic_phase", -0.5, 0.5, s=1.0)) == pytest.approx(kernel_K(1.0, 0.0), rel=1e-13)

    def test_reversed_limits(self):
        fwd = quadrature_oracle("quadratic_phase", 0.0, 2.0, s=3.0)
        assert quadrature_oracle("quadratic_phase", 2.0, 0.0, s=3.0) == -fwd

    def test_highly_oscillatory(self):
        # 400 half periods: breakpoints keep quad accurate
        k = 400 * math.pi / 4
        c = quadrature_oracle("fresnel_cos", 0.0, 2.0, k=k).real
        rc = math.sqrt(math.pi / (2 * k)) * float(mpmath.fresnelc(2.0 * math.sqrt(2 * k / math.pi)))
        assert c == pytest.approx(rc, rel=1e-11)

    def test_nonconvergence_reports_estimate(self):
        with pytest.raises(QuadratureError) as info:
            quadrature_oracle(lambda t: math.sin(1.0 / t) / t, 1e-9, 1.0)
        assert info.value.estimate > 0

    def test_unknown_integrand(self):
        with pytest.raises(ValueError):
            quadrature_oracle("bessel", 0, 1)

    def test_infinite_limits_rejected(self):
        with pytest.raises(ValueError):
            quadrature_oracle("zero", 0, math.inf)
