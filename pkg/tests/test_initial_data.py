import math

import numpy as np
import pytest

import oracle_utils as oracle
from nslifespan.constants import DELTA0, composite_constants
from nslifespan.errors import DomainError, UnavailableBoundError
from nslifespan.initial_data import (
    NormBundle,
    VortexGaussian,
    grad_norm,
    k0_bound_from_norms,
    k0_exact,
    k0_prime_bound_from_norms,
    k0_prime_exact,
    lp_norm,
    norm_bundle_from_vortex,
    weighted_supremum,
)


class TestField:
    def test_divergence_free_finite_differences(self, rng):
        data = VortexGaussian(3, 1.2, 0.8)
        pts = rng.normal(scale=1.5, size=(1000, 3))
        h = 1e-5
        div = np.zeros(len(pts))
        for axis in range(3):
            e = np.zeros(3)
            e[axis] = h
            div += (data.evaluate(pts + e)[:, axis] - data.evaluate(pts - e)[:, axis]) / (2 * h)
        scale = float(np.max(data.gradient_frobenius(pts)))
        assert np.all(np.abs(div) <= 1e-8 * max(scale, 1.0))

    def test_validation(self):
        with pytest.raises(DomainError):
            VortexGaussian(2, 1.0, 1.0)
        with pytest.raises(DomainError):
            VortexGaussian(3, 0.0, 1.0)
        with pytest.raises(DomainError):
            VortexGaussian(3, 1.0, -1.0)

    def test_magnitude_matches_components(self, rng):
        data = VortexGaussian(4, 0.7, 2.0)
        pts = rng.normal(size=(50, 4))
        vec = data.evaluate(pts)
        assert np.allclose(np.linalg.norm(vec, axis=-1), data.magnitude(pts), rtol=1e-13)


class TestLpNorm:
    @pytest.mark.parametrize("delta", [0.2, DELTA0, 0.8])
    @pytest.mark.parametrize("p_kind", ["d", "d+1", "d/delta"])
    def test_closed_form_vs_quadrature(self, delta, p_kind):
        data = VortexGaussian(3, 1.1, 0.9)
        p = {"d": 3.0, "d+1": 4.0, "d/delta": 3.0 / delta}[p_kind]
        assert lp_norm(data, p) == pytest.approx(oracle.lp_norm_quadrature(data, p), rel=1e-8)

    def test_closed_form_vs_quadrature_d4(self):
        data = VortexGaussian(4, 0.8, 1.3)
        assert lp_norm(data, 5.0) == pytest.approx(oracle.lp_norm_quadrature(data, 5.0), rel=1e-8)

    def test_box_simpson_cross_check(self):
        # a full 3-D tensor grid validates the radial reduction itself
        data = VortexGaussian(3, 1.0, 1.0)
        assert lp_norm(data, 3.0) == pytest.approx(oracle.lp_norm_box_simpson(data, 3.0), rel=1e-6)

    def test_reference_value(self):
        assert lp_norm(VortexGaussian(3, 1.0, 1.0), 3.0) == pytest.approx(1.2992590299069182, rel=1e-13)

    def test_zero_amplitude(self):
        assert lp_norm(VortexGaussian(3, 1.0, 0.0), 3.0) == 0.0

    def test_homogeneity(self):
        base = VortexGaussian(3, 1.4, 1.0)
        assert lp_norm(base.scaled(3.5), 4.0) == pytest.approx(3.5 * lp_norm(base, 4.0), rel=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            lp_norm(VortexGaussian(3, 1.0, 1.0), 0.5)

    def test_log_convexity_in_inverse_p(self):
        data = VortexGaussian(3, 0.9, 2.0)
        p0, p1 = 3.0, 6.0
        for lam in (0.25, 0.5, 0.75):
            inv_p = (1 - lam) / p0 + lam / p1
            p = 1.0 / inv_p
            interp = lp_norm(data, p0) ** (1 - lam) * lp_norm(data, p1) ** lam
            assert lp_norm(data, p) <= interp * (1 + 1e-12)


class TestGradNorm:
    def test_zero(self):
        assert grad_norm(VortexGaussian(3, 1.0, 0.0)) == 0.0

    def test_positive_and_schemes_agree(self):
        data = VortexGaussian(3, 1.0, 1.0)
        value = grad_norm(data)
        assert value > 0
        assert value == pytest.approx(oracle.grad_norm_simpson(data), rel=1e-6)

    def test_scheme_agreement_d4(self):
        data = VortexGaussian(4, 1.3, 0.6)
        assert grad_norm(data) == pytest.approx(oracle.grad_norm_simpson(data), rel=1e-6)

    def test_pure_power_law_in_sigma(self):
        base = VortexGaussian(3, 1.0, 1.0)
        wide = VortexGaussian(3, 2.0, 1.0)
        exponent = math.log(grad_norm(wide) / grad_norm(base)) / math.log(2.0)
        assert exponent == pytest.approx(1.0, abs=1e-9)


class TestHeatEvolution:
    def test_semigroup_property(self):
        data = VortexGaussian(3, 0.8, 1.7)
        one = data.evolve(0.3).evolve(0.9)
        two = data.evolve(1.2)
        assert one.sigma == pytest.approx(two.sigma, rel=1e-12)
        assert one.amplitude == pytest.approx(two.amplitude, rel=1e-12)

    def test_evolve_zero_is_identity(self):
        data = VortexGaussian(3, 0.8, 1.7)
        assert data.evolve(0.0) is data

    @pytest.mark.parametrize("t", [0.1, 1.0])
    def test_against_direct_convolution(self, t):
        data = VortexGaussian(3, 1.0, 0.7)
        evolved = data.evolve(t)
        for x in ([0.3, -0.4, 0.7], [1.0, 0.5, -0.2], [0.0, 1.5, 0.3]):
            x = np.asarray(x)
            vec = evolved.evaluate(x)
            for comp in (0, 1):
                conv = oracle.convolved_component(data, t, x, comp)
                assert vec[comp] == pytest.approx(conv, rel=1e-6, abs=1e-12)


class TestWeightedSup:
    def test_k0_vanishes_at_zero_and_is_monotone(self):
        data = VortexGaussian(3, 1.0, 1.0)
        values = [k0_exact(data, DELTA0, 10.0 ** (-k)) for k in range(1, 7)]
        for earlier, later in zip(values, values[1:]):
            assert later <= earlier * (1 + 1e-12)
        assert 0 < values[-1] < 0.05 * values[0]
        # below the interior maximizer the decay is the pure weight power
        assert values[-1] / values[-2] == pytest.approx(10.0 ** (-(1 - DELTA0) / 2), rel=1e-3)

    def test_k0_prime_vanishes_at_zero_and_is_monotone(self):
        data = VortexGaussian(3, 1.0, 1.0)
        values = [k0_prime_exact(data, 10.0 ** (-k)) for k in range(1, 7)]
        for earlier, later in zip(values, values[1:]):
            assert later <= earlier * (1 + 1e-12)
        assert values[-1] < 1e-2 * values[0]

    def test_k0_monotone_in_horizon(self):
        data = VortexGaussian(3, 1.3, 0.5)
        ts = [0.01, 0.1, 1.0, 10.0, math.inf]
        vals = [k0_exact(data, 0.4, t) for t in ts]
        assert vals == sorted(vals)

    def test_k0_infinity_matches_analytic_argmax(self):
        # the log-derivative of the closed form vanishes at
        # t* = (1 - delta) sigma^2 / (2 d); independent of the maximizer
        data = VortexGaussian(3, 1.2, 0.9)
        delta = 0.35
        t_star = (1 - delta) * data.sigma**2 / (2 * data.d)
        phi = lambda t: t ** ((1 - delta) / 2) * lp_norm(data.evolve(t), data.d / delta)
        assert k0_exact(data, delta, math.inf) == pytest.approx(phi(t_star), rel=1e-9)

    def test_k0_prime_infinity_matches_analytic_argmax(self):
        data = VortexGaussian(4, 0.8, 1.1)
        t_star = data.sigma**2 / (2 * data.d)
        psi = lambda t: math.sqrt(t) * grad_norm(data.evolve(t))
        assert k0_prime_exact(data, math.inf) == pytest.approx(psi(t_star), rel=1e-9)

    def test_semigroup_envelope_dominates(self, rng):
        for _ in range(20):
            d = int(rng.integers(3, 6))
            data = VortexGaussian(d, float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.01, 5.0)))
            delta = float(rng.uniform(0.15, 0.85))
            cs = composite_constants(d, delta)
            a_d = lp_norm(data, float(d))
            assert k0_exact(data, delta, math.inf) <= cs.s1 * a_d * (1 + 1e-12)
            assert k0_prime_exact(data, math.inf) <= cs.s2 * a_d * (1 + 1e-12)

    def test_k0_prime_below_sqrt_t_bound(self, rng):
        data = VortexGaussian(3, 1.0, 2.0)
        gn = grad_norm(data)
        for T in (0.01, 0.5, 3.0, 40.0):
            assert k0_prime_exact(data, T) <= math.sqrt(T) * gn * (1 + 1e-12)

    def test_zero_amplitude(self):
        data = VortexGaussian(3, 1.0, 0.0)
        assert k0_exact(data, 0.3, 1.0) == 0.0
        assert k0_prime_exact(data, 1.0) == 0.0

    def test_weighted_supremum_tiny_horizon(self):
        # horizon below the entire scan grid still returns the endpoint value
        value = weighted_supremum(lambda t: t, 1e-30, 1.0)
        assert value == pytest.approx(1e-30)

    def test_brute_force_grid_agrees(self):
        data = VortexGaussian(3, 1.0, 1.0)
        fn = lambda t: t ** ((1 - 0.3) / 2) * lp_norm(data.evolve(t), 10.0)
        brute = oracle.brute_force_weighted_sup(fn, math.inf, 40001)
        assert k0_exact(data, 0.3, math.inf) == pytest.approx(brute, rel=1e-7)


class TestNormBundle:
    def test_roundtrip(self):
        bundle = NormBundle(lp_norms={3.0: 1.2, 4.0: 0.9}, grad_d_norm=2.0, theta=1.0, norm_d_plus_theta=0.9)
        again = NormBundle.from_dict(bundle.to_dict())
        assert again == bundle

    def test_validation(self):
        with pytest.raises(DomainError):
            NormBundle(lp_norms={0.5: 1.0})
        with pytest.raises(DomainError):
            NormBundle(lp_norms={3.0: 1.0}, theta=1.0)  # missing companion norm
        with pytest.raises(DomainError):
            NormBundle(lp_norms={3.0: 1.0}, grad_d_norm=-1.0)

    def test_from_vortex(self):
        data = VortexGaussian(3, 1.0, 1.0)
        bundle = norm_bundle_from_vortex(data, theta=1.0, extra_exponents=(4.0,))
        assert bundle.lp_norms[3.0] == pytest.approx(lp_norm(data, 3.0))
        assert bundle.norm_d_plus_theta == pytest.approx(lp_norm(data, 4.0))
        assert bundle.grad_d_norm == pytest.approx(grad_norm(data))


class TestNormBounds:
    def test_k0_bound_examples(self):
        bundle = NormBundle(lp_norms={3.0: 1.0}, theta=1.0, norm_d_plus_theta=1.0)
        assert k0_bound_from_norms(bundle, 3, DELTA0, 1.0, 0.0) == 0.0
        assert k0_bound_from_norms(bundle, 3, DELTA0, 1.0, 1.0) == pytest.approx(16.0, rel=1e-15)
        doubled = NormBundle(lp_norms={3.0: 1.0}, theta=1.0, norm_d_plus_theta=2.0)
        assert k0_bound_from_norms(doubled, 3, DELTA0, 1.0, 1.0) == pytest.approx(32.0, rel=1e-15)

    def test_k0_bound_missing_norm(self):
        bundle = NormBundle(lp_norms={3.0: 1.0})
        with pytest.raises(UnavailableBoundError):
            k0_bound_from_norms(bundle, 3, DELTA0, 1.0, 1.0)

    def test_k0_bound_theta_mismatch(self):
        bundle = NormBundle(lp_norms={3.0: 1.0}, theta=0.5, norm_d_plus_theta=1.0)
        with pytest.raises(DomainError):
            k0_bound_from_norms(bundle, 3, DELTA0, 0.7, 1.0)

    def test_k0_prime_bound(self):
        bundle = NormBundle(lp_norms={3.0: 1.0}, grad_d_norm=1.0)
        assert k0_prime_bound_from_norms(bundle, 0.0) == 0.0
        assert k0_prime_bound_from_norms(bundle, 4.0) == pytest.approx(2.0, rel=1e-15)
        with pytest.raises(UnavailableBoundError):
            k0_prime_bound_from_norms(NormBundle(lp_norms={3.0: 1.0}), 4.0)

    def test_exact_below_norm_bounds(self, rng):
        for _ in range(10):
            data = VortexGaussian(3, float(rng.uniform(0.6, 1.8)), float(rng.uniform(0.1, 3.0)))
            bundle = norm_bundle_from_vortex(data, theta=0.5)
            T = float(rng.uniform(0.05, 2.0))
            assert k0_prime_exact(data, T) <= k0_prime_bound_from_norms(bundle, T) * (1 + 1e-12)
            assert k0_exact(data, DELTA0, T) <= k0_bound_from_norms(bundle, 3, DELTA0, 0.5, T) * (1 + 1e-12)
