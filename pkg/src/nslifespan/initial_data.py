"""Divergence-free Gaussian vortex fields and their heat-semigroup norms.

The family a(x) = amplitude * A x * exp(-|x|^2 / (2 sigma^2)), with A the
rotation generator in the (1,2) plane (A x = (-x2, x1, 0, ..., 0)), is
divergence-free by antisymmetry of A and closed under the heat semigroup:

    e^{t Lap} a  =  a with width^2 -> sigma^2 + 2t and amplitude scaled by
                    (sigma^2 / (sigma^2 + 2t))^{(d+2)/2}.

The scaling factor follows from completing the square in the Gaussian
convolution (the first-moment integral against the shifted Gaussian pulls
out the mean x * sigma^2/(sigma^2+2t)); the test suite validates it against
direct numerical convolution with the heat kernel before anything else
relies on it.

Norm convention: |a(x)| is the pointwise Euclidean magnitude of the vector,
|a(x)| = amplitude * r * exp(-|x|^2/(2 sigma^2)) with r the radius in the
rotation plane, so L_p norms separate into Gamma-function factors. The
field depends on x only through (r, |y|) with y the remaining d-2
coordinates, and every integral in this module is reduced to that plane
before quadrature.

The weighted semigroup norms

    K0(T)  = sup_{t in (0,T)} t^{(1-delta)/2} |u0(t)|_{d/delta},
    K0'(T) = sup_{t in (0,T)} t^{1/2} |grad u0(t)|_d,

are evaluated on the closed-form evolution with a golden-section maximizer
(bracket scan, interior refinement, endpoint comparison); both vanish as
T -> 0+ and saturate at a finite value as T -> infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np
from scipy import integrate

from .constants import ExponentPair, heat_kernel_norm, log_gamma, young_constant
from .errors import DomainError, UnavailableBoundError

__all__ = [
    "VortexGaussian",
    "NormBundle",
    "lp_norm",
    "grad_norm",
    "k0_exact",
    "k0_prime_exact",
    "k0_bound_from_norms",
    "k0_prime_bound_from_norms",
    "sharp_k0_norm_coefficient",
    "norm_bundle_from_vortex",
    "weighted_supremum",
]

# quadrature box half-width, in units of the Gaussian width
_BOX_WIDTHS = 14.0


@dataclass(frozen=True)
class VortexGaussian:
    """Rotating Gaussian vortex a(x) = amplitude * A x * exp(-|x|^2/(2 sigma^2))."""

    d: int
    sigma: float
    amplitude: float

    def __post_init__(self) -> None:
        if not isinstance(self.d, int) or isinstance(self.d, bool) or self.d < 3:
            raise DomainError(f"dimension must be an integer >= 3, got {self.d!r}")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise DomainError(f"sigma must be positive and finite, got {self.sigma}")
        if self.amplitude < 0 or not math.isfinite(self.amplitude):
            raise DomainError(f"amplitude must be nonnegative, got {self.amplitude}")

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Field values at points x of shape (..., d)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise DomainError(f"points must have last dimension {self.d}, got {x.shape}")
        g = np.exp(-np.sum(x * x, axis=-1) / (2.0 * self.sigma**2))
        out = np.zeros_like(x)
        out[..., 0] = -x[..., 1]
        out[..., 1] = x[..., 0]
        return self.amplitude * out * g[..., None]

    def magnitude(self, x: np.ndarray) -> np.ndarray:
        """Pointwise Euclidean magnitude |a(x)|."""
        x = np.asarray(x, dtype=float)
        rho = np.hypot(x[..., 0], x[..., 1])
        g = np.exp(-np.sum(x * x, axis=-1) / (2.0 * self.sigma**2))
        return self.amplitude * rho * g

    def gradient_frobenius(self, x: np.ndarray) -> np.ndarray:
        """Pointwise Frobenius norm of the Jacobian of a."""
        x = np.asarray(x, dtype=float)
        s2 = self.sigma**2
        rho2 = x[..., 0] ** 2 + x[..., 1] ** 2
        r2 = np.sum(x * x, axis=-1)
        g = np.exp(-r2 / (2.0 * s2))
        quad = 2.0 - 2.0 * rho2 / s2 + rho2 * r2 / (s2 * s2)
        return self.amplitude * g * np.sqrt(quad)

    def evolve(self, t: float) -> "VortexGaussian":
        """Heat evolution e^{t Lap} a, exactly, inside the family."""
        if t < 0:
            raise DomainError(f"evolution time must be nonnegative, got {t}")
        if t == 0:
            return self
        s2 = self.sigma**2
        w2 = s2 + 2.0 * t
        return VortexGaussian(
            d=self.d,
            sigma=math.sqrt(w2),
            amplitude=self.amplitude * (s2 / w2) ** ((self.d + 2) / 2.0),
        )

    def scaled(self, factor: float) -> "VortexGaussian":
        return VortexGaussian(self.d, self.sigma, self.amplitude * factor)


def lp_norm(data: VortexGaussian, p: float) -> float:
    """L_p norm of the vortex field, in closed form.

    |a|_p^p separates into the planar moment 2 pi Int r^{p+1} e^{-p r^2/(2 s^2)} dr
    and the Gaussian mass of the remaining d-2 coordinates:

        |a|_p^p = amp^p (2 pi s^2/p)^{(d-2)/2} * pi * Gamma(p/2 + 1) (2 s^2/p)^{(p+2)/2}.
    """
    if p < 1:
        raise DomainError(f"lp_norm requires p >= 1, got {p}")
    if data.amplitude == 0:
        return 0.0
    d, s = data.d, data.sigma
    log_pp = (
        ((d - 2) / 2.0) * math.log(2.0 * math.pi * s * s / p)
        + math.log(math.pi)
        + log_gamma(p / 2.0 + 1.0)
        + ((p + 2) / 2.0) * math.log(2.0 * s * s / p)
    )
    return data.amplitude * math.exp(log_pp / p)


def _sphere_area(m: int) -> float:
    """Surface measure of the unit sphere in R^m (2 for m = 1)."""
    return 2.0 * math.pi ** (m / 2.0) / math.exp(log_gamma(m / 2.0))


def reduced_integral(fn: Callable[[float, float], float], d: int, radius: float) -> float:
    """Integrate fn(r, eta) over R^d for integrands of the planar/axial radii.

    fn sees the rotation-plane radius r and the radius eta of the remaining
    d-2 coordinates; the angular factors 2 pi r and omega_{d-2} eta^{d-3}
    are applied here. Adaptive (QUADPACK) on the box [0, radius]^2; the
    integrands used in this module decay like exp(-c (r^2+eta^2)) so the
    truncation error at the default box is below 1e-30 of the result.
    """
    omega = _sphere_area(d - 2)

    def outer(r: float) -> float:
        inner, _ = integrate.quad(
            lambda eta: fn(r, eta) * eta ** (d - 3),
            0.0,
            radius,
            epsabs=1e-14,
            epsrel=1e-12,
            limit=200,
        )
        return inner * 2.0 * math.pi * r * omega

    val, _ = integrate.quad(outer, 0.0, radius, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


@lru_cache(maxsize=32)
def _grad_unit_constant(d: int) -> float:
    """|grad a|_d for the unit vortex (sigma = amplitude = 1), via quadrature.

    The Frobenius density is (2 - 2 r^2 + r^2 (r^2 + eta^2))^{1/2} e^{-|u|^2/2},
    which never vanishes (the quadratic in r^2 is bounded below by 1), so the
    d-th power integrand is smooth.
    """

    def fn(r: float, eta: float) -> float:
        s2 = r * r + eta * eta
        quad = 2.0 - 2.0 * r * r + r * r * s2
        return quad ** (d / 2.0) * math.exp(-d * s2 / 2.0)

    val = reduced_integral(fn, d, _BOX_WIDTHS)
    return val ** (1.0 / d)


def grad_norm(data: VortexGaussian) -> float:
    """L_d norm of the Jacobian magnitude |grad a|_F.

    Scales exactly like amplitude * sigma: substituting x = sigma u removes
    sigma from the Frobenius density, so only one quadrature per dimension is
    ever performed (cached).
    """
    if data.amplitude == 0:
        return 0.0
    return data.amplitude * data.sigma * _grad_unit_constant(data.d)


def weighted_supremum(
    fn: Callable[[float], float],
    t_max: float,
    t_scale: float,
    rel_tol: float = 1e-12,
) -> float:
    """sup of fn over (0, t_max) for weights that vanish at 0+.

    Deterministic: a fixed log-spaced bracket scan around t_scale locates the
    maximizer, golden-section refines the bracketing interval, and the
    endpoint value fn(t_max) is folded in (the supremum over the open interval
    equals the endpoint limit when fn is still increasing there). t_max may
    be infinity, in which case only the interior maximum matters.
    """
    if not t_max > 0:
        raise DomainError(f"t_max must be positive, got {t_max}")
    finite_end = math.isfinite(t_max)
    grid = [t_scale * 10.0 ** (k / 10.0) for k in range(-120, 121)]
    ts = [t for t in grid if t < t_max]
    if not ts:
        ts = [t_max / 2.0]
    vals = [fn(t) for t in ts]
    best_idx = max(range(len(ts)), key=lambda i: vals[i])
    lo = ts[best_idx - 1] if best_idx > 0 else ts[best_idx] / 10.0
    hi = ts[best_idx + 1] if best_idx + 1 < len(ts) else min(ts[best_idx] * 10.0, t_max)
    best = vals[best_idx]

    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    e = a + invphi * (b - a)
    fc, fe = fn(c), fn(e)
    for _ in range(200):
        if b - a <= rel_tol * max(abs(a), abs(b)):
            break
        if fc >= fe:
            b, e, fe = e, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, e, fe
            e = a + invphi * (b - a)
            fe = fn(e)
    best = max(best, fc, fe)
    if finite_end:
        best = max(best, fn(t_max))
    return best


def k0_exact(data: VortexGaussian, delta: float, T: float) -> float:
    """sup_{t in (0,T)} t^{(1-delta)/2} |e^{t Lap} a|_{d/delta}, exactly.

    Uses the closed-form evolution, so each evaluation is a handful of
    Gamma calls. T = infinity is allowed: the weighted norm decays like
    t^{-d/2} at large times, so the supremum is interior.
    """
    if not (0.0 < delta < 1.0):
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if data.amplitude == 0:
        return 0.0
    p = data.d / delta
    weight = (1.0 - delta) / 2.0

    def fn(t: float) -> float:
        return t**weight * lp_norm(data.evolve(t), p)

    return weighted_supremum(fn, T, data.sigma**2)


def k0_prime_exact(data: VortexGaussian, T: float) -> float:
    """sup_{t in (0,T)} t^{1/2} |grad e^{t Lap} a|_d, exactly."""
    if data.amplitude == 0:
        return 0.0

    def fn(t: float) -> float:
        return math.sqrt(t) * grad_norm(data.evolve(t))

    return weighted_supremum(fn, T, data.sigma**2)


@dataclass(frozen=True)
class NormBundle:
    """Externally supplied norm values of an initial datum.

    `lp_norms` maps exponents to |a|_p values; `grad_d_norm` is |grad a|_d;
    the optional pair (theta, norm_d_plus_theta) records |a|_{d+theta} for
    the extra-integrability bound. Field names match the CLI JSON keys.
    """

    lp_norms: Mapping[float, float]
    grad_d_norm: float | None = None
    theta: float | None = None
    norm_d_plus_theta: float | None = None

    def __post_init__(self) -> None:
        for p, v in self.lp_norms.items():
            if p < 1 or v < 0 or not math.isfinite(v):
                raise DomainError(f"invalid lp norm entry ({p}, {v})")
        if self.grad_d_norm is not None and (self.grad_d_norm < 0 or not math.isfinite(self.grad_d_norm)):
            raise DomainError(f"invalid grad_d_norm {self.grad_d_norm}")
        if (self.theta is None) != (self.norm_d_plus_theta is None):
            raise DomainError("theta and norm_d_plus_theta must be supplied together")
        if self.theta is not None:
            if self.theta <= 0:
                raise DomainError(f"theta must be positive, got {self.theta}")
            if self.norm_d_plus_theta < 0 or not math.isfinite(self.norm_d_plus_theta):
                raise DomainError(f"invalid norm_d_plus_theta {self.norm_d_plus_theta}")

    def to_dict(self) -> dict:
        out: dict = {"lp_norms": {repr(float(p)): v for p, v in sorted(self.lp_norms.items())}}
        if self.grad_d_norm is not None:
            out["grad_d_norm"] = self.grad_d_norm
        if self.theta is not None:
            out["theta"] = self.theta
            out["norm_d_plus_theta"] = self.norm_d_plus_theta
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "NormBundle":
        lp = {float(k): float(v) for k, v in dict(data.get("lp_norms", {})).items()}
        return cls(
            lp_norms=lp,
            grad_d_norm=data.get("grad_d_norm"),
            theta=data.get("theta"),
            norm_d_plus_theta=data.get("norm_d_plus_theta"),
        )


def k0_bound_from_norms(
    norms: NormBundle, d: int, delta: float, theta: float | None, T: float
) -> float:
    """Extra-integrability bound T^{theta delta/(2d)} 2^{d+theta} |a|_{d+theta}.

    The crude constant 2^{d+theta} majorizes the Young factor times the
    kernel envelope; `sharp_k0_norm_coefficient` provides the sharp
    alternative with the same T power.
    """
    if not (0.0 < delta < 1.0):
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if norms.theta is None or norms.norm_d_plus_theta is None:
        raise UnavailableBoundError("bundle carries no (theta, |a|_{d+theta}) pair")
    if theta is None:
        theta = norms.theta
    elif not math.isclose(theta, norms.theta, rel_tol=1e-12):
        raise DomainError(
            f"requested theta {theta} does not match the bundled exponent {norms.theta}"
        )
    if not (0.0 < theta <= min(1.0, (d - 1) / delta)):
        raise DomainError(
            f"theta must lie in (0, min(1, (d-1)/delta)] = (0, {min(1.0, (d - 1) / delta)}], got {theta}"
        )
    if T == 0:
        return 0.0
    return T ** (theta * delta / (2.0 * d)) * 2.0 ** (d + theta) * norms.norm_d_plus_theta


def k0_prime_bound_from_norms(norms: NormBundle, T: float) -> float:
    """Unit-mass kernel bound sqrt(T) |grad a|_d for the gradient norm."""
    if norms.grad_d_norm is None:
        raise UnavailableBoundError("bundle carries no gradient norm")
    if T == 0:
        return 0.0
    return math.sqrt(T) * norms.grad_d_norm


def sharp_k0_norm_coefficient(d: int, delta: float, theta: float) -> float | None:
    """Sharp alternative K_BL(d; r, d+theta) M(d, r) to the crude 2^{d+theta}.

    r is the kernel exponent fixed by the Young relation
    1 + delta/d = 1/r + 1/(d+theta). Returns None when that exponent falls
    below 1 (large delta), in which case only the crude constant applies.
    """
    if not (0.0 < delta < 1.0):
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if theta <= 0:
        raise DomainError(f"theta must be positive, got {theta}")
    inv_r = 1.0 + delta / d - 1.0 / (d + theta)
    if inv_r > 1.0:
        return None
    r = 1.0 / inv_r
    return young_constant(d, ExponentPair(r, float(d + theta))) * heat_kernel_norm(d, r)


def norm_bundle_from_vortex(
    data: VortexGaussian,
    theta: float | None = None,
    extra_exponents: tuple[float, ...] = (),
) -> NormBundle:
    """Evaluate the bundle of norms of a vortex field.

    Always includes |a|_d and the gradient norm; adds |a|_{d+theta} when a
    theta is requested, plus any explicitly listed exponents.
    """
    d = data.d
    exponents = {float(d), *(float(p) for p in extra_exponents)}
    lp = {p: lp_norm(data, p) for p in sorted(exponents)}
    kwargs: dict = {}
    if theta is not None:
        kwargs["theta"] = float(theta)
        kwargs["norm_d_plus_theta"] = lp_norm(data, d + theta)
    return NormBundle(lp_norms=lp, grad_d_norm=grad_norm(data), **kwargs)
