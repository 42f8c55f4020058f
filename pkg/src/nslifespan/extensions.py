"""External-force contributions and the abstract parabolic lifespan rule.

A force measured in the weighted supremum norm |||f|||_{theta, lambda} =
sup_s |f(s)|_theta / s^lambda adds a T-independent coefficient to each of
K0(T) and K0'(T), provided the exponents satisfy a matching constraint that
makes the Duhamel integral reproduce the Kato time weight exactly:

    K0  route: d/2 (1 - 1/r1) - 1 - lambda1 = (1 - delta)/2,
               1 + delta/d = 1/r1 + 1/theta1;
    K0' route: d/2 (1 - 1/r2) - 1 - lambda2 = 0,
               1 + 1/d = 1/r2 + 1/theta2.

For the gradient route the right side 0 is the value for which the
integral decays exactly like t^{-1/2}; it also makes the Beta-positivity
condition coincide with the exponent restriction d(1 - 1/r2) < 1.

The default K0 Beta factor integrates the kernel decay exponent un-halved,
B(1 - d(1-1/r1), 1 + lambda1), which needs the strict condition
d(1 - 1/r1) < 1 (stricter than the nominal d(1 - 1/r1) < 2, which is what
the halved variant behind ``halved_kernel_decay=True`` needs); the
feasibility report carries both conditions and the certificate states which
variant produced the coefficient.

The abstract parabolic rule certifies T = min(T1, T2, T3, T4) for a mild
formulation with semigroup blow-up |e^{At}|(Y -> X) <= C(gamma) t^{-gamma}:
T3 keeps the Duhamel term inside the half-radius ball (strict, realized
with a 1% margin below equality) and T4 makes the Duhamel map a
1/2-contraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .constants import ExponentPair, beta_fn, heat_kernel_grad_norm, heat_kernel_norm, young_constant
from .errors import DomainError, InfeasibleExponentError
from .lifespan import KatoBoundState, KatoEvaluator, LifespanCertificate, theorem41_bound

__all__ = [
    "ForceNorm",
    "FeasibilityCheck",
    "ForceContribution",
    "matching_lambda_k0",
    "matching_lambda_k0_prime",
    "force_contribution_k0",
    "force_contribution_k0_prime",
    "forced_lifespan",
    "AbstractParabolicProblem",
    "ParabolicLifespan",
    "abstract_parabolic_lifespan",
]

_MATCH_TOL = 1e-12


@dataclass(frozen=True)
class ForceNorm:
    """A force norm value |||f|||_{theta, lambda} with its exponents."""

    theta: float
    lam: float
    value: float

    def __post_init__(self) -> None:
        if self.theta < 1:
            raise DomainError(f"theta must be >= 1, got {self.theta}")
        if not (-1.0 < self.lam < 0.0):
            raise DomainError(f"lambda must lie in (-1, 0), got {self.lam}")
        if self.value < 0 or not math.isfinite(self.value):
            raise DomainError(f"force norm must be finite and nonnegative, got {self.value}")


@dataclass(frozen=True)
class FeasibilityCheck:
    """One named exponent condition with the quantity that must be positive."""

    name: str
    margin: float

    @property
    def ok(self) -> bool:
        return self.margin > 0


@dataclass(frozen=True)
class ForceContribution:
    """Additive contribution to a Kato norm, with its feasibility report."""

    coefficient: float | None
    checks: tuple[FeasibilityCheck, ...]
    notes: tuple[str, ...] = ()

    @property
    def feasible(self) -> bool:
        return all(c.ok for c in self.checks)


def _r_from_theta(lhs: float, theta: float, label: str) -> float:
    inv_r = lhs - 1.0 / theta
    if inv_r >= 1.0:
        raise InfeasibleExponentError(f"{label}: kernel exponent r = {1.0 / inv_r} <= 1")
    if inv_r <= 0.0:
        raise InfeasibleExponentError(f"{label}: 1/r = {inv_r} <= 0, no kernel exponent")
    return 1.0 / inv_r


def matching_lambda_k0(d: int, delta: float, theta: float) -> float:
    """The lambda that matches the K0 weight for a given force exponent theta."""
    r1 = _r_from_theta(1.0 + delta / d, theta, "k0 force route")
    return d / 2.0 * (1.0 - 1.0 / r1) - 1.0 - (1.0 - delta) / 2.0


def matching_lambda_k0_prime(d: int, theta: float) -> float:
    """The lambda that matches the K0' weight for a given force exponent theta."""
    r2 = _r_from_theta(1.0 + 1.0 / d, theta, "k0' force route")
    return d / 2.0 * (1.0 - 1.0 / r2) - 1.0


def force_contribution_k0(
    d: int,
    delta: float,
    force: ForceNorm,
    halved_kernel_decay: bool = False,
) -> ForceContribution:
    """T-independent additive contribution of the force to K0(T).

    coefficient = K_BL(d; r1, theta1) M(d, r1) |||f||| B(b1, 1 + lambda1)
    with b1 = 1 - d(1 - 1/r1) by default (un-halved kernel decay; requires
    d(1 - 1/r1) < 1) or b1 = 1 - d(1 - 1/r1)/2 under the halved variant
    (requires d(1 - 1/r1) < 2). A zero-valued force contributes 0 with a
    trivially feasible report.
    """
    if not (0.0 < delta < 1.0):
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if force.value == 0.0:
        return ForceContribution(0.0, (), notes=("zero force: contribution 0",))
    r1 = _r_from_theta(1.0 + delta / d, force.theta, "k0 force route")
    decay = d * (1.0 - 1.0 / r1)
    match_residual = d / 2.0 * (1.0 - 1.0 / r1) - 1.0 - force.lam - (1.0 - delta) / 2.0
    checks = [
        FeasibilityCheck("kernel_exponent_above_1", r1 - 1.0),
        FeasibilityCheck("decay_below_2", 2.0 - decay),
        FeasibilityCheck("exponent_matching", _MATCH_TOL - abs(match_residual)),
    ]
    if halved_kernel_decay:
        b1 = 1.0 - decay / 2.0
        variant = "halved kernel decay variant: Beta(1 - d(1-1/r1)/2, 1 + lambda)"
    else:
        b1 = 1.0 - decay
        checks.append(FeasibilityCheck("decay_below_1_for_beta", 1.0 - decay))
        variant = "literal kernel decay: Beta(1 - d(1-1/r1), 1 + lambda); needs the stricter d(1-1/r1) < 1"
    checks.append(FeasibilityCheck("beta_first_argument_positive", b1))
    report = tuple(checks)
    if not all(c.ok for c in report):
        return ForceContribution(None, report, notes=(variant,))
    coef = (
        young_constant(d, ExponentPair(r1, force.theta))
        * heat_kernel_norm(d, r1)
        * force.value
        * beta_fn(b1, 1.0 + force.lam)
    )
    return ForceContribution(coef, report, notes=(variant,))


def force_contribution_k0_prime(d: int, force: ForceNorm) -> ForceContribution:
    """T-independent additive contribution of the force to K0'(T).

    coefficient = K_BL(d; r2, theta2) M'(d, r2) |||f|||
                  B(1/2 - d(1 - 1/r2)/2, 1 + lambda2),
    feasible exactly when d(1 - 1/r2) < 1, which under the matching
    constraint is lambda2 < -1/2.
    """
    if force.value == 0.0:
        return ForceContribution(0.0, (), notes=("zero force: contribution 0",))
    r2 = _r_from_theta(1.0 + 1.0 / d, force.theta, "k0' force route")
    decay = d * (1.0 - 1.0 / r2)
    match_residual = d / 2.0 * (1.0 - 1.0 / r2) - 1.0 - force.lam
    b2 = 0.5 - decay / 2.0
    report = (
        FeasibilityCheck("kernel_exponent_above_1", r2 - 1.0),
        FeasibilityCheck("decay_below_1", 1.0 - decay),
        FeasibilityCheck("exponent_matching", _MATCH_TOL - abs(match_residual)),
        FeasibilityCheck("beta_first_argument_positive", b2),
    )
    if not all(c.ok for c in report):
        return ForceContribution(None, report)
    coef = (
        young_constant(d, ExponentPair(r2, force.theta))
        * heat_kernel_grad_norm(d, r2)
        * force.value
        * beta_fn(b2, 1.0 + force.lam)
    )
    return ForceContribution(coef, report)


def forced_lifespan(
    state: KatoBoundState,
    f1: ForceNorm,
    f2: ForceNorm,
    search: tuple[float, float] = (1e-12, 1e12),
    tol: float = 1e-9,
    halved_kernel_decay: bool = False,
) -> LifespanCertificate:
    """Envelope-route horizon with the force contributions folded in.

    The contributions are constants added to K0(T) and K0'(T) for every T
    (the time weights match exactly), so the solve is the unforced one on
    shifted evaluators; a zero force reproduces the unforced certificate
    bit for bit. Infeasible exponents raise before any solve.
    """
    c1 = force_contribution_k0(state.d, state.delta, f1, halved_kernel_decay=halved_kernel_decay)
    c2 = force_contribution_k0_prime(state.d, f2)
    for label, contrib in (("k0", c1), ("k0_prime", c2)):
        if not contrib.feasible:
            failed = [c.name for c in contrib.checks if not c.ok]
            raise InfeasibleExponentError(
                f"force contribution to {label} infeasible: {', '.join(failed)}"
            )
    assert c1.coefficient is not None and c2.coefficient is not None
    aug = KatoBoundState(
        d=state.d,
        delta=state.delta,
        k0=KatoEvaluator(
            lambda T, base=state.k0, c=c1.coefficient: base(T) + c,
            state.k0.finite_at_infinity,
            state.k0.label + " + force",
        ),
        k0_prime=KatoEvaluator(
            lambda T, base=state.k0_prime, c=c2.coefficient: base(T) + c,
            state.k0_prime.finite_at_infinity,
            state.k0_prime.label + " + force",
        ),
        constants=state.constants,
        notes=state.notes,
    )
    cert = theorem41_bound(aug, search=search, tol=tol)
    inter = dict(cert.intermediate)
    inter["force_k0_coefficient"] = c1.coefficient
    inter["force_k0_prime_coefficient"] = c2.coefficient
    notes = cert.notes + (
        "forced variant: force contributions added to both Kato evaluators",
        *c1.notes,
        *c2.notes,
    )
    return replace(cert, intermediate=inter, notes=notes)


@dataclass(frozen=True)
class AbstractParabolicProblem:
    """Constants of the abstract mild formulation u' = Au + F(u, grad u).

    gamma and c_gamma describe the Y -> X semigroup blow-up; alpha is the
    invariant ball radius; k1 bounds the nonlinearity on the ball and k2 its
    Lipschitz constant; t1 is the user horizon and t2 the strong-continuity
    time of the semigroup at the initial datum.
    """

    gamma: float
    c_gamma: float
    alpha: float
    k1: float
    k2: float
    t1: float
    t2: float

    def __post_init__(self) -> None:
        if not (0.0 < self.gamma < 1.0):
            raise DomainError(f"gamma must lie in (0, 1), got {self.gamma}")
        for name in ("c_gamma", "alpha", "k1", "k2", "t1", "t2"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be finite and positive, got {v}")


@dataclass(frozen=True)
class ParabolicLifespan:
    """min(T1..T4) with the per-term breakdown and the contraction factor."""

    t: float
    t1: float
    t2: float
    t3: float
    t4: float
    contraction_factor: float
    ball_fraction: float  # Duhamel sup term as a fraction of alpha/2

    def breakdown(self) -> dict[str, float]:
        return {"t1": self.t1, "t2": self.t2, "t3": self.t3, "t4": self.t4,
                "contraction_factor": self.contraction_factor,
                "ball_fraction": self.ball_fraction}


def abstract_parabolic_lifespan(
    problem: AbstractParabolicProblem, strict_margin: float = 0.01
) -> ParabolicLifespan:
    """Certified horizon min(T1, T2, T3, T4) for the abstract problem.

    T3 solves K1 C(gamma) T^{1-gamma}/(1-gamma) = (1 - strict_margin) alpha/2
    (the inequality is strict, so equality is backed off by the margin);
    T4 solves K2 C(gamma) T^{1-gamma}/(1-gamma) = 1/2 exactly. At the
    returned T the contraction factor is <= 1/2 and the Duhamel sup term
    stays strictly inside alpha/2.
    """
    if not (0.0 <= strict_margin < 1.0):
        raise DomainError(f"strict_margin must lie in [0, 1), got {strict_margin}")
    g = problem.gamma
    one_minus = 1.0 - g
    t3 = ((1.0 - strict_margin) * problem.alpha * one_minus / (2.0 * problem.k1 * problem.c_gamma)) ** (
        1.0 / one_minus
    )
    t4 = (one_minus / (2.0 * problem.k2 * problem.c_gamma)) ** (1.0 / one_minus)
    t = min(problem.t1, problem.t2, t3, t4)
    contraction = problem.k2 * problem.c_gamma * t**one_minus / one_minus
    sup_term = problem.k1 * problem.c_gamma * t**one_minus / one_minus
    return ParabolicLifespan(
        t=t,
        t1=problem.t1,
        t2=problem.t2,
        t3=t3,
        t4=t4,
        contraction_factor=contraction,
        ball_fraction=sup_term / (problem.alpha / 2.0),
    )
