"""Lifespan certification: largest T for which the weighted-norm inequality
systems close, emitted as replayable certificates.

Two routes are implemented. The coupled route keeps the sharp product
constants J1(d, delta), J2(d, delta) and certifies the largest T where the
coupled fixed-point hypotheses hold with K0(T), K0'(T) in both the offset
and the start slots. The envelope route collapses the system to one
variable: max(K0(T), K0'(T)) <= 3/(16 Jbar) = C2/d^2 certifies T and bounds
every Picard iterate by 3/(4 Jbar) = C3/d^2. Both use monotone bisection
over T driven by a feasibility probe; K0 and K0' are nondecreasing in T and
vanish as T -> 0+, so a positive horizon exists whenever the decay reaches
the feasible region above the search floor (a floor hit is reported in the
certificate notes instead of a bound).

A certificate records the producing inequalities with their evaluated sides;
``replay_certificate`` re-derives every intermediate from the stored values
and re-checks each inequality, so a report can be re-validated in a process
that never constructs the original evaluators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Mapping, Sequence

from . import initial_data as idmod
from .constants import C3_DISCREPANCY_NOTE, ConstantSet, composite_constants, default_delta_grid
from .errors import DomainError, UnavailableBoundError
from .recurrence import CoupledRecurrence, coupled_bound

__all__ = [
    "KatoEvaluator",
    "KatoBoundState",
    "InequalityCheck",
    "LifespanCertificate",
    "DeltaSweep",
    "state_from_vortex",
    "state_from_norms",
    "theorem31_bound",
    "theorem41_bound",
    "theorem41_explicit",
    "optimize_delta",
    "global_smallness_threshold",
    "global_certificate",
    "thm31_feasible_at",
    "thm41_feasible_at",
    "replay_certificate",
    "ReplayReport",
    "default_delta_grid",
]

_DEFAULT_SEARCH = (1e-12, 1e12)
_DEFAULT_MARGIN = 1e-9  # absolute slack certifying strict inequalities
_EXPLICIT_SHRINK = 1.0 - 1e-12  # keeps closed-form replay margins nonnegative
_EXPLICIT_CAP = 1e300  # horizon cap for the closed-form inversion
_TINY = 1e-300


@dataclass(frozen=True)
class KatoEvaluator:
    """A nondecreasing map T -> weighted-norm bound, with its infinity status.

    ``finite_at_infinity`` declares whether the T -> infinity limit is a
    finite number; the infinity branch of the solvers is only attempted when
    both evaluators of a state declare it.
    """

    fn: Callable[[float], float]
    finite_at_infinity: bool
    label: str

    def __call__(self, t: float) -> float:
        if math.isinf(t) and not self.finite_at_infinity:
            return math.inf
        return self.fn(t)


@dataclass(frozen=True)
class KatoBoundState:
    """Evaluators for K0(T), K0'(T) plus the constants of the pair (d, delta)."""

    d: int
    delta: float
    k0: KatoEvaluator
    k0_prime: KatoEvaluator
    constants: ConstantSet
    notes: tuple[str, ...] = ()


def state_from_vortex(data: idmod.VortexGaussian, delta: float) -> KatoBoundState:
    """Exact evaluators from the closed-form vortex evolution."""
    constants = composite_constants(data.d, delta)
    return KatoBoundState(
        d=data.d,
        delta=delta,
        k0=KatoEvaluator(lambda T: idmod.k0_exact(data, delta, T), True, "exact vortex K0"),
        k0_prime=KatoEvaluator(lambda T: idmod.k0_prime_exact(data, T), True, "exact vortex K0'"),
        constants=constants,
        notes=(f"vortex_gaussian d={data.d} sigma={data.sigma} amplitude={data.amplitude}",),
    )


def state_from_norms(bundle: idmod.NormBundle, d: int, delta: float) -> KatoBoundState:
    """Bound evaluators assembled from a norm bundle.

    Each evaluator is the minimum of every bound the bundle supports: the
    T-uniform semigroup envelopes S1 |a|_d and S2 |a|_d, the
    extra-integrability power bound (with the smaller of the crude 2^{d+theta}
    and the sharp Young-times-kernel coefficient; the choice is recorded),
    and the sqrt(T) |grad a|_d bound. At least one bound per component must
    be available.
    """
    constants = composite_constants(d, delta)
    notes: list[str] = []
    a_d = bundle.lp_norms.get(float(d))

    k0_parts: list[Callable[[float], float]] = []
    k0_finite_at_inf = False
    if a_d is not None:
        cap = constants.s1 * a_d
        k0_parts.append(lambda T, cap=cap: cap)
        k0_finite_at_inf = True
        notes.append("k0 bound includes the T-uniform envelope S1*|a|_d")
    if bundle.theta is not None:
        theta = bundle.theta
        crude = 2.0 ** (d + theta)
        sharp = idmod.sharp_k0_norm_coefficient(d, delta, theta)
        if sharp is not None and sharp < crude:
            coef = sharp * bundle.norm_d_plus_theta
            notes.append("k0 power bound uses the sharp Young*kernel coefficient (smaller than 2^{d+theta})")
        else:
            coef = crude * bundle.norm_d_plus_theta
            notes.append("k0 power bound uses the crude coefficient 2^{d+theta}")
        power = theta * delta / (2.0 * d)
        k0_parts.append(lambda T, coef=coef, power=power: coef * T**power if T > 0 else 0.0)
    if not k0_parts:
        raise UnavailableBoundError("bundle supports no K0 bound (need |a|_d or a theta norm)")

    k0p_parts: list[Callable[[float], float]] = []
    k0p_finite_at_inf = False
    if a_d is not None:
        cap2 = constants.s2 * a_d
        k0p_parts.append(lambda T, cap2=cap2: cap2)
        k0p_finite_at_inf = True
        notes.append("k0' bound includes the T-uniform envelope S2*|a|_d")
    if bundle.grad_d_norm is not None:
        grad = bundle.grad_d_norm
        k0p_parts.append(lambda T, grad=grad: math.sqrt(T) * grad if T > 0 else 0.0)
        notes.append("k0' bound includes sqrt(T)*|grad a|_d")
    if not k0p_parts:
        raise UnavailableBoundError("bundle supports no K0' bound (need |a|_d or the gradient norm)")

    def k0_fn(T: float, parts=tuple(k0_parts)) -> float:
        return min(p(T) for p in parts)

    def k0p_fn(T: float, parts=tuple(k0p_parts)) -> float:
        return min(p(T) for p in parts)

    return KatoBoundState(
        d=d,
        delta=delta,
        k0=KatoEvaluator(k0_fn, k0_finite_at_inf, "norm-bundle K0 bound"),
        k0_prime=KatoEvaluator(k0p_fn, k0p_finite_at_inf, "norm-bundle K0' bound"),
        constants=constants,
        notes=tuple(notes),
    )


@dataclass(frozen=True)
class InequalityCheck:
    """One certified inequality lhs <relation> rhs with its evaluated sides."""

    name: str
    lhs: float
    relation: str  # "<" or "<="
    rhs: float

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        if self.relation == "<":
            return self.lhs < self.rhs
        return self.lhs <= self.rhs

    def to_dict(self) -> dict:
        return {"name": self.name, "lhs": self.lhs, "relation": self.relation, "rhs": self.rhs}

    @classmethod
    def from_dict(cls, data: Mapping) -> "InequalityCheck":
        return cls(str(data["name"]), float(data["lhs"]), str(data["relation"]), float(data["rhs"]))


@dataclass(frozen=True)
class LifespanCertificate:
    """A certified lifespan lower bound with everything needed to replay it."""

    t0: float
    theorem: str  # thm31 | thm41 | thm41-explicit | global
    delta_used: float
    intermediate: Mapping[str, float]
    iterate_bound: float | None
    feasible: bool
    checks: tuple[InequalityCheck, ...]
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "t0": self.t0,
            "theorem": self.theorem,
            "delta_used": self.delta_used,
            "intermediate": dict(sorted(self.intermediate.items())),
            "iterate_bound": self.iterate_bound,
            "feasible": self.feasible,
            "checks": [c.to_dict() for c in self.checks],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "LifespanCertificate":
        return cls(
            t0=float(data["t0"]),
            theorem=str(data["theorem"]),
            delta_used=float(data["delta_used"]),
            intermediate={str(k): float(v) for k, v in data["intermediate"].items()},
            iterate_bound=None if data.get("iterate_bound") is None else float(data["iterate_bound"]),
            feasible=bool(data["feasible"]),
            checks=tuple(InequalityCheck.from_dict(c) for c in data["checks"]),
            notes=tuple(str(n) for n in data.get("notes", ())),
        )


@dataclass(frozen=True)
class DeltaSweep:
    """Result of certifying over a delta grid: the winner plus the profile."""

    best: LifespanCertificate
    profile: tuple[tuple[float, float, bool], ...]  # (delta, t0, feasible)


# ---------------------------------------------------------------------------
# feasibility probes
# ---------------------------------------------------------------------------


def _coupled_probe(state: KatoBoundState, T: float, margin: float):
    """Feasibility of the coupled fixed-point hypotheses at horizon T."""
    k0 = state.k0(T)
    k0p = state.k0_prime(T)
    j1, j2 = state.constants.j1, state.constants.j2
    rec = CoupledRecurrence(
        alpha1=max(k0, _TINY),
        alpha2=max(k0p, _TINY),
        beta1=j1,
        beta2=j2,
        x0=max(k0, _TINY),
        y0=max(k0p, _TINY),
    )
    res = coupled_bound(rec)
    detail = {
        "k0_at_t0": k0,
        "k0_prime_at_t0": k0p,
        "j1": j1,
        "j2": j2,
        "s1": rec.det1,
        "s2": rec.det2,
        "d1": rec.d1,
        "d2": rec.d2,
    }
    if not res.ok:
        return False, detail
    v1, v2 = res.x_bound, res.y_bound
    detail["v1"] = v1
    detail["v2"] = v2
    feasible = (v1 - k0 > margin) and (v2 - k0p > margin)
    return feasible, detail


def thm31_feasible_at(state: KatoBoundState, T: float, margin: float = _DEFAULT_MARGIN) -> bool:
    """Whether the coupled-route inequalities hold at horizon T."""
    ok, _ = _coupled_probe(state, T, margin)
    return ok


def _envelope_probe(state: KatoBoundState, T: float, margin: float = 0.0):
    k0 = state.k0(T)
    k0p = state.k0_prime(T)
    threshold = state.constants.threshold
    detail = {
        "k0_at_t0": k0,
        "k0_prime_at_t0": k0p,
        "k_zero_sup": max(k0, k0p),
        "threshold": threshold,
        "j_bar": state.constants.j_bar,
    }
    return max(k0, k0p) <= threshold - margin, detail


def thm41_feasible_at(state: KatoBoundState, T: float) -> bool:
    """Whether the one-variable envelope threshold holds at horizon T."""
    ok, _ = _envelope_probe(state, T)
    return ok


# ---------------------------------------------------------------------------
# monotone bisection driver
# ---------------------------------------------------------------------------


def _largest_feasible(probe, t_lo: float, t_hi: float, tol: float, max_iter: int = 60):
    """Largest feasible T found by downward scan plus geometric bisection.

    Returns (t_best, detail, scan_notes) with t_best = None when nothing in
    [t_lo, t_hi] is feasible. The scan pattern is inspected for
    non-monotone feasibility (feasible above an infeasible point), which is
    reported rather than silently assumed away.
    """
    if not (0 < t_lo < t_hi):
        raise DomainError(f"search range must satisfy 0 < t_lo < t_hi, got ({t_lo}, {t_hi})")
    notes: list[str] = []
    ok, detail = probe(t_hi)
    if ok:
        notes.append("feasible at the search-range end; larger horizons were not explored")
        return t_hi, detail, notes

    # geometric scan downward for a feasible seed
    pattern: list[tuple[float, bool]] = [(t_hi, False)]
    t = t_hi
    seed = None
    seed_detail = None
    last_detail = detail
    while t > t_lo:
        t = max(t / 8.0, t_lo)
        ok, det = probe(t)
        last_detail = det
        pattern.append((t, ok))
        if ok and seed is None:
            seed, seed_detail = t, det
            # keep scanning a little below the seed to spot non-monotone sets
            for _ in range(3):
                t = max(t / 8.0, t_lo)
                if t == pattern[-1][0]:
                    break
                ok2, _ = probe(t)
                pattern.append((t, ok2))
                if t == t_lo:
                    break
            break
        if t == t_lo:
            break
    if seed is None:
        notes.append(
            f"no feasible horizon found down to the search floor {t_lo}; "
            "the tolerance floor was hit"
        )
        return None, last_detail, notes
    below = [okp for tp, okp in pattern if tp < seed]
    if any(not okp for okp in below):
        notes.append("feasibility was non-monotone in the scan; certifying the largest feasible prefix")

    hi = min(tp for tp, okp in pattern if tp > seed and not okp)
    lo, detail = seed, seed_detail
    for _ in range(max_iter):
        if hi - lo <= tol * lo:
            break
        mid = math.sqrt(lo * hi)
        ok, det = probe(mid)
        if ok:
            lo, detail = mid, det
        else:
            hi = mid
    return lo, detail, notes


# ---------------------------------------------------------------------------
# certifiers
# ---------------------------------------------------------------------------


def theorem31_bound(
    state: KatoBoundState,
    search: tuple[float, float] = _DEFAULT_SEARCH,
    tol: float = 1e-9,
    margin: float = _DEFAULT_MARGIN,
) -> LifespanCertificate:
    """Largest certifiable horizon via the coupled fixed-point route.

    At a feasible T the pair (K0(T), K0'(T)) sits strictly below the coupled
    bounds (V1, V2) built from itself with the sharp constants J1, J2; the
    strictness is certified with an absolute margin so floating-point
    equality can never produce a false certificate. If the inequalities hold
    at T = infinity (declared-finite evaluators only) the infinite branch is
    certified directly.
    """
    probe = lambda T: _coupled_probe(state, T, margin)

    if state.k0.finite_at_infinity and state.k0_prime.finite_at_infinity:
        ok, detail = probe(math.inf)
        if ok:
            return _build_thm31_cert(math.inf, state, detail, margin,
                                     notes=("inequalities hold at T = infinity; solution is global",))

    t_best, detail, scan_notes = _largest_feasible(probe, search[0], search[1], tol)
    if t_best is None:
        return LifespanCertificate(
            t0=0.0,
            theorem="thm31",
            delta_used=state.delta,
            intermediate=dict(detail),
            iterate_bound=None,
            feasible=False,
            checks=(),
            notes=tuple(scan_notes) + state.notes,
        )
    return _build_thm31_cert(t_best, state, detail, margin, notes=tuple(scan_notes))


def _build_thm31_cert(t0, state, detail, margin, notes=()):
    checks = (
        InequalityCheck("k0_below_v1", detail["k0_at_t0"], "<", detail["v1"]),
        InequalityCheck("k0_prime_below_v2", detail["k0_prime_at_t0"], "<", detail["v2"]),
        InequalityCheck("d1_positive", 0.0, "<", detail["d1"]),
        InequalityCheck("d2_positive", 0.0, "<", detail["d2"]),
    )
    detail = dict(detail)
    detail["margin"] = margin
    return LifespanCertificate(
        t0=t0,
        theorem="thm31",
        delta_used=state.delta,
        intermediate=detail,
        iterate_bound=max(detail["v1"], detail["v2"]),
        feasible=True,
        checks=checks,
        notes=tuple(notes) + state.notes,
    )


def theorem41_bound(
    state: KatoBoundState,
    search: tuple[float, float] = _DEFAULT_SEARCH,
    tol: float = 1e-9,
) -> LifespanCertificate:
    """Largest horizon with max(K0(T), K0'(T)) <= 3/(16 Jbar) = C2/d^2.

    The evaluator maximum is nondecreasing in T, so plain monotone bisection
    applies. The certificate stores the Picard iterate bound
    3/(4 Jbar) = C3/d^2 and carries the c3 reference-discrepancy note.
    """
    probe = lambda T: _envelope_probe(state, T)
    extra_notes: list[str] = []
    if state.constants.j > state.constants.j_bar:
        extra_notes.append(
            "envelope max(j_up1, j_up2) at this delta exceeds the critical-point "
            "envelope Jbar; the threshold is certified against Jbar, which is "
            "only a valid product-constant majorant for delta in "
            "[delta0, 1 - delta0]"
        )

    if state.k0.finite_at_infinity and state.k0_prime.finite_at_infinity:
        ok, detail = probe(math.inf)
        if ok:
            return _build_thm41_cert(math.inf, state, detail,
                                     notes=("threshold holds at T = infinity; solution is global",
                                            *extra_notes))

    t_best, detail, scan_notes = _largest_feasible(probe, search[0], search[1], tol)
    if t_best is None:
        return LifespanCertificate(
            t0=0.0,
            theorem="thm41",
            delta_used=state.delta,
            intermediate=dict(detail),
            iterate_bound=None,
            feasible=False,
            checks=(),
            notes=tuple(scan_notes) + tuple(extra_notes) + state.notes,
        )
    return _build_thm41_cert(t_best, state, detail, notes=tuple(scan_notes) + tuple(extra_notes))


def _build_thm41_cert(t0, state, detail, notes=()):
    cs = state.constants
    checks = (
        InequalityCheck("k_zero_below_threshold", detail["k_zero_sup"], "<=", detail["threshold"]),
    )
    detail = dict(detail)
    detail["c2_over_d2"] = cs.c2 / (cs.d * cs.d)
    detail["iterate_bound"] = cs.iterate_bound
    return LifespanCertificate(
        t0=t0,
        theorem="thm41",
        delta_used=state.delta,
        intermediate=detail,
        iterate_bound=cs.iterate_bound,
        feasible=True,
        checks=checks,
        notes=tuple(notes) + (C3_DISCREPANCY_NOTE,) + state.notes,
    )


def _inverted_power(threshold: float, denom: float, exponent: float) -> tuple[float, bool]:
    """(threshold/denom)^exponent in log space; capped when it overflows.

    Capping replaces an astronomically large horizon by a smaller one, which
    keeps the certificate sound (any value below the true inversion is a
    valid lower bound). Underflow to 0.0 is likewise sound: the crude route
    then certifies nothing.
    """
    if denom == 0.0:
        return math.inf, False  # the bound is identically zero: every horizon passes
    log_term = exponent * (math.log(threshold) - math.log(denom))
    if log_term >= math.log(_EXPLICIT_CAP):
        return _EXPLICIT_CAP, True
    return math.exp(log_term), False


def theorem41_explicit(
    norms: idmod.NormBundle, d: int, delta: float, theta: float | None = None
) -> LifespanCertificate:
    """Closed-form horizon from the norm bounds, no iteration.

    T0 = min( [C2 d^-2 / (2^{d+theta} |a|_{d+theta})]^{2d/(theta delta)},
              [C2 d^-2 / |grad a|_d]^2 )
    over whichever terms the bundle supports; a hair of relative shrink
    (1e-12) keeps the replayed threshold margins nonnegative after the
    power-law round trip. The inversion exponent 2d/(theta delta) can reach
    the hundreds, so terms are evaluated in log space and capped at 1e300
    (downward, hence sound) instead of overflowing.
    """
    cs = composite_constants(d, delta)
    threshold = cs.threshold
    terms: dict[str, float] = {}
    notes: list[str] = []
    if norms.theta is not None:
        theta_used = norms.theta if theta is None else theta
        if not math.isclose(theta_used, norms.theta, rel_tol=1e-12):
            raise DomainError(
                f"requested theta {theta_used} does not match the bundled exponent {norms.theta}"
            )
        denom = 2.0 ** (d + theta_used) * norms.norm_d_plus_theta
        value, capped = _inverted_power(threshold, denom, 2.0 * d / (theta_used * delta))
        terms["term_theta"] = value
        notes.append("theta-norm term present" + (" (capped at 1e300)" if capped else ""))
    elif theta is not None:
        raise UnavailableBoundError("theta requested but the bundle carries no theta norm")
    if norms.grad_d_norm is not None:
        value, capped = _inverted_power(threshold, norms.grad_d_norm, 2.0)
        terms["term_grad"] = value
        notes.append("gradient term present" + (" (capped at 1e300)" if capped else ""))
    if not terms:
        raise UnavailableBoundError(
            "explicit bound needs a theta norm or the gradient norm; the bundle has neither"
        )

    t0 = min(terms.values())
    if math.isfinite(t0):
        t0 *= _EXPLICIT_SHRINK

    intermediate: dict[str, float] = {"threshold": threshold, "d": float(d), **terms}
    checks: list[InequalityCheck] = []
    if "term_theta" in terms and math.isfinite(t0):
        intermediate["theta"] = norms.theta
        intermediate["norm_d_plus_theta"] = norms.norm_d_plus_theta
        checks.append(
            InequalityCheck(
                "k0_norm_bound_at_t0",
                idmod.k0_bound_from_norms(norms, d, delta, norms.theta, t0),
                "<=",
                threshold,
            )
        )
    if "term_grad" in terms and math.isfinite(t0):
        intermediate["grad_d_norm"] = norms.grad_d_norm
        checks.append(
            InequalityCheck(
                "k0_prime_norm_bound_at_t0",
                idmod.k0_prime_bound_from_norms(norms, t0),
                "<=",
                threshold,
            )
        )
    return LifespanCertificate(
        t0=t0,
        theorem="thm41-explicit",
        delta_used=delta,
        intermediate=intermediate,
        iterate_bound=cs.iterate_bound,
        feasible=True,
        checks=tuple(checks),
        notes=tuple(notes) + (C3_DISCREPANCY_NOTE,),
    )


def optimize_delta(
    certify: Callable[[float], LifespanCertificate],
    grid: Sequence[float] | None = None,
) -> DeltaSweep:
    """Run a per-delta certifier over a grid and keep the best certificate.

    Deterministic: the grid is traversed in order and ties in t0 are broken
    toward the smaller delta. The full (delta, t0, feasible) profile is
    returned alongside the winner.
    """
    if grid is None:
        grid = default_delta_grid()
    grid = tuple(grid)
    if not grid:
        raise DomainError("delta grid must be nonempty")
    for dlt in grid:
        if not (0.0 < dlt < 1.0):
            raise DomainError(f"grid delta {dlt} outside (0, 1)")

    best: LifespanCertificate | None = None
    profile: list[tuple[float, float, bool]] = []
    for dlt in grid:
        cert = certify(dlt)
        profile.append((dlt, cert.t0, cert.feasible))
        if best is None:
            best = cert
        elif cert.feasible and (not best.feasible or cert.t0 > best.t0):
            best = cert
    assert best is not None
    if not best.feasible:
        best = replace(best, notes=best.notes + ("all deltas on the grid were infeasible",))
    return DeltaSweep(best=best, profile=tuple(profile))


def global_smallness_threshold(d: int, delta: float, constants: ConstantSet | None = None) -> float:
    """Largest epsilon with |a|_d <= epsilon certifying a global solution.

    The T-uniform envelopes give max(K0, K0') <= max(S1, S2) |a|_d, so
    epsilon = C2 / (d^2 max(S1, S2)) pushes the data under the envelope
    threshold for every horizon at once.
    """
    cs = constants if constants is not None else composite_constants(d, delta)
    return cs.threshold / max(cs.s1, cs.s2)


def global_certificate(a_d_norm: float, d: int, delta: float) -> LifespanCertificate:
    """Certificate for the smallness test |a|_d <= epsilon (t0 = infinity)."""
    if a_d_norm < 0 or not math.isfinite(a_d_norm):
        raise DomainError(f"|a|_d must be finite and nonnegative, got {a_d_norm}")
    cs = composite_constants(d, delta)
    eps = global_smallness_threshold(d, delta, cs)
    feasible = a_d_norm <= eps
    intermediate = {
        "a_d_norm": a_d_norm,
        "epsilon": eps,
        "s1": cs.s1,
        "s2": cs.s2,
        "threshold": cs.threshold,
    }
    checks = (InequalityCheck("a_norm_below_epsilon", a_d_norm, "<=", eps),) if feasible else ()
    notes = () if feasible else (
        f"|a|_d exceeds the global-smallness threshold by the factor {a_d_norm / eps:.6g}",
    )
    return LifespanCertificate(
        t0=math.inf if feasible else 0.0,
        theorem="global",
        delta_used=delta,
        intermediate=intermediate,
        iterate_bound=cs.iterate_bound if feasible else None,
        feasible=feasible,
        checks=checks,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReplayReport:
    """Result of re-validating a certificate from its stored intermediates."""

    all_passed: bool
    results: tuple[tuple[str, bool, str], ...]


def _z(alpha: float, beta: float, gamma: float) -> float:
    disc = (beta - 1.0) ** 2 - 4.0 * alpha * gamma
    if disc < 0:
        return math.nan
    return (1.0 - beta + math.sqrt(disc)) / (2.0 * gamma)


def replay_certificate(cert: LifespanCertificate | Mapping) -> ReplayReport:
    """Re-derive every intermediate and re-check every inequality.

    Works from the stored numbers alone (plus the closed-form constant
    identities), so a consumer that cannot rebuild the original evaluators
    can still validate the certificate.
    """
    if not isinstance(cert, LifespanCertificate):
        cert = LifespanCertificate.from_dict(cert)
    results: list[tuple[str, bool, str]] = []

    def record(name: str, passed: bool, detail: str = "") -> None:
        results.append((name, bool(passed), detail))

    def close(a: float, b: float, tol: float = 1e-9) -> bool:
        if math.isinf(a) or math.isinf(b):
            return a == b
        return abs(a - b) <= tol * max(1.0, abs(a), abs(b))

    inter = cert.intermediate
    if not cert.feasible:
        record("feasible", False, "certificate marked infeasible")
        return ReplayReport(False, tuple(results))

    for check in cert.checks:
        record(f"check:{check.name}", check.passed, f"margin={check.margin:.6g}")

    if cert.theorem == "thm31":
        s1 = inter["j1"] * inter["k0_prime_at_t0"] - inter["j2"] * inter["k0_at_t0"]
        record("identity:s1", close(s1, inter["s1"]), "s1 = j1*k0' - j2*k0")
        record("identity:s2", close(-s1, inter["s2"]), "s2 = -s1")
        v1 = _z(inter["k0_at_t0"], inter["s1"], inter["j2"])
        v2 = _z(inter["k0_prime_at_t0"], inter["s2"], inter["j1"])
        record("identity:v1", close(v1, inter["v1"]), "v1 = Z(k0, s1, j2)")
        record("identity:v2", close(v2, inter["v2"]), "v2 = Z(k0', s2, j1)")
        d1 = (inter["s1"] + 1.0) ** 2 - 4.0 * inter["k0_at_t0"] * inter["j2"]
        d2 = (inter["s2"] + 1.0) ** 2 - 4.0 * inter["k0_prime_at_t0"] * inter["j1"]
        record("identity:d1", close(d1, inter["d1"]), "d1 from (s1+1)^2 - 4 k0 j2")
        record("identity:d2", close(d2, inter["d2"]), "d2 from (s2+1)^2 - 4 k0' j1")
    elif cert.theorem == "thm41":
        record(
            "identity:threshold",
            close(inter["threshold"], 3.0 / (16.0 * inter["j_bar"])),
            "threshold = 3/(16 j_bar)",
        )
        record(
            "identity:iterate_bound",
            cert.iterate_bound is not None and close(cert.iterate_bound, 4.0 * inter["threshold"]),
            "iterate bound = 4 * threshold = 3/(4 j_bar)",
        )
        record(
            "identity:k_zero_sup",
            close(inter["k_zero_sup"], max(inter["k0_at_t0"], inter["k0_prime_at_t0"])),
            "k_zero_sup = max(k0, k0')",
        )
    elif cert.theorem == "thm41-explicit":
        d = int(inter["d"])
        if "term_theta" in inter and math.isfinite(cert.t0):
            lhs = (
                cert.t0 ** (inter["theta"] * cert.delta_used / (2.0 * d))
                * 2.0 ** (d + inter["theta"])
                * inter["norm_d_plus_theta"]
            )
            record("reevaluate:k0_norm_bound", lhs <= inter["threshold"], f"lhs={lhs:.6g}")
        if "term_grad" in inter and math.isfinite(cert.t0):
            lhs = math.sqrt(cert.t0) * inter["grad_d_norm"]
            record("reevaluate:k0_prime_norm_bound", lhs <= inter["threshold"], f"lhs={lhs:.6g}")
    elif cert.theorem == "global":
        record(
            "identity:epsilon",
            close(inter["epsilon"], inter["threshold"] / max(inter["s1"], inter["s2"])),
            "epsilon = threshold / max(s1, s2)",
        )

    all_passed = all(p for _, p, _ in results)
    return ReplayReport(all_passed, tuple(results))
