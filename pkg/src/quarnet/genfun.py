"""Generating-function analytics for SIR outbreaks and perfect quarantines.

Degree distributions (analytic families and empirical tables) expose their
probability generating function g0, its derivatives, and the excess-degree
function g1 = g0'/g0'(1).  On top of those sit the quarantine operator, the
herd-immunity condition and threshold, post-quarantine distributions, and the
outbreak final-size fixed point.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "DivergenceError",
    "NonConvergenceError",
    "NoThresholdNeeded",
    "NoThresholdExists",
    "zeta",
    "polylog",
    "SimplePowerlaw",
    "BAAnalytic",
    "Poisson",
    "DRegular",
    "Empirical",
    "gf_eval",
    "reproductive_number",
    "quarantine_operator",
    "herd_condition",
    "herd_threshold",
    "removed_after_quarantine",
    "PostQuarantineGF",
    "post_quarantine_gfuns",
    "transmissibility",
    "final_size",
    "total_removed",
]


class DomainError(ValueError):
    pass


class DivergenceError(ArithmeticError):
    pass


class NonConvergenceError(ArithmeticError):
    pass


class NoThresholdNeeded(Exception):
    """The distribution is already subcritical; no quarantine is required."""


class NoThresholdExists(Exception):
    """No quarantine timing achieves herd immunity (e.g. d-regular, d > 2)."""


# ---------------------------------------------------------------------------
# special functions


def zeta(alpha: float) -> float:
    """Riemann zeta via Euler-Maclaurin summation, |error| < 1e-12."""
    if alpha <= 1.0:
        raise DomainError("zeta requires alpha > 1")
    s = float(alpha)
    n = 2000
    k = np.arange(1, n, dtype=np.float64)
    head = float((k ** -s).sum())
    tail = n ** (1.0 - s) / (s - 1.0) + 0.5 * n ** -s
    tail += s / 12.0 * n ** (-s - 1.0)
    tail -= s * (s + 1.0) * (s + 2.0) / 720.0 * n ** (-s - 3.0)
    return head + tail


_POLYLOG_CAP = 20_000_000


def polylog(s: float, z: float) -> float:
    """Li_s(z) = sum_{k>=1} z^k / k^s for z in [0, 1] (s > 1 required at z = 1)."""
    if not 0.0 <= z <= 1.0:
        raise DomainError("polylog requires z in [0, 1]")
    if z == 1.0:
        if s <= 1.0:
            raise DivergenceError("polylog diverges at z = 1 for s <= 1")
        return zeta(s)
    if z == 0.0:
        return 0.0
    if s == 1.0:
        return -math.log1p(-z)
    if s == 2.0 and z > 0.5:
        # dilogarithm reflection: Li2(z) = pi^2/6 - ln(z)ln(1-z) - Li2(1-z)
        return zeta(2.0) - math.log(z) * math.log1p(-z) - polylog(2.0, 1.0 - z)
    total = 0.0
    k0 = 1
    chunk = 1024
    log_z = math.log(z)
    bound = math.inf
    while k0 <= _POLYLOG_CAP:
        k = np.arange(k0, k0 + chunk, dtype=np.float64)
        total += float((np.exp(k * log_z) / k ** s).sum())
        k0 += chunk
        # geometric bound on the remaining tail
        bound = math.exp(k0 * log_z) / (k0 ** s * (1.0 - z)) if s >= 0 else math.inf
        if bound < 1e-13:
            return total
        chunk = min(chunk * 2, 1_000_000)
    if bound < 1e-9:
        return total
    raise NonConvergenceError(f"polylog series did not converge for s={s}, z={z}")


def _series_sum(coef, k_start: int, z: float, decay_power: float) -> float:
    """sum_{k>=k_start} coef(k) * z^k where coef(k) ~ k^-decay_power."""
    if z == 0.0:
        return 0.0
    total = 0.0
    k0 = k_start
    chunk = 1024
    log_z = math.log(z) if z < 1.0 else 0.0
    bound = math.inf
    while k0 <= _POLYLOG_CAP:
        k = np.arange(k0, k0 + chunk, dtype=np.float64)
        total += float((coef(k) * np.exp(k * log_z)).sum())
        k0 += chunk
        if z < 1.0:
            bound = math.exp(k0 * log_z) / (k0 ** decay_power * (1.0 - z))
        else:
            if decay_power <= 1.0:
                raise DivergenceError("series diverges at z = 1")
            bound = k0 ** (1.0 - decay_power) / (decay_power - 1.0)
        if bound < 1e-13:
            return total
        chunk = min(chunk * 2, 1_000_000)
    if bound < 1e-9:  # slowly decaying tail near z=1; still well inside tolerance
        return total
    raise NonConvergenceError("series did not converge")


# ---------------------------------------------------------------------------
# degree distributions

_PK_TAIL = 1e-8


class DegreeDistribution:
    """Interface: g0/g0p/g0pp/g1 plus moments and the sampling table."""

    def g1(self, z: float) -> float:
        if z == 1.0:
            return 1.0
        if z == 0.0:
            return self._g1_at0()
        return self.g0p(z) / self.mean_degree()

    def g1p(self, z: float) -> float:
        return self.g0pp(z) / self.mean_degree()

    def _g1_at0(self) -> float:
        raise NotImplementedError

    def second_moment(self) -> float:
        raise DivergenceError(f"E[k^2] diverges for {self!r}")

    def herd_condition_value(self, u: float) -> float:
        """Moment form: sum p_k u^k k(k-1) - sum p_k u^k k."""
        raise NotImplementedError

    def pk_table(self) -> np.ndarray:
        """p_k truncated at tail mass < 1e-8 and renormalized."""
        raise NotImplementedError


@dataclass(frozen=True, repr=False)
class SimplePowerlaw(DegreeDistribution):
    """p_k = k^-alpha / zeta(alpha) for k >= 1."""
    alpha: float

    def __post_init__(self):
        if self.alpha <= 2.0:
            raise DomainError("simple powerlaw needs alpha > 2 (finite mean)")
        object.__setattr__(self, "_za", zeta(self.alpha))
        object.__setattr__(self, "_za1", zeta(self.alpha - 1.0))

    def g0(self, z):
        return polylog(self.alpha, z) / self._za

    def g0p(self, z):
        if z == 0.0:
            return 1.0 / self._za
        return polylog(self.alpha - 1.0, z) / (z * self._za)

    def g0pp(self, z):
        if z == 0.0:
            return 2.0 ** (1.0 - self.alpha) / self._za
        if z == 1.0 and self.alpha <= 3.0:
            raise DivergenceError("g0'' diverges at z=1 for alpha <= 3")
        a = self.alpha
        return (polylog(a - 2.0, z) - polylog(a - 1.0, z)) / (z * z * self._za)

    def g1(self, z):
        if z == 1.0:
            return 1.0
        if z == 0.0:
            return self._g1_at0()
        return polylog(self.alpha - 1.0, z) / (z * self._za1)

    def _g1_at0(self):
        return 1.0 / self._za1

    def mean_degree(self):
        return self._za1 / self._za

    def second_moment(self):
        if self.alpha <= 3.0:
            raise DivergenceError("E[k^2] diverges for powerlaw alpha <= 3")
        return zeta(self.alpha - 2.0) / self._za

    def herd_condition_value(self, u):
        if u == 0.0:
            return 0.0
        a = self.alpha
        return (polylog(a - 2.0, u) - 2.0 * polylog(a - 1.0, u)) / self._za

    def pk_table(self):
        a = self.alpha
        k_max = int(math.ceil((_PK_TAIL * (a - 1.0) * self._za) ** (1.0 / (1.0 - a)))) + 2
        k = np.arange(k_max + 1, dtype=np.float64)
        pk = np.zeros(k_max + 1)
        pk[1:] = k[1:] ** -a / self._za
        return pk / pk.sum()

    def __repr__(self):
        return f"SimplePowerlaw(alpha={self.alpha})"


@dataclass(frozen=True, repr=False)
class BAAnalytic(DegreeDistribution):
    """Barabási–Albert limit law: p_k = 2m(m+1) / (k(k+1)(k+2)) for k >= m."""
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise DomainError("BA analytic law needs m >= 1")

    @property
    def _c(self):
        return 2.0 * self.m * (self.m + 1.0)

    def g0(self, z):
        if z == 1.0:
            return 1.0
        c = self._c
        return _series_sum(lambda k: c / (k * (k + 1) * (k + 2)), self.m, z, 3.0)

    def g0p(self, z):
        c = self._c
        if z == 0.0:
            return c / 6.0 if self.m == 1 else 0.0
        return _series_sum(lambda k: c / ((k + 1) * (k + 2)), self.m, z, 2.0) / z

    def g0pp(self, z):
        c = self._c
        if z == 0.0:
            return c / 12.0 if self.m <= 2 else 0.0
        if z == 1.0:
            raise DivergenceError("g0'' diverges at z=1 for the BA law")
        return _series_sum(lambda k: c * (k - 1) / ((k + 1) * (k + 2)), self.m, z, 1.0) / (z * z)

    def _g1_at0(self):
        return (self._c / 6.0 if self.m == 1 else 0.0) / self.mean_degree()

    def mean_degree(self):
        return 2.0 * self.m

    def herd_condition_value(self, u):
        if u == 0.0:
            return 0.0
        c = self._c
        return _series_sum(lambda k: c * (k - 2) / ((k + 1) * (k + 2)), self.m, u, 1.0)

    def pk_table(self):
        c = self._c
        k_max = int(math.ceil(math.sqrt(c / (2.0 * _PK_TAIL)))) + 2
        k = np.arange(k_max + 1, dtype=np.float64)
        pk = np.zeros(k_max + 1)
        kk = k[self.m:]
        pk[self.m:] = c / (kk * (kk + 1) * (kk + 2))
        return pk / pk.sum()

    def __repr__(self):
        return f"BAAnalytic(m={self.m})"


@dataclass(frozen=True, repr=False)
class Poisson(DegreeDistribution):
    """p_k = lam^k e^-lam / k!."""
    lam: float

    def __post_init__(self):
        if self.lam <= 0:
            raise DomainError("Poisson needs lam > 0")

    def g0(self, z):
        return math.exp(self.lam * (z - 1.0))

    def g0p(self, z):
        return self.lam * self.g0(z)

    def g0pp(self, z):
        return self.lam * self.lam * self.g0(z)

    def g1(self, z):
        return self.g0(z)

    def _g1_at0(self):
        return self.g0(0.0)

    def mean_degree(self):
        return self.lam

    def second_moment(self):
        return self.lam * self.lam + self.lam

    def herd_condition_value(self, u):
        lam = self.lam
        return u * lam * (u * lam - 1.0) * math.exp(lam * (u - 1.0))

    def pk_table(self):
        lam = self.lam
        pk = [math.exp(-lam)]
        tail = 1.0 - pk[0]
        k = 0
        while tail >= _PK_TAIL:
            k += 1
            pk.append(pk[-1] * lam / k)
            tail -= pk[-1]
        arr = np.array(pk)
        return arr / arr.sum()

    def __repr__(self):
        return f"Poisson(lam={self.lam})"


@dataclass(frozen=True, repr=False)
class DRegular(DegreeDistribution):
    """Point mass at degree d."""
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise DomainError("d-regular needs d >= 1")

    def g0(self, z):
        return z ** self.d

    def g0p(self, z):
        return self.d * z ** (self.d - 1)

    def g0pp(self, z):
        return self.d * (self.d - 1) * z ** (self.d - 2) if self.d >= 2 else 0.0

    def g1(self, z):
        return z ** (self.d - 1)

    def _g1_at0(self):
        return 1.0 if self.d == 1 else 0.0

    def mean_degree(self):
        return float(self.d)

    def second_moment(self):
        return float(self.d * self.d)

    def herd_condition_value(self, u):
        return self.d * (self.d - 2) * u ** self.d

    def pk_table(self):
        pk = np.zeros(self.d + 1)
        pk[self.d] = 1.0
        return pk

    def __repr__(self):
        return f"DRegular(d={self.d})"


class Empirical(DegreeDistribution):
    """Explicit p_k table over k = 0..k_max."""

    def __init__(self, pk):
        pk = np.asarray(pk, dtype=np.float64)
        if (pk < 0).any():
            raise DomainError("p_k must be non-negative")
        if abs(pk.sum() - 1.0) > 1e-10:
            raise DomainError(f"p_k must sum to 1 (got {pk.sum()!r})")
        self.pk = pk
        self._k = np.arange(len(pk), dtype=np.float64)

    @classmethod
    def from_degree_counts(cls, counts):
        counts = np.asarray(counts, dtype=np.float64)
        return cls(counts / counts.sum())

    def _powers(self, z):
        return z ** self._k

    def g0(self, z):
        return float(self.pk @ self._powers(z))

    def g0p(self, z):
        k = self._k
        pw = np.where(k >= 1, z ** np.maximum(k - 1, 0), 0.0)
        return float((self.pk * k) @ pw)

    def g0pp(self, z):
        k = self._k
        pw = np.where(k >= 2, z ** np.maximum(k - 2, 0), 0.0)
        return float((self.pk * k * (k - 1)) @ pw)

    def _g1_at0(self):
        return (self.pk[1] if len(self.pk) > 1 else 0.0) / self.mean_degree()

    def mean_degree(self):
        return float(self.pk @ self._k)

    def second_moment(self):
        return float(self.pk @ (self._k ** 2))

    def herd_condition_value(self, u):
        k = self._k
        return float((self.pk * k * (k - 2.0)) @ (u ** k))

    def pk_table(self):
        return self.pk.copy()

    def __repr__(self):
        return f"Empirical(k_max={len(self.pk) - 1})"


# ---------------------------------------------------------------------------
# operations


def gf_eval(dist: DegreeDistribution, z: float, which: str) -> float:
    """Evaluate g0, g0', g0'' or g1 at z in [0, 1]."""
    if not 0.0 <= z <= 1.0:
        raise DomainError("z must be in [0, 1]")
    try:
        fn = {"g0": dist.g0, "g0p": dist.g0p, "g0pp": dist.g0pp, "g1": dist.g1}[which]
    except KeyError:
        raise DomainError(f"unknown evaluator {which!r}") from None
    return fn(z)


def reproductive_number(dist: DegreeDistribution) -> float:
    """R = (E[k^2] - E[k]) / E[k]; outbreaks are possible iff R > 1."""
    m1 = dist.mean_degree()
    m2 = dist.second_moment()
    return (m2 - m1) / m1


def quarantine_operator(counts, u: float) -> np.ndarray:
    """Expected susceptible nodes per degree after quarantining at u: P_k u^k."""
    if not 0.0 <= u <= 1.0:
        raise DomainError("u must be in [0, 1]")
    arr = np.asarray(getattr(counts, "counts", counts), dtype=np.float64)
    return arr * u ** np.arange(len(arr), dtype=np.float64)


def herd_condition(dist: DegreeDistribution, u: float) -> float:
    """Post-quarantine outbreak criterion; herd immunity iff the value is <= 0."""
    if not 0.0 <= u < 1.0:
        raise DomainError("u must be in [0, 1)")
    return dist.herd_condition_value(u)


_SCAN_LO = 1e-6
_SCAN_HI = 1.0 - 1e-6


def herd_threshold(dist: DegreeDistribution) -> float:
    """Largest u* in (0,1) where the herd condition crosses zero, to 1e-7."""
    grid = [_SCAN_LO] + [i / 100.0 for i in range(1, 100)] + [_SCAN_HI]
    vals = [dist.herd_condition_value(u) for u in grid]
    if all(v <= 0.0 for v in vals):
        raise NoThresholdNeeded(f"{dist!r} is already subcritical at every u")
    if all(v > 0.0 for v in vals):
        raise NoThresholdExists(f"no quarantine timing gives herd immunity for {dist!r}")
    hi_idx = max(i for i in range(len(grid) - 1) if vals[i] <= 0.0 < vals[i + 1])
    lo, hi = grid[hi_idx], grid[hi_idx + 1]
    while hi - lo > 1e-7:
        mid = 0.5 * (lo + hi)
        if dist.herd_condition_value(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def removed_after_quarantine(dist: DegreeDistribution, u: float) -> float:
    """Expected removed fraction when quarantining at u: 1 - g0(u)."""
    if not 0.0 <= u <= 1.0:
        raise DomainError("u must be in [0, 1]")
    return 1.0 - dist.g0(u)


@dataclass
class PostQuarantineGF:
    """Generating functions of the surviving graph after a quarantine at u."""
    dist: DegreeDistribution
    u: float

    def g0q(self, z: float) -> float:
        return self.dist.g0(self.u * z) / self.dist.g0(self.u)

    def g1q(self, z: float) -> float:
        return self.dist.g1(self.u * z) / self.dist.g1(self.u)


def post_quarantine_gfuns(dist: DegreeDistribution, u: float) -> PostQuarantineGF:
    if not 0.0 < u <= 1.0:
        raise DomainError("u must be in (0, 1]; u = 0 leaves a degenerate graph")
    return PostQuarantineGF(dist, u)


def transmissibility(beta: float, gamma: float) -> float:
    """Probability an infected node ever transmits over one edge: beta/(beta+gamma)."""
    if gamma <= 0.0:
        raise DomainError("gamma must be > 0")
    if beta < 0.0:
        raise DomainError("beta must be >= 0")
    return beta / (beta + gamma)


_FP_CAP = 100_000


def _solve_edge_fixed_point(g1_func, phi: float, branching: float) -> float:
    """Smallest root in [0,1] of v = 1 - phi + phi*g1_func(v).

    Damped iteration from 0 picks the physical root; a bisection fallback
    covers slow convergence.  `branching` is phi times the derivative of
    g1_func at 1 (may be inf); at or below 1 the only root is v = 1.
    """
    if phi == 0.0:
        return 1.0
    if branching <= 1.0 + 1e-12:
        return 1.0
    v = 0.0
    omega = 0.5
    for _ in range(_FP_CAP):
        nv = (1.0 - omega) * v + omega * (1.0 - phi + phi * g1_func(v))
        if abs(nv - v) < 1e-14:
            v = nv
            break
        v = nv
    resid = v - (1.0 - phi + phi * g1_func(v))
    if abs(resid) > 1e-11:
        lo, hi = 0.0, 1.0 - 1e-3
        h = lambda x: x - (1.0 - phi + phi * g1_func(x))
        while h(hi) <= 0.0:
            hi = 1.0 - (1.0 - hi) * 1e-3
            if 1.0 - hi < 1e-15:
                return 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if h(mid) <= 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo < 1e-14:
                break
        v = 0.5 * (lo + hi)
        if abs(h(v)) > 1e-9:
            raise NonConvergenceError("outbreak fixed point did not converge")
    return min(max(v, 0.0), 1.0)


def final_size(dist: DegreeDistribution, phi: float) -> float:
    """Expected final removed fraction S = 1 - g0(v), v = 1 - phi + phi*g1(v)."""
    if not 0.0 <= phi <= 1.0:
        raise DomainError("phi must be in [0, 1]")
    try:
        branching = phi * reproductive_number(dist)
    except DivergenceError:
        branching = math.inf if phi > 0 else 0.0
    v = _solve_edge_fixed_point(dist.g1, phi, branching)
    return 0.0 if v >= 1.0 else 1.0 - dist.g0(v)


def total_removed(dist: DegreeDistribution, u: float, phi: float) -> float:
    """Removed fraction after quarantining at u followed by a reseeded outbreak:
    R(u) = 1 - g0(u*v) with v = 1 - phi + phi * g1(u*v)/g1(u)."""
    if not 0.0 < u <= 1.0:
        raise DomainError("u must be in (0, 1]")
    if not 0.0 <= phi <= 1.0:
        raise DomainError("phi must be in [0, 1]")
    g1_u = dist.g1(u)
    if g1_u <= 0.0:
        return 1.0 - dist.g0(u)
    if u == 1.0:
        branching = None
        try:
            branching = phi * reproductive_number(dist)
        except DivergenceError:
            branching = math.inf if phi > 0 else 0.0
    else:
        branching = phi * u * dist.g1p(u) / g1_u
    v = _solve_edge_fixed_point(lambda w: dist.g1(u * w) / g1_u, phi, branching)
    return 1.0 - dist.g0(u * v)
