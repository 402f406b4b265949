"""Continuous-time event-driven SIR simulation with perfect quarantines.

Each infected node recovers at rate gamma and transmits independently along
each edge to a susceptible neighbor at rate beta.  A perfect quarantine moves
every infected node to removed and reseeds the infection among the remaining
susceptibles.  The event engine keeps a priority queue of pre-drawn
transmission/recovery times with lazy invalidation.
"""

import math
from dataclasses import dataclass
from heapq import heappop, heappush

import numpy as np

from .graph import Graph
from .rng import py_rng

__all__ = [
    "SimError",
    "EpidemicParams",
    "NoQuarantine",
    "FractionAffected",
    "InfectedCount",
    "TimeSeries",
    "SimOutcome",
    "run_sir",
    "detect_second_wave",
    "fwhm",
    "UndefinedWidthError",
    "groupwise_survival",
    "degree_class_susceptibility",
    "default_survival_groups",
]

S, I, R = 0, 1, 2


class SimError(ValueError):
    pass


@dataclass(frozen=True)
class EpidemicParams:
    """Per-edge infection rate, per-node recovery rate, and (re)seed count."""
    beta: float
    gamma: float
    rho: int = 10

    def __post_init__(self):
        if self.beta < 0:
            raise SimError("beta must be >= 0")
        if self.gamma <= 0:
            raise SimError("gamma must be > 0")
        if self.rho < 1:
            raise SimError("rho must be >= 1")


@dataclass(frozen=True)
class NoQuarantine:
    pass


@dataclass(frozen=True)
class FractionAffected:
    """Quarantine when the affected (non-susceptible) fraction crosses each
    threshold.  With relative=True, thresholds after the first are measured
    from the affected fraction at the previous quarantine's end."""
    thresholds: tuple
    relative: bool = False

    def __post_init__(self):
        thr = tuple(float(x) for x in self.thresholds)
        object.__setattr__(self, "thresholds", thr)
        if any(not 0.0 <= x <= 1.0 for x in thr):
            raise SimError("thresholds must lie in [0, 1]")
        if not self.relative and any(b <= a for a, b in zip(thr, thr[1:])):
            raise SimError("thresholds must be strictly ascending")


@dataclass(frozen=True)
class InfectedCount:
    """Quarantine whenever the infected count reaches `trigger`, up to
    max_quarantines times (None = unbounded)."""
    trigger: int
    max_quarantines: int | None = None

    def __post_init__(self):
        if self.trigger < 1:
            raise SimError("trigger must be >= 1")
        if self.max_quarantines is not None and self.max_quarantines < 1:
            raise SimError("max_quarantines must be >= 1 or None")


@dataclass
class TimeSeries:
    t: np.ndarray
    s: np.ndarray
    i: np.ndarray
    r: np.ndarray
    quarantine_times: list


@dataclass
class SimOutcome:
    n: int
    final_removed_fraction: float
    max_infected_fraction: float
    quarantine_times: list
    affected_at_quarantine: list      # fraction affected when each quarantine fired
    susceptible_at_quarantine_end: list  # S count after each quarantine's reseed
    infections_in_wave: list          # S->I transitions per wave, reseeds excluded
    wave_peaks: list                  # max infected count per wave
    wave_windows: list                # (t_start, t_end) per wave
    reseed_shortfall: bool
    final_states: np.ndarray
    timeseries: TimeSeries | None = None
    infection_order: np.ndarray | None = None
    infection_times: np.ndarray | None = None

    @property
    def n_quarantines(self) -> int:
        return len(self.quarantine_times)


def run_sir(
    g: Graph,
    params: EpidemicParams,
    policy=NoQuarantine(),
    seed: int = 0,
    rng=None,
    record_timeseries: bool = False,
    record_infection_order: bool = False,
) -> SimOutcome:
    """Run one SIR epidemic until no infected nodes remain."""
    n = g.n
    if n == 0:
        raise SimError("empty graph")
    if params.rho > n:
        raise SimError("rho exceeds node count")
    rng = rng if rng is not None else py_rng(seed, 0x51B)
    rand = rng.random
    sample = rng.sample
    log = math.log
    adj = g.adjacency_tuples()

    beta, gamma, rho = params.beta, params.gamma, params.rho
    inv_beta = 1.0 / beta if beta > 0 else 0.0
    inv_gamma = 1.0 / gamma

    state = [0] * n
    sus_list = list(range(n))
    sus_pos = list(range(n))
    s_count = n
    i_count = 0
    r_count = 0
    infected = set()
    heap = []
    counter = 0

    # policy bookkeeping
    if isinstance(policy, FractionAffected):
        mode = 1
        thr_list = policy.thresholds
        thr_idx = 0
        thr_base = 0.0
        next_abs = (thr_list[0] * n - 1e-9) if thr_list else math.inf
    elif isinstance(policy, InfectedCount):
        mode = 2
        trigger = policy.trigger
        max_q = policy.max_quarantines
    elif isinstance(policy, NoQuarantine):
        mode = 0
    else:
        raise SimError(f"unknown policy {policy!r}")

    q_times = []
    affected_at_q = []
    sus_at_q_end = []
    infections_in_wave = [0]
    wave_peaks = [0]
    wave_start = 0.0
    wave_windows = []
    shortfall = False
    max_i = 0

    ts_t, ts_s, ts_i, ts_r = ([], [], [], []) if record_timeseries else (None,) * 4
    order = [] if record_infection_order else None
    order_t = [] if record_infection_order else None

    def infect(v, t, counted):
        nonlocal s_count, i_count, counter, max_i
        state[v] = 1
        pos = sus_pos[v]
        last = sus_list[-1]
        sus_list[pos] = last
        sus_pos[last] = pos
        sus_list.pop()
        s_count -= 1
        i_count += 1
        infected.add(v)
        if counted:
            infections_in_wave[-1] += 1
        if i_count > wave_peaks[-1]:
            wave_peaks[-1] = i_count
            if i_count > max_i:
                max_i = i_count
        if order is not None:
            order.append(v)
            order_t.append(t)
        d_rec = -log(1.0 - rand()) * inv_gamma
        heappush(heap, (t + d_rec, counter, v, -1))
        counter += 1
        if beta > 0.0:
            for w in adj[v]:
                if state[w] == 0:
                    d = -log(1.0 - rand()) * inv_beta
                    if d < d_rec:
                        heappush(heap, (t + d, counter, w, v))
                        counter += 1

    def record(t):
        ts_t.append(t)
        ts_s.append(s_count)
        ts_i.append(i_count)
        ts_r.append(r_count)

    def do_quarantine(t):
        nonlocal i_count, r_count, wave_start, shortfall, thr_idx, thr_base, next_abs
        q_times.append(t)
        affected_at_q.append((n - s_count) / n)
        for v in infected:
            state[v] = 2
        r_count += i_count
        i_count = 0
        infected.clear()
        wave_windows.append((wave_start, t))
        if ts_t is not None:
            record(t)
        k = min(rho, s_count)
        if k < rho:
            shortfall = True
        picks = sample(sus_list, k) if k else []
        for w in picks:
            infect(w, t, False)
        sus_at_q_end.append(s_count)
        infections_in_wave.append(0)
        wave_peaks.append(i_count)
        wave_start = t
        if ts_t is not None:
            record(t)
        if mode == 1:
            thr_idx += 1
            if policy.relative:
                thr_base = float(n - s_count)
                next_abs = (thr_base + thr_list[thr_idx] * n - 1e-9) if thr_idx < len(thr_list) else math.inf
            else:
                next_abs = (thr_list[thr_idx] * n - 1e-9) if thr_idx < len(thr_list) else math.inf

    def check_triggers(t):
        if mode == 1:
            while n - s_count >= next_abs:
                do_quarantine(t)
        elif mode == 2:
            while i_count >= trigger and i_count > 0 and (max_q is None or len(q_times) < max_q):
                do_quarantine(t)

    seeds = sample(sus_list, rho)
    for v in seeds:
        infect(v, 0.0, False)
    if ts_t is not None:
        record(0.0)
    check_triggers(0.0)
    last_t = 0.0

    while heap:
        t, _, v, u = heappop(heap)
        if u < 0:
            if state[v] == 1:
                state[v] = 2
                i_count -= 1
                r_count += 1
                infected.discard(v)
                last_t = t
                if ts_t is not None:
                    record(t)
        elif state[u] == 1 and state[v] == 0:
            infect(v, t, True)
            last_t = t
            if ts_t is not None:
                record(t)
            check_triggers(t)

    wave_windows.append((wave_start, last_t))

    timeseries = None
    if ts_t is not None:
        timeseries = TimeSeries(
            t=np.asarray(ts_t), s=np.asarray(ts_s), i=np.asarray(ts_i),
            r=np.asarray(ts_r), quarantine_times=list(q_times),
        )

    return SimOutcome(
        n=n,
        final_removed_fraction=r_count / n,
        max_infected_fraction=max_i / n,
        quarantine_times=q_times,
        affected_at_quarantine=affected_at_q,
        susceptible_at_quarantine_end=sus_at_q_end,
        infections_in_wave=infections_in_wave,
        wave_peaks=wave_peaks,
        wave_windows=wave_windows,
        reseed_shortfall=shortfall,
        final_states=np.asarray(state, dtype=np.int8),
        timeseries=timeseries,
        infection_order=np.asarray(order, dtype=np.int64) if order is not None else None,
        infection_times=np.asarray(order_t) if order_t is not None else None,
    )


def detect_second_wave(outcome: SimOutcome, quarantine_index: int) -> bool:
    """True iff the wave following the given quarantine infected at least 5% of
    the nodes still susceptible at that quarantine's end (reseeds excluded)."""
    if not 0 <= quarantine_index < outcome.n_quarantines:
        raise SimError("quarantine index out of range")
    remaining = outcome.susceptible_at_quarantine_end[quarantine_index]
    new_inf = outcome.infections_in_wave[quarantine_index + 1]
    return new_inf >= 0.05 * remaining and remaining > 0


class UndefinedWidthError(ArithmeticError):
    pass


def fwhm(series: TimeSeries, window=None) -> float:
    """Full width at half maximum of the infected curve inside a time window,
    linearly interpolating between event records."""
    t, y = series.t, series.i.astype(np.float64)
    if window is not None:
        mask = (t >= window[0]) & (t <= window[1])
        t, y = t[mask], y[mask]
        # a quarantine stacks several records at the window's left edge
        # (trigger event, conversion, reseed); the wave starts at the last one
        if len(t) > 1:
            k = int(np.searchsorted(t, t[0], side="right"))
            if k > 1:
                t, y = t[k - 1:], y[k - 1:]
    if len(t) == 0 or y.max() <= 0:
        raise UndefinedWidthError("window contains no positive peak")
    peak_idx = int(y.argmax())
    half = y[peak_idx] / 2.0

    def cross(i0, i1):
        t0, t1, y0, y1 = t[i0], t[i1], y[i0], y[i1]
        if y1 == y0:
            return float(t1)
        return float(t0 + (half - y0) * (t1 - t0) / (y1 - y0))

    left = None
    for i in range(peak_idx, 0, -1):
        if y[i - 1] < half <= y[i]:
            left = cross(i - 1, i)
            break
    right = None
    for i in range(peak_idx, len(y) - 1):
        if y[i] >= half > y[i + 1]:
            right = cross(i, i + 1)
            break
    if left is None or right is None:
        raise UndefinedWidthError("curve does not cross half maximum on both sides")
    return right - left


def default_survival_groups(g: Graph) -> dict:
    """Top 1/3/5% of nodes by degree (ties broken by id) and the minimum-degree set."""
    deg = g.degrees()
    order = np.lexsort((np.arange(g.n), -deg))
    groups = {}
    for pct in (1, 3, 5):
        k = max(1, int(math.ceil(g.n * pct / 100.0)))
        groups[f"top{pct}"] = order[:k]
    groups["min_degree"] = np.flatnonzero(deg == deg.min())
    return groups


def groupwise_survival(g: Graph, outcome: SimOutcome, groups=None) -> dict:
    """Per-group affected fraction versus overall affected fraction.

    Returns {name: (x, y)} where x[i] is the population affected fraction after
    the i-th infection event and y[i] the affected fraction within the group.
    """
    if outcome.infection_order is None:
        raise SimError("run_sir must record the infection order for groupwise curves")
    if groups is None:
        groups = default_survival_groups(g)
    order = outcome.infection_order
    x = np.arange(1, len(order) + 1) / g.n
    out = {}
    for name, members in groups.items():
        members = np.asarray(members)
        if members.size == 0:
            raise SimError(f"group {name!r} is empty")
        mask = np.zeros(g.n, dtype=bool)
        mask[members] = True
        hits = np.cumsum(mask[order])
        out[name] = (x, hits / members.size)
    return out


def degree_class_susceptibility(g: Graph, outcome: SimOutcome, u_target: float, ks) -> dict:
    """Susceptible fraction of each degree class at the moment the degree-1
    susceptible fraction first drops to u_target."""
    if outcome.infection_order is None:
        raise SimError("run_sir must record the infection order")
    deg = g.degrees()
    n1 = int((deg == 1).sum())
    if n1 == 0:
        raise SimError("graph has no degree-1 nodes to define u")
    totals = {k: int((deg == k).sum()) for k in ks}
    sus1 = n1
    sus_k = {k: totals[k] for k in ks}
    for v in outcome.infection_order:
        d = deg[v]
        if d == 1:
            sus1 -= 1
            if sus1 / n1 <= u_target:
                break
        elif d in sus_k:
            sus_k[d] -= 1
    else:
        raise SimError(f"u never reached {u_target}")
    return {k: sus_k[k] / totals[k] if totals[k] else float("nan") for k in ks}
