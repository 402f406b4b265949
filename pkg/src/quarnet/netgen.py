"""Synthetic random-graph generators and degree-sequence sampling.

Families: Barabási–Albert preferential attachment (ba), Holme–Kim powerlaw
cluster (plc), Watts–Strogatz small world (ws), Vázquez random-walk growth
(rw), nearest-neighbor growth with random shortcut pairs (nn), and the
configuration model over an explicit degree sequence.
"""

from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .rng import np_rng, py_rng

__all__ = [
    "ParamError",
    "DegreeSequence",
    "gen_ba",
    "gen_plc",
    "gen_ws",
    "gen_rw",
    "gen_nn",
    "gen_config_model",
    "sample_degree_sequence",
    "generate",
]


class ParamError(ValueError):
    pass


@dataclass
class DegreeSequence:
    """Node counts per degree: counts[k] nodes have k stubs."""
    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if (self.counts < 0).any():
            raise ParamError("degree counts must be non-negative")

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def stub_sum(self) -> int:
        return int((np.arange(len(self.counts)) * self.counts).sum())


def _check_n_m(n, m):
    if m < 1 or n <= m:
        raise ParamError(f"need n > m >= 1, got n={n}, m={m}")


def gen_ba(n: int, m: int, seed: int) -> Graph:
    """Barabási–Albert graph: each new node attaches m edges preferentially.

    Seeded from a star on m+1 nodes, so the final graph is connected with
    exactly m*(n-m) edges.
    """
    _check_n_m(n, m)
    rng = py_rng(seed, 0xBA)
    edges, repeated = _ba_core(n, m, rng)
    return Graph(n, edges)


def _ba_core(n, m, rng):
    edges = [(0, j) for j in range(1, m + 1)]
    repeated = [0] * m + list(range(1, m + 1))
    rand = rng.random
    for v in range(m + 1, n):
        targets = set()
        while len(targets) < m:
            targets.add(repeated[int(rand() * len(repeated))])
        for t in targets:
            edges.append((v, t))
        repeated.extend(targets)
        repeated.extend([v] * m)
    return edges, repeated


def gen_plc(n: int, m: int, p: float, seed: int) -> Graph:
    """Holme–Kim powerlaw cluster graph: preferential attachment where each
    subsequent edge closes a triangle with probability p."""
    _check_n_m(n, m)
    if not 0.0 <= p <= 1.0:
        raise ParamError("p must be in [0, 1]")
    rng = py_rng(seed, 0x61C)
    rand = rng.random
    edges = [(0, j) for j in range(1, m + 1)]
    adj = [set() for _ in range(n)]
    for j in range(1, m + 1):
        adj[0].add(j)
        adj[j].add(0)
    repeated = [0] * m + list(range(1, m + 1))
    for v in range(m + 1, n):
        targets = set()
        # first edge is always preferential
        t = repeated[int(rand() * len(repeated))]
        while t in targets:
            t = repeated[int(rand() * len(repeated))]
        targets.add(t)
        last_pa = t
        while len(targets) < m:
            if rand() < p:
                cands = [w for w in adj[last_pa] if w != v and w not in targets]
                if cands:
                    targets.add(cands[int(rand() * len(cands))])
                    continue
            t = repeated[int(rand() * len(repeated))]
            while t in targets:
                t = repeated[int(rand() * len(repeated))]
            targets.add(t)
            last_pa = t
        for t in targets:
            edges.append((v, t))
            adj[v].add(t)
            adj[t].add(v)
        repeated.extend(targets)
        repeated.extend([v] * m)
    return Graph(n, edges)


def gen_ws(n: int, k: int, p: float, seed: int) -> Graph:
    """Watts–Strogatz graph: ring lattice with k neighbors, each lattice edge
    rewired with probability p."""
    if k % 2 != 0 or k >= n or k < 2:
        raise ParamError("need k even and 2 <= k < n")
    if not 0.0 <= p <= 1.0:
        raise ParamError("p must be in [0, 1]")
    rng = py_rng(seed, 0x35)
    rand = rng.random
    adj = [set() for _ in range(n)]
    for j in range(1, k // 2 + 1):
        for i in range(n):
            w = (i + j) % n
            adj[i].add(w)
            adj[w].add(i)
    for j in range(1, k // 2 + 1):
        for i in range(n):
            w = (i + j) % n
            if rand() < p and w in adj[i]:
                # draw a replacement endpoint avoiding self-loops and duplicates
                for _ in range(n):
                    c = int(rand() * n)
                    if c != i and c not in adj[i]:
                        adj[i].discard(w)
                        adj[w].discard(i)
                        adj[i].add(c)
                        adj[c].add(i)
                        break
    edges = [(i, w) for i in range(n) for w in adj[i] if i < w]
    return Graph(n, edges)


def gen_rw(n: int, q_e: float, q_v: float, seed: int) -> Graph:
    """Random-walk growth graph: each new node anchors to a random extant node
    and walks from it, continuing with probability q_e and linking to each
    visited node with probability q_v."""
    if not (0.0 <= q_e <= 1.0 and 0.0 <= q_v <= 1.0):
        raise ParamError("q_e and q_v must be in [0, 1]")
    if n < 2:
        raise ParamError("need n >= 2")
    rng = py_rng(seed, 0x124)
    rand = rng.random
    adj = [set() for _ in range(n)]
    nbr_list = [[] for _ in range(n)]
    edges = [(0, 1)]
    adj[0].add(1)
    adj[1].add(0)
    nbr_list[0].append(1)
    nbr_list[1].append(0)
    for v in range(2, n):
        anchor = int(rand() * v)
        adj[v].add(anchor)
        adj[anchor].add(v)
        nbr_list[v].append(anchor)
        nbr_list[anchor].append(v)
        edges.append((v, anchor))
        cur = anchor
        while rand() < q_e:
            nbrs = nbr_list[cur]
            # the walk explores the extant graph: never step into v itself,
            # which sits at the tail of a neighbor list if just linked
            lim = len(nbrs) - (1 if nbrs and nbrs[-1] == v else 0)
            if lim == 0:
                break
            cur = nbrs[int(rand() * lim)]
            if cur not in adj[v] and rand() < q_v:
                adj[v].add(cur)
                adj[cur].add(v)
                nbr_list[v].append(cur)
                nbr_list[cur].append(v)
                edges.append((v, cur))
    return Graph(n, edges)


def gen_nn(n: int, u: float, k: int, seed: int) -> Graph:
    """Nearest-neighbor growth graph.

    Each step either closes a random 2-hop pair (probability u: pick a node,
    walk two hops, connect the endpoints) or adds a new node attached to one
    random extant node, also connecting k random node pairs per addition.
    """
    if not 0.0 <= u <= 1.0:
        raise ParamError("u must be in [0, 1]")
    if k < 0:
        raise ParamError("k must be >= 0")
    if n < 2:
        raise ParamError("need n >= 2")
    rng = py_rng(seed, 0x22)
    rand = rng.random
    adj = [set() for _ in range(n)]
    nbr = [[] for _ in range(n)]
    edges = []

    def add(x, y):
        adj[x].add(y)
        adj[y].add(x)
        nbr[x].append(y)
        nbr[y].append(x)
        edges.append((x, y))

    count = 1
    while count < n:
        if count > 1 and rand() < u:
            x = int(rand() * count)
            if not nbr[x]:
                continue
            y = nbr[x][int(rand() * len(nbr[x]))]
            z = nbr[y][int(rand() * len(nbr[y]))]
            if z != x and z not in adj[x]:
                add(x, z)
            continue
        w = count
        anchor = int(rand() * count)
        add(w, anchor)
        count += 1
        for _ in range(k):
            x = int(rand() * count)
            y = int(rand() * count)
            if x != y and y not in adj[x]:
                add(x, y)
    return Graph(n, edges)


def gen_config_model(seq: DegreeSequence, seed: int) -> Graph:
    """Configuration-model graph by uniform stub matching.

    Pairs that would create a self-loop or duplicate edge are re-drawn up to a
    retry cap, after which the offending stubs are dropped; the drop count is
    recorded on the returned graph.
    """
    if seq.stub_sum % 2 != 0:
        raise ParamError("sum of stubs must be even")
    n = seq.n
    rng = np_rng(seed, 0xCF6)
    degrees = np.repeat(np.arange(len(seq.counts)), seq.counts)
    stubs = np.repeat(np.arange(n, dtype=np.int64), degrees)
    stubs = rng.permutation(stubs)
    pairs = stubs.reshape(-1, 2)
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    ok = lo != hi
    rows = np.column_stack([lo[ok], hi[ok]])
    uniq, first_idx = np.unique(rows, axis=0, return_index=True) if rows.size else (rows, None)
    edge_set = set(map(tuple, uniq.tolist()))
    leftover = list(pairs[~ok].ravel())
    if rows.size:
        dup_mask = np.ones(len(rows), dtype=bool)
        dup_mask[first_idx] = False
        leftover.extend(rows[dup_mask].ravel().tolist())
    dropped = 0
    attempts = 0
    while len(leftover) >= 2 and attempts < n:
        attempts += 1
        perm = rng.permutation(len(leftover))
        leftover = [leftover[i] for i in perm]
        nxt = []
        for i in range(0, len(leftover) - 1, 2):
            a, b = leftover[i], leftover[i + 1]
            e = (a, b) if a < b else (b, a)
            if a != b and e not in edge_set:
                edge_set.add(e)
            else:
                nxt.append(a)
                nxt.append(b)
        if len(leftover) % 2 == 1:
            nxt.append(leftover[-1])
        if len(nxt) == len(leftover):  # no progress is possible for a lone conflict set
            attempts += n
        leftover = nxt
    dropped = len(leftover)
    g = Graph(n, np.array(sorted(edge_set), dtype=np.int64).reshape(-1, 2))
    g.dropped_stubs = dropped
    return g


def sample_degree_sequence(dist, n: int, seed: int) -> DegreeSequence:
    """Draw n i.i.d. degrees from a degree distribution.

    If the stub sum comes out odd, one extra stub is added to a uniformly
    random node.
    """
    if n < 1:
        raise ParamError("need n >= 1")
    pk = dist.pk_table()
    total = float(pk.sum())
    if abs(total - 1.0) > 1e-8:
        raise ParamError(f"distribution not normalized (mass {total})")
    rng = np_rng(seed, 0x5D5)
    draws = rng.choice(len(pk), size=n, p=pk / total)
    counts = np.bincount(draws, minlength=len(pk)).astype(np.int64)
    seq = DegreeSequence(counts)
    if seq.stub_sum % 2 == 1:
        j = int(draws[rng.integers(n)])
        counts = np.concatenate([counts, [0]]) if j + 1 >= len(counts) else counts.copy()
        counts[j] -= 1
        counts[j + 1] += 1
        seq = DegreeSequence(counts)
    return seq


def generate(family: str, seed: int, **params) -> Graph:
    """Dispatch a generator by family name (used by the CLI)."""
    family = family.lower()
    if family == "ba":
        return gen_ba(int(params["n"]), int(params["m"]), seed)
    if family == "plc":
        return gen_plc(int(params["n"]), int(params["m"]), float(params["p"]), seed)
    if family == "ws":
        return gen_ws(int(params["n"]), int(params["k"]), float(params["p"]), seed)
    if family == "rw":
        return gen_rw(int(params["n"]), float(params["q_e"]), float(params["q_v"]), seed)
    if family == "nn":
        return gen_nn(int(params["n"]), float(params["u"]), int(params["k"]), seed)
    raise ParamError(f"unknown graph family: {family!r}")
