"""Undirected simple graphs: construction, edge-list I/O, and summary statistics."""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .rng import np_rng

__all__ = [
    "Graph",
    "GraphStats",
    "EdgeListReport",
    "load_edge_list",
    "write_edge_list",
    "induced_susceptible_subgraph",
    "immunize",
    "graph_stats",
]

# node states shared with the simulator
S, I, R = 0, 1, 2


class GraphError(ValueError):
    pass


class Graph:
    """Immutable undirected simple graph on node ids 0..n-1.

    Stored as a canonical sorted edge array plus a CSR adjacency for fast
    traversal.  No self-loops, no duplicate edges.
    """

    __slots__ = ("n", "edge_array", "indptr", "indices", "_adj_tuples", "dropped_stubs")

    def __init__(self, n: int, edges):
        if n < 0:
            raise GraphError("node count must be non-negative")
        self.n = int(n)
        ea = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                        dtype=np.int64).reshape(-1, 2)
        if ea.size:
            if ea.min() < 0 or ea.max() >= n:
                raise GraphError("edge endpoint out of range")
            if (ea[:, 0] == ea[:, 1]).any():
                raise GraphError("self-loop in edge set")
            lo = np.minimum(ea[:, 0], ea[:, 1])
            hi = np.maximum(ea[:, 0], ea[:, 1])
            ea = np.unique(np.column_stack([lo, hi]), axis=0)
        self.edge_array = ea
        # symmetric CSR, neighbor lists sorted
        if ea.size:
            src = np.concatenate([ea[:, 0], ea[:, 1]])
            dst = np.concatenate([ea[:, 1], ea[:, 0]])
            order = np.lexsort((dst, src))
            indices = dst[order].astype(np.int32)
            deg = np.bincount(src, minlength=n)
        else:
            indices = np.empty(0, dtype=np.int32)
            deg = np.zeros(n, dtype=np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(deg, out=indptr[1:])
        self.indptr = indptr
        self.indices = indices
        self._adj_tuples = None
        self.dropped_stubs = 0

    @property
    def edge_count(self) -> int:
        return int(self.edge_array.shape[0])

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def adjacency_tuples(self):
        """Per-node neighbor tuples (cached); fast to iterate in Python loops."""
        if self._adj_tuples is None:
            idx = self.indices.tolist()
            ptr = self.indptr.tolist()
            self._adj_tuples = [tuple(idx[ptr[u]:ptr[u + 1]]) for u in range(self.n)]
        return self._adj_tuples

    def to_sparse(self) -> sp.csr_matrix:
        data = np.ones(len(self.indices), dtype=np.int32)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.n == other.n
            and self.edge_array.shape == other.edge_array.shape
            and bool((self.edge_array == other.edge_array).all())
        )

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edge_count})"


@dataclass
class EdgeListReport:
    """What was cleaned up while reading an edge-list file."""
    self_loops_dropped: int = 0
    duplicates_dropped: int = 0
    relabeled: bool = False


@dataclass
class GraphStats:
    n: int
    edge_count: int
    avg_degree: float
    global_clustering: float
    avg_shortest_path: float
    powerlaw_exponent: float
    plaw_fit_range: tuple = field(default=(0, 0))

    CSV_HEADER = "n,edges,avg_degree,clustering,avg_path,plaw_exp"

    def csv_row(self) -> str:
        return (
            f"{self.n},{self.edge_count},{self.avg_degree:.10g},"
            f"{self.global_clustering:.10g},{self.avg_shortest_path:.10g},"
            f"{self.powerlaw_exponent:.10g}"
        )


class EdgeListParseError(ValueError):
    def __init__(self, path, lineno, line):
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: malformed edge line: {line!r}")


def load_edge_list(path) -> tuple[Graph, EdgeListReport]:
    """Read whitespace- or comma-separated node-id pairs; '#' lines are comments.

    Ids are remapped to contiguous [0, n); self-loops and duplicate edges are
    dropped and counted in the report.
    """
    raw_edges = []
    ids = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.replace(",", " ").split()
            if len(parts) != 2:
                raise EdgeListParseError(path, lineno, line.rstrip("\n"))
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListParseError(path, lineno, line.rstrip("\n")) from None
            ids.add(a)
            ids.add(b)
            raw_edges.append((a, b))
    order = {orig: idx for idx, orig in enumerate(sorted(ids))}
    report = EdgeListReport(relabeled=any(k != v for k, v in order.items()))
    seen = set()
    edges = []
    for a, b in raw_edges:
        if a == b:
            report.self_loops_dropped += 1
            continue
        u, v = order[a], order[b]
        if u > v:
            u, v = v, u
        if (u, v) in seen:
            report.duplicates_dropped += 1
            continue
        seen.add((u, v))
        edges.append((u, v))
    return Graph(len(order), edges), report


def write_edge_list(g: Graph, path) -> None:
    """Write the canonical sorted edge list, one 'u v' pair per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v in g.edge_array:
            fh.write(f"{u} {v}\n")


def induced_susceptible_subgraph(g: Graph, states) -> Graph:
    """Subgraph on susceptible nodes, ids remapped to [0, n_sub)."""
    states = np.asarray(states)
    if states.shape[0] != g.n:
        raise GraphError("states length must equal node count")
    keep = states == S
    new_id = -np.ones(g.n, dtype=np.int64)
    new_id[keep] = np.arange(int(keep.sum()))
    ea = g.edge_array
    if ea.size:
        mask = keep[ea[:, 0]] & keep[ea[:, 1]]
        sub_edges = np.column_stack([new_id[ea[mask, 0]], new_id[ea[mask, 1]]])
    else:
        sub_edges = np.empty((0, 2), dtype=np.int64)
    return Graph(int(keep.sum()), sub_edges)


def immunize(g: Graph, fraction: float, strategy: str, seed: int) -> np.ndarray:
    """Select ceil(fraction*n) nodes to immunize.

    strategy 'top_degree' sorts by (degree desc, id asc); 'random' samples
    uniformly without replacement.
    """
    if not 0.0 <= fraction <= 1.0:
        raise GraphError("fraction must be in [0, 1]")
    count = int(np.ceil(fraction * g.n))
    if count == 0:
        return np.empty(0, dtype=np.int64)
    if strategy == "top_degree":
        deg = g.degrees()
        order = np.lexsort((np.arange(g.n), -deg))
        return np.sort(order[:count])
    if strategy == "random":
        rng = np_rng(seed, 0x1A)
        return np.sort(rng.choice(g.n, size=count, replace=False))
    raise GraphError(f"unknown immunization strategy: {strategy!r}")


def _largest_component(g: Graph) -> np.ndarray:
    n_comp, labels = csgraph.connected_components(g.to_sparse(), directed=False)
    sizes = np.bincount(labels, minlength=n_comp)
    return np.flatnonzero(labels == int(sizes.argmax()))


def _clustering_mean_local(g: Graph) -> float:
    if g.n == 0:
        return 0.0
    a = g.to_sparse()
    deg = g.degrees().astype(np.float64)
    tri = np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0
    denom = deg * (deg - 1) / 2.0
    local = np.zeros(g.n)
    mask = denom > 0
    local[mask] = tri[mask] / denom[mask]
    return float(local.mean())


def _avg_path_sampled(g: Graph, pairs: int, rng) -> float:
    comp = _largest_component(g)
    if comp.size < 2:
        return 0.0
    a = g.to_sparse()
    n_all_pairs = comp.size * (comp.size - 1) // 2
    if n_all_pairs <= pairs:
        dist = csgraph.shortest_path(a, method="D", indices=comp, unweighted=True)
        dist = dist[:, comp]
        iu = np.triu_indices(comp.size, k=1)
        return float(dist[iu].mean())
    n_src = int(min(comp.size, max(2, round(np.sqrt(pairs)))))
    per_src = max(1, pairs // n_src)
    sources = rng.choice(comp, size=n_src, replace=False)
    dist = csgraph.shortest_path(a, method="D", indices=sources, unweighted=True)
    total, count = 0.0, 0
    for row_i in range(n_src):
        targets = rng.choice(comp, size=per_src, replace=True)
        d = dist[row_i, targets]
        ok = (targets != sources[row_i]) & np.isfinite(d)
        total += float(d[ok].sum())
        count += int(ok.sum())
    return total / count if count else 0.0


def _powerlaw_exponent(degrees: np.ndarray) -> tuple[float, tuple]:
    """Least-squares slope of log CCDF vs log degree for k >= max(2, mode)."""
    degrees = degrees[degrees > 0]
    if degrees.size == 0:
        return float("nan"), (0, 0)
    counts = np.bincount(degrees)
    mode = int(counts.argmax())
    k_min = max(2, mode)
    ks = np.flatnonzero(counts)
    ks = ks[ks >= k_min]
    if ks.size < 2:
        return float("nan"), (k_min, k_min)
    sorted_deg = np.sort(degrees)
    ccdf = 1.0 - np.searchsorted(sorted_deg, ks, side="left") / degrees.size
    slope, _ = np.polyfit(np.log(ks), np.log(ccdf), 1)
    return float(1.0 - slope), (int(ks[0]), int(ks[-1]))


def graph_stats(g: Graph, path_sample_pairs: int = 100_000, seed: int = 0) -> GraphStats:
    """Summary statistics: mean-local clustering, sampled shortest paths in the
    largest component, and a log-log CCDF powerlaw-exponent fit."""
    if g.n == 0:
        raise GraphError("empty graph")
    if path_sample_pairs < 1:
        raise GraphError("path_sample_pairs must be >= 1")
    rng = np_rng(seed, 0x57A7)
    deg = g.degrees()
    exponent, fit_range = _powerlaw_exponent(deg)
    return GraphStats(
        n=g.n,
        edge_count=g.edge_count,
        avg_degree=float(2.0 * g.edge_count / g.n),
        global_clustering=_clustering_mean_local(g),
        avg_shortest_path=_avg_path_sampled(g, path_sample_pairs, rng),
        powerlaw_exponent=exponent,
        plaw_fit_range=fit_range,
    )
