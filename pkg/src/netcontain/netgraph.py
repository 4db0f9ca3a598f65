"""Weighted directed contact networks: data model, file I/O, generators.

The adjacency convention throughout the package is destination-row:
``A[i, j]`` holds the weight of the directed edge ``j -> i``.  Edge lists
(files and the ``edges`` field) store edges in flow direction ``(src, dst,
weight)``; the convention is applied only when the matrix is built.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ContactNetwork",
    "adjacency",
    "is_strongly_connected",
    "support_is_strongly_connected",
    "load_edgelist",
    "save_edgelist",
    "reweight",
    "generate_cycle_plus_random",
    "generate_hub_spoke",
]


@dataclass(frozen=True)
class ContactNetwork:
    """Immutable weighted digraph with strictly positive edge weights.

    Parameters
    ----------
    n : int
        Node count, at least 2.  Single-node graphs are rejected everywhere
        because the dominant-eigenvalue machinery degenerates on them.
    edges : tuple of (src, dst, weight)
        Directed edges in flow direction.  No self-loops, no duplicate
        (src, dst) pairs, weights strictly positive and finite.
    node_labels : tuple of str, optional
    """

    n: int
    edges: tuple
    node_labels: tuple = field(default=None)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 2:
            raise ValueError(f"need at least 2 nodes, got n={self.n}")
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        seen = set()
        for src, dst, w in self.edges:
            if not (0 <= src < self.n and 0 <= dst < self.n):
                raise ValueError(f"edge ({src},{dst}) out of range for n={self.n}")
            if src == dst:
                raise ValueError(f"self-loop at node {src} not allowed")
            if not (np.isfinite(w) and w > 0):
                raise ValueError(f"edge ({src},{dst}) has nonpositive weight {w}")
            if (src, dst) in seen:
                raise ValueError(f"duplicate edge ({src},{dst})")
            seen.add((src, dst))
        if self.node_labels is not None:
            labels = tuple(self.node_labels)
            if len(labels) != self.n:
                raise ValueError("node_labels length must equal n")
            object.__setattr__(self, "node_labels", labels)

    @property
    def num_edges(self):
        return len(self.edges)

    def weights(self):
        """Edge weights as an array aligned with ``edges``."""
        return np.array([w for _, _, w in self.edges], dtype=float)

    def out_neighbors(self):
        """List of successor-index lists, position = source node."""
        out = [[] for _ in range(self.n)]
        for src, dst, _ in self.edges:
            out[src].append(dst)
        return out

    def in_neighbors(self):
        out = [[] for _ in range(self.n)]
        for src, dst, _ in self.edges:
            out[dst].append(src)
        return out


def adjacency(net):
    """Dense adjacency matrix, ``A[dst, src] = weight of (src -> dst)``."""
    A = np.zeros((net.n, net.n))
    for src, dst, w in net.edges:
        A[dst, src] = w
    return A


def _reaches_all(succ, start, n):
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        v = stack.pop()
        for u in succ[v]:
            if not seen[u]:
                seen[u] = True
                stack.append(u)
    return bool(seen.all())


def is_strongly_connected(net):
    """True iff every ordered node pair is joined by a directed path.

    Equivalent to irreducibility of the adjacency matrix.  Uses forward and
    reverse reachability from node 0.
    """
    return _reaches_all(net.out_neighbors(), 0, net.n) and _reaches_all(
        net.in_neighbors(), 0, net.n
    )


def support_is_strongly_connected(M):
    """Strong connectivity of the digraph of a nonnegative matrix's support.

    ``M[i, j] > 0`` is read as an edge ``j -> i``; diagonal entries are
    ignored (self-loops do not affect connectivity).
    """
    M = np.asarray(M)
    n = M.shape[0]
    if n == 1:
        return False
    succ = [list(np.nonzero(M[:, j])[0]) for j in range(n)]
    pred = [list(np.nonzero(M[i, :])[0]) for i in range(n)]
    return _reaches_all(succ, 0, n) and _reaches_all(pred, 0, n)


def load_edgelist(path):
    """Parse a ``src,dst,weight`` edge-list file into a ContactNetwork.

    UTF-8, one edge per line, ``#`` comment lines ignored, an optional
    header line ``src,dst,weight`` is skipped.  Node count is inferred as
    max index + 1.
    """
    edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if lineno == 1 and parts == ["src", "dst", "weight"]:
                continue
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'src,dst,weight', got {line!r}")
            try:
                src, dst, w = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed row {line!r}") from exc
            edges.append((src, dst, w))
    if not edges:
        raise ValueError(f"{path}: no edges found")
    n = max(max(s, d) for s, d, _ in edges) + 1
    return ContactNetwork(n=n, edges=tuple(edges))


def save_edgelist(net, path):
    """Write the inverse of :func:`load_edgelist`; full float precision."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("src,dst,weight\n")
        for src, dst, w in net.edges:
            fh.write(f"{src},{dst},{w!r}\n")


def reweight(net, weights):
    """Same topology with new edge weights (aligned with ``net.edges``)."""
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (net.num_edges,):
        raise ValueError("weights must align with net.edges")
    new_edges = tuple(
        (src, dst, float(w)) for (src, dst, _), w in zip(net.edges, weights)
    )
    return ContactNetwork(n=net.n, edges=new_edges, node_labels=net.node_labels)


def generate_cycle_plus_random(n, extra_edges, weight_range, seed):
    """Directed Hamiltonian cycle 0->1->...->n-1->0 plus random extra edges.

    The cycle guarantees strong connectivity; ``extra_edges`` distinct
    non-self-loop edges are added uniformly at random and all weights are
    drawn uniformly from ``weight_range``.  Deterministic for a fixed seed.
    """
    lo, hi = weight_range
    if n < 2:
        raise ValueError("need n >= 2")
    if not (0 < lo <= hi):
        raise ValueError(f"need 0 < lo <= hi, got ({lo}, {hi})")
    cycle = [(i, (i + 1) % n) for i in range(n)]
    cycle_set = set(cycle)
    pool = [
        (i, j)
        for i in range(n)
        for j in range(n)
        if i != j and (i, j) not in cycle_set
    ]
    if extra_edges > len(pool):
        raise ValueError(f"extra_edges={extra_edges} exceeds {len(pool)} available slots")
    rng = np.random.default_rng(seed)
    chosen = [cycle[k] for k in range(n)]
    if extra_edges:
        idx = rng.choice(len(pool), size=extra_edges, replace=False)
        chosen += [pool[k] for k in sorted(idx)]
    w = rng.uniform(lo, hi, size=len(chosen))
    edges = tuple((s, d, float(wk)) for (s, d), wk in zip(chosen, w))
    return ContactNetwork(n=n, edges=edges)


def generate_hub_spoke(n_hubs, n_leaves, hub_weight, leaf_weight, seed):
    """Complete bidirected hub core plus leaves bidirected to random hubs.

    An air-traffic-like surrogate: ``n_hubs`` nodes form a complete
    bidirected digraph with weight ``hub_weight``; each of the ``n_leaves``
    remaining nodes connects to one hub in both directions with weight
    ``leaf_weight``.  Strongly connected by construction.
    """
    if n_hubs < 2:
        raise ValueError("need n_hubs >= 2")
    if hub_weight <= 0 or (n_leaves > 0 and leaf_weight <= 0):
        raise ValueError("weights must be positive")
    rng = np.random.default_rng(seed)
    edges = []
    for i in range(n_hubs):
        for j in range(n_hubs):
            if i != j:
                edges.append((i, j, float(hub_weight)))
    for k in range(n_leaves):
        leaf = n_hubs + k
        hub = int(rng.integers(0, n_hubs))
        edges.append((leaf, hub, float(leaf_weight)))
        edges.append((hub, leaf, float(leaf_weight)))
    return ContactNetwork(n=n_hubs + n_leaves, edges=tuple(edges))
