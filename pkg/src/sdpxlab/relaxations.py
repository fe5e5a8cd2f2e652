"""Seeded builders mapping combinatorial/control inputs to SDP instances.

All maximization problems are negated into the canonical minimization
form; additive constants dropped along the way are recorded in
``instance.metadata`` as ``offset``/``scale`` so that
``co_value(inst, obj) = offset + scale * obj`` recovers the original
problem-scale value.  Same seed always yields a bit-identical instance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SdpInstance, SdpxlabError, ShapeError, SparseSymMatrix, symmetrize


@dataclass(frozen=True)
class Graph:
    """Simple undirected weighted graph; edges stored as (u, v, w), u < v."""

    n_nodes: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        seen = set()
        for u, v, w in self.edges:
            if u == v:
                raise ShapeError(f"self-loop at node {u}")
            if not (0 <= u < v < self.n_nodes):
                raise ShapeError(f"bad edge ({u},{v}) for {self.n_nodes} nodes")
            if (u, v) in seen:
                raise ShapeError(f"duplicate edge ({u},{v})")
            if not np.isfinite(w):
                raise ShapeError(f"non-finite weight on edge ({u},{v})")
            seen.add((u, v))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def non_edges(self):
        present = {(u, v) for u, v, _ in self.edges}
        return [(i, j) for i in range(self.n_nodes) for j in range(i + 1, self.n_nodes)
                if (i, j) not in present]


@dataclass(frozen=True)
class ClauseMatrix:
    """k x n matrix over {-1, 0, +1}; each clause row has 1 or 2 literals."""

    matrix: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.matrix, dtype=np.int64)
        if arr.ndim != 2:
            raise ShapeError("clause matrix must be 2-dimensional")
        if not np.all(np.isin(arr, (-1, 0, 1))):
            raise ShapeError("clause entries must be in {-1, 0, 1}")
        nnz = np.count_nonzero(arr, axis=1)
        if arr.shape[0] and not np.all((nnz >= 1) & (nnz <= 2)):
            raise ShapeError("each clause must have 1 or 2 literals")
        arr.flags.writeable = False
        object.__setattr__(self, "matrix", arr)

    @property
    def n_clauses(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_vars(self) -> int:
        return self.matrix.shape[1]


def er_graph(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi G(n, p) with unit weights."""
    if not 0 <= p <= 1:
        raise ValueError(f"edge probability must be in [0,1], got {p}")
    rng = np.random.default_rng(seed)
    edges = tuple((i, j, 1.0) for i in range(n) for j in range(i + 1, n)
                  if rng.random() < p)
    return Graph(n_nodes=n, edges=edges)


def regular_graph(n: int, d: int, seed: int, max_retries: int = 100) -> Graph:
    """d-regular graph by the pairing model, rejecting loops/multi-edges."""
    if n * d % 2 != 0:
        raise ValueError(f"n*d must be even, got n={n}, d={d}")
    if not 0 <= d < n:
        raise ValueError(f"degree must satisfy 0 <= d < n, got d={d}")
    for attempt in range(max_retries):
        rng = np.random.default_rng(seed + attempt)
        stubs = np.repeat(np.arange(n), d)
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        edges = set()
        ok = True
        for u, v in pairs:
            u, v = int(u), int(v)
            if u == v:
                ok = False
                break
            e = (min(u, v), max(u, v))
            if e in edges:
                ok = False
                break
            edges.add(e)
        if ok:
            return Graph(n_nodes=n, edges=tuple((u, v, 1.0) for u, v in sorted(edges)))
    raise SdpxlabError(f"pairing model failed after {max_retries} retries")


def _diag_constraints(indices, n) -> list[SparseSymMatrix]:
    return [SparseSymMatrix.from_coords(n, [(i, i, 1.0)]) for i in indices]


def maxcut_sdp(g: Graph) -> SdpInstance:
    """Cut relaxation: min sum_e (w_e/2) X_uv over PSD X with unit diagonal.

    The CO cut value is (sum w)/2 minus the reported objective.
    """
    n = g.n_nodes
    C = np.zeros((n, n))
    for u, v, w in g.edges:
        C[u, v] = C[v, u] = w / 4.0
    A = _diag_constraints(range(n), n)
    total_w = sum(w for _, _, w in g.edges)
    return SdpInstance(n=n, C=C, A=tuple(A), b=np.ones(n),
                       metadata={"problem": "maxcut", "offset": total_w / 2.0,
                                 "scale": -1.0})


def _theta_like(n: int, zero_pairs) -> tuple:
    C = -np.ones((n, n))
    A = [SparseSymMatrix.from_coords(n, [(i, i, 1.0) for i in range(n)])]
    b = [1.0]
    for i, j in zero_pairs:
        A.append(SparseSymMatrix.from_coords(n, [(i, j, 1.0)]))
        b.append(0.0)
    return C, tuple(A), np.array(b)


def maxclique_sdp(g: Graph) -> SdpInstance:
    """Clique-number relaxation: maximize <J, X>, trace one, X zero on
    non-edges.  The relaxation value is the negated objective."""
    C, A, b = _theta_like(g.n_nodes, g.non_edges())
    return SdpInstance(n=g.n_nodes, C=C, A=A, b=b,
                       metadata={"problem": "maxclique", "offset": 0.0, "scale": -1.0})


def mis_sdp(g: Graph) -> SdpInstance:
    """Independence-number relaxation: like the clique form but X vanishes
    on edges instead of non-edges."""
    C, A, b = _theta_like(g.n_nodes, [(u, v) for u, v, _ in g.edges])
    return SdpInstance(n=g.n_nodes, C=C, A=A, b=b,
                       metadata={"problem": "mis", "offset": 0.0, "scale": -1.0})


def vertexcover_sdp(g: Graph) -> SdpInstance:
    """Cover relaxation over an (n+1)-dimensional matrix indexed {0} + V.

    Objective sum_i (1 + X_0i)/2 becomes C_0i = 1/4 with the constant n/2
    in metadata; every diagonal is pinned to 1 and each edge adds the
    constraint X_ij + X_00 - X_0i - X_0j = 0.
    """
    n = g.n_nodes + 1
    C = np.zeros((n, n))
    C[0, 1:] = 0.25
    C[1:, 0] = 0.25
    A = _diag_constraints(range(n), n)
    b = [1.0] * n
    for u, v, _ in g.edges:
        i, j = u + 1, v + 1
        A.append(SparseSymMatrix.from_coords(
            n, [(0, 0, 1.0), (0, i, -0.5), (0, j, -0.5), (i, j, 0.5)]))
        b.append(0.0)
    return SdpInstance(n=n, C=C, A=tuple(A), b=np.array(b),
                       metadata={"problem": "vertexcover",
                                 "offset": g.n_nodes / 2.0, "scale": 1.0})


def max2sat_sdp(cm: ClauseMatrix) -> SdpInstance:
    """Homogenized satisfiability relaxation over an (n+1)-matrix.

    The quadratic objective (x^T A^T A x - 2 1^T A x)/8 is lifted with the
    diagonal of A^T A dropped (constant under X_ii = 1, tracked in
    metadata); all n+1 diagonal entries are constrained to 1.
    """
    Amat = cm.matrix.astype(np.float64)
    nv = cm.n_vars
    n = nv + 1
    G = Amat.T @ Amat
    col_sums = Amat.sum(axis=0)
    C = np.zeros((n, n))
    C[:nv, :nv] = G - np.diag(np.diag(G))
    C[:nv, nv] = -col_sums
    C[nv, :nv] = -col_sums
    C = symmetrize(C / 8.0)
    A = _diag_constraints(range(n), n)
    return SdpInstance(n=n, C=C, A=tuple(A), b=np.ones(n),
                       metadata={"problem": "max2sat",
                                 "offset": float(np.trace(G)) / 8.0, "scale": 1.0})


def random_clauses(n_vars: int, k: int, seed: int) -> ClauseMatrix:
    """k random 2-literal clauses over n_vars variables with random signs."""
    if n_vars < 2:
        raise ValueError("need at least 2 variables for 2-literal clauses")
    rng = np.random.default_rng(seed)
    rows = np.zeros((k, n_vars), dtype=np.int64)
    for c in range(k):
        i, j = rng.choice(n_vars, size=2, replace=False)
        rows[c, i] = 1 if rng.random() < 0.5 else -1
        rows[c, j] = 1 if rng.random() < 0.5 else -1
    return ClauseMatrix(matrix=rows)


def lmi_sdp(n: int, m: int, seed: int, stability_margin: float = 0.1,
            max_retries: int = 10) -> SdpInstance:
    """Stability-certificate instance built around a known feasible point.

    A random trace-one positive definite P is sampled, a system matrix is
    recovered from the vectorized equation sym(A_sys^T P) = -margin/2 * I
    (dense least-squares solve), and m sparse direction vectors turn the
    matrix inequality into scalar constraints satisfied exactly by P.  A
    trace constraint is appended last; the objective is random symmetric.
    """
    for attempt in range(max_retries):
        rng = np.random.default_rng(seed + attempt)
        B = rng.standard_normal((n, n))
        P = B @ B.T + 0.1 * np.eye(n)
        P /= np.trace(P)

        op = np.zeros((n * n, n * n))
        for col in range(n * n):
            E = np.zeros((n, n))
            E.flat[col] = 1.0
            op[:, col] = (E.T @ P + P @ E).reshape(-1)
        target = (-stability_margin * np.eye(n)).reshape(-1)
        sol, _, _, _ = np.linalg.lstsq(op, target, rcond=None)
        A_sys = sol.reshape(n, n)
        if np.linalg.norm(A_sys.T @ P + P @ A_sys
                          + stability_margin * np.eye(n)) > 1e-8:
            continue  # inconsistent solve; resample

        A = []
        b = []
        for _ in range(m):
            v = np.zeros(n)
            pos = rng.choice(n, size=min(2, n), replace=False)
            v[pos] = np.where(rng.random(len(pos)) < 0.5, 1.0, -1.0)
            ak_dense = symmetrize(A_sys @ np.outer(v, v))
            ak = SparseSymMatrix.from_dense(ak_dense)
            A.append(ak)
            b.append(float(np.einsum("ij,ij->", ak.to_dense(), P)))
        A.append(SparseSymMatrix.from_coords(n, [(i, i, 1.0) for i in range(n)]))
        b.append(1.0)
        C = symmetrize(rng.standard_normal((n, n)))
        return SdpInstance(n=n, C=C, A=tuple(A), b=np.array(b),
                           metadata={"problem": "lmi", "offset": 0.0, "scale": 1.0})
    raise SdpxlabError(f"system recovery failed after {max_retries} retries")


def lp_to_sdp(c, A, b) -> SdpInstance:
    """Embed an equality-form LP: diagonal data plus off-diagonal zero pins."""
    c = np.asarray(c, dtype=np.float64).reshape(-1)
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if A.ndim != 2 or A.shape != (len(b), len(c)):
        raise ShapeError(f"LP data shapes inconsistent: A{A.shape}, c{c.shape}, b{b.shape}")
    n = len(c)
    mats = [SparseSymMatrix.from_coords(n, [(i, i, row[i]) for i in range(n)])
            for row in A]
    rhs = list(b)
    for i in range(n):
        for j in range(i + 1, n):
            mats.append(SparseSymMatrix.from_coords(n, [(i, j, 1.0)]))
            rhs.append(0.0)
    return SdpInstance(n=n, C=np.diag(c), A=tuple(mats), b=np.array(rhs),
                       metadata={"problem": "lp", "offset": 0.0, "scale": 1.0})


def co_value(inst: SdpInstance, obj: float) -> float:
    """Map an SDP objective back to the original problem scale."""
    meta = inst.metadata
    return meta["offset"] + meta["scale"] * obj
