"""Data model for linear SDP instances and the linear maps acting on them.

An instance is the triple (C, {A_k}, b) of a dense symmetric objective
matrix, m sparse symmetric constraint matrices and a right-hand side,
describing

    minimize    <C, X>
    subject to  <A_k, X> = b_k,  k = 1..m,   X symmetric PSD.

Constraint matrices are kept sparse (coordinate form, upper triangle);
the objective is dense.  All values are float64 and immutable after
construction.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

QUANT_DECIMALS = 12


class SdpxlabError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(SdpxlabError, ValueError):
    """Operands have incompatible or invalid shapes."""


class SdpaParseError(SdpxlabError, ValueError):
    """Malformed SDPA input; carries the offending 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UnsupportedFormatError(SdpxlabError, ValueError):
    """Input uses a feature outside the supported SDPA subset."""


class NumericalError(SdpxlabError, RuntimeError):
    """A numerical routine failed to converge or hit invalid values."""


class DivergenceError(NumericalError):
    """Solver iterates became non-finite or residuals blew up."""


class StabilizationError(SdpxlabError, RuntimeError):
    """Refinement failed to stabilize within the round budget (bug signal)."""


class SizeGuardError(SdpxlabError, ValueError):
    """Problem size exceeds a guard limit of a cubic/quadratic routine."""


def quantize_value(x: float) -> float:
    """``x`` rounded to 12 decimal digits with -0.0 normalized to +0.0.

    Coefficients that agree at this precision are treated as equal
    everywhere: color signatures, neighbor membership, sparsity cleanup,
    and the numeric inputs of the embedding networks (so coefficient noise
    below the quantum can never split cells the refinement merges).
    """
    v = round(float(x), QUANT_DECIMALS)
    if v == 0.0:
        v = 0.0
    return v


def quantize_key(x: float) -> int:
    """Canonical 64-bit pattern of the quantized value of ``x``."""
    return struct.unpack("<q", struct.pack("<d", quantize_value(x)))[0]


ZERO_KEY = quantize_key(0.0)


def symmetrize(m) -> np.ndarray:
    """Return (M + M^T)/2 as a float64 array; idempotent on symmetric input."""
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {arr.shape}")
    return (arr + arr.T) / 2.0


@dataclass(frozen=True, eq=False)
class SparseSymMatrix:
    """Symmetric matrix stored as sorted upper-triangle coordinates.

    The implied (j, i) entry equals the stored (i, j) entry.  Entries that
    quantize to zero are dropped at construction.
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    @classmethod
    def from_coords(cls, n: int, coords) -> "SparseSymMatrix":
        if n <= 0:
            raise ShapeError(f"side length must be positive, got {n}")
        seen: dict[tuple[int, int], float] = {}
        for i, j, v in coords:
            i, j = int(i), int(j)
            if not (0 <= i < n and 0 <= j < n):
                raise ShapeError(f"coordinate ({i},{j}) out of range for n={n}")
            if i > j:
                i, j = j, i
            if (i, j) in seen:
                raise ShapeError(f"duplicate coordinate ({i},{j})")
            seen[(i, j)] = float(v)
        kept = sorted((ij, v) for ij, v in seen.items() if quantize_key(v) != ZERO_KEY)
        rows = np.array([ij[0] for ij, _ in kept], dtype=np.int64)
        cols = np.array([ij[1] for ij, _ in kept], dtype=np.int64)
        vals = np.array([v for _, v in kept], dtype=np.float64)
        for a in (rows, cols, vals):
            a.flags.writeable = False
        return cls(n=n, rows=rows, cols=cols, vals=vals)

    @classmethod
    def from_dense(cls, m) -> "SparseSymMatrix":
        arr = symmetrize(m)
        n = arr.shape[0]
        coords = [(i, j, arr[i, j]) for i in range(n) for j in range(i, n)
                  if quantize_key(arr[i, j]) != ZERO_KEY]
        return cls.from_coords(n, coords)

    def coords(self):
        return zip(self.rows.tolist(), self.cols.tolist(), self.vals.tolist())

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        out[self.rows, self.cols] = self.vals
        out[self.cols, self.rows] = self.vals
        return out

    @property
    def nnz(self) -> int:
        """Nonzero count of the full matrix (off-diagonals counted twice)."""
        off = int(np.count_nonzero(self.rows != self.cols))
        return len(self.vals) + off

    def __eq__(self, other):
        if not isinstance(other, SparseSymMatrix):
            return NotImplemented
        return (self.n == other.n
                and np.array_equal(self.rows, other.rows)
                and np.array_equal(self.cols, other.cols)
                and np.array_equal(self.vals, other.vals))


@dataclass(eq=False)
class SdpInstance:
    """One linear SDP: dense symmetric C, sparse constraint tensor, rhs b.

    ``metadata`` carries provenance of generated instances (problem family,
    dropped additive constant and sign so objectives map back to the
    CO-scale value).
    """

    n: int
    C: np.ndarray
    A: tuple[SparseSymMatrix, ...]
    b: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.C = symmetrize(self.C)
        if self.C.shape[0] != self.n:
            raise ShapeError(f"C has side {self.C.shape[0]}, expected {self.n}")
        self.A = tuple(self.A)
        for k, ak in enumerate(self.A):
            if ak.n != self.n:
                raise ShapeError(f"A[{k}] has side {ak.n}, expected {self.n}")
        self.b = np.asarray(self.b, dtype=np.float64).reshape(-1)
        if len(self.b) != len(self.A):
            raise ShapeError(f"|b|={len(self.b)} but m={len(self.A)}")
        self.C.flags.writeable = False
        self.b.flags.writeable = False

    @property
    def m(self) -> int:
        return len(self.A)

    @cached_property
    def dense_A(self) -> np.ndarray:
        """Constraint tensor as a dense (m, n, n) stack."""
        out = np.zeros((self.m, self.n, self.n))
        for k, ak in enumerate(self.A):
            out[k] = ak.to_dense()
        out.flags.writeable = False
        return out

    @property
    def nnz(self) -> int:
        return sum(ak.nnz for ak in self.A)

    def __eq__(self, other):
        if not isinstance(other, SdpInstance):
            return NotImplemented
        return (self.n == other.n and self.m == other.m
                and np.array_equal(self.C, other.C)
                and all(a == b for a, b in zip(self.A, other.A))
                and np.array_equal(self.b, other.b)
                and self.metadata == other.metadata)


@dataclass
class SolutionTriple:
    """Primal/dual/slack triple (X, y, S); S may be absent."""

    X: np.ndarray
    y: np.ndarray
    S: np.ndarray | None = None


def _check_side(inst: SdpInstance, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.shape != (inst.n, inst.n):
        raise ShapeError(f"X has shape {X.shape}, expected {(inst.n, inst.n)}")
    return X


def apply_A(inst: SdpInstance, X) -> np.ndarray:
    """Evaluate the constraint map: component k is <A_k, X>."""
    X = _check_side(inst, X)
    return np.einsum("kij,ij->k", inst.dense_A, X)


def apply_A_adjoint(inst: SdpInstance, y) -> np.ndarray:
    """Evaluate the adjoint map: sum_k y_k A_k as a dense symmetric matrix."""
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if len(y) != inst.m:
        raise ShapeError(f"|y|={len(y)} but m={inst.m}")
    if inst.m == 0:
        return np.zeros((inst.n, inst.n))
    return np.einsum("k,kij->ij", y, inst.dense_A)


def objective(inst: SdpInstance, X) -> float:
    """Objective value <C, X>."""
    X = _check_side(inst, X)
    return float(np.einsum("ij,ij->", inst.C, X))


def relative_obj_gap(pred: float, opt: float) -> float:
    """Percentage gap |(pred - opt)/opt| * 100; rejects opt == 0."""
    if opt == 0:
        raise ValueError("relative gap undefined at opt == 0; use an absolute gap")
    return abs((pred - opt) / opt) * 100.0


def constraint_residual(inst: SdpInstance, X) -> float:
    """Mean absolute constraint violation (1/m) sum_k |<A_k, X> - b_k|."""
    if inst.m == 0:
        return 0.0
    return float(np.mean(np.abs(apply_A(inst, X) - inst.b)))


RANK_GUARD_M = 64


def constraint_rank(inst: SdpInstance, tol: float = 1e-9) -> int:
    """Rank of the constraint family via the Gram matrix of vectorized A_k.

    Diagnostic only; linear independence is otherwise assumed.  Guarded to
    m <= 64 since the Gram matrix is dense in m.
    """
    if inst.m > RANK_GUARD_M:
        raise SizeGuardError(f"rank diagnostic limited to m <= {RANK_GUARD_M}, got {inst.m}")
    if inst.m == 0:
        return 0
    v = inst.dense_A.reshape(inst.m, -1)
    gram = v @ v.T
    w = np.linalg.eigvalsh(gram)
    return int(np.count_nonzero(w > tol * max(1.0, float(w[-1]))))


def permute_instance(inst: SdpInstance, perm) -> SdpInstance:
    """Apply one permutation to rows and columns of C and every A_k.

    ``perm[i]`` is the new index of old index i; b is unchanged.
    """
    perm = list(perm)
    if sorted(perm) != list(range(inst.n)):
        raise ShapeError("not a permutation of range(n)")
    C = np.zeros_like(inst.C)
    for i in range(inst.n):
        for j in range(inst.n):
            C[perm[i], perm[j]] = inst.C[i, j]
    A = tuple(
        SparseSymMatrix.from_coords(
            inst.n, [(perm[i], perm[j], v) for i, j, v in ak.coords()])
        for ak in inst.A)
    return SdpInstance(n=inst.n, C=C, A=A, b=inst.b.copy(),
                       metadata=dict(inst.metadata))


def reorder_constraints(inst: SdpInstance, perm) -> SdpInstance:
    """Jointly reorder (A_k, b_k); ``perm[k]`` is the new position of k."""
    perm = list(perm)
    if sorted(perm) != list(range(inst.m)):
        raise ShapeError("not a permutation of range(m)")
    A: list = [None] * inst.m
    b = np.zeros(inst.m)
    for k in range(inst.m):
        A[perm[k]] = inst.A[k]
        b[perm[k]] = inst.b[k]
    return SdpInstance(n=inst.n, C=inst.C.copy(), A=tuple(A), b=b,
                       metadata=dict(inst.metadata))


def neighbor_lists(inst: SdpInstance):
    """Adjacency between variable cells and constraints.

    Returns ``(cell_nbrs, con_nbrs)`` where ``cell_nbrs[i*n+j]`` lists
    ``(k, A_kij)`` over constraints touching cell (i, j), and
    ``con_nbrs[k]`` lists ``(flat_cell, A_kij)`` in row-major cell order.
    Membership follows the quantized nonzero pattern (enforced at
    SparseSymMatrix construction).
    """
    n = inst.n
    cell_nbrs: list[list[tuple[int, float]]] = [[] for _ in range(n * n)]
    con_nbrs: list[list[tuple[int, float]]] = [[] for _ in range(inst.m)]
    for k, ak in enumerate(inst.A):
        for i, j, v in ak.coords():
            cell_nbrs[i * n + j].append((k, v))
            con_nbrs[k].append((i * n + j, v))
            if i != j:
                cell_nbrs[j * n + i].append((k, v))
                con_nbrs[k].append((j * n + i, v))
    for lst in con_nbrs:
        lst.sort()
    return cell_nbrs, con_nbrs
