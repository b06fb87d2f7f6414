"""Pressure of locally constant potentials on graph shifts.

For a potential constant on edges (or on k-paths) the pressure is the log
of the Perron root of the weighted transition matrix.  Exponents are the
zeros of ``s -> P(-s w)``, bracketed by doubling and refined with Brent's method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.optimize import brentq
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .automaton import LabeledGraph, recurrent_subgraph

PERRON_RTOL = 1e-13
RESIDUAL_TOL = 1e-10
DEFAULT_NODE_BUDGET = 200_000
DENSE_LIMIT = 400
WARM_START_LIMIT = 32


class ReducibleMatrix(ValueError):
    pass


class NonPositiveWeight(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class PressureResult:
    value: float          # log Perron root, including the factored-out weight shift
    perron_root: float    # Perron root of the rescaled matrix
    log_shift: float      # value = log(perron_root) + log_shift
    iterations: int
    residual: float

    def to_dict(self) -> dict:
        return {"pressure": self.value, "perron_root": self.perron_root, "log_shift": self.log_shift,
                "iterations": self.iterations, "residual": self.residual}


def _as_matrix(m):
    if sparse.issparse(m):
        return sparse.csr_matrix(m, dtype=float)
    return np.asarray(m, dtype=float)


def _period(m) -> int:
    """Period of an irreducible nonnegative matrix (gcd of level differences)."""
    g = sparse.csr_matrix(m)
    order, pred = breadth_first_order(g, 0, directed=True, return_predecessors=True)
    level = np.full(g.shape[0], -1)
    level[0] = 0
    for v in order[1:]:
        level[v] = level[pred[v]] + 1
    coo = g.tocoo()
    diffs = np.abs(level[coo.row] + 1 - level[coo.col])
    return reduce(math.gcd, (int(d) for d in diffs), 0) or 1


def check_irreducible(m) -> None:
    n = m.shape[0]
    if n == 0:
        raise ReducibleMatrix("empty matrix")
    pattern = sparse.csr_matrix(m)
    if pattern.nnz == 0:
        raise ReducibleMatrix("zero matrix")
    ncomp, _ = connected_components(pattern, directed=True, connection="strong")
    if ncomp != 1:
        raise ReducibleMatrix(f"matrix has {ncomp} strongly connected components")


def perron_root(m, max_iter: int = 200_000, rtol: float = PERRON_RTOL) -> tuple[float, np.ndarray, int]:
    """Perron root and positive eigenvector of an irreducible nonnegative matrix.

    Power iteration stopped by the Collatz-Wielandt bracket
    ``min (Mu)_i/u_i <= r <= max (Mu)_i/u_i``.  Periodic matrices are
    shifted by ``delta * I`` first.  Small dense matrices get a warm start
    from a dense eigensolver.  Returns ``(root, eigenvector, iterations)``.
    """
    m = _as_matrix(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("Perron root needs a square matrix")
    data = m.data if sparse.issparse(m) else m
    if np.any(data < 0) or not np.all(np.isfinite(data)):
        raise ValueError("matrix must be finite and nonnegative")
    check_irreducible(m)
    n = m.shape[0]
    delta = 0.0
    if _period(m) > 1:
        delta = 1e-3 * float(data.max())
        m = m + delta * (sparse.identity(n, format="csr") if sparse.issparse(m) else np.eye(n))

    u = np.ones(n)
    if not sparse.issparse(m) and n <= WARM_START_LIMIT:
        w, v = np.linalg.eig(m)
        k = int(np.argmax(w.real))
        cand = np.abs(v[:, k].real)
        if np.all(cand > 0):
            u = cand
    u = u / u.max()
    lo, hi = 0.0, math.inf
    it = 0
    for it in range(1, max_iter + 1):
        mu = m @ u
        ratios = mu / u
        lo, hi = float(ratios.min()), float(ratios.max())
        u = mu / mu.max()
        if hi - lo <= rtol * hi:
            break
    root = 0.5 * (lo + hi)
    u = m @ u
    u = u / u.max()
    if np.any(u <= 0):
        raise ReducibleMatrix("power iteration produced a non-positive vector")
    return root - delta, u, it


def perron_residual(m, root: float, u: np.ndarray) -> float:
    m = _as_matrix(m)
    return float(np.max(np.abs(m @ u - root * u)) / np.max(np.abs(u)))


def pressure_of_matrix(log_weights, pattern) -> PressureResult:
    """``log`` Perron root of ``pattern * exp(log_weights)`` (dense), overflow-safe.

    Entries of ``pattern`` are multiplicities; ``log_weights`` is read only
    where ``pattern`` is positive.
    """
    pattern = np.asarray(pattern, dtype=float)
    lw = np.asarray(log_weights, dtype=float)
    mask = pattern > 0
    shift = float(lw[mask].max()) if mask.any() else 0.0
    mat = np.where(mask, pattern * np.exp(np.where(mask, lw, 0.0) - shift), 0.0)
    return _pressure_from(mat, shift)


def _pressure_from(mat, shift: float) -> PressureResult:
    root, u, it = perron_root(mat)
    return PressureResult(math.log(root) + shift, root, shift, it, perron_residual(mat, root, u))


def _edge_weight_fn(w) -> Callable:
    if callable(w):
        return w
    if isinstance(w, Mapping):
        return lambda e: w[e.id]
    c = float(w)
    return lambda e: c


def _vertex_system(g: LabeledGraph, w) -> tuple[list, np.ndarray, np.ndarray]:
    """Index pairs and log-weights per recurrent edge, merged into vertex matrices."""
    h = recurrent_subgraph(g)
    if not h.edges:
        raise ReducibleMatrix("the coding has no recurrent part")
    idx = {v: i for i, v in enumerate(h.vertices)}
    fn = _edge_weight_fn(w)
    src = np.array([idx[e.source] for e in h.edges])
    tgt = np.array([idx[e.target] for e in h.edges])
    vals = np.array([float(fn(e)) for e in h.edges])
    return [len(h.vertices), src, tgt], vals, np.array([e.id for e in h.edges])


def _merged_pressure(nv: int, src, tgt, log_w) -> PressureResult:
    # sum of exp over parallel edges, done with a shift for safety
    shift = float(np.max(log_w))
    mat = np.zeros((nv, nv))
    np.add.at(mat, (src, tgt), np.exp(log_w - shift))
    return _pressure_from(mat, shift)


def pressure_edge_weighted(g: LabeledGraph, w) -> PressureResult:
    """Pressure of an edge potential on the recurrent part of ``g``.

    ``w`` is a mapping from edge id to weight, a callable on edges, or a
    constant.  Parallel edges are merged into one vertex-matrix entry
    ``sum exp(w(e))``, which has the same Perron root as the edge shift.
    """
    (nv, src, tgt), vals, _ = _vertex_system(g, w)
    if not np.all(np.isfinite(vals)):
        raise ValueError("edge weights must be finite")
    return _merged_pressure(nv, src, tgt, vals)


def _bisect_decreasing(f: Callable[[float], float], what: str, tol: float = 1e-12) -> float:
    """Zero of a strictly decreasing function; 0 when ``f(0) <= 0``.

    The root is bracketed by doubling and then refined with Brent's method.
    """
    f0 = f(0.0)
    if f0 <= 0:
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(60):
        if f(hi) < 0:
            break
        lo, hi = hi, 2 * hi
    else:
        raise ArithmeticError(f"{what}: could not bracket the root")
    return float(brentq(f, lo, hi, xtol=tol * max(1.0, lo), rtol=1e-15))


def check_positive(vals, labels=None) -> None:
    vals = np.asarray(vals, dtype=float)
    bad = np.flatnonzero(~(vals > 0))
    if bad.size:
        i = int(bad[0])
        who = f" ({labels[i]})" if labels is not None else ""
        raise NonPositiveWeight(f"weight {vals[i]!r}{who} is not positive")


def solve_exponent(g: LabeledGraph, w, tol: float = 1e-12) -> float:
    """Unique ``s >= 0`` with ``P(-s w) = 0`` for a positive edge potential."""
    (nv, src, tgt), vals, ids = _vertex_system(g, w)
    check_positive(vals, [f"edge {i}" for i in ids])
    return _bisect_decreasing(lambda s: _merged_pressure(nv, src, tgt, -s * vals).value,
                              "solve_exponent", tol)


def solve_matrix_exponent(pattern: np.ndarray, weights: np.ndarray, tol: float = 1e-12) -> float:
    """Unique ``s`` with Perron root of ``pattern * exp(-s weights)`` equal to 1."""
    pattern = np.asarray(pattern, dtype=float)
    weights = np.asarray(weights, dtype=float)
    check_positive(weights[pattern > 0])
    return _bisect_decreasing(lambda s: pressure_of_matrix(-s * weights, pattern).value,
                              "solve_matrix_exponent", tol)


@dataclass(frozen=True)
class BlockGraph:
    """Paths of length ``k`` in the recurrent part and their one-step overlaps."""

    k: int
    paths: list[tuple[int, ...]]
    rows: np.ndarray
    cols: np.ndarray

    @property
    def size(self) -> int:
        return len(self.paths)


def block_graph(g: LabeledGraph, k: int, node_budget: int = DEFAULT_NODE_BUDGET) -> BlockGraph:
    if k < 1:
        raise ValueError("block length must be >= 1")
    h = recurrent_subgraph(g)
    if not h.edges:
        raise ReducibleMatrix("the coding has no recurrent part")
    out_ids = {v: [e.id for e in h.out_edges(v)] for v in h.vertices}
    target = {e.id: e.target for e in h.edges}
    paths: list[tuple[int, ...]] = [(e.id,) for e in h.edges]
    for _ in range(k - 1):
        paths = [p + (f,) for p in paths for f in out_ids[target[p[-1]]]]
        if len(paths) > node_budget:
            raise BudgetExceeded(f"{k}-block graph has more than {node_budget} nodes")
    index = {p: i for i, p in enumerate(paths)}
    rows, cols = [], []
    for i, p in enumerate(paths):
        for f in out_ids[target[p[-1]]]:
            rows.append(i)
            cols.append(index[p[1:] + (f,)])
    return BlockGraph(k, paths, np.array(rows), np.array(cols))


def block_pressure(bg: BlockGraph, weights: np.ndarray) -> PressureResult:
    """Pressure for per-block weights (one weight per block, applied on leaving it)."""
    lw = np.asarray(weights, dtype=float)[bg.rows]
    shift = float(lw.max())
    n = bg.size
    mat = sparse.csr_matrix((np.exp(lw - shift), (bg.rows, bg.cols)), shape=(n, n))
    return _pressure_from(mat.toarray() if n <= DENSE_LIMIT else mat, shift)


def block_recoded_pressure(g: LabeledGraph, k: int, w: Callable[[tuple[int, ...]], float],
                           node_budget: int = DEFAULT_NODE_BUDGET) -> PressureResult:
    """Pressure of a potential constant on k-cylinders (edge-id tuples)."""
    bg = block_graph(g, k, node_budget)
    return block_pressure(bg, np.array([float(w(p)) for p in bg.paths]))


def solve_block_exponent(bg: BlockGraph, weights: Sequence[float], tol: float = 1e-12) -> float:
    weights = np.asarray(weights, dtype=float)
    check_positive(weights)
    return _bisect_decreasing(lambda s: block_pressure(bg, -s * weights).value,
                              "solve_block_exponent", tol)
