"""Representations of free groups into SL(2) / SL(3) and their exponents.

Edge potentials follow one convention throughout: an edge labeled ``g``
contributes a projection of ``rho(g)^{-1}``.  Along a path ``e_1 ... e_n``
these factors multiply, in path order, to ``rho(ev)^{-1}`` where ``ev`` is
the path evaluation, so cycle lengths are measured on ``rho(ev)^{-1}`` too.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import prox
from .automaton import (Cycle, GroupWord, LabeledGraph, edge_map, enumerate_cycles,
                        inverse_symbol, recurrent_subgraph)
from .pressure import (BudgetExceeded, NonPositiveWeight, block_graph, solve_block_exponent,
                       solve_exponent)
from .prox import NotProximal, ScaledMatrix
from .weyl import CartanVector, Functional, r_epsilon

DEFAULT_ELEMENT_BUDGET = 5_000_000
INVERSE_TOL = 1e-9


class Representation:
    """Generator symbol -> invertible matrix; inverse symbols ``s'`` are derived.

    Matrices are stored normalized to ``|det| = 1``.  When exact inverses or
    log-determinants are known, pass them: the normalized matrices and their
    duals are then built without an LU solve.
    """

    def __init__(self, generators: Mapping[str, np.ndarray],
                 inverses: Mapping[str, np.ndarray] | None = None,
                 log_dets: Mapping[str, float] | None = None):
        if not generators:
            raise ValueError("a representation needs at least one generator")
        self.raw: dict[str, np.ndarray] = {}
        self._scaled: dict[str, ScaledMatrix] = {}
        n = None
        for sym, m in generators.items():
            if sym.endswith("'"):
                raise ValueError(f"generator {sym!r}: give base symbols only, inverses are derived")
            m = np.asarray(m, dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (2, 3):
                raise ValueError(f"generator {sym!r} must be a 2x2 or 3x3 matrix, got shape {m.shape}")
            if not np.all(np.isfinite(m)):
                raise ValueError(f"generator {sym!r} has non-finite entries")
            if n is None:
                n = m.shape[0]
            elif m.shape[0] != n:
                raise ValueError("generators have mixed dimensions")
            inv = None if inverses is None else inverses.get(sym)
            ld = None if log_dets is None else log_dets.get(sym)
            sm = ScaledMatrix.from_matrix(m, inverse=inv, log_abs_det=ld)
            self.raw[sym] = m
            self._scaled[sym] = sm
            self._scaled[inverse_symbol(sym)] = sm.inverse()
        self.n: int = n

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(self.raw)

    @property
    def all_symbols(self) -> tuple[str, ...]:
        return tuple(self._scaled)

    def matrix(self, sym: str) -> ScaledMatrix:
        try:
            return self._scaled[sym]
        except KeyError:
            raise KeyError(f"unknown generator symbol {sym!r}") from None

    def normalized(self, sym: str) -> np.ndarray:
        """Generator (or inverse) with ``|det| = 1`` as a dense array."""
        return self.matrix(sym).to_array()

    def evaluate(self, word: Iterable[str]) -> ScaledMatrix:
        out = ScaledMatrix.identity(self.n)
        for s in word:
            out = out @ self.matrix(s)
        return out

    def conjugate(self, h) -> "Representation":
        """``g -> h g h^{-1}`` on every generator."""
        h = np.asarray(h, dtype=float)
        hi = np.linalg.inv(h)
        gens = {s: h @ self.normalized(s) @ hi for s in self.symbols}
        invs = {s: h @ self.normalized(inverse_symbol(s)) @ hi for s in self.symbols}
        return Representation(gens, invs, {s: 0.0 for s in self.symbols})

    def max_inverse_defect(self) -> float:
        out = 0.0
        for s in self.symbols:
            p = self.normalized(s) @ self.normalized(inverse_symbol(s))
            out = max(out, float(np.max(np.abs(p - np.eye(self.n)))))
        return out

    def to_dict(self) -> dict:
        return {"n": self.n, "generators": {s: m.tolist() for s, m in self.raw.items()}}

    @classmethod
    def from_dict(cls, d: Mapping) -> "Representation":
        try:
            gens = d["generators"]
        except (KeyError, TypeError):
            raise ValueError("representation needs a 'generators' object") from None
        rep = cls({s: np.asarray(m, dtype=float) for s, m in gens.items()})
        if "n" in d and int(d["n"]) != rep.n:
            raise ValueError(f"declared n={d['n']} but matrices are {rep.n}x{rep.n}")
        if rep.max_inverse_defect() > INVERSE_TOL * 1e3:
            raise ValueError("generator matrices are too ill-conditioned to invert reliably")
        return rep

    @classmethod
    def from_json(cls, text: str) -> "Representation":
        return cls.from_dict(json.loads(text))

    def __repr__(self) -> str:
        return f"Representation(n={self.n}, generators={list(self.symbols)})"


def schottky_sl2(m: float, angle: float = math.pi / 4) -> Representation:
    """Two hyperbolic generators with translation length ``m`` (in the alpha_1 sense).

    ``a`` is diagonal, ``b`` is ``a`` rotated by ``angle``; the default puts
    the four fixed points evenly around the projective line.
    """
    a = np.diag([math.exp(m / 2), math.exp(-m / 2)])
    c, s = math.cos(angle), math.sin(angle)
    r = np.array([[c, -s], [s, c]])
    return Representation({"a": a, "b": r @ a @ r.T},
                          {"a": np.diag([math.exp(-m / 2), math.exp(m / 2)]),
                           "b": r @ np.diag([math.exp(-m / 2), math.exp(m / 2)]) @ r.T},
                          {"a": 0.0, "b": 0.0})


def evaluate(rep: Representation, word: Iterable[str]) -> ScaledMatrix:
    return rep.evaluate(word)


def length_phi(rep: Representation, phi: Functional, word: Iterable[str]) -> float:
    """``phi(lambda(rho(word)))``."""
    return phi(prox.jordan_projection(rep.evaluate(word)))


def _projection(kind: str):
    if kind == "kappa":
        return prox.cartan_projection
    if kind == "lambda":
        return prox.jordan_projection
    raise ValueError(f"kind must be 'kappa' or 'lambda', not {kind!r}")


def generator_values(rep: Representation, phi: Functional, kind: str = "kappa",
                     symbols: Iterable[str] | None = None) -> dict[str, float]:
    """``phi(kappa(rho(g)))`` (or lambda) for each symbol."""
    proj = _projection(kind)
    syms = rep.all_symbols if symbols is None else symbols
    return {s: phi(proj(rep.matrix(s))) for s in syms}


def generator_weights(rep: Representation, phi: Functional, g: LabeledGraph,
                      kind: str = "kappa") -> dict[int, float]:
    """Edge id -> ``phi(proj(rho(label)^{-1}))``; every weight must be positive."""
    vals = generator_values(rep, phi, kind, {inverse_symbol(e.label) for e in g.edges})
    for s, v in sorted(vals.items()):
        if not v > 0:
            raise NonPositiveWeight(
                f"phi is not positive on generator {inverse_symbol(s)!r}: "
                f"phi({kind}(rho({s}))) = {v!r}")
    return {e.id: vals[inverse_symbol(e.label)] for e in g.edges}


def approximating_exponents(rep: Representation, phi: Functional, g: LabeledGraph) -> tuple[float, float]:
    """``(h_kappa, h_lambda)``: zeros of the pressure of the generator potentials."""
    hk = solve_exponent(g, generator_weights(rep, phi, g, "kappa"))
    hl = solve_exponent(g, generator_weights(rep, phi, g, "lambda"))
    return hk, hl


# --- separation -----------------------------------------------------------

@dataclass
class PairDistance:
    vertex: str
    incoming: str
    outgoing: str
    representation: str   # "standard" or "dual"
    distance: float


@dataclass
class SeparationCertificate:
    epsilon: float
    passed: bool
    generator_windows: dict[str, tuple[float, float]] = field(default_factory=dict)
    min_pair_distance: float = math.inf
    worst_pair: PairDistance | None = None
    pair_distances: list[PairDistance] = field(default_factory=list)
    failure: str | None = None

    @property
    def generator_margins(self) -> dict[str, float]:
        """Smallest certified eps per generator (0 when the window is empty)."""
        return {s: lo if lo < hi else 0.0 for s, (lo, hi) in self.generator_windows.items()}

    @property
    def epsilon_range(self) -> tuple[float, float]:
        """``(lo, hi)`` such that the certificate passes for ``lo <= eps < hi``."""
        if not self.generator_windows:
            return (math.inf, 0.0)
        lo = max(w[0] for w in self.generator_windows.values())
        hi = min(min(w[1] for w in self.generator_windows.values()), self.min_pair_distance / 2)
        return lo, hi

    def to_dict(self) -> dict:
        lo, hi = self.epsilon_range
        return {
            "epsilon": self.epsilon,
            "passed": self.passed,
            "failure": self.failure,
            "generator_windows": {s: list(w) for s, w in self.generator_windows.items()},
            "generator_margins": self.generator_margins,
            "min_pair_distance": _finite_or_none(self.min_pair_distance),
            "worst_pair": asdict(self.worst_pair) if self.worst_pair else None,
            "certified_range": [_finite_or_none(lo), _finite_or_none(hi)] if lo < hi else None,
        }


def _finite_or_none(x: float):
    return x if math.isfinite(x) else None


def _proximal_views(rep: Representation, sym: str) -> list[tuple[str, ScaledMatrix]]:
    m = rep.matrix(sym)
    return [("standard", m)] + ([("dual", m.dual_rep())] if rep.n == 3 else [])


def certify_separation(rep: Representation, g: LabeledGraph, eps: float,
                       gap_tol: float = prox.DEFAULT_GAP_TOL) -> SeparationCertificate:
    """Finite check of eps-strong separation with respect to the coding ``g``.

    (a) every generator and inverse is eps-separated (in both fundamental
    representations for SL(3)) by the contraction criterion;
    (b) for each recurrent vertex, incoming label ``x`` and outgoing label
    ``y``, the attractor of ``rho(y)^{-1}`` is at distance >= 2 eps from the
    repelling hyperplane of ``rho(x)^{-1}``, so eps-balls around attractors
    of the next factor stay in the contracting region of the previous one.
    """
    cert = SeparationCertificate(eps, True)
    labels = sorted({e.label for e in g.edges})
    data: dict[tuple[str, str], prox.ProximalData] = {}
    for lab in labels:
        sym = inverse_symbol(lab)
        lo, hi = 0.0, math.inf
        try:
            for name, m in _proximal_views(rep, sym):
                pd = prox.proximal_data(m, gap_tol)
                data[(sym, name)] = pd
                wlo, whi = prox.separation_window(m, gap_tol)
                lo, hi = max(lo, wlo), min(hi, whi)
        except NotProximal as exc:
            cert.passed = False
            cert.failure = f"generator {sym!r} is not proximal: {exc}"
            cert.generator_windows[sym] = (math.inf, 0.0)
            continue
        cert.generator_windows[sym] = (lo, hi)
        if not lo <= eps < hi:
            cert.passed = False
            cert.failure = cert.failure or (
                f"generator {sym!r} is not certified {eps}-separated (window [{lo:.6g}, {hi:.6g}))")
    if not cert.passed and any(w[0] == math.inf for w in cert.generator_windows.values()):
        return cert

    rec = recurrent_subgraph(g)
    for v in rec.vertices:
        incoming = sorted({e.label for e in g.in_edges(v)})
        outgoing = sorted({e.label for e in rec.out_edges(v)})
        for x in incoming:
            for y in outgoing:
                xs, ys = inverse_symbol(x), inverse_symbol(y)
                for name, _ in _proximal_views(rep, xs):
                    d = prox.point_hyperplane_distance(data[(ys, name)].attractor,
                                                       data[(xs, name)].repeller_normal)
                    pdist = PairDistance(v, x, y, name, d)
                    cert.pair_distances.append(pdist)
                    if d < cert.min_pair_distance:
                        cert.min_pair_distance, cert.worst_pair = d, pdist
    if cert.min_pair_distance < 2 * eps:
        cert.passed = False
        w = cert.worst_pair
        cert.failure = cert.failure or (
            f"vertex {w.vertex!r}: attractor after {w.outgoing!r} is {w.distance:.6g} from the "
            f"repeller after {w.incoming!r} ({w.representation}), need >= {2 * eps:.6g}")
    return cert


def certified_epsilon_range(rep: Representation, g: LabeledGraph) -> tuple[float, float]:
    """Interval of eps where :func:`certify_separation` passes (empty if lo >= hi)."""
    return certify_separation(rep, g, math.pi / 4).epsilon_range


# --- exponent bounds --------------------------------------------------------

@dataclass
class ExponentReport:
    h_kappa: float
    h_lambda: float
    epsilon: float
    phi_r_eps: float
    m_kappa: float
    m_lambda: float
    certified: bool
    valid: bool
    valid_lambda: bool
    lower: float
    upper: float | None
    upper_lambda: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def exponent_bounds(rep: Representation, phi: Functional, g: LabeledGraph, eps: float,
                    certificate: SeparationCertificate | None = None) -> ExponentReport:
    """Approximating exponents and the bracket they give on the critical exponent."""
    hk, hl = approximating_exponents(rep, phi, g)
    cert = certificate if certificate is not None else certify_separation(rep, g, eps)
    syms = {inverse_symbol(e.label) for e in g.edges}
    mk = min(generator_values(rep, phi, "kappa", syms).values())
    ml = min(generator_values(rep, phi, "lambda", syms).values())
    pr = phi(r_epsilon(eps, rep.n))
    valid = cert.passed and mk > 2 * pr
    valid_l = cert.passed and ml > pr
    upper = hk / (1 - 2 * pr / mk) if valid else None
    upper_l = hl / (1 - pr / ml) if valid_l else None
    return ExponentReport(hk, hl, eps, pr, mk, ml, cert.passed, valid, valid_l, hk, upper, upper_l)


# --- cycle based estimators ------------------------------------------------

def cycle_matrix(rep: Representation, g: LabeledGraph, edges: Sequence[int],
                 emap=None) -> ScaledMatrix:
    """``rho(ev)^{-1}``: product of ``rho(label)^{-1}`` in path order."""
    emap = emap or edge_map(g)
    return rep.evaluate(inverse_symbol(emap[i].label) for i in edges)


def cycle_lengths(rep: Representation, phi: Functional, g: LabeledGraph,
                  cycles: Iterable[Cycle]) -> list[tuple[Cycle, float]]:
    emap = edge_map(g)
    return [(c, phi(prox.jordan_projection(cycle_matrix(rep, g, c.edges, emap)))) for c in cycles]


def periodic_exponent(rep: Representation, phi: Functional, g: LabeledGraph, n: int) -> float:
    """Zero of ``s -> (1/n) log sum exp(-s L(x))`` over closed paths of length ``n``.

    Each rotation class contributes ``period`` closed paths.
    """
    data = cycle_lengths(rep, phi, g, enumerate_cycles(g, n))
    if not data:
        raise ValueError(f"the coding has no closed paths of length {n}")
    logmult = np.array([math.log(c.period) for c, _ in data])
    lengths = np.array([ell for _, ell in data])
    bad = np.flatnonzero(~(lengths > 0))
    if bad.size:
        raise NonPositiveWeight(f"cycle {data[bad[0]][0].edges} has nonpositive length {lengths[bad[0]]!r}")

    def f(s: float) -> float:
        z = logmult - s * lengths
        zmax = z.max()
        return (zmax + math.log(np.exp(z - zmax).sum())) / n

    lo, hi = 0.0, 1.0
    if f(0.0) <= 0:
        return 0.0
    while f(hi) > 0:
        lo, hi = hi, 2 * hi
    while hi - lo > 1e-13 * hi:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if f(mid) > 0 else (lo, mid)
    return 0.5 * (lo + hi)


def _iwasawa(m: ScaledMatrix, flag) -> CartanVector:
    if m.n == 3:
        return prox.iwasawa_value_sl3(m, flag)
    p = prox.unit(flag[0])
    w1 = math.log(np.linalg.norm(m.mat @ p)) + m.log_scale
    return CartanVector((w1, -w1))


def depth_k_potential(rep: Representation, phi: Functional, g: LabeledGraph, k: int,
                      node_budget: int | None = None):
    """Block graph of (k+1)-paths and the truncated Busemann potential on it.

    For a block ``(e_0, ..., e_k)`` the flag is read off the singular
    decomposition of ``h = rho(x_1)^{-1} ... rho(x_k)^{-1}`` and the value
    is ``phi(sigma(rho(x_0)^{-1}, flag))``.
    """
    if k < 1:
        raise ValueError("depth must be >= 1")
    kwargs = {} if node_budget is None else {"node_budget": node_budget}
    bg = block_graph(g, k + 1, **kwargs)
    inv = {e.id: inverse_symbol(e.label) for e in g.edges}

    @lru_cache(maxsize=None)
    def flag(tail: tuple[int, ...]):
        h = rep.evaluate(inv[i] for i in tail)
        u, s, _ = np.linalg.svd(h.mat)
        ud, sd, _ = np.linalg.svd(h.dual)
        if s[0] <= (1 + 1e-9) * s[1] or (h.n == 3 and sd[0] <= (1 + 1e-9) * sd[1]):
            raise ArithmeticError(f"degenerate singular gap in depth-{k} word {tail}")
        return u[:, 0], ud[:, 0]

    weights = np.array([phi(_iwasawa(rep.matrix(inv[p[0]]), flag(p[1:]))) for p in bg.paths])
    return bg, weights


def busemann_depth_k_exponent(rep: Representation, phi: Functional, g: LabeledGraph,
                              k: int = 2, node_budget: int | None = None) -> float:
    """Exponent of the depth-k approximation of the Busemann potential."""
    bg, weights = depth_k_potential(rep, phi, g, k, node_budget)
    return solve_block_exponent(bg, weights)


# --- orbit counting ----------------------------------------------------------

def _rescale_batch(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = np.max(np.abs(m), axis=(1, 2))
    return m / s[:, None, None], np.log(s)


def _log_top_sv(m: np.ndarray) -> np.ndarray:
    # top eigenvalue of the Gram matrix is computed to full relative accuracy
    gram = np.einsum("nji,njk->nik", m, m)
    return 0.5 * np.log(np.linalg.eigvalsh(gram)[:, -1])


def _phi_kappa_batch(phi: Functional, n: int, p, ps, d, ds) -> np.ndarray:
    top = _log_top_sv(p) + ps
    bottom = -(_log_top_sv(d) + ds)
    c = phi.coeffs
    if n == 2:
        a = 0.5 * (top - bottom)
        return c[0] * a - c[1] * a
    return c[0] * top + c[1] * (-top - bottom) + c[2] * bottom


def orbit_lengths(rep: Representation, phi: Functional, g: LabeledGraph, t_max: float,
                  budget: int = DEFAULT_ELEMENT_BUDGET) -> np.ndarray:
    """Sorted ``phi(kappa(rho(gamma)))`` over coded elements with value <= t_max.

    Paths from the start vertex are extended level by level, and a branch
    is abandoned once its value exceeds ``t_max``.  The identity is
    excluded.
    """
    if g.start is None:
        raise ValueError("coding has no start vertex")
    n = rep.n
    eye = np.eye(n)[None]
    frontier = {g.start: (eye, np.zeros(1), eye, np.zeros(1))}
    found: list[np.ndarray] = []
    total = 0
    while frontier:
        nxt: dict[str, list] = {}
        for v, (p, ps, d, ds) in frontier.items():
            for e in g.out_edges(v):
                gm = rep.matrix(e.label)
                # ev grows on the left: pi(e_{n+1}) pi(e_n) ... pi(e_1)
                p2, s2 = _rescale_batch(gm.mat @ p)
                d2, t2 = _rescale_batch(gm.dual @ d)
                s2 = s2 + ps + gm.log_scale
                t2 = t2 + ds + gm.dual_log_scale
                vals = _phi_kappa_batch(phi, n, p2, s2, d2, t2)
                if np.any(~(vals > 0)):
                    raise NonPositiveWeight("phi(kappa) is not positive on an enumerated element")
                keep = vals <= t_max
                if not keep.any():
                    continue
                total += int(keep.sum())
                if total > budget:
                    raise BudgetExceeded(f"more than {budget} elements below T = {t_max}")
                found.append(vals[keep])
                nxt.setdefault(e.target, []).append((p2[keep], s2[keep], d2[keep], t2[keep]))
        frontier = {v: tuple(np.concatenate(parts) for parts in zip(*chunks)) for v, chunks in nxt.items()}
    return np.sort(np.concatenate(found)) if found else np.zeros(0)


@dataclass(frozen=True)
class CountingFit:
    slope: float
    intercept: float
    thresholds: np.ndarray
    log_smoothed: np.ndarray
    total: int


def counting_fit(lengths: np.ndarray, t_max: float, n_thresholds: int = 64) -> CountingFit:
    """Growth rate of the orbit count from the top half ``[t_max/2, t_max]``.

    The raw count ``N(T)`` of a strongly separated group is close to a
    staircase (lengths cluster by word length), and a straight-line fit of
    ``log N`` picks up a phase-dependent bias of several percent.  The fit
    is done on the first Riesz mean ``S(T) = sum (T - l)_+``, which has the
    same exponential rate and a much smaller periodic component.
    """
    lengths = np.sort(np.asarray(lengths, dtype=float))
    if lengths.size < 2 or lengths[0] >= t_max / 2:
        raise ValueError("too few elements below half the length cutoff to fit a slope")
    ts = np.linspace(t_max / 2, t_max, max(n_thresholds, 20))
    csum = np.concatenate([[0.0], np.cumsum(lengths)])
    k = np.searchsorted(lengths, ts, side="right")
    # the identity (length 0) is included: sum over l <= T of (T - l)
    smoothed = (k + 1) * ts - csum[k]
    y = np.log(smoothed)
    slope, intercept = np.polyfit(ts, y, 1)
    return CountingFit(float(slope), float(intercept), ts, y, int(lengths.size))


def brute_force_exponent(rep: Representation, phi: Functional, g: LabeledGraph, t_max: float,
                         budget: int = DEFAULT_ELEMENT_BUDGET, n_thresholds: int = 64) -> float:
    """Orbit-counting estimate of the critical exponent."""
    return counting_fit(orbit_lengths(rep, phi, g, t_max, budget), t_max, n_thresholds).slope


# --- limit cone and Thurston metric -----------------------------------------

def _plane_angle(v: CartanVector) -> float:
    e = v.as_array()
    if v.n == 2:
        return 0.0 if e[0] >= 0 else math.pi
    x = (e[0] - e[1]) / math.sqrt(2)
    y = (e[0] + e[1] - 2 * e[2]) / math.sqrt(6)
    return math.atan2(y, x)


def limit_cone_deviation(rep: Representation, g: LabeledGraph, n: int,
                         phi: Functional | None = None) -> float:
    """Largest angle from a normalized cycle Jordan projection to the generator Cartan cone.

    The cone is spanned by ``kappa(rho(s))`` over all labels ``s`` and
    their inverses; angles are Euclidean in the trace-zero plane.  ``phi``
    is unused and accepted for interface symmetry with the other estimators.
    """
    labels = {e.label for e in g.edges} | {inverse_symbol(e.label) for e in g.edges}
    angles = [_plane_angle(prox.cartan_projection(rep.matrix(s))) for s in sorted(labels)]
    lo, hi = min(angles), max(angles)
    emap = edge_map(g)
    worst = 0.0
    for length in range(1, n + 1):
        for c in enumerate_cycles(g, length):
            lam = prox.jordan_projection(cycle_matrix(rep, g, c.edges, emap))
            if lam.norm() == 0:
                continue
            th = _plane_angle(lam)
            worst = max(worst, lo - th, th - hi)
    return worst


@dataclass
class ThurstonEstimate:
    value: float
    cycle: tuple[int, ...]
    word: str
    h1: float
    h2: float
    depth: int
    max_len: int
    kind: str = "lower estimate of a supremum"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cycle"] = list(self.cycle)
        return d


def thurston_estimate(rep1: Representation, rep2: Representation, phi: Functional,
                      g: LabeledGraph, max_len: int, k: int = 2,
                      h1: float | None = None, h2: float | None = None) -> ThurstonEstimate:
    """``log max (h2 L2) / (h1 L1)`` over primitive cycles of length <= max_len."""
    if h1 is None:
        h1 = busemann_depth_k_exponent(rep1, phi, g, k)
    if h2 is None:
        h2 = busemann_depth_k_exponent(rep2, phi, g, k)
    emap = edge_map(g)
    best, best_cycle = -math.inf, ()
    for length in range(1, max_len + 1):
        for c in enumerate_cycles(g, length):
            if not c.primitive:
                continue
            l1 = phi(prox.jordan_projection(cycle_matrix(rep1, g, c.edges, emap)))
            l2 = phi(prox.jordan_projection(cycle_matrix(rep2, g, c.edges, emap)))
            if not (l1 > 0 and l2 > 0):
                raise NonPositiveWeight(f"cycle {c.edges} has nonpositive length ({l1!r}, {l2!r})")
            r = math.log(h2 * l2) - math.log(h1 * l1)
            if r > best:
                best, best_cycle = r, c.edges
    if not best_cycle:
        raise ValueError("no primitive cycles up to the requested length")
    word = str(GroupWord(emap[i].label for i in reversed(best_cycle)))
    return ThurstonEstimate(best, best_cycle, word, h1, h2, k, max_len)
