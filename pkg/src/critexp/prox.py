"""Linear algebra of proximal 2x2 / 3x3 matrices.

Long products in SL(n) have singular values spread far beyond double
precision, so products are carried as :class:`ScaledMatrix`: the matrix and
its dual ``M^{-T}``, each renormalized by its max-abs entry with the log of
the factor tracked separately.  The top singular value (and top eigenvalue
modulus) of each side is always computed to full relative accuracy, and
that is all the Cartan and Jordan projections need once the determinant is
normalized to 1: the last coordinate is read off the dual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .weyl import CartanVector

DEFAULT_GAP_TOL = 1e-6
INCIDENCE_TOL = 1e-9


class SingularMatrix(ValueError):
    pass


class NotProximal(ValueError):
    pass


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    nv = np.linalg.norm(v)
    if nv == 0:
        raise ValueError("zero vector has no projective class")
    return v / nv


class ScaledMatrix:
    """``e^{log_scale} * mat`` with ``|det| = 1``, plus its dual.

    ``dual_mat * e^{dual_log_scale}`` equals the inverse transpose.  Both
    factors are kept with max-abs entry 1.
    """

    __slots__ = ("mat", "log_scale", "dual", "dual_log_scale")

    def __init__(self, mat, log_scale, dual, dual_log_scale):
        self.mat = mat
        self.log_scale = log_scale
        self.dual = dual
        self.dual_log_scale = dual_log_scale

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def identity(cls, n: int) -> "ScaledMatrix":
        return cls(np.eye(n), 0.0, np.eye(n), 0.0)

    @classmethod
    def from_matrix(cls, m, inverse=None, log_abs_det: float | None = None) -> "ScaledMatrix":
        """Normalize ``m`` to ``|det| = 1``.

        Pass the exact inverse and log-determinant when they are known in
        closed form; for ill-conditioned inputs that is far more accurate
        than the LU-based defaults.
        """
        m = np.asarray(m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        if log_abs_det is None:
            sign, log_abs_det = np.linalg.slogdet(m)
            if sign == 0 or not np.isfinite(log_abs_det):
                raise SingularMatrix("matrix is singular")
        if inverse is None:
            try:
                inverse = np.linalg.inv(m)
            except np.linalg.LinAlgError as exc:
                raise SingularMatrix("matrix is singular") from exc
        inverse = np.asarray(inverse, dtype=float)
        shift = log_abs_det / m.shape[0]
        mat, s = _rescale(m)
        dual, ds = _rescale(inverse.T)
        return cls(mat, s - shift, dual, ds + shift)

    def __matmul__(self, other: "ScaledMatrix") -> "ScaledMatrix":
        mat, s = _rescale(self.mat @ other.mat)
        dual, ds = _rescale(self.dual @ other.dual)
        return ScaledMatrix(
            mat, self.log_scale + other.log_scale + s,
            dual, self.dual_log_scale + other.dual_log_scale + ds,
        )

    def inverse(self) -> "ScaledMatrix":
        # (M^{-1})^{-T} = M^T
        return ScaledMatrix(self.dual.T.copy(), self.dual_log_scale, self.mat.T.copy(), self.log_scale)

    def dual_rep(self) -> "ScaledMatrix":
        return ScaledMatrix(self.dual, self.dual_log_scale, self.mat, self.log_scale)

    def to_array(self) -> np.ndarray:
        """Dense matrix (may overflow for long words)."""
        return self.mat * math.exp(self.log_scale)

    def log_norm(self) -> float:
        return math.log(np.linalg.norm(self.mat, 2)) + self.log_scale

    def log_dual_norm(self) -> float:
        return math.log(np.linalg.norm(self.dual, 2)) + self.dual_log_scale


def _rescale(m: np.ndarray) -> tuple[np.ndarray, float]:
    s = float(np.max(np.abs(m)))
    if s == 0 or not np.isfinite(s):
        raise SingularMatrix("degenerate product")
    return m / s, math.log(s)


def as_scaled(m) -> ScaledMatrix:
    return m if isinstance(m, ScaledMatrix) else ScaledMatrix.from_matrix(m)


def scaled_product(ms: Sequence) -> ScaledMatrix:
    """Overflow-safe product ``ms[0] @ ms[1] @ ...``; identity when empty."""
    items = [as_scaled(m) for m in ms]
    if not items:
        raise ValueError("empty product needs a dimension; use ScaledMatrix.identity(n)")
    out = items[0]
    for m in items[1:]:
        out = out @ m
    return out


def singular_values(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    s = np.linalg.svd(m, compute_uv=False)
    if s[-1] == 0:
        raise SingularMatrix("matrix is singular")
    return s


def _from_extremes(top: float, bottom: float, n: int) -> CartanVector:
    # det = 1: log-coordinates sum to zero
    if n == 2:
        a = 0.5 * (top - bottom)
        return CartanVector((a, -a))
    if n == 3:
        return CartanVector((top, -top - bottom, bottom))
    raise ValueError(f"unsupported dimension {n}")


def cartan_projection(m) -> CartanVector:
    """Sorted log singular values after normalizing ``|det| = 1``."""
    sm = as_scaled(m)
    return _from_extremes(sm.log_norm(), -sm.log_dual_norm(), sm.n)


def _log_spectral_radius(m: np.ndarray) -> float:
    ev = np.linalg.eigvals(m)
    r = float(np.max(np.abs(ev)))
    if r == 0 or not np.isfinite(r):
        raise np.linalg.LinAlgError("eigenvalue solver failed")
    return math.log(r)


def jordan_projection(m) -> CartanVector:
    """Sorted log eigenvalue moduli after normalizing ``|det| = 1``."""
    sm = as_scaled(m)
    top = _log_spectral_radius(sm.mat) + sm.log_scale
    bottom = -(_log_spectral_radius(sm.dual) + sm.dual_log_scale)
    return _from_extremes(top, bottom, sm.n)


def proj_distance(p, q) -> float:
    """Angle between two lines, in ``[0, pi/2]``."""
    c = abs(float(np.dot(unit(p), unit(q))))
    return math.acos(min(1.0, c))


def point_hyperplane_distance(p, normal) -> float:
    """Distance from the line ``[p]`` to the hyperplane ``normal^perp``."""
    s = abs(float(np.dot(unit(p), unit(normal))))
    return math.asin(min(1.0, s))


@dataclass(frozen=True)
class ProximalData:
    lambda1: float          # top eigenvalue modulus of the (normalized) matrix
    attractor: np.ndarray   # unit vector spanning g_+
    repeller_normal: np.ndarray  # unit normal of the invariant hyperplane g_-
    restricted_norm: float  # ||g restricted to g_-||
    gap: float              # |lambda_1| / |lambda_2|

    @property
    def contraction_ratio(self) -> float:
        return self.restricted_norm / self.lambda1

    @property
    def transversality(self) -> float:
        return point_hyperplane_distance(self.attractor, self.repeller_normal)


def _top_eigvec(m: np.ndarray, gap_tol: float) -> tuple[float, np.ndarray, float]:
    w, v = np.linalg.eig(m)
    order = np.argsort(-np.abs(w))
    w, v = w[order], v[:, order]
    top = w[0]
    if abs(top) == 0:
        raise NotProximal("zero spectral radius")
    if abs(top.imag) > 1e-12 * abs(top) or abs(w[0]) < (1 + gap_tol) * abs(w[1]):
        raise NotProximal(
            f"no simple real eigenvalue of maximal modulus (moduli {np.abs(w)})"
        )
    vec = np.real(v[:, 0])
    gap = abs(w[0]) / abs(w[1]) if abs(w[1]) > 0 else math.inf
    return abs(top.real), unit(vec), gap


def proximal_data(m, gap_tol: float = DEFAULT_GAP_TOL) -> ProximalData:
    """Attracting line, repelling hyperplane and contraction data."""
    mat = m.mat if isinstance(m, ScaledMatrix) else np.asarray(m, dtype=float)
    lam1, attractor, gap = _top_eigvec(mat, gap_tol)
    _, normal, _ = _top_eigvec(mat.T, gap_tol)
    # orthonormal basis of the invariant hyperplane normal^perp
    _, _, vt = np.linalg.svd(normal[None, :])
    basis = vt[1:].T
    restricted = float(np.linalg.norm(mat @ basis, 2))
    return ProximalData(lam1, attractor, normal, restricted, gap)


def separation_window(m, gap_tol: float = DEFAULT_GAP_TOL) -> tuple[float, float]:
    """Interval ``[lo, hi)`` of eps for which ``m`` is certified eps-separated.

    ``lo = arcsin(sqrt(||m|_{m_-}|| / lambda_1))`` is where the contraction
    criterion starts to hold and ``hi = d(m_+, m_-) / 2`` is where the
    transversality requirement stops.  The window is empty when lo >= hi.
    """
    pd = proximal_data(m, gap_tol)
    ratio = pd.contraction_ratio
    lo = math.asin(math.sqrt(ratio)) if ratio < 1 else math.pi / 2
    return lo, pd.transversality / 2


def separation_margin(m, gap_tol: float = DEFAULT_GAP_TOL) -> float:
    """Smallest eps certified by the contraction criterion, or 0 if none."""
    lo, hi = separation_window(m, gap_tol)
    return lo if lo < hi else 0.0


def dual_rep(m):
    """``(m^T)^{-1}``: the second fundamental representation of SL(3)."""
    if isinstance(m, ScaledMatrix):
        return m.dual_rep()
    m = np.asarray(m, dtype=float)
    try:
        return np.linalg.inv(m).T
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix("matrix is singular") from exc


def theta_loxodromic_window_sl3(m, gap_tol: float = DEFAULT_GAP_TOL) -> tuple[float, float]:
    """Intersection of the separation windows of ``m`` and its dual."""
    sm = as_scaled(m)
    if sm.n != 3:
        raise ValueError("theta-loxodromic data is defined here for SL(3) only")
    lo1, hi1 = separation_window(sm, gap_tol)
    lo2, hi2 = separation_window(sm.dual_rep(), gap_tol)
    return max(lo1, lo2), min(hi1, hi2)


def theta_loxodromic_margin_sl3(m, gap_tol: float = DEFAULT_GAP_TOL) -> float:
    lo, hi = theta_loxodromic_window_sl3(m, gap_tol)
    return lo if lo < hi else 0.0


def attracting_flag(m, gap_tol: float = DEFAULT_GAP_TOL) -> tuple[np.ndarray, np.ndarray]:
    """``(point, plane normal)`` of the attracting flag of a loxodromic SL(3) element."""
    sm = as_scaled(m)
    point = proximal_data(sm, gap_tol).attractor
    normal = proximal_data(sm.dual_rep(), gap_tol).attractor
    return point, normal


def singular_flag(m) -> tuple[np.ndarray, np.ndarray]:
    """``(u_1, u_3)``: top left singular direction and the normal of span(u_1, u_2)."""
    sm = as_scaled(m)
    u, _, _ = np.linalg.svd(sm.mat)
    ud, _, _ = np.linalg.svd(sm.dual)
    return u[:, 0], ud[:, 0]


def iwasawa_value_sl3(m, flag: tuple) -> CartanVector:
    """Iwasawa cocycle ``sigma(m, flag)`` for a flag given as ``(point, plane normal)``.

    ``omega_1`` is ``log ||m v||`` and ``omega_2`` is the log-norm of the
    exterior square on the plane, computed as ``log ||m^{-T} n||``.
    """
    sm = as_scaled(m)
    if sm.n != 3:
        raise ValueError("iwasawa_value_sl3 needs a 3x3 matrix")
    p, normal = unit(flag[0]), unit(flag[1])
    if abs(float(p @ normal)) > INCIDENCE_TOL:
        raise ValueError("flag is not incident: the point does not lie on the plane")
    w1 = math.log(np.linalg.norm(sm.mat @ p)) + sm.log_scale
    w2 = math.log(np.linalg.norm(sm.dual @ normal)) + sm.dual_log_scale
    return CartanVector((w1, w2 - w1, -w2))


def random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def sample_outside_repeller(pd: ProximalData, eps: float, size: int,
                            rng: np.random.Generator) -> np.ndarray:
    """Unit vectors ``v`` with ``[v]`` at distance >= eps from the repelling hyperplane.

    Rejection sampling from the uniform distribution on the sphere; rows of
    the returned array are the samples.
    """
    out: list[np.ndarray] = []
    thresh = math.sin(eps)
    n = pd.attractor.shape[0]
    while len(out) < size:
        v = rng.normal(size=(4 * size, n))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        keep = np.abs(v @ pd.repeller_normal) >= thresh
        out.extend(v[keep])
    return np.array(out[:size])


def iter_flags(points: Iterable, normals: Iterable):
    for p, nrm in zip(points, normals):
        yield unit(p), unit(nrm)
