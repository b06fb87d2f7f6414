"""Fock-Goncharov coordinates on the pair of pants.

Holonomies are assembled from the triangle matrix ``T(X)`` and the edge
matrix ``E(Z, W)``.  With ``E``'s first slot read as ``Z`` literally, the
argument orders used in :func:`holonomy` make ``rho(c^-1) rho(b^-1) rho(a^-1)``
scalar.  Swapping the slots of a single edge breaks the relation; swapping
all of them at once does not (both are checked in the tests).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from . import prox
from .automaton import ABC_MATRIX
from .pressure import NonPositiveWeight, solve_matrix_exponent
from .rep import Representation
from .weyl import CartanVector, Functional, simple_root


def _check_positive(**values: float) -> None:
    for name, v in values.items():
        if not (isinstance(v, (int, float, np.floating)) and v > 0 and math.isfinite(v)):
            raise ValueError(f"{name} must be a positive finite number, got {v!r}")


def t_matrix(x: float) -> np.ndarray:
    _check_positive(X=x)
    return np.array([[0.0, 0.0, 1.0], [0.0, -1.0, -1.0], [x, 1.0 + x, 1.0]])


def t_matrix_inverse(x: float) -> np.ndarray:
    _check_positive(X=x)
    return np.array([[1.0, (1.0 + x) / x, 1.0 / x], [-1.0, -1.0, 0.0], [1.0, 0.0, 0.0]])


def e_matrix(z: float, w: float) -> np.ndarray:
    _check_positive(Z=z, W=w)
    return np.array([[0.0, 0.0, 1.0 / z], [0.0, -1.0, 0.0], [w, 0.0, 0.0]])


def e_matrix_inverse(z: float, w: float) -> np.ndarray:
    _check_positive(Z=z, W=w)
    return np.array([[0.0, 0.0, 1.0 / w], [0.0, -1.0, 0.0], [z, 0.0, 0.0]])


def et_block(z: float, w: float, x: float) -> np.ndarray:
    """Closed form of ``E(Z, W) T(X)``: upper triangular with nonnegative entries."""
    _check_positive(Z=z, W=w, X=x)
    return np.array([[x / z, (1.0 + x) / z, 1.0 / z], [0.0, 1.0, 1.0], [0.0, 0.0, w]])


@dataclass(frozen=True)
class FGParams:
    """Triple ratios ``X = (X1, X2)`` and edge cross ratios ``Z, W`` (indices 1..3)."""

    X: tuple[float, float]
    Z: tuple[float, float, float]
    W: tuple[float, float, float]

    def __post_init__(self):
        object.__setattr__(self, "X", tuple(float(v) for v in self.X))
        object.__setattr__(self, "Z", tuple(float(v) for v in self.Z))
        object.__setattr__(self, "W", tuple(float(v) for v in self.W))
        if len(self.X) != 2 or len(self.Z) != 3 or len(self.W) != 3:
            raise ValueError("expected X of length 2 and Z, W of length 3")
        for name, vals in (("X", self.X), ("Z", self.Z), ("W", self.W)):
            for i, v in enumerate(vals, start=1):
                _check_positive(**{f"{name}{i}": v})

    @classmethod
    def uniform(cls, z: float, w: float | None = None, x1: float = 1.0, x2: float = 1.0) -> "FGParams":
        w = z if w is None else w
        return cls((x1, x2), (z, z, z), (w, w, w))

    def to_dict(self) -> dict:
        return {"X": list(self.X), "Z": list(self.Z), "W": list(self.W)}

    @classmethod
    def from_dict(cls, d: dict) -> "FGParams":
        """Parse ``{"X": [...], "Z": [...], "W": [...]}``, applying ``{"mode": "shear", "t": ...}``."""
        try:
            p = cls(d["X"], d["Z"], d["W"])
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed parameter object: {exc}") from exc
        mode = d.get("mode")
        if mode is None:
            return p
        if mode != "shear":
            raise ValueError(f"unknown family mode {mode!r}")
        return shear_family(float(d.get("t", 0.0)), p)

    @classmethod
    def from_json(cls, text: str) -> "FGParams":
        return cls.from_dict(json.loads(text))


@dataclass
class PantsHolonomy:
    params: FGParams
    rep: Representation
    inverse_generators: dict[str, np.ndarray]  # unnormalized rho(a^-1), rho(b^-1), rho(c^-1)

    def relation_defect(self) -> float:
        """Distance of ``rho(c^-1) rho(b^-1) rho(a^-1)`` from a scalar matrix.

        Measured relative to the product of the factors' norms, which is the
        size of the rounding error a floating-point product can carry; a
        scalar-relative measure would be swamped by cancellation once the
        factors are far from orthogonal.
        """
        m = self.inverse_generators
        prod = m["c"] @ m["b"] @ m["a"]
        scale = np.trace(prod) / 3
        size = math.prod(np.linalg.norm(m[s], 2) for s in "abc")
        return float(np.max(np.abs(prod - scale * np.eye(3))) / size)


def holonomy(p: FGParams) -> PantsHolonomy:
    """Holonomy on the cuffs ``a, b, c`` with ``abc = 1``.

    ``rho(a^-1) = E(W3, Z3) T(X2) E(Z2, W2) T(X1)``; ``rho(b^-1)`` and
    ``rho(c^-1)`` are the analogous products conjugated by ``T(X1)`` and
    ``T(X1)^{-1}``.  Inverses and determinants come from the closed forms.
    """
    x1, x2 = p.X
    z1, z2, z3 = p.Z
    w1, w2, w3 = p.W
    t1, t1i = t_matrix(x1), t_matrix_inverse(x1)

    def word(e_out, e_in):
        # E(e_out) T(X2) E(e_in) T(X1), with inverse and log|det|
        m = e_matrix(*e_out) @ t_matrix(x2) @ e_matrix(*e_in) @ t1
        mi = t1i @ e_matrix_inverse(*e_in) @ t_matrix_inverse(x2) @ e_matrix_inverse(*e_out)
        ld = (math.log(e_out[1] / e_out[0]) + math.log(x2)
              + math.log(e_in[1] / e_in[0]) + math.log(x1))
        return m, mi, ld

    ma, mai, lda = word((w3, z3), (z2, w2))
    mb, mbi, ldb = word((w1, z1), (z3, w3))
    mc, mci, ldc = word((w2, z2), (z1, w1))
    inv_gens = {
        "a": ma,
        "b": t1 @ mb @ t1i,
        "c": t1i @ mc @ t1,
    }
    inv_invs = {
        "a": mai,
        "b": t1 @ mbi @ t1i,
        "c": t1i @ mci @ t1,
    }
    # rho(s) is the inverse of rho(s^-1)
    rep = Representation(inv_invs, inv_gens, {"a": -lda, "b": -ldb, "c": -ldc})
    return PantsHolonomy(p, rep, inv_gens)


@dataclass(frozen=True)
class Admissibility:
    admissible: bool
    min_slack: float
    shear_slacks: tuple[float, float, float]   # log W_i + log Z_{i-1} - log X1 + log X2
    cross_slacks: tuple[float, float, float]   # log Z_i + log W_{i-1}

    def to_dict(self) -> dict:
        return {"admissible": self.admissible, "min_slack": self.min_slack,
                "shear_slacks": list(self.shear_slacks), "cross_slacks": list(self.cross_slacks)}


def is_admissible(p: FGParams) -> Admissibility:
    lz, lw = np.log(p.Z), np.log(p.W)
    lx1, lx2 = math.log(p.X[0]), math.log(p.X[1])
    prev = [2, 0, 1]  # i - 1 mod 3, zero-based
    shear = tuple(float(lw[i] + lz[prev[i]] - lx1 + lx2) for i in range(3))
    cross = tuple(float(lz[i] + lw[prev[i]]) for i in range(3))
    slack = min(shear + cross)
    return Admissibility(slack > 0, slack, shear, cross)


@dataclass(frozen=True)
class BoundaryJordan:
    alpha1: float
    alpha2: float
    hypothesis_holds: bool
    numeric: CartanVector

    @property
    def numeric_roots(self) -> tuple[float, float]:
        lam = self.numeric
        return simple_root(1, 3)(lam), simple_root(2, 3)(lam)


def boundary_jordan_closed_form(blocks: Sequence[tuple[float, float, float]]) -> BoundaryJordan:
    """Root coordinates of the Jordan projection of ``E(Z_k,W_k)T(X_k) ... E(Z_1,W_1)T(X_1)``.

    ``blocks[0]`` is the rightmost factor.  The closed form
    ``(sum log W, sum log Z - sum log X)`` is valid when ``prod X/Z < 1``
    and ``prod W > 1``; the numeric projection is always returned.
    """
    if not blocks:
        raise ValueError("need at least one block")
    m = prox.ScaledMatrix.identity(3)
    lz = lw = lx = 0.0
    for z, w, x in blocks:
        blk = et_block(z, w, x)
        inv = np.linalg.inv(blk)  # triangular, well conditioned relative to its diagonal
        m = prox.ScaledMatrix.from_matrix(blk, inverse=inv, log_abs_det=math.log(w / z * x)) @ m
        lz, lw, lx = lz + math.log(z), lw + math.log(w), lx + math.log(x)
    holds = (lx - lz) < 0 and lw > 0
    return BoundaryJordan(lw, lz - lx, holds, prox.jordan_projection(m))


def vw_vectors(p: FGParams) -> tuple[list[CartanVector], list[CartanVector]]:
    """``v_i`` has root coordinates ``(log W_i Z_{i-1}, log Z_i W_{i-1})``; ``w_i`` swaps them."""
    lz, lw = np.log(p.Z), np.log(p.W)
    prev = [2, 0, 1]
    v, w = [], []
    for i in range(3):
        x = float(lw[i] + lz[prev[i]])
        y = float(lz[i] + lw[prev[i]])
        v.append(CartanVector.from_root_coords(x, y))
        w.append(CartanVector.from_root_coords(y, x))
    return v, w


def transfer_weights(p: FGParams, phi: Functional) -> np.ndarray:
    """Row weights of the transfer matrix, rows ordered ``a, b, c, a', b', c'``."""
    v, w = vw_vectors(p)
    return np.array([phi(u) for u in w] + [phi(u) for u in v])


def transfer_matrix(p: FGParams, phi: Functional, s: float) -> np.ndarray:
    wts = transfer_weights(p, phi)
    return ABC_MATRIX * np.exp(-s * wts)[:, None]


def sl3_transfer_root(p: FGParams, phi: Functional) -> float:
    """``s`` with Perron root of the transfer matrix equal to 1."""
    wts = transfer_weights(p, phi)
    if not np.all(wts > 0):
        raise NonPositiveWeight(f"phi is not positive on every v_i, w_i: {wts.tolist()}")
    return solve_matrix_exponent(ABC_MATRIX, np.repeat(wts[:, None], 6, axis=1))


def sl3_scalar_residual(s: float, p: FGParams, phi: Functional) -> float:
    """Left side minus right side of the closed scalar equation at ``s``."""
    v, w = vw_vectors(p)
    fv = np.array([phi(u) for u in v])
    fw = np.array([phi(u) for u in w])
    return float(np.prod(1 - np.exp(-s * fv)) + np.prod(1 - np.exp(-s * fw))
                 + np.sum(np.exp(-s * (fv + fw))) - 1.0)


def shear_family(t: float, base: FGParams) -> FGParams:
    """Scale every Z_i and W_i by ``e^t``; triple ratios stay fixed."""
    if t < 0:
        raise ValueError("shear parameter must be >= 0")
    f = math.exp(t)
    return replace(base, Z=tuple(z * f for z in base.Z), W=tuple(w * f for w in base.W))
