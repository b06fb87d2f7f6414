"""Model Cartan subspace of sl(n, R) for n in {2, 3}.

Vectors are stored as ordered coordinates ``(a_1, ..., a_n)`` with zero
trace.  Functionals act by the Euclidean pairing of coefficients with
entries; since the domain is trace-zero, coefficient lists differing by a
constant shift define the same functional.

Normalization: fundamental weights are used un-rescaled,
``omega_k(a) = a_1 + ... + a_k``, which gives ``omega_1(kappa(g)) =
log ||g||`` in the standard representation.  For SL(n) the highest weight
of the k-th fundamental representation is exactly ``omega_k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

TRACE_TOL = 1e-12


@dataclass(frozen=True)
class CartanVector:
    """Point of the model Cartan subspace, entries on a log scale."""

    entries: tuple[float, ...]

    def __init__(self, entries: Iterable[float]):
        object.__setattr__(self, "entries", tuple(float(x) for x in entries))

    @classmethod
    def projected(cls, entries: Iterable[float]) -> "CartanVector":
        """Orthogonal projection onto the trace-zero plane."""
        arr = np.asarray(list(entries), dtype=float)
        return cls(arr - arr.mean())

    @classmethod
    def from_root_coords(cls, x: float, y: float) -> "CartanVector":
        """The n=3 vector with ``alpha_1 = x`` and ``alpha_2 = y``."""
        return cls(((2 * x + y) / 3, (y - x) / 3, -(x + 2 * y) / 3))

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def trace(self) -> float:
        return math.fsum(self.entries)

    def as_array(self) -> np.ndarray:
        return np.array(self.entries)

    def is_dominant(self, tol: float = 0.0) -> bool:
        e = self.entries
        return all(e[i] >= e[i + 1] - tol for i in range(len(e) - 1))

    def __add__(self, other: "CartanVector") -> "CartanVector":
        return CartanVector(a + b for a, b in zip(self.entries, other.entries))

    def __sub__(self, other: "CartanVector") -> "CartanVector":
        return CartanVector(a - b for a, b in zip(self.entries, other.entries))

    def __mul__(self, c: float) -> "CartanVector":
        return CartanVector(c * a for a in self.entries)

    __rmul__ = __mul__

    def __neg__(self) -> "CartanVector":
        return CartanVector(-a for a in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def isclose(self, other: "CartanVector", atol: float = 1e-12) -> bool:
        return len(self) == len(other) and all(
            abs(a - b) <= atol for a, b in zip(self.entries, other.entries)
        )


@dataclass(frozen=True)
class Functional:
    """Linear functional on the Cartan subspace.

    Coefficients are kept as entered; use :meth:`canonical` (last
    coefficient shifted to zero) for comparisons.
    """

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float]):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in coeffs))

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def __call__(self, v: CartanVector | Sequence[float]) -> float:
        entries = v.entries if isinstance(v, CartanVector) else tuple(v)
        if len(entries) != len(self.coeffs):
            raise ValueError(
                f"dimension mismatch: functional on R^{self.n}, vector in R^{len(entries)}"
            )
        return math.fsum(c * a for c, a in zip(self.coeffs, entries))

    def canonical(self) -> "Functional":
        last = self.coeffs[-1]
        return Functional(c - last for c in self.coeffs)

    def equivalent(self, other: "Functional", atol: float = 1e-12) -> bool:
        a, b = self.canonical().coeffs, other.canonical().coeffs
        return len(a) == len(b) and all(abs(x - y) <= atol for x, y in zip(a, b))

    def __add__(self, other: "Functional") -> "Functional":
        return Functional(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __mul__(self, c: float) -> "Functional":
        return Functional(c * a for a in self.coeffs)

    __rmul__ = __mul__

    def __neg__(self) -> "Functional":
        return Functional(-a for a in self.coeffs)

    def weight_coords(self) -> tuple[float, ...]:
        """Coordinates ``(d_1, ..., d_{n-1})`` in the fundamental-weight basis."""
        c = self.canonical().coeffs
        return tuple(c[i] - c[i + 1] for i in range(len(c) - 1))

    def root_coords(self) -> tuple[float, ...]:
        """Coordinates in the simple-root basis (partial sums of canonical coeffs)."""
        # sum c_k alpha_k has zero-sum coeffs q_i = c_i - c_{i-1}
        q = np.asarray(self.coeffs) - np.mean(self.coeffs)
        return tuple(float(x) for x in np.cumsum(q)[:-1])

    def is_weight_nonnegative(self, tol: float = 0.0) -> bool:
        """True when every fundamental-weight coordinate is >= -tol.

        Such functionals are monotone for the dominance order, so they
        satisfy ``phi(lambda(g)) <= phi(kappa(g))``.
        """
        return all(d >= -tol for d in self.weight_coords())


def simple_root(k: int, n: int) -> Functional:
    """``alpha_k(a) = a_k - a_{k+1}`` (1-based k)."""
    if not 1 <= k < n:
        raise ValueError(f"no simple root alpha_{k} in rank {n - 1}")
    c = [0.0] * n
    c[k - 1], c[k] = 1.0, -1.0
    return Functional(c)


def fundamental_weight(k: int, n: int) -> Functional:
    """``omega_k(a) = a_1 + ... + a_k`` (1-based k)."""
    if not 1 <= k < n:
        raise ValueError(f"no fundamental weight omega_{k} in rank {n - 1}")
    return Functional([1.0] * k + [0.0] * (n - k))


def functional_from_roots(c1: float, c2: float) -> Functional:
    """``c1*alpha_1 + c2*alpha_2`` on sl(3)."""
    return Functional((c1, c2 - c1, -c2))


def functional_from_weights(d1: float, d2: float) -> Functional:
    """``d1*omega_1 + d2*omega_2`` on sl(3)."""
    return Functional((d1 + d2, d2, 0.0))


def functional_from_config(spec: dict, n: int | None = None) -> Functional:
    """Parse ``{"basis": "roots"|"weights"|"raw", "coeffs": [...]}``.

    Root and weight coordinates have ``n - 1`` entries; raw coefficients
    have ``n``.  A one-entry root/weight list means SL(2).
    """
    if not isinstance(spec, dict):
        raise ValueError("functional spec must be an object")
    basis = spec.get("basis", "raw")
    coeffs = [float(c) for c in spec.get("coeffs", ())]
    if not coeffs:
        raise ValueError("functional spec needs a nonempty 'coeffs' list")
    if basis == "raw":
        phi = Functional(coeffs)
    elif basis in ("roots", "weights"):
        rank = len(coeffs)
        make = simple_root if basis == "roots" else fundamental_weight
        phi = Functional([0.0] * (rank + 1))
        for k, c in enumerate(coeffs, start=1):
            phi = phi + c * make(k, rank + 1)
    else:
        raise ValueError(f"unknown functional basis {basis!r}")
    if n is not None and phi.n != n:
        raise ValueError(f"functional has dimension {phi.n}, expected {n}")
    return phi


def parse_phi(text: str) -> Functional:
    """Parse a command-line functional such as ``roots:1,1`` or ``raw:1,0,-1``."""
    basis, _, rest = text.partition(":")
    if not rest:
        basis, rest = "roots", basis
    return functional_from_config({"basis": basis, "coeffs": rest.split(",")})


def opposition_involution(v: CartanVector) -> CartanVector:
    """``(a_1, ..., a_n) -> (-a_n, ..., -a_1)``."""
    return CartanVector(-a for a in reversed(v.entries))


def r_vector(n: int) -> CartanVector:
    """Trace-zero vector on which every fundamental weight equals 1."""
    if n == 2:
        return CartanVector((1.0, -1.0))
    if n == 3:
        return CartanVector((1.0, 0.0, -1.0))
    raise ValueError(f"unsupported dimension {n}")


def r_epsilon(eps: float, n: int = 3) -> CartanVector:
    """``-log(sin eps) * R``; the slack vector of an eps-separated element."""
    if not 0.0 < eps <= math.pi / 2:
        raise ValueError(f"eps must lie in (0, pi/2], got {eps}")
    return -math.log(math.sin(eps)) * r_vector(n)
