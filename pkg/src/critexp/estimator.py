"""Scikit-learn style wrapper: representations in, exponent features out."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .automaton import LabeledGraph, load_coding, validate_strong_markov
from .pants import FGParams, holonomy
from .rep import Representation, busemann_depth_k_exponent, exponent_bounds
from .weyl import Functional, parse_phi

FEATURES = ("h_kappa", "h_lambda", "h_depth", "lower", "upper")


def check_functional(phi, n: int | None = None) -> Functional:
    if isinstance(phi, str):
        phi = parse_phi(phi)
    elif not isinstance(phi, Functional):
        phi = Functional(phi)
    if n is not None and phi.n != n:
        raise ValueError(f"functional acts on R^{phi.n}, expected R^{n}")
    return phi


def check_epsilon(eps: float) -> float:
    eps = float(eps)
    if not 0 < eps <= math.pi / 2:
        raise ValueError(f"epsilon must lie in (0, pi/2], got {eps}")
    return eps


def check_representations(X: Sequence) -> list[Representation]:
    """Accept representations, pants parameters, or their dict forms."""
    out = []
    for item in X:
        if isinstance(item, Representation):
            out.append(item)
        elif isinstance(item, FGParams):
            out.append(holonomy(item).rep)
        elif isinstance(item, dict) and "generators" in item:
            out.append(Representation.from_dict(item))
        elif isinstance(item, dict):
            out.append(holonomy(FGParams.from_dict(item)).rep)
        else:
            raise TypeError(f"cannot interpret {type(item).__name__} as a representation")
    if not out:
        raise ValueError("no representations given")
    dims = {r.n for r in out}
    if len(dims) != 1:
        raise ValueError(f"mixed dimensions {sorted(dims)}")
    return out


class ExponentTransformer(BaseEstimator, TransformerMixin):
    """Map each representation to ``[h_kappa, h_lambda, h_depth, lower, upper]``.

    ``fit`` only validates the coding and functional; there is nothing to
    learn.  ``upper`` is NaN when the separation certificate fails at
    ``epsilon``.
    """

    def __init__(self, coding="abc", phi="roots:1,1", epsilon=0.1, depth=2, validation_depth=6):
        self.coding = coding
        self.phi = phi
        self.epsilon = epsilon
        self.depth = depth
        self.validation_depth = validation_depth

    def fit(self, X=None, y=None):
        self.graph_: LabeledGraph = load_coding(self.coding)
        report = validate_strong_markov(self.graph_, self.validation_depth)
        if not report.passed:
            raise ValueError(f"coding failed validation: {report.first_failure}")
        n = check_representations(X)[0].n if X is not None else None
        self.phi_ = check_functional(self.phi, n)
        self.epsilon_ = check_epsilon(self.epsilon)
        if int(self.depth) < 1:
            raise ValueError("depth must be >= 1")
        self.n_features_out_ = len(FEATURES)
        return self

    def transform(self, X):
        check_is_fitted(self, "graph_")
        reps = check_representations(X)
        rows = []
        for rep in reps:
            r = exponent_bounds(rep, self.phi_, self.graph_, self.epsilon_)
            hd = busemann_depth_k_exponent(rep, self.phi_, self.graph_, int(self.depth))
            rows.append([r.h_kappa, r.h_lambda, hd, r.lower,
                         r.upper if r.upper is not None else np.nan])
        return np.array(rows)

    def get_feature_names_out(self, input_features=None):
        return np.array(FEATURES, dtype=object)
