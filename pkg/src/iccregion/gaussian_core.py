"""Jointly Gaussian variables as linear maps of independent unit-variance sources.

Every named variable is a coefficient row over the latent sources, so the
covariance of any subset is ``G @ G.T`` of the stacked rows.  Mutual
informations are computed on the rank support: directions whose variance
falls below ``EIG_TOL`` carry no information and are discarded, which lets
layers with zero power degrade continuously to zero rate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

EIG_TOL = 1e-12
MI_TOL = 1e-9



def _as_names(vars_) -> tuple[str, ...]:
    if isinstance(vars_, str):
        return (vars_,)
    return tuple(vars_)


@dataclass(frozen=True)
class LinearGaussianModel:
    """Named Gaussian variables over an ordered list of latent sources.

    Parameters
    ----------
    sources : sequence of str
        Latent source identifiers; each is an independent N(0, 1) variable.
    coeffs : mapping of str to array-like
        Coefficient vector (length ``len(sources)``) for each named variable.
    """

    sources: tuple[str, ...]
    coeffs: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        sources = tuple(self.sources)
        if len(set(sources)) != len(sources):
            raise ValueError("duplicate source identifiers")
        rows = {}
        for name, row in self.coeffs.items():
            if not name:
                raise ValueError("variable names must be non-empty")
            row = np.asarray(row, dtype=float)
            if row.shape != (len(sources),):
                raise ValueError(
                    f"coefficient vector for {name!r} has shape {row.shape}, "
                    f"expected ({len(sources)},)"
                )
            row.setflags(write=False)
            rows[name] = row
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "coeffs", rows)

    @classmethod
    def from_terms(cls, sources, terms: Mapping[str, Mapping[str, float]]):
        """Build a model from sparse ``{variable: {source: amplitude}}`` terms."""
        sources = tuple(sources)
        index = {s: i for i, s in enumerate(sources)}
        coeffs = {}
        for name, parts in terms.items():
            row = np.zeros(len(sources))
            for src, amp in parts.items():
                row[index[src]] += amp
            coeffs[name] = row
        return cls(sources, coeffs)

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(self.coeffs)

    def rows(self, vars_) -> np.ndarray:
        names = _as_names(vars_)
        missing = [v for v in names if v not in self.coeffs]
        if missing:
            raise KeyError(f"unknown variable(s): {', '.join(missing)}")
        if not names:
            return np.zeros((0, len(self.sources)))
        return np.stack([self.coeffs[v] for v in names])

    def variance(self, var: str) -> float:
        row = self.rows(var)[0]
        return float(row @ row)

    def rename(self, mapping: Mapping[str, str]) -> "LinearGaussianModel":
        """Return a copy with sources and variables renamed through ``mapping``."""
        sources = tuple(mapping.get(s, s) for s in self.sources)
        coeffs = {mapping.get(k, k): v for k, v in self.coeffs.items()}
        return LinearGaussianModel(sources, coeffs)


def build_covariance(model: LinearGaussianModel, vars_) -> np.ndarray:
    """Covariance matrix of ``vars_`` in the given order."""
    g = model.rows(vars_)
    return g @ g.T


def _support_basis(g: np.ndarray) -> np.ndarray:
    """Orthonormal basis (rows) of the row space of ``g``, ignoring weak directions."""
    if g.shape[0] == 0:
        return g
    # Singular values of g are square roots of covariance eigenvalues.
    _, s, vt = np.linalg.svd(g, full_matrices=False)
    keep = s * s > EIG_TOL
    return vt[keep]


def _residual(g: np.ndarray, basis: np.ndarray) -> np.ndarray:
    if basis.shape[0] == 0 or g.shape[0] == 0:
        return g
    return g - (g @ basis.T) @ basis


def _subspace_information(qa: np.ndarray, qb: np.ndarray) -> float:
    """Information in bits between two orthonormal row bases of source space.

    Equals ``-sum log2 sin(angle)`` over the principal angles.  The sines
    are the singular values of ``qb`` with its ``qa`` component removed,
    which keeps nearly parallel subspaces (large information) accurate
    where ``1 - cos^2`` would cancel.
    """
    if qa.shape[0] == 0 or qb.shape[0] == 0:
        return 0.0
    if qb.shape[0] > qa.shape[0]:
        qa, qb = qb, qa
    sines = np.linalg.svd(_residual(qb, qa), compute_uv=False)
    if sines.size < qb.shape[0] or np.any(sines * sines < EIG_TOL):
        return float("inf")
    return float(-np.log2(sines).sum())


def _clamp(value: float) -> float:
    if value < 0.0:
        if value < -MI_TOL:
            raise ArithmeticError(f"negative mutual information {value!r}")
        return 0.0
    return value


def conditional_mutual_information(model: LinearGaussianModel, A, B, C=()) -> float:
    """I(A; B | C) in bits.

    The rows of ``A`` and ``B`` are projected off the span of ``C``; the
    information is then ``-1/2 log2 det`` of the Gram matrix of the two
    orthonormal residual bases, i.e. the sum over canonical correlations.
    For full-rank covariances this equals
    ``1/2 log2(det S_AC det S_BC / (det S_ABC det S_C))``.
    """
    A, B, C = _as_names(A), _as_names(B), _as_names(C)
    if not A or not B:
        raise ValueError("A and B must be non-empty")
    ga, gb, gc = model.rows(A), model.rows(B), model.rows(C)
    qc = _support_basis(gc)
    qa = _support_basis(_residual(ga, qc))
    qb = _support_basis(_residual(gb, qc))
    return _clamp(_subspace_information(qa, qb))


def mutual_information(model: LinearGaussianModel, A, B) -> float:
    """I(A; B) in bits."""
    return conditional_mutual_information(model, A, B, ())


def gaussian_capacity(snr: float) -> float:
    """Point-to-point AWGN rate 1/2 log2(1 + snr)."""
    return 0.5 * np.log2(1.0 + snr)
