"""Orthogonal projection kernels: residuals, projected atom families, least squares.

Everything here projects onto (or against) the span of a selected sub-dictionary.
Solves go through orthogonal factorizations; normal equations are deliberately
avoided outside of test oracles.  Projections are recomputed from scratch on
every call, which keeps the code simple and is plenty fast at the problem sizes
this package targets.
"""

from dataclasses import dataclass

import numpy as np

from .dictionary import RANK_SV_TOL, Dictionary, Support, as_support, check_support
from .errors import InvalidArgs, RankDeficient

VANISH_TOL = 1e-10  # projected atoms with norm at or below this are treated as gone


def _orthonormal_basis(d: Dictionary, support: Support) -> np.ndarray:
    """Orthonormal basis of span(selected atoms), with a full-rank check."""
    if len(support) == 0:
        return np.zeros((d.m, 0))
    if len(support) > d.m:
        raise RankDeficient(f"{len(support)} atoms cannot be independent in dimension {d.m}")
    sub = d.atoms[:, support.array()]
    sv = np.linalg.svd(sub, compute_uv=False)
    if sv[-1] <= RANK_SV_TOL * sv[0]:
        raise RankDeficient(
            f"atoms {support.indices} are numerically dependent (sv ratio {sv[-1] / sv[0]:.3g})")
    q, _ = np.linalg.qr(sub)
    return q


def _check_vector(d: Dictionary, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (d.m,):
        raise InvalidArgs(f"expected a vector of length {d.m}, got shape {y.shape}")
    if not np.all(np.isfinite(y)):
        raise InvalidArgs("vector must be finite")
    return y


def residual(d: Dictionary, support, y) -> np.ndarray:
    """Component of y orthogonal to the span of the support atoms.

    An empty support returns y unchanged.  Raises RankDeficient when the
    selected atoms are numerically dependent.
    """
    sup = check_support(d, as_support(support))
    y = _check_vector(d, y)
    if len(sup) == 0:
        return y.copy()
    q = _orthonormal_basis(d, sup)
    return y - q @ (q.T @ y)


def least_squares(d: Dictionary, support, y) -> np.ndarray:
    """Coefficients of the best approximation of y in the span of the support atoms.

    Returned in support order.  The implied residual y - A c matches
    residual(d, support, y) to within 1e-10.
    """
    sup = check_support(d, as_support(support))
    y = _check_vector(d, y)
    if len(sup) == 0:
        return np.zeros(0)
    _orthonormal_basis(d, sup)  # rank gate
    sub = d.atoms[:, sup.array()]
    coef, _, _, _ = np.linalg.lstsq(sub, y, rcond=None)
    return coef


@dataclass(frozen=True)
class ProjectedDictionary:
    """Atom family projected against the span of a selected support.

    projected[:, i] is atom i minus its component in span(support atoms);
    columns inside the support are exactly zero.  normalized[:, i] is the
    unit-norm version, or the zero vector when the projection vanished
    (norm <= VANISH_TOL), as flagged by `vanished`.
    """

    source: Dictionary
    support: Support
    projected: np.ndarray
    normalized: np.ndarray
    vanished: np.ndarray

    def family(self, normalize: bool) -> np.ndarray:
        """The working atom family: normalized or raw projected columns."""
        return self.normalized if normalize else self.projected


def project_atoms(d: Dictionary, support) -> ProjectedDictionary:
    """Project every atom against the span of the support atoms.

    Raises RankDeficient when the support atoms are dependent (the projector
    would be ill-defined).
    """
    sup = check_support(d, as_support(support))
    q = _orthonormal_basis(d, sup)
    proj = d.atoms - q @ (q.T @ d.atoms)
    if len(sup):
        proj[:, sup.array()] = 0.0
    norms = np.linalg.norm(proj, axis=0)
    vanished = norms <= VANISH_TOL
    safe = np.where(vanished, 1.0, norms)
    normalized = np.where(vanished, 0.0, proj / safe)
    proj.setflags(write=False)
    normalized.setflags(write=False)
    vanished.setflags(write=False)
    return ProjectedDictionary(source=d, support=sup, projected=proj,
                               normalized=normalized, vanished=vanished)
