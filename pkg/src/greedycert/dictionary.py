"""Dictionaries with unit-norm atoms: core types, diagnostics, generators and file IO.

A dictionary is an m x n real matrix whose columns (atoms) have unit Euclidean
norm.  This module owns the plain-text CSV format used by the CLI (one matrix
row per line) and the two generators used throughout: a symmetric construction
that sits exactly at the coherence threshold for greedy recovery, and a seeded
random generator with an optional coherence target.
"""

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import CapExceeded, InvalidArgs, TargetUnreachable

UNIT_NORM_TOL = 1e-9
RANK_SV_TOL = 1e-8  # singular values below this fraction of the largest count as zero
SPARK_CAP = 20
BISECT_STEPS = 60
SHRINK_STEPS = 1500


@dataclass(frozen=True, eq=False, repr=False)
class Dictionary:
    """Immutable m x n matrix of unit-norm atoms (m >= 1, n >= 2)."""

    atoms: np.ndarray

    def __post_init__(self):
        a = np.array(self.atoms, dtype=float)
        if a.ndim != 2:
            raise InvalidArgs("atoms must be a 2-D array")
        m, n = a.shape
        if m < 1 or n < 2:
            raise InvalidArgs(f"dictionary shape {m}x{n} is too small (need m >= 1, n >= 2)")
        if not np.all(np.isfinite(a)):
            raise InvalidArgs("atoms must be finite")
        norms = np.linalg.norm(a, axis=0)
        if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOL):
            worst = float(np.abs(norms - 1.0).max())
            raise InvalidArgs(f"atoms must have unit norm within {UNIT_NORM_TOL} (worst deviation {worst:g})")
        a.setflags(write=False)
        object.__setattr__(self, "atoms", a)

    @property
    def m(self) -> int:
        return self.atoms.shape[0]

    @property
    def n(self) -> int:
        return self.atoms.shape[1]

    def column(self, i: int) -> np.ndarray:
        return self.atoms[:, i]

    def __repr__(self):
        return f"Dictionary(m={self.m}, n={self.n})"


@dataclass(frozen=True)
class Support:
    """Ordered index set: distinct non-negative ints, order preserved."""

    indices: tuple[int, ...] = ()

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 0 for i in idx):
            raise InvalidArgs("support indices must be non-negative")
        if len(set(idx)) != len(idx):
            raise InvalidArgs(f"support has duplicate indices: {idx}")
        object.__setattr__(self, "indices", idx)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i):
        return i in self.indices

    def array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=int)


def as_support(value) -> Support:
    """Coerce a Support or any iterable of ints into a Support."""
    if isinstance(value, Support):
        return value
    return Support(tuple(value))


def check_support(d: Dictionary, support: Support) -> Support:
    if len(support) and max(support) >= d.n:
        raise InvalidArgs(f"support index {max(support)} out of range for n={d.n}")
    return support


@dataclass(frozen=True)
class SparseInstance:
    """A planted sparse problem: observation = sum of support atoms weighted by coefficients."""

    support: Support
    coefficients: np.ndarray
    observation: np.ndarray


def make_instance(d: Dictionary, support, coefficients) -> SparseInstance:
    """Build a SparseInstance whose observation is synthesized from the dictionary.

    Parameters
    ----------
    d : Dictionary
    support : Support or iterable of int
        Planted support, all indices in range.
    coefficients : array_like
        One nonzero coefficient per support atom, in support order.

    Returns
    -------
    SparseInstance
    """
    sup = check_support(d, as_support(support))
    c = np.array(coefficients, dtype=float)
    if c.shape != (len(sup),):
        raise InvalidArgs(f"expected {len(sup)} coefficients, got shape {c.shape}")
    if not np.all(np.isfinite(c)) or np.any(c == 0.0):
        raise InvalidArgs("coefficients must be finite and nonzero")
    y = d.atoms[:, sup.array()] @ c
    c.setflags(write=False)
    y.setflags(write=False)
    return SparseInstance(support=sup, coefficients=c, observation=y)


def gram(d: Dictionary) -> np.ndarray:
    """Gram matrix of the atoms (n x n, symmetric, unit diagonal)."""
    return d.atoms.T @ d.atoms


def coherence(d: Dictionary) -> float:
    """Largest absolute inner product between two distinct atoms."""
    g = gram(d)
    off = np.abs(g - np.diag(np.diag(g)))
    return float(off.max())


def spark(d: Dictionary, cap: int = SPARK_CAP) -> int:
    """Size of the smallest linearly dependent column subset.

    Returns n + 1 when every column subset is independent (only possible for
    n <= m).  Rank decisions use RANK_SV_TOL relative to the largest singular
    value.

    Raises
    ------
    CapExceeded
        If n exceeds `cap` (subset enumeration would blow up).
    """
    if d.n > cap:
        raise CapExceeded(f"spark enumeration capped at n <= {cap}, got n={d.n}")
    a = d.atoms
    sv = np.linalg.svd(a, compute_uv=False)
    rank = int(np.sum(sv > RANK_SV_TOL * sv[0]))
    if rank == d.n:
        return d.n + 1
    if d.n - rank == 1:
        # one-dimensional null space: its support is the unique minimal dependent set
        _, _, vt = np.linalg.svd(a)
        v = vt[-1]
        return int(np.sum(np.abs(v) > RANK_SV_TOL * np.abs(v).max()))
    for size in range(2, min(d.n, d.m + 1) + 1):
        if size > d.m:
            return size  # more columns than rows is always dependent
        for sub in combinations(range(d.n), size):
            block = a[:, list(sub)]
            s = np.linalg.svd(block, compute_uv=False)
            if s[-1] <= RANK_SV_TOL * s[0]:
                return size
    return min(d.n, d.m + 1)


def build_worst_case(k: int, l: int) -> Dictionary:
    """Symmetric dictionary of 2k-l atoms in dimension 2k-l-1 at coherence 1/(2k-l-1).

    Every off-diagonal Gram entry equals -1/(2k-l-1), the spark is exactly
    2k-l, and the one-dimensional null space is spanned by the all-ones
    vector.  This is the equality case of the coherence threshold for exact
    recovery of k atoms after l correct selections: greedy pursuit provably
    fails on a suitable input against this dictionary.

    The eigenbasis is fixed by a Householder reflection mapping the normalized
    all-ones vector to the last canonical basis vector, so the output is
    deterministic (bitwise identical across calls).
    """
    if not (isinstance(k, int) and isinstance(l, int)):
        raise InvalidArgs("k and l must be ints")
    if k < 1 or l < 0 or l >= k:
        raise InvalidArgs(f"need k >= 1 and 0 <= l < k, got k={k}, l={l}")
    n = 2 * k - l
    m = n - 1
    ones_dir = np.full(n, 1.0 / math.sqrt(n))
    w = ones_dir.copy()
    w[-1] -= 1.0
    house = np.eye(n) - 2.0 * np.outer(w, w) / (w @ w)
    # first m columns of the reflection are orthonormal and orthogonal to ones_dir
    basis = house[:, :m]
    scale = math.sqrt(n / (n - 1.0))
    return Dictionary(scale * basis.T)


def _unit_columns(mat: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(mat, axis=0)
    if np.any(norms < 1e-12):
        raise InvalidArgs("cannot normalize a zero column")
    return mat / norms


def _haar_frame(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    """Unit-norm frame from an orthogonal draw: exact orthonormal columns when
    n <= m, otherwise the first m rows of a Haar orthogonal matrix."""
    if n <= m:
        g = rng.normal(size=(m, n))
        q, r = np.linalg.qr(g)
        return q * np.sign(np.diag(r))
    g = rng.normal(size=(n, n))
    q, r = np.linalg.qr(g)
    q = q * np.sign(np.diag(r))
    return _unit_columns(q[:m, :])


def _shrink_gram(start: np.ndarray, target: float, max_iter: int) -> np.ndarray | None:
    """Iteratively clip off-diagonal Gram entries and re-factor to rank m.

    Returns a unit-norm matrix with coherence <= target, or None if the
    iteration stalls.  Deterministic for a fixed starting point.
    """
    d = start.copy()
    m, n = d.shape
    gamma = 0.95 * target
    for _ in range(max_iter):
        g = d.T @ d
        mu = np.abs(g - np.diag(np.diag(g))).max()
        if mu <= target:
            return d
        clipped = np.clip(g, -gamma, gamma)
        np.fill_diagonal(clipped, 1.0)
        w, vecs = np.linalg.eigh(clipped)
        top = np.clip(w[n - m:], 0.0, None)
        d = (vecs[:, n - m:] * np.sqrt(top)).T
        norms = np.linalg.norm(d, axis=0)
        dead = np.flatnonzero(norms < 1e-12)
        if dead.size:
            # deterministic rescue: replace a collapsed column with a basis vector
            d[:, dead] = 0.0
            d[dead % m, dead] = 1.0
            norms = np.linalg.norm(d, axis=0)
        d = d / norms
    return None


def welch_bound(m: int, n: int) -> float:
    """Lower bound on the coherence of any m x n unit-norm dictionary."""
    if n <= m:
        return 0.0
    return math.sqrt((n - m) / (m * (n - 1.0)))


def random_dictionary(m: int, n: int, coherence_target: float | None = None,
                      seed=0) -> Dictionary:
    """Seeded random dictionary, optionally with a coherence ceiling.

    Without a target the atoms are normalized i.i.d. Gaussian columns.  With a
    target, an orthogonal frame is blended with i.i.d. noise and the blend
    weight is bisected until the coherence drops below the target; for n > m,
    where no frame in the blend family is incoherent enough for tight targets,
    a deterministic Gram-shrinkage refinement takes over.

    Parameters
    ----------
    m, n : int
        Shape, m >= 1 and n >= 2.
    coherence_target : float, optional
        Required ceiling on the mutual coherence of the result.
    seed : int or sequence of int
        Anything accepted by numpy's default_rng.  Same seed, same matrix.

    Raises
    ------
    TargetUnreachable
        If the target is below the analytic lower bound for (m, n), or the
        blend/shrinkage search exhausts its step budget above the target.
    """
    if m < 1 or n < 2:
        raise InvalidArgs(f"need m >= 1 and n >= 2, got m={m}, n={n}")
    rng = np.random.default_rng(seed)
    noise = rng.normal(size=(m, n))
    if coherence_target is None:
        return Dictionary(_unit_columns(noise))
    target = float(coherence_target)
    if target < 0:
        raise InvalidArgs("coherence_target must be non-negative")
    if target < welch_bound(m, n):
        raise TargetUnreachable(
            f"target {target:g} is below the {welch_bound(m, n):.6g} lower bound for shape {m}x{n}")
    frame = _haar_frame(rng, m, n)

    def blend(t: float) -> np.ndarray:
        return _unit_columns((1.0 - t) * frame + t * noise)

    def mu_of(mat: np.ndarray) -> float:
        g = mat.T @ mat
        return float(np.abs(g - np.diag(np.diag(g))).max())

    if mu_of(blend(1.0)) <= target:
        return Dictionary(blend(1.0))
    if mu_of(frame) <= target:
        # keep as much noise as the target allows
        lo, hi = 0.0, 1.0
        for _ in range(BISECT_STEPS):
            mid = 0.5 * (lo + hi)
            if mu_of(blend(mid)) <= target:
                lo = mid
            else:
                hi = mid
        return Dictionary(blend(lo))
    if n > m:
        shrunk = _shrink_gram(blend(0.1), target, SHRINK_STEPS)
        if shrunk is not None:
            return Dictionary(shrunk)
    raise TargetUnreachable(
        f"could not reach coherence {target:g} for shape {m}x{n} within the step budget")


def save_dictionary(d: Dictionary, path) -> None:
    """Write the matrix as plain CSV, one row per line, 17 significant digits."""
    with open(path, "w") as fh:
        for row in d.atoms:
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def load_dictionary(path) -> tuple[Dictionary, bool]:
    """Read a dictionary from plain CSV (one matrix row per line).

    Columns whose norm deviates from 1 by more than UNIT_NORM_TOL are
    re-normalized; the second return value flags whether that happened.
    Non-finite entries and ragged rows are rejected.
    """
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append([float(tok) for tok in line.split(",")])
            except ValueError as exc:
                raise InvalidArgs(f"{path}: line {lineno}: {exc}") from exc
    if not rows:
        raise InvalidArgs(f"{path}: empty dictionary file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InvalidArgs(f"{path}: ragged rows (expected {width} columns everywhere)")
    a = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(a)):
        raise InvalidArgs(f"{path}: non-finite entries are not allowed")
    norms = np.linalg.norm(a, axis=0)
    if np.any(norms < 1e-12):
        raise InvalidArgs(f"{path}: zero column cannot be normalized")
    renormalized = bool(np.any(np.abs(norms - 1.0) > UNIT_NORM_TOL))
    if renormalized:
        a = a / norms
    return Dictionary(a), renormalized


def save_vector(v: np.ndarray, path) -> None:
    """Write a vector as one value per line, 17 significant digits."""
    v = np.asarray(v, dtype=float).ravel()
    with open(path, "w") as fh:
        for x in v:
            fh.write(f"{x:.17g}\n")


def load_vector(path) -> np.ndarray:
    """Read a vector: values separated by newlines and/or commas."""
    toks = []
    with open(path) as fh:
        for line in fh:
            toks.extend(t for t in line.replace(",", " ").split() if t)
    try:
        v = np.asarray([float(t) for t in toks], dtype=float)
    except ValueError as exc:
        raise InvalidArgs(f"{path}: {exc}") from exc
    if v.size == 0:
        raise InvalidArgs(f"{path}: empty vector file")
    if not np.all(np.isfinite(v)):
        raise InvalidArgs(f"{path}: non-finite entries are not allowed")
    return v
