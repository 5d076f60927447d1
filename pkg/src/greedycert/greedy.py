"""Greedy pursuit solvers and recovery classification.

Two variants share one loop.  Both score candidate atoms against the current
residual after projecting the whole dictionary against the selected span; the
first variant uses the raw projected atoms (classic matching pursuit scoring,
equivalent to correlating the untouched atoms with the residual), the second
normalizes them first, which makes the argmax equal to the single-step
residual minimizer.  Ties are broken toward the lowest atom index and flagged,
since a tie involving an atom outside the planted support already dooms exact
recovery under a pessimistic adversary.
"""

import enum
import json
from dataclasses import dataclass

import numpy as np

from .dictionary import Dictionary, Support, as_support, check_support
from .errors import InvalidArgs, InvalidSeed, ZeroResidual
from .projection import _check_vector, project_atoms, residual

TIE_REL_TOL = 1e-9      # scores within this relative band of the max count as tied
RESIDUAL_TOL = 1e-12    # residual norms at or below this count as zero


class SolverVariant(str, enum.Enum):
    OMP = "omp"
    OLS = "ols"


def as_variant(value) -> SolverVariant:
    if isinstance(value, SolverVariant):
        return value
    try:
        return SolverVariant(str(value).lower())
    except ValueError:
        raise InvalidArgs(f"unknown solver variant {value!r} (expected 'omp' or 'ols')") from None


def _score_vector(variant: SolverVariant, d: Dictionary, support: Support,
                  res: np.ndarray) -> np.ndarray:
    pd = project_atoms(d, support)
    fam = pd.family(normalize=(variant is SolverVariant.OLS))
    scores = np.abs(fam.T @ res)
    scores[pd.vanished] = 0.0  # includes every already-selected atom
    return scores


def _tie_set(scores: np.ndarray) -> np.ndarray:
    top = scores.max()
    if top <= 0.0:
        return np.zeros(0, dtype=int)
    return np.flatnonzero(scores >= top * (1.0 - TIE_REL_TOL))


def select_atom(variant, d: Dictionary, support, res) -> tuple[int, float, bool]:
    """Pick the next atom for the given residual.

    Returns (index, score, tie) where tie reports whether at least two atoms
    reached the maximum score within TIE_REL_TOL (relative); the lowest tied
    index wins.  Raises ZeroResidual when the residual norm is at or below
    RESIDUAL_TOL.
    """
    variant = as_variant(variant)
    sup = check_support(d, as_support(support))
    res = _check_vector(d, res)
    if np.linalg.norm(res) <= RESIDUAL_TOL:
        raise ZeroResidual("residual is numerically zero; nothing left to select")
    scores = _score_vector(variant, d, sup, res)
    tied = _tie_set(scores)
    if tied.size == 0:
        # residual orthogonal to every remaining atom; fall back to the lowest
        # unselected index so the choice stays deterministic
        remaining = [i for i in range(d.n) if i not in sup]
        return remaining[0], 0.0, len(remaining) > 1
    choice = int(tied[0])
    return choice, float(scores[choice]), tied.size >= 2


@dataclass(frozen=True)
class GreedyTrace:
    """Record of one pursuit run.

    selected includes any seeded prefix (its length is `seeded`); scores holds
    one length-n vector per performed (non-seeded) selection, already zeroed at
    selected and vanished atoms; residual_norms[t] is the residual norm after
    the first t atoms, so it has len(selected) + 1 entries; tie_at is the first
    iteration whose maximum was attained by several atoms (global index into
    selected), or None; early_stop is the iteration at which the residual
    vanished before the requested number of selections, or None.
    """

    variant: SolverVariant
    requested: int
    seeded: int
    selected: Support
    scores: tuple
    residual_norms: tuple
    tie_at: int | None
    early_stop: int | None

    def to_dict(self, outcome=None) -> dict:
        return {
            "variant": self.variant.value,
            "requested": self.requested,
            "seeded": self.seeded,
            "selected": list(self.selected.indices),
            "scores": [[float(x) for x in vec] for vec in self.scores],
            "residual_norms": [float(x) for x in self.residual_norms],
            "tie_at": self.tie_at,
            "early_stop": self.early_stop,
            "outcome": outcome.to_dict() if outcome is not None else None,
        }

    def to_json(self, outcome=None) -> str:
        return json.dumps(self.to_dict(outcome), indent=2)


def run(variant, d: Dictionary, y, k: int, seed_support=None) -> GreedyTrace:
    """Run pursuit for k selections, optionally from a seeded prefix.

    Parameters
    ----------
    variant : SolverVariant or str
    d : Dictionary
    y : array_like, length m
    k : int
        Total number of atoms wanted, 1 <= k <= m.
    seed_support : optional
        Atoms treated as already selected, fewer than k of them; they occupy
        the first iterations of the trace without scores.

    Raises
    ------
    InvalidSeed
        If the seed is too large, duplicated or out of range.
    RankDeficient
        If the seeded atoms are numerically dependent.
    """
    variant = as_variant(variant)
    y = _check_vector(d, y)
    if not (1 <= k <= d.m):
        raise InvalidArgs(f"need 1 <= k <= m={d.m}, got k={k}")
    if k > d.n:
        raise InvalidArgs(f"cannot select k={k} distinct atoms out of n={d.n}")
    try:
        seed = check_support(d, as_support(seed_support if seed_support is not None else ()))
    except InvalidArgs as exc:
        raise InvalidSeed(str(exc)) from None
    if len(seed) >= k:
        raise InvalidSeed(f"seed has {len(seed)} atoms but only {k} selections were requested")

    selected = list(seed)
    norms = []
    for p in range(len(seed) + 1):
        r = residual(d, Support(tuple(selected[:p])), y)
        norms.append(float(np.linalg.norm(r)))

    scores_log = []
    tie_at = None
    early_stop = None
    while len(selected) < k:
        if norms[-1] <= RESIDUAL_TOL:
            early_stop = len(selected)
            break
        scores = _score_vector(variant, d, Support(tuple(selected)), r)
        tied = _tie_set(scores)
        if tied.size == 0:
            remaining = [i for i in range(d.n) if i not in selected]
            choice = remaining[0]
            if tie_at is None and len(remaining) > 1:
                tie_at = len(selected)
        else:
            choice = int(tied[0])
            if tie_at is None and tied.size >= 2:
                tie_at = len(selected)
        scores.setflags(write=False)
        scores_log.append(scores)
        selected.append(choice)
        r = residual(d, Support(tuple(selected)), y)
        norms.append(float(np.linalg.norm(r)))

    return GreedyTrace(
        variant=variant,
        requested=k,
        seeded=len(seed),
        selected=Support(tuple(selected)),
        scores=tuple(scores_log),
        residual_norms=tuple(norms),
        tie_at=tie_at,
        early_stop=early_stop,
    )


@dataclass(frozen=True)
class RecoveryOutcome:
    """Exact-recovery verdict for a trace against a planted support.

    kind is one of "success", "wrong_atom", "tie_with_wrong_atom",
    "early_zero_residual"; iteration indices are 0-based positions in the
    selection order.
    """

    kind: str
    iteration: int | None = None
    atom: int | None = None

    SUCCESS = "success"
    WRONG_ATOM = "wrong_atom"
    TIE_WITH_WRONG_ATOM = "tie_with_wrong_atom"
    EARLY_ZERO_RESIDUAL = "early_zero_residual"

    @property
    def is_success(self) -> bool:
        return self.kind == self.SUCCESS

    def to_dict(self) -> dict:
        return {"kind": self.kind, "iteration": self.iteration, "atom": self.atom}


def classify(trace: GreedyTrace, truth) -> RecoveryOutcome:
    """Classify a trace as exact recovery or its first failure event.

    Success requires every selection to land in the planted support, with no
    tie involving an outside atom at any iteration, and the full number of
    requested selections performed.  A tie with an outside atom counts as
    failure even when the tiebreak happened to pick a planted atom, matching
    the pessimistic convention under which worst-case results are stated.  A
    residual that vanishes before the requested number of selections is
    classified as early_zero_residual.
    """
    truth_support = as_support(truth)
    if len(truth_support) != trace.requested:
        raise InvalidArgs(
            f"truth has {len(truth_support)} atoms but the trace requested {trace.requested}")
    truth_set = set(truth_support)
    for t, atom in enumerate(trace.selected):
        if t >= trace.seeded:
            scores = trace.scores[t - trace.seeded]
            tied = _tie_set(np.asarray(scores))
            if tied.size >= 2 and any(int(i) not in truth_set for i in tied):
                return RecoveryOutcome(RecoveryOutcome.TIE_WITH_WRONG_ATOM, iteration=t)
        if atom not in truth_set:
            return RecoveryOutcome(RecoveryOutcome.WRONG_ATOM, iteration=t, atom=int(atom))
    if trace.early_stop is not None:
        return RecoveryOutcome(RecoveryOutcome.EARLY_ZERO_RESIDUAL, iteration=trace.early_stop)
    if len(trace.selected) != trace.requested:
        return RecoveryOutcome(RecoveryOutcome.EARLY_ZERO_RESIDUAL, iteration=len(trace.selected))
    return RecoveryOutcome(RecoveryOutcome.SUCCESS)
