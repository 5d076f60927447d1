"""Independent oracles the tests check the library against.

These deliberately take different numerical routes than the package (pinv and
normal equations instead of QR, per-subset python loops instead of batched
enumeration) so that agreement actually means something.
"""

import itertools

import numpy as np


def projector(cols: np.ndarray) -> np.ndarray:
    return cols @ np.linalg.pinv(cols)


def residual_oracle(a: np.ndarray, support, y: np.ndarray) -> np.ndarray:
    sup = list(support)
    y = np.asarray(y, dtype=float)
    if not sup:
        return y.copy()
    return y - projector(a[:, sup]) @ y


def ls_normal_equations(a: np.ndarray, support, y: np.ndarray) -> np.ndarray:
    sub = a[:, list(support)]
    return np.linalg.solve(sub.T @ sub, sub.T @ y)


def spark_bruteforce(a: np.ndarray) -> int:
    m, n = a.shape
    if np.linalg.matrix_rank(a) == n:
        return n + 1
    for size in range(1, n + 1):
        for cols in itertools.combinations(range(n), size):
            if np.linalg.matrix_rank(a[:, list(cols)]) < size:
                return size
    return n + 1  # unreachable when rank < n


def ric_bruteforce(a: np.ndarray, q: int) -> tuple[float, float]:
    """(lower, upper) restricted-isometry deviations over all size-q column sets."""
    lo, hi = 0.0, 0.0
    for cols in itertools.combinations(range(a.shape[1]), q):
        sub = a[:, list(cols)]
        eigs = np.linalg.eigvalsh(sub.T @ sub)
        lo = max(lo, 1.0 - float(eigs[0]))
        hi = max(hi, float(eigs[-1]) - 1.0)
    return lo, hi


def prip_bruteforce(a: np.ndarray, q: int, l: int) -> tuple[float, float]:
    """Projected RIC deviations with explicit loops over supports and blocks."""
    m, n = a.shape
    lo, hi = 0.0, 0.0
    for sup in itertools.combinations(range(n), l):
        p = np.eye(m) - (projector(a[:, list(sup)]) if sup else np.zeros((m, m)))
        fam = p @ a
        rest = [i for i in range(n) if i not in sup]
        for cols in itertools.combinations(rest, q):
            sub = fam[:, list(cols)]
            eigs = np.linalg.eigvalsh(sub.T @ sub)
            lo = max(lo, 1.0 - float(eigs[0]))
            hi = max(hi, float(eigs[-1]) - 1.0)
    return lo, hi


def partial_erc_pinv(a: np.ndarray, q, qstar, normalize: bool) -> float:
    """max_i ||pinv(family_rest) @ family_i||_1 over atoms outside qstar."""
    q, qstar = list(q), list(qstar)
    m = a.shape[0]
    p = np.eye(m) - (projector(a[:, q]) if q else np.zeros((m, m)))
    fam = p @ a
    if normalize:
        norms = np.linalg.norm(fam, axis=0)
        keep = norms > 1e-10
        fam = fam.copy()
        fam[:, keep] /= norms[keep]
    rest = [i for i in qstar if i not in q]
    outside = [i for i in range(a.shape[1]) if i not in qstar]
    if not outside:
        return 0.0
    coef = np.linalg.pinv(fam[:, rest]) @ fam[:, outside]
    return float(np.abs(coef).sum(axis=0).max())


def ols_candidate_norms(a: np.ndarray, selected, y: np.ndarray) -> np.ndarray:
    """New residual norm for each candidate atom; inf for already-selected."""
    n = a.shape[1]
    out = np.full(n, np.inf)
    cur = list(selected)
    for i in range(n):
        if i in cur:
            continue
        cols = cur + [i]
        if np.linalg.matrix_rank(a[:, cols]) < len(cols):
            out[i] = float(np.linalg.norm(residual_oracle(a, cur, y)))
        else:
            out[i] = float(np.linalg.norm(residual_oracle(a, cols, y)))
    return out


# closed forms on the threshold construction (n = 2k-l atoms, mu = 1/(n-1))

def construction_mu(k: int, l: int) -> float:
    return 1.0 / (2 * k - l - 1)


def construction_erc_lhs(k: int) -> float:
    """Full-support recovery-condition value for a size-k support, l = 0."""
    mu = construction_mu(k, 0)
    return k * mu / (1.0 + mu - k * mu)


def construction_projected_pair(k: int, l: int, r: int) -> tuple[float, float]:
    """(cross inner product, squared norm) after projecting away r atoms."""
    mu = construction_mu(k, l)
    v = r / (1.0 + mu - r * mu)
    return -mu - mu * mu * v, 1.0 - mu * mu * v
