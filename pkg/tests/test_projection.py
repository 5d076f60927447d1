import numpy as np
import pytest

from greedycert import (Dictionary, InvalidArgs, RankDeficient, least_squares,
                        project_atoms, random_dictionary, residual)

from oracles import ls_normal_equations, residual_oracle


def test_residual_empty_support():
    d = random_dictionary(5, 8, seed=0)
    y = np.arange(5.0)
    r = residual(d, [], y)
    assert np.array_equal(r, y)
    r[0] = 99.0
    assert y[0] == 0.0  # copy, not a view


def test_residual_matches_pinv_oracle():
    rng = np.random.default_rng(42)
    for trial in range(30):
        m, n = 8, 12
        d = random_dictionary(m, n, seed=trial)
        y = rng.standard_normal(m)
        sup = list(rng.choice(n, size=int(rng.integers(1, 5)), replace=False))
        r = residual(d, sup, y)
        assert np.linalg.norm(r - residual_oracle(d.atoms, sup, y)) < 1e-10
        # residual is orthogonal to every selected atom
        assert np.max(np.abs(d.atoms[:, sup].T @ r)) < 1e-10


def test_least_squares_matches_normal_equations():
    rng = np.random.default_rng(7)
    for trial in range(20):
        d = random_dictionary(9, 11, seed=100 + trial)
        y = rng.standard_normal(9)
        sup = [0, 4, 7]
        c = least_squares(d, sup, y)
        assert np.allclose(c, ls_normal_equations(d.atoms, sup, y), atol=1e-9)


def test_rank_deficient_support_raises():
    a = np.eye(4)[:, [0, 0, 1, 2]]  # duplicated first atom
    d = Dictionary(a)
    y = np.ones(4)
    with pytest.raises(RankDeficient):
        residual(d, [0, 1], y)
    with pytest.raises(RankDeficient):
        least_squares(d, [0, 1], y)
    with pytest.raises(InvalidArgs):
        residual(d, [0, 1, 2, 3, 2], y)  # duplicates are an argument error
    # more atoms than rows can never be independent
    d2 = random_dictionary(3, 6, seed=1)
    with pytest.raises(RankDeficient):
        residual(d2, [0, 1, 2, 5], np.ones(3))


def test_residual_input_validation():
    d = random_dictionary(5, 6, seed=2)
    with pytest.raises(InvalidArgs):
        residual(d, [0], np.ones(4))  # wrong length
    with pytest.raises(InvalidArgs):
        residual(d, [0], np.array([1.0, np.inf, 0, 0, 0]))
    with pytest.raises(InvalidArgs):
        residual(d, [9], np.ones(5))  # index out of range


def test_project_atoms_geometry():
    d = random_dictionary(8, 10, seed=5)
    sup = [1, 6]
    pd = project_atoms(d, sup)
    # support columns are exactly zero and flagged as vanished
    assert np.array_equal(pd.projected[:, sup], np.zeros((8, 2)))
    assert pd.vanished[1] and pd.vanished[6]
    assert not pd.vanished[[0, 2, 3, 4, 5, 7, 8, 9]].any()
    # every projected atom is orthogonal to the selected span
    assert np.max(np.abs(d.atoms[:, sup].T @ pd.projected)) < 1e-10
    live = ~pd.vanished
    assert np.allclose(np.linalg.norm(pd.normalized[:, live], axis=0), 1.0)
    raw = pd.family(normalize=False)
    assert raw is pd.projected
    with pytest.raises(ValueError):
        pd.projected[0, 0] = 1.0


def test_project_atoms_vanishing_atom():
    # third atom lies in the span of the first two
    base = np.eye(5)[:, :2]
    mix = (base[:, :1] + base[:, 1:2]) / np.sqrt(2.0)
    a = np.hstack([base, mix, np.eye(5)[:, 2:4]])
    pd = project_atoms(Dictionary(a), [0, 1])
    assert pd.vanished[2]
    assert np.array_equal(pd.normalized[:, 2], np.zeros(5))


def test_project_atoms_empty_support():
    d = random_dictionary(6, 7, seed=9)
    pd = project_atoms(d, [])
    assert np.allclose(pd.projected, d.atoms)
    assert not pd.vanished.any()
