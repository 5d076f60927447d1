import numpy as np
import pytest

from greedycert import (CapExceeded, Dictionary, InvalidArgs, Support, TargetUnreachable,
                        as_support, build_worst_case, coherence, gram, load_dictionary,
                        load_vector, make_instance, random_dictionary, save_dictionary,
                        save_vector, spark, welch_bound)

from oracles import spark_bruteforce


def unit(cols):
    a = np.asarray(cols, dtype=float)
    return a / np.linalg.norm(a, axis=0)


def test_dictionary_validation():
    with pytest.raises(InvalidArgs):
        Dictionary(np.ones(4))  # not 2-D
    with pytest.raises(InvalidArgs):
        Dictionary(np.eye(3)[:, :1])  # n < 2
    with pytest.raises(InvalidArgs):
        Dictionary(2.0 * np.eye(3))  # not unit norm
    bad = np.eye(3)
    bad[0, 0] = np.nan
    with pytest.raises(InvalidArgs):
        Dictionary(bad)
    d = Dictionary(np.eye(3))
    assert d.m == 3 and d.n == 3
    with pytest.raises(ValueError):
        d.atoms[0, 0] = 5.0  # read-only


def test_support_basics():
    s = as_support([3, 0, 2])
    assert list(s) == [3, 0, 2]  # order preserved
    assert len(s) == 3 and 2 in s and 1 not in s
    with pytest.raises(InvalidArgs):
        as_support([1, 1])
    with pytest.raises(InvalidArgs):
        as_support([-1])
    assert len(as_support(Support(()))) == 0


def test_make_instance():
    d = Dictionary(np.eye(4))
    inst = make_instance(d, [0, 2], [1.5, -2.0])
    assert np.allclose(inst.observation, [1.5, 0.0, -2.0, 0.0])
    with pytest.raises(InvalidArgs):
        make_instance(d, [0, 2], [1.0, 0.0])  # zero coefficient
    with pytest.raises(InvalidArgs):
        make_instance(d, [0, 9], [1.0, 1.0])  # out of range
    with pytest.raises(InvalidArgs):
        make_instance(d, [0], [1.0, 2.0])  # length mismatch


def test_gram_and_coherence():
    d = Dictionary(np.eye(5))
    assert coherence(d) == 0.0
    a = unit([[1.0, 1.0], [0.0, 1.0]])
    d2 = Dictionary(a)
    assert np.allclose(gram(d2), a.T @ a)
    assert coherence(d2) == pytest.approx(1.0 / np.sqrt(2.0))


def test_spark_full_rank_and_shortcuts():
    assert spark(Dictionary(np.eye(4))) == 5  # full column rank -> n+1
    # duplicated atom -> two dependent columns
    a = np.eye(3)[:, [0, 0, 1]]
    assert spark(Dictionary(a)) == 2
    # worst-case construction: every n-1 columns independent, all n dependent
    d = build_worst_case(3, 1)
    assert spark(d) == d.n


def test_spark_matches_bruteforce():
    rng = np.random.default_rng(5)
    for _ in range(20):
        m, n = 5, 7
        d = random_dictionary(m, n, seed=int(rng.integers(1 << 30)))
        assert spark(d) == spark_bruteforce(d.atoms)
    # crafted 3-term dependency: a2 = normalized(a0 + a1)
    base = np.eye(4)[:, :2]
    third = unit((base[:, :1] + base[:, 1:2]))
    a = np.hstack([base, third, np.eye(4)[:, 2:3]])
    d = Dictionary(a)
    assert spark(d) == spark_bruteforce(a) == 3


def test_spark_cap():
    d = random_dictionary(8, 25, seed=0)
    with pytest.raises(CapExceeded):
        spark(d, cap=20)


@pytest.mark.parametrize("k,l", [(1, 0), (2, 0), (2, 1), (3, 1), (4, 2), (5, 3)])
def test_build_worst_case_gram(k, l):
    d = build_worst_case(k, l)
    n = 2 * k - l
    assert d.n == n and d.m == n - 1
    mu = 1.0 / (n - 1)
    want = (1.0 + mu) * np.eye(n) - mu * np.ones((n, n))
    assert np.max(np.abs(gram(d) - want)) < 1e-12
    assert coherence(d) == pytest.approx(mu, abs=1e-12)
    # columns sum to zero: the all-ones vector is the unique dependency
    assert np.linalg.norm(d.atoms.sum(axis=1)) < 1e-10


def test_build_worst_case_deterministic():
    a = build_worst_case(4, 2).atoms
    b = build_worst_case(4, 2).atoms
    assert a.tobytes() == b.tobytes()


def test_build_worst_case_validation():
    with pytest.raises(InvalidArgs):
        build_worst_case(0, 0)
    with pytest.raises(InvalidArgs):
        build_worst_case(2, 2)
    with pytest.raises(InvalidArgs):
        build_worst_case(3, -1)


def test_random_dictionary_plain():
    d = random_dictionary(6, 10, seed=3)
    assert d.m == 6 and d.n == 10
    assert np.allclose(np.linalg.norm(d.atoms, axis=0), 1.0)
    d2 = random_dictionary(6, 10, seed=3)
    assert d.atoms.tobytes() == d2.atoms.tobytes()
    assert random_dictionary(6, 10, seed=4).atoms.tobytes() != d.atoms.tobytes()


def test_random_dictionary_square_target():
    # bisection between a random frame and an orthonormal one
    for seed in range(8):
        d = random_dictionary(16, 16, coherence_target=1.0 / 9.0, seed=seed)
        assert coherence(d) <= 1.0 / 9.0 + 1e-12


def test_random_dictionary_overcomplete_target():
    for seed in range(6):
        d = random_dictionary(10, 12, coherence_target=0.3, seed=seed)
        assert coherence(d) <= 0.3 + 1e-12
    # harder: below what a plain tight frame gives, needs the shrinkage route
    d = random_dictionary(20, 30, coherence_target=0.199, seed=1)
    assert coherence(d) <= 0.199 + 1e-12


def test_random_dictionary_unreachable():
    assert welch_bound(20, 30) == pytest.approx(np.sqrt(10.0 / (20.0 * 29.0)))
    with pytest.raises(TargetUnreachable):
        random_dictionary(20, 30, coherence_target=0.5 * welch_bound(20, 30), seed=0)
    with pytest.raises(TargetUnreachable):
        random_dictionary(20, 30, coherence_target=0.14, seed=0)  # beyond the generator
    with pytest.raises(InvalidArgs):
        random_dictionary(10, 12, coherence_target=-0.1, seed=0)


def test_save_load_roundtrip(tmp_path):
    d = random_dictionary(7, 9, seed=11)
    path = tmp_path / "dict.csv"
    save_dictionary(d, path)
    loaded, renorm = load_dictionary(path)
    assert not renorm
    assert loaded.atoms.tobytes() == d.atoms.tobytes()  # 17 digits round-trips


def test_load_dictionary_renormalizes(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("2,0\n0,1\n")
    d, renorm = load_dictionary(path)
    assert renorm
    assert np.allclose(d.atoms, np.eye(2))


def test_load_dictionary_rejects_bad_input(tmp_path):
    for text in ["nan,0\n0,1\n", "1,0\n0\n", "0,0\n0,1\n", ""]:
        path = tmp_path / "bad.csv"
        path.write_text(text)
        with pytest.raises(InvalidArgs):
            load_dictionary(path)


def test_vector_roundtrip(tmp_path):
    v = np.array([1.0, -2.25, 1e-17, 3.0])
    path = tmp_path / "v.csv"
    save_vector(v, path)
    w = load_vector(path)
    assert w.tobytes() == v.tobytes()
    path.write_text("1, 2,\t3\n")
    assert np.allclose(load_vector(path), [1.0, 2.0, 3.0])
    path.write_text("1,oops\n")
    with pytest.raises(InvalidArgs):
        load_vector(path)
