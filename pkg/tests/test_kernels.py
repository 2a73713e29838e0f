import numpy as np
import pytest
from hypothesis import given, strategies as st

from ellbeta import kernels
from ellbeta._kernels_py import odd_inverse

import oracles

BACKENDS = kernels.backends()
words = st.integers(0, oracles.MOD64 - 1)


def test_compiled_backend_present():
    # the build ships the extension; the pure fallback is always importable
    assert "python" in BACKENDS
    assert kernels.BACKEND in BACKENDS


@pytest.mark.parametrize("name", sorted(BACKENDS))
@given(a=st.lists(words, max_size=30), b=st.lists(words, max_size=30), n=st.integers(0, 40))
def test_mul_trunc_matches_naive(name, a, b, n):
    got = BACKENDS[name].mul_trunc(np.array(a, dtype=np.uint64), np.array(b, dtype=np.uint64), n)
    want = [x % oracles.MOD64 for x in oracles.convolve(a, b, n)]
    assert [int(x) for x in got] == want


@given(st.integers(0, oracles.MOD64 - 1).map(lambda x: x | 1))
def test_odd_inverse(x):
    assert (x * odd_inverse(x)) % oracles.MOD64 == 1
    with pytest.raises(ValueError):
        odd_inverse(2 * x)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")
@pytest.mark.parametrize("seed", range(6))
def test_eliminate_backends_agree(seed):
    rng = np.random.default_rng(seed)
    rows, cols = 9, 6
    base = rng.integers(0, 1 << 62, size=(rows, cols), dtype=np.uint64)
    base[:, 2] = base[:, 0] * np.uint64(4) + base[:, 1] * np.uint64(8)  # forces a deep pivot
    out = {}
    for name, mod in BACKENDS.items():
        M = base.copy()
        V = np.eye(cols, dtype=np.uint64)
        rank, perm, prow, vals = mod.eliminate(M, V, 64, 7)
        out[name] = (rank, perm.tolist(), prow.tolist(), vals.tolist(), M.tolist(), V.tolist())
    assert out["python"] == out["cython"]


@pytest.mark.parametrize("seed", range(4))
def test_eliminate_tracks_column_operations(seed):
    rng = np.random.default_rng(100 + seed)
    A = rng.integers(0, 1 << 62, size=(8, 5), dtype=np.uint64)
    M = A.copy()
    V = np.eye(5, dtype=np.uint64)
    rank, perm, prow, vals = kernels.eliminate(M, V, 64)
    assert rank == 5
    # the echelon form is A V and is lower triangular on the pivot rows
    assert np.array_equal(A @ V, M)
    for k, r in enumerate(prow):
        assert all(int(M[r, c]) == 0 for c in range(k + 1, 5))
        low = int(M[r, k])
        assert low and (low & -low) == 1 << int(vals[k])


def test_eliminate_rejects_wrong_dtype():
    with pytest.raises(TypeError):
        kernels.eliminate(np.zeros((2, 2), dtype=np.int64), None, 64)
