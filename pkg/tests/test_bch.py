from __future__ import annotations

import itertools
import pickle
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcss.bch import BchCode, DecodeFailure, RankDeficiencyWarning, berlekamp_decode, binary_check_matrix, syndromes
from qcss.gf2 import rank_gf2


def power_oracle(code: BchCode, k: int) -> int:
    """alpha^k by repeated shift-and-reduce, independent of the tables."""
    x = 1
    for _ in range(k % code.N):
        x <<= 1
        if x >> code.m:
            x ^= code.field.prim_poly
    return x


def odd_syndromes_oracle(code: BchCode, support) -> tuple[int, ...]:
    out = []
    for s in range(1, code.t + 1):
        acc = 0
        for i in support:
            acc ^= power_oracle(code, (2 * s - 1) * i)
        out.append(acc)
    return tuple(out)


def correctable(code: BchCode):
    for w in range(code.t + 1):
        yield from itertools.combinations(range(code.N), w)


def test_exhaustive_roundtrip_m4_t2(code_4_2):
    supports = list(correctable(code_4_2))
    assert len(supports) == 121
    for sup in supports:
        assert code_4_2.decode(code_4_2.syndromes(sup)) == sup


def test_syndromes_match_power_oracle(code_6_2):
    rng = np.random.default_rng(5)
    for _ in range(50):
        sup = tuple(sorted(rng.choice(code_6_2.N, 4, replace=False).tolist()))
        assert code_6_2.syndromes(sup).odd == odd_syndromes_oracle(code_6_2, sup)


def test_even_syndromes_are_squares(code_6_2):
    F = code_6_2.field
    syn = code_6_2.syndromes([1, 5, 22])
    full = syn.full
    for j in range(1, len(full) // 2 + 1):
        assert full[2 * j - 1] == F.mul(full[j - 1], full[j - 1])


def test_binary_matrix_encodes_syndromes(code_6_2):
    H = binary_check_matrix(code_6_2)
    assert H.shape == (code_6_2.t * code_6_2.m, code_6_2.N)
    rng = np.random.default_rng(0)
    for _ in range(30):
        e = (rng.random(code_6_2.N) < 0.1).astype(np.uint8)
        bits = H.astype(np.int64) @ e % 2
        odd = code_6_2.syndromes(np.flatnonzero(e)).odd
        packed = [int(sum(int(b) << p for p, b in enumerate(bits[s * code_6_2.m:(s + 1) * code_6_2.m])))
                  for s in range(code_6_2.t)]
        assert packed == list(odd)


@pytest.mark.parametrize("m,t", [(10, 2), (10, 6), (12, 4)])
def test_full_rank(m, t):
    code = BchCode.from_params(m, t)
    assert code.rank == code.M_z == t * m


def test_rank_deficiency_warns():
    # alpha^5 has order 3 in GF(16), so the third syndrome row block spans only 2 bits
    with pytest.warns(RankDeficiencyWarning):
        code = BchCode.from_params(4, 3)
    assert code.rank == rank_gf2(code.H) < 12


def test_syndrome_table_oracle_for_weight_three(code_4_2):
    table = {code_4_2.syndromes(s).odd: s for s in correctable(code_4_2)}
    assert len(table) == 121  # distinct syndromes for every correctable pattern
    failures = 0
    for sup in itertools.combinations(range(code_4_2.N), 3):
        syn = code_4_2.syndromes(sup)
        if syn.odd in table:
            assert code_4_2.decode(syn) == table[syn.odd]
        else:
            failures += 1
            with pytest.raises(DecodeFailure):
                code_4_2.decode(syn)
    assert failures > 0


def test_known_decode_failure(code_4_2):
    table = {code_4_2.syndromes(s).odd for s in correctable(code_4_2)}
    sup = next(s for s in itertools.combinations(range(15), 3) if code_4_2.syndromes(s).odd not in table)
    with pytest.raises(DecodeFailure):
        berlekamp_decode(code_4_2, code_4_2.syndromes(sup))


def test_linearity(code_6_2):
    a, b = {1, 4, 9, 30}, {4, 7, 62}
    sa, sb, sab = (code_6_2.syndromes(sorted(x)).odd for x in (a, b, a ^ b))
    assert sab == tuple(x ^ y for x, y in zip(sa, sb))


def test_decode_accepts_odd_syndrome_sequence(code_6_2):
    syn = code_6_2.syndromes([3, 40])
    assert code_6_2.decode(list(syn.odd)) == (3, 40)
    with pytest.raises(ValueError):
        code_6_2.decode([1, 2, 3])


def test_zero_syndrome_decodes_to_empty(code_6_2):
    assert code_6_2.syndromes([]).is_zero()
    assert code_6_2.decode(code_6_2.syndromes([])) == ()


def test_bad_inputs(code_4_2):
    with pytest.raises(IndexError):
        code_4_2.syndromes([15])
    with pytest.raises(ValueError):
        code_4_2.syndromes([2, 2])
    with pytest.raises(ValueError):
        BchCode.from_params(4, 0)
    with pytest.raises(ValueError):
        BchCode.from_params(3, 4)


def test_codeword_check(code_4_2):
    H = code_4_2.H
    # a codeword of the binary code: any element of the null space
    cw = next(c for w in range(5, 8) for c in itertools.combinations(range(15), w)
              if not (H[:, list(c)].sum(axis=1) % 2).any())
    assert code_4_2.is_codeword(cw)
    assert not code_4_2.is_codeword(cw[1:])


def test_pickle_roundtrip(code_6_2):
    clone = pickle.loads(pickle.dumps(code_6_2))
    assert clone.field == code_6_2.field and clone.t == code_6_2.t
    assert clone.decode(clone.syndromes([5])) == (5,)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([(8, 3), (9, 4), (10, 2), (10, 5), (11, 6)]), st.data())
def test_random_roundtrip(params, data):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RankDeficiencyWarning)
        code = _cached(*params)
    w = data.draw(st.integers(0, code.t))
    sup = data.draw(st.lists(st.integers(0, code.N - 1), min_size=w, max_size=w, unique=True))
    assert code.decode(code.syndromes(sup)) == tuple(sorted(sup))


_CODES: dict = {}


def _cached(m, t):
    if (m, t) not in _CODES:
        _CODES[m, t] = BchCode.from_params(m, t)
    return _CODES[m, t]


def test_syndromes_function_matches_method(code_6_2):
    assert syndromes(code_6_2, [0, 1]) == code_6_2.syndromes((1, 0))
