import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expcurves.errors import DomainError, InputError, PartialResultError
from expcurves.exact_numerics import AlgebraicNumber, BivariatePoly
from expcurves.pipeline import (
    CandidateZero,
    ExpFieldData,
    PipelineConfig,
    candidate_set,
    independence_report,
    is_candidate,
    kzeros,
    subsum_recursion,
    verify_candidates,
)
from expcurves.rou_sums import RootOfUnitySum, cyc_sum_is_zero


def data(poly, logs=(), exps=(), precision=256):
    return ExpFieldData.from_json(
        {"poly": poly, "log_generators": [{"log": a} for a in logs], "exp_values": list(exps), "precision": precision}
    )


# candidate_set


def test_xy_minus_two_log_two():
    d = data("X*Y - 2*c1", [2], [2])
    cands = candidate_set(d)
    assert list(cands) == [CandidateZero(1, 0, 0, (1,))]
    assert cands.bounds_used["N_rou"] >= 1 and cands.bounds_used["N_lat"] == 50
    [v] = verify_candidates(d, cands)
    assert v.status == "zero" and v.winding == 1
    assert mpmath.mpf(v.residual) < mpmath.mpf(10) ** -50


def test_no_generators_empty():
    assert list(candidate_set(data("X*Y - 1"))) == []
    assert list(candidate_set(data("Y - X"))) == []


def test_two_generators():
    d = data("X*Y - 3*c2", [2, 3], [2, 3])
    assert list(candidate_set(d)) == [CandidateZero(1, 0, 0, (0, 1))]


def test_square():
    d = data("X^2*Y - 2*c1^2", [2], [2])
    assert CandidateZero(1, 0, 0, (1,)) in candidate_set(d)


def test_no_zero_in_field():
    assert list(candidate_set(data("X*Y - c1 - c2", [2, 3], [2, 3]))) == []


def test_hypothesis_both_variables():
    with pytest.raises(InputError):
        candidate_set(data("Y - 2"))


def test_inconsistent_exp_value():
    with pytest.raises(InputError):
        data("X*Y - c1", [2], [3])


def test_torsion_cap_partial():
    with pytest.raises(PartialResultError) as info:
        candidate_set(data("X*Y - 2*c1", [2], [2]), PipelineConfig(torsion_cap=1))
    assert "stage1_order_bound" in info.value.partial


def test_bound_from_norm_bound():
    cands = candidate_set(data("X*Y - 2*c1", [2], [2]), PipelineConfig(delta=2, eta=3))
    assert cands.bounds_used["N_lat_source"] == "norm_bound"
    assert cands.bounds_used["scope"] == "bound-supplied"


def test_outside_w_exclusion():
    # f = z (e^z - 2): the row p_1 = X vanishes at z = 0
    d = data("X*Y - 2*X", [2], [2])
    report = kzeros(d)
    reasons = [e["reason"] for e in report["excluded"]]
    assert reasons


# verify_candidates


def test_verify_two_pi_i():
    # f = (z - 1)(e^z - 1) vanishes at 2 pi i; evaluation does not need irreducibility
    [v] = verify_candidates(data("X*Y - X - Y + 1"), [CandidateZero(1, 0, 1, ())])
    assert v.status == "zero"


def test_verify_nonzero():
    d = data("X*Y - 1", [2], [2])
    [v] = verify_candidates(d, [CandidateZero(1, 0, 0, (1,))])
    assert v.status == "nonzero"
    assert abs(mpmath.mpf(v.residual) - (2 * mpmath.log(2) - 1)) < 0.01


# soundness: the exact filter agrees with ball evaluation


@pytest.mark.parametrize(
    "poly,logs,exps",
    [("X*Y - 2*c1", [2], [2]), ("X*Y - 3*c2", [2, 3], [2, 3]), ("X^2*Y - 2*c1^2", [2], [2]), ("X*Y^2 - 4*c1", [2], [2])],
)
def test_filter_matches_evaluation(poly, logs, exps):
    d = data(poly, logs, exps)
    rng = random.Random(hash(poly) & 0xFFFF)
    from expcurves.pipeline import _Engine

    eng = _Engine(d, PipelineConfig())
    trials = 250
    for _ in range(trials):
        n = rng.randint(1, 12)
        k = rng.choice([k for k in range(n) if __import__("math").gcd(k, n) == 1])
        l = rng.randint(-3, 3)
        m = tuple(rng.randint(-3, 3) for _ in logs)
        if rng.random() < 0.1:
            n, k, l, m = 1, 0, 0, tuple(int(i == len(logs) - 1) for i in range(len(logs)))
        cand = CandidateZero(n, k, l, m)
        [v] = verify_candidates(d, [cand])
        assert v.status != "undecided"
        assert is_candidate(d, n, k, l, m, engine=eng) == (v.status == "zero"), cand


# subsum_recursion


def test_subsum_two_blocks():
    terms = [(1, 0), (-1, 0), (1, 0), (1, 1), (1, 2)]
    assert subsum_recursion(terms, order=3) == [(0, 1), (2, 3, 4)]


def test_subsum_single_block():
    assert subsum_recursion([(1, 0), (1, 1), (1, 2)], order=3) == [(0, 1, 2)]


def test_subsum_sixth_roots():
    terms = [(1, 1), (1, 5), (-1, 0), (2, 0), (-2, 0)]
    assert subsum_recursion(terms, order=6) == [(0, 1, 2), (3, 4)]


def test_subsum_exact_numbers():
    s2 = AlgebraicNumber.real_root(2, 2)
    assert subsum_recursion([s2, Fraction(3), -s2, Fraction(-3)]) == [(0, 2), (1, 3)]


def test_subsum_rejects_nonvanishing():
    with pytest.raises(DomainError):
        subsum_recursion([(1, 0), (1, 1)], order=5)


@settings(max_examples=60)
@given(st.lists(st.sampled_from([(1, 0), (1, 1), (1, 2), (-1, 0), (2, 0), (-1, 3), (1, 3), (1, 4), (1, 5)]), min_size=0, max_size=4), st.randoms())
def test_subsum_blocks_are_minimal(extra, rnd):
    # build a vanishing sum over Q = 6 from known vanishing pieces plus cancelling pairs
    pieces = [[(1, 0), (1, 2), (1, 4)], [(1, 1), (1, 5), (-1, 0)], [(1, 0), (1, 3)]]
    terms = [t for p in rnd.sample(pieces, rnd.randint(1, 3)) for t in p]
    for c, e in extra:
        terms += [(c, e), (-c, e)]
    rnd.shuffle(terms)
    blocks = subsum_recursion(terms, order=6)
    assert sorted(i for b in blocks for i in b) == list(range(len(terms)))
    for b in blocks:
        assert cyc_sum_is_zero(RootOfUnitySum(6, [terms[i] for i in b]))
        # no proper nonempty subset of the block vanishes
        for mask in range(1, (1 << len(b)) - 1):
            sub = [terms[b[i]] for i in range(len(b)) if mask >> i & 1]
            assert not cyc_sum_is_zero(RootOfUnitySum(6, sub)), (b, sub)


# independence_report


def test_independence_exp_minus_one():
    rep = independence_report(BivariatePoly.from_string("Y - 1"), (-1, 1, -8, 8), 3, 10**4, 256)
    assert len(rep["zeros"]) == 3
    kinds = {tuple(r["zeros"]): r for r in rep["relations"]}
    assert (1,) in kinds and kinds[(1,)]["coefficients"] == [0, 1]
    assert kinds[(1,)]["verification"].startswith("exact")
    # conjugate pair: z0 + z2 = 0
    assert (0, 2) in kinds and kinds[(0, 2)]["degree"] == 1
    for r in rep["relations"]:
        assert r["verification"].startswith(("exact", "2x precision"))


def test_independence_reducible_rejected():
    with pytest.raises(InputError):
        independence_report(BivariatePoly.from_string("Y^2 - 3*Y + 2"), (-1, 1, -1, 1), 2, 100, 128)


def test_independence_fixed_points_small():
    rep = independence_report(BivariatePoly.from_string("Y - X"), (0, 4, 0, 20), 2, 100, 256, max_zeros=3)
    assert rep["relations"] == []
    assert rep["heuristic_certificate"]
