import json
import random
from fractions import Fraction

import pytest

from expanderlab import (
    HOLDS,
    INCONCLUSIVE,
    REGISTRY,
    SLACK_ONLY,
    FieldCtx,
    FSet,
    check,
)
from expanderlab.errors import SideConditionViolated, UnknownRelation
from expanderlab.intervals import RatInterval
from expanderlab.verify import SLACK_KEYS, instance_digest
from helpers import PRIMES_TO_101, Q, random_fp_set, random_q_set

F7 = FieldCtx.prime(7)


def test_unknown_relation():
    with pytest.raises(UnknownRelation):
        check("R99", A=FSet(F7, [1]))


def test_missing_input():
    with pytest.raises(SideConditionViolated):
        check("R1", A=FSet(F7, [1]), B=FSet(F7, [1]))


def test_r1_example():
    s = FSet(F7, [0, 1])
    rep = check("R1", A=s, B=s, C=s)
    assert rep.verdict == HOLDS
    assert rep.lhs == 3 and rep.rhs == Fraction(9, 2)
    assert rep.slack == Fraction(2, 3)


def test_r1_random():
    rng = random.Random(40)
    for _ in range(60):
        p = rng.choice(PRIMES_TO_101)
        a = random_fp_set(rng, p, rng.randint(2, 8), exclude=())
        b = random_fp_set(rng, p, rng.randint(2, 8), exclude=())
        c = random_fp_set(rng, p, rng.randint(2, 8), exclude=())
        assert check("R1", A=a, B=b, C=c).verdict == HOLDS


def test_r2_r3_r4_random_mixed():
    rng = random.Random(41)
    for _ in range(40):
        if rng.random() < 0.5:
            p = rng.choice(PRIMES_TO_101)
            a = random_fp_set(rng, p, rng.randint(2, min(8, p - 4)),
                              exclude=(0, 1, -1))
        else:
            a = random_q_set(rng, rng.randint(2, 8))
        for name in ("R2", "R3", "R4"):
            assert check(name, A=a).verdict == HOLDS, (name, a)


def test_r5_example_and_random():
    a = FSet(Q, [2, 3])
    rep = check("R5", A=a, B=a)
    assert rep.verdict == HOLDS
    assert isinstance(rep.lhs, RatInterval) and isinstance(rep.rhs, RatInterval)
    rng = random.Random(42)
    for _ in range(25):
        x = random_q_set(rng, rng.randint(2, 7))
        y = random_q_set(rng, rng.randint(2, 7))
        assert check("R5", A=x, B=y).verdict == HOLDS


def test_r5_survives_tiny_precision_cap():
    # at the cap the widest achieved enclosure is still compared; the verdict
    # is Holds if it separates and Inconclusive otherwise, never a crash
    a = FSet(Q, [2, 3, 5])
    rep = check("R5", A=a, B=FSet(Q, [2, 3]), cap=8)
    assert rep.verdict in (HOLDS, INCONCLUSIVE)


def test_r6_identity():
    rng = random.Random(43)
    for _ in range(40):
        p = rng.choice(PRIMES_TO_101)
        a = random_fp_set(rng, p, rng.randint(1, 8), exclude=(0,))
        b = random_fp_set(rng, p, rng.randint(1, 8), exclude=(0,))
        rep = check("R6", A=a, B=b)
        assert rep.verdict == HOLDS and rep.slack == 1


def test_r6_side_condition():
    with pytest.raises(SideConditionViolated):
        check("R6", A=FSet(F7, [0, 1]), B=FSet(F7, [1]))


def test_r7_delegates():
    a = FSet(Q, [2, 3])
    rep = check("R7", A=a, B=a, t=1)
    assert rep.verdict == HOLDS
    assert rep.lhs == 6


def test_r3_side_condition_one():
    with pytest.raises(SideConditionViolated):
        check("R3", A=FSet(Q, [1, 2, 3]))


def test_slack_only_relations():
    a = FSet(Q, [2, 3, 5])
    b = FSet(Q, [7, 11])
    produced = {}
    produced["R8"] = check("R8", A=a, B=b, epsilon=Fraction(1, 4))
    produced["R9"] = check("R9", A=a, B=b, t=1)
    for name in ("R10", "R11", "R12", "R13", "R14"):
        produced[name] = check(name, A=a)
    for name, rep in produced.items():
        assert rep.verdict == SLACK_ONLY, name
        slack = rep.slack
        if isinstance(slack, RatInterval):
            assert slack.lo > 0 and slack.hi < Fraction(10 ** 12)
        else:
            assert 0 < slack < Fraction(10 ** 12)


def test_slack_keys_cover_shapes():
    assert set(SLACK_KEYS) == {"R8", "R9", "R10", "R11", "R12", "R13", "R14"}


def test_digest_depends_on_inputs():
    a = FSet(F7, [1, 2])
    b = FSet(F7, [1, 3])
    d1 = instance_digest(relation="R6", A=a, B=a)
    d2 = instance_digest(relation="R6", A=a, B=b)
    d3 = instance_digest(relation="R6", A=a, B=a)
    assert d1 != d2 and d1 == d3


def test_report_json_shape():
    rep = check("R6", A=FSet(F7, [1, 2]), B=FSet(F7, [1, 2]))
    doc = rep.to_json()
    assert set(doc) == {"name", "verdict", "lhs", "rhs", "slack",
                        "instance_digest", "notes"}
    json.dumps(doc)  # serialisable
    rep5 = check("R5", A=FSet(Q, [2, 3]), B=FSet(Q, [2, 3]))
    doc5 = rep5.to_json()
    assert set(doc5["lhs"]) == {"lo", "hi"}


def test_registry_descriptions_exist():
    for name, spec in REGISTRY.items():
        assert spec.description and spec.inputs
