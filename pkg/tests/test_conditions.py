import itertools
from random import Random

import pytest

from creaturelab.conditions import (
    NameOracle,
    ParamTriple,
    PreconditionError,
    TruncCondition,
    and_restrict,
    branch_slalom,
    branches,
    catch_real,
    check_reading,
    early_read,
    fuse,
    localize,
    order_check,
    poss_count,
    possibilities,
    thin,
    validate,
)
from creaturelab.creatures import Creature, full_creature, norm
from creaturelab.toys import localize_instance, reading_instance


def _cond(cells_spec, d=None):
    """Build a condition from [(arena, cap, members), ...]."""
    c = tuple(sp[0] for sp in cells_spec)
    h = tuple(sp[1] for sp in cells_spec)
    if d is None:
        d = tuple(max(2, 2 * len(sp[2])) for sp in cells_spec)
    cells = tuple(Creature.of(sp[0], sp[1], sp[2]) for sp in cells_spec)
    return TruncCondition(ParamTriple(c, h, tuple(d)), cells)


P3 = _cond([(3, 1, [[0], [1]]),          # split
            (4, 2, [[0, 1]]),            # singleton
            (3, 2, [[0], [1, 2], []])])  # split


def test_shape_and_splits():
    assert P3.horizon == 3
    assert P3.split_levels() == [0, 2]
    assert P3.s(0) == 0 and P3.s(1) == 2
    with pytest.raises(ValueError):
        TruncCondition(P3.params, P3.cells[:2])


def test_possibility_counts():
    assert poss_count(P3, -1) == 1
    assert poss_count(P3, 0) == 2
    assert poss_count(P3, 2) == 6
    assert len(branches(P3)) == 6
    assert len(possibilities(P3, 1)) == 2


def test_and_restrict_prefix():
    eta = (frozenset({1}),)
    q = and_restrict(P3, eta)
    assert q.cells[0].members == frozenset({frozenset({1})})
    assert q.cells[1:] == P3.cells[1:]
    with pytest.raises(ValueError):
        and_restrict(P3, (frozenset({2}),))


def test_order_check_modes():
    q = and_restrict(P3, (frozenset({1}),))
    assert order_check(q, P3)
    assert not order_check(P3, q)
    # freezing through the 0th split: q changed level 0, p3 kept it
    assert order_check(P3, P3, ("at_n", 0))
    assert not order_check(q, P3, ("at_n", 0))
    # q's 0th split is level 2, so the freeze covers levels 0..2
    r = TruncCondition(q.params, q.cells)
    assert order_check(r, q, ("at_n", 0))


def test_validate_star_rank():
    rep = validate(P3)
    assert rep.valid
    assert rep.split_levels == [0, 2]
    assert rep.star_rank >= 0


def test_fuse_takes_blocks_from_the_chain():
    base = _cond([(3, 1, [[0], [1], [2]]),
                  (3, 1, [[0], [1], [2]]),
                  (3, 1, [[0], [1], [2]])])
    second = TruncCondition(base.params,
                            (base.cells[0],
                             Creature.of(3, 1, [[0], [1]]),
                             Creature.of(3, 1, [[2]])))
    fused = fuse([base, second])
    assert fused.cells[0] == base.cells[0]
    assert fused.cells[1] == second.cells[1]
    assert fused.cells[2] == second.cells[2]
    with pytest.raises(PreconditionError):
        fuse([_cond([(3, 1, [[0]])])])  # no split at all


def test_thin_respects_gbound_and_staircase():
    base = _cond([(3, 1, [[0], [1], [2]]),
                  (3, 1, [[0], [1], [2]]),
                  (3, 1, [[0], [1], [2]])], d=(6, 6, 6))
    q = thin(base, [2, 2, 10])
    counts = [len(cell.members) for cell in q.cells]
    # below every retained split the possibility count stayed under gbound
    running = 1
    for level, cnt in enumerate(counts):
        if cnt > 1:
            assert running < [2, 2, 10][level]
        running *= cnt
    assert q.split_levels()  # something was retained
    assert all(q.cells[i].members <= base.cells[i].members for i in range(3))


def test_catch_real_freezes_a_covering_level():
    p = _cond([(3, 1, [[0], [1], [2]]),    # norm >= 1
               (4, 2, [[0, 1]])])          # not covering
    q, k = catch_real(p, [2, 0])
    assert k == 0
    assert q.cells[0].members == frozenset({frozenset({2})})
    with pytest.raises(PreconditionError):
        catch_real(p, [2, 0], n0=1)


def test_name_oracle_from_table_and_profile_guard():
    table = {}
    for i, b in enumerate(branches(P3)):
        key = ",".join(str([cell.sorted_members() for cell in
                            P3.cells][n].index(b[n])) for n in range(3))
        table[key] = (i % 2, 0, i % 3)
    nu = NameOracle.from_table(P3, [(0, 1), (0,), (0, 1, 2)], table)
    for b in branches(P3):
        assert len(nu.eval(b)) == 3
    bad = NameOracle(P3, ((0,), (0,), (0,)), lambda b: (9, 0, 0))
    with pytest.raises(ValueError):
        bad.eval(branches(P3)[0])


Q3 = _cond([(3, 1, [[0]]),
            (3, 1, [[0], [1]]),
            (3, 1, [[0], [1]])], d=(4, 4, 4))


def test_check_reading_timely_vs_early():
    # x(0) copies the level-1 choice: decided at the split, not before it
    prof = ((0, 1), (0,), (0,))
    nu = NameOracle(Q3, prof, lambda b: (min(b[1]), 0, 0))
    assert check_reading(Q3, nu, "timely")
    assert not check_reading(Q3, nu, "early")
    const = NameOracle(Q3, prof, lambda b: (0, 0, 0))
    assert check_reading(Q3, const, "early")
    with pytest.raises(ValueError):
        check_reading(Q3, const, "late")


def test_early_read_decides_strictly_below_each_level():
    rng = Random(1234)
    for _ in range(60):
        p, nu = reading_instance(rng)
        q = early_read(p, nu)
        assert check_reading(q, nu, "early")
        assert all(q.cells[i].members <= p.cells[i].members
                   for i in range(p.horizon))
        for k in p.split_levels():
            m = poss_count(q, k - 1)
            lhs = norm(p.cells[k]) + 1
            rhs = (p.params.d[k] ** m) * (norm(q.cells[k]) + 1)
            assert lhs <= rhs


def test_early_read_rejects_untimely_names():
    # x(0) reads the level-2 choice, above the level-1 split
    prof = ((0, 1), (0,), (0,))
    nu = NameOracle(Q3, prof, lambda b: (min(b[2]), 0, 0))
    with pytest.raises(PreconditionError):
        early_read(Q3, nu)


def test_localize_slalom_width_and_membership():
    rng = Random(77)
    for _ in range(60):
        p, nu, a, e = localize_instance(rng)
        q, phi = localize(p, nu, a, e)
        assert all(len(phi.cells[k]) <= e[k] for k in range(p.horizon))
        assert all(q.cells[i].members <= p.cells[i].members
                   for i in range(p.horizon))
        for b in branches(q):
            v = nu.eval(b)
            assert all(v[k] in phi.cells[k] for k in range(p.horizon))


def test_localize_rejects_window_violations():
    rng = Random(78)
    p, nu, a, e = localize_instance(rng)
    with pytest.raises(PreconditionError):
        localize(p, nu, a, tuple(0 for _ in e))


def test_branch_slalom_shape():
    b = branches(P3)[0]
    S = branch_slalom(P3, b)
    assert S.c == P3.params.c and S.cells == b


def test_condition_json_roundtrip():
    assert TruncCondition.from_json(P3.to_json()) == P3
