"""Seeded desk-scale instance generators.

The genuine growth sequences are astronomically large, so every
branch-exhaustive property is exercised on small instances whose parameters
are built to satisfy the same entry conditions (possibility-count windows,
refinement preconditions, profile bounds).  All randomness flows from the
caller's ``random.Random``.
"""

from __future__ import annotations

import itertools
from random import Random

from .conditions import (NameOracle, ParamTriple, TruncCondition, poss_count,
                         possibilities)
from .creatures import Creature, full_creature
from .numeric import subset_count
from .products import (CoordinateSpace, ProductCondition, ProductNameOracle,
                       product_poss_count)
from .relational import FinRelSystem, TukeyPair


# ---------------------------------------------------------------------------
# creatures and relational systems


def random_creature(rng: Random, max_arena: int = 8, max_cap: int = 3) -> Creature:
    arena = rng.randint(2, max_arena)
    cap = rng.randint(1, max_cap)
    pool = []
    for k in range(cap + 1):
        pool.extend(itertools.combinations(range(arena), k))
    count = rng.randint(1, min(len(pool), 8))
    return Creature.of(arena, cap, rng.sample(pool, count))


def random_coloring(rng: Random, M: Creature, d: int):
    table = {m: rng.randrange(d) for m in M.sorted_members()}
    return lambda t: table[t]


def random_system(rng: Random, max_side: int = 6) -> FinRelSystem:
    nx, ny = rng.randint(1, max_side), rng.randint(1, max_side)
    rel = [[rng.random() < 0.5 for _ in range(ny)] for _ in range(nx)]
    return FinRelSystem.of(rel)


def tukey_instance(rng: Random, max_side: int = 6):
    """(R, R', pair) where rel' is defined so the pair is a connection:
    x' rel' y' iff every F-preimage of x' relates G(y')."""
    R = random_system(rng, max_side)
    nxp, nyp = rng.randint(1, max_side), rng.randint(1, max_side)
    F = tuple(rng.randrange(nxp) for _ in range(R.x_size))
    G = tuple(rng.randrange(R.y_size) for _ in range(nyp))
    rel = [[all(R.rel[x][G[yp]] for x in range(R.x_size) if F[x] == xp)
            for yp in range(nyp)] for xp in range(nxp)]
    return R, FinRelSystem.of(rel), TukeyPair(F, G)


# ---------------------------------------------------------------------------
# single-poset condition instances


def _random_cells(rng: Random, horizon: int, max_branches: int):
    """Per-level (arena, cap, creature); at least one split, branch count
    bounded."""
    cells, cs, hs = [], [], []
    count = 1
    split_budget = rng.randint(1, 3)
    for k in range(horizon):
        c = rng.randint(3, 5)
        h = rng.randint(1, 2)
        pool = []
        for sz in range(h + 1):
            pool.extend(itertools.combinations(range(c), sz))
        want_split = split_budget > 0 and rng.random() < 0.7
        if want_split and count * 3 <= max_branches:
            members = rng.sample(pool, rng.randint(2, min(3, len(pool))))
            split_budget -= 1
        else:
            members = [rng.choice(pool)]
        cells.append(Creature.of(c, h, members))
        cs.append(c)
        hs.append(h)
        count *= len(members)
    if all(len(cell.members) == 1 for cell in cells):
        k = rng.randrange(horizon)
        c, h = cs[k], hs[k]
        pool = []
        for sz in range(h + 1):
            pool.extend(itertools.combinations(range(c), sz))
        cells[k] = Creature.of(c, h, rng.sample(pool, 2))
    return cells, cs, hs


def _table_oracle(rng: Random, p: TruncCondition, profile, dep_cut):
    """x(k) drawn from a random table over the member indices below
    dep_cut(k)."""
    ordered = [cell.sorted_members() for cell in p.cells]
    tables = []
    for k in range(p.horizon):
        cut = dep_cut(k)
        keys = itertools.product(*(range(len(ordered[i])) for i in range(cut)))
        tables.append({key: rng.choice(profile[k]) for key in keys})

    def fn(branch):
        idx = tuple(ordered[i].index(branch[i]) for i in range(len(branch)))
        return tuple(tables[k][idx[:dep_cut(k)]] for k in range(p.horizon))
    return NameOracle(p, profile, fn)


def reading_instance(rng: Random, max_horizon: int = 5,
                     max_branches: int = 10 ** 4):
    """(p, nu) with nu read timely: x(k) may depend on levels up to the
    first split strictly above k.  d is sized for the refinement loop."""
    N = rng.randint(3, max_horizon)
    cells, cs, hs = _random_cells(rng, N, max_branches)
    splits = [k for k, cell in enumerate(cells) if len(cell.members) > 1]
    profile = tuple(tuple(range(rng.randint(1, 2))) for _ in range(N))
    ds = []
    count = 1
    for k in range(N):
        need = 2
        if k in splits:
            need = max(need, count + 1)
        prodA = 1
        for i in range(k):
            prodA *= len(profile[i])
        ds.append(max(need, prodA, 2))
        count *= len(cells[k].members)
    p = TruncCondition(ParamTriple(tuple(cs), tuple(hs), tuple(ds)), tuple(cells))

    def dep_cut(k):
        later = [n for n in splits if n > k]
        return (later[0] + 1) if later else N
    return p, _table_oracle(rng, p, profile, dep_cut)


def localize_instance(rng: Random, horizon: int = 3):
    """(p, nu, a, e) meeting the localisation windows; nu is read early
    (x(k) depends on levels <= k)."""
    N = horizon
    cells, cs, hs = _random_cells(rng, N, max_branches=200)
    splits = [k for k, cell in enumerate(cells) if len(cell.members) > 1]
    profile = tuple(tuple(range(rng.randint(1, 3))) for _ in range(N))
    a = tuple(len(profile[k]) + rng.randint(0, 1) for k in range(N))
    cdh = [subset_count(cs[k], hs[k]) for k in range(N)]
    e, ds = [], []
    count = 1
    for k in range(N):
        prod_cdh = 1
        prod_a = 1
        for i in range(k):
            prod_cdh *= cdh[i]
            prod_a *= a[i]
        ek = max(prod_cdh, count, 1)
        dk = max(2, prod_a)
        if k in splits:
            if rng.random() < 0.5:
                ek = max(ek, 2 * count * cdh[k])       # wide subcase
            else:
                dk = max(dk, 2 * count * a[k])         # narrow subcase
                ek = max(ek, count)                    # kcap >= 1
        e.append(ek)
        ds.append(dk)
        count *= len(cells[k].members)
    p = TruncCondition(ParamTriple(tuple(cs), tuple(hs), tuple(ds)), tuple(cells))
    nu = _table_oracle(rng, p, profile, lambda k: k + 1)
    return p, nu, a, tuple(e)


def antiloc_instance(rng: Random, horizon: int = 3):
    """(p, nu, a, e) with width-1 levels: a(k) counts the <=1-cells of the
    arena, e(k) = c(k) - 1, and nu encodes the branch's own chosen cell
    (empty cell -> 0, {j} -> j + 1)."""
    N = horizon
    cs = [rng.randint(2, 3)]
    for k in range(1, N):
        prev_cdh = 1
        for i in range(k):
            prev_cdh *= cs[i] + 1
        cs.append(prev_cdh + 1 + rng.randint(0, 2))
    hs = [1] * N
    cells = []
    count = 1
    split_budget = 2
    for k in range(N):
        if (split_budget > 0 and count * (cs[k] + 1) <= 60 and cs[k] <= 20
                and rng.random() < 0.8):
            cells.append(full_creature(cs[k], 1))
            split_budget -= 1
        else:
            j = rng.randrange(cs[k])
            cells.append(Creature.of(cs[k], 1, [[j]]))
        count *= len(cells[k].members)
    a = tuple(cs[k] + 1 for k in range(N))
    e = tuple(cs[k] - 1 for k in range(N))
    ds = []
    cnt = 1
    for k in range(N):
        prod_a = 1
        for i in range(k):
            prod_a *= a[i]
        ds.append(max(2, prod_a, 2 * cnt * a[k]))
        cnt *= len(cells[k].members)
    p = TruncCondition(ParamTriple(tuple(cs), tuple(hs), tuple(ds)), tuple(cells))
    profile = tuple(tuple(range(a[k])) for k in range(N))

    def fn(branch):
        out = []
        for k in range(N):
            cell = branch[k]
            out.append(0 if not cell else min(cell) + 1)
        return tuple(out)
    return p, NameOracle(p, profile, fn), a, e


def decode_cell(index: int):
    """Inverse of the width-1 encoding: 0 -> empty, j + 1 -> {j}."""
    return frozenset() if index == 0 else frozenset({index - 1})


# ---------------------------------------------------------------------------
# product instances


def product_instance(rng: Random, horizon: int = 3):
    """A modest two-coordinate condition with at most one split per level
    and small branch counts."""
    N = horizon
    owners = []
    for k in range(N):
        owners.append(rng.choice(["x", "y", None]))
    if all(o is None for o in owners):
        owners[rng.randrange(N)] = rng.choice(["x", "y"])
    cells = {"x": [], "y": []}
    cs = {"x": [], "y": []}
    hs = {"x": [], "y": []}
    count = 1
    for k in range(N):
        for xi in ("x", "y"):
            c = rng.randint(3, 5)
            h = rng.randint(1, 2)
            pool = []
            for sz in range(h + 1):
                pool.extend(itertools.combinations(range(c), sz))
            if owners[k] == xi and count * 3 <= 300:
                members = rng.sample(pool, rng.randint(2, min(3, len(pool))))
            else:
                members = [rng.choice(pool)]
            cells[xi].append(Creature.of(c, h, members))
            cs[xi].append(c)
            hs[xi].append(h)
            count *= len(members)
    triples = {}
    parts = {}
    counts = [1]
    for k in range(N):
        lv = len(cells["x"][k].members) * len(cells["y"][k].members)
        counts.append(counts[-1] * lv)
    for xi in ("x", "y"):
        d = tuple(max(2, 2 * counts[k] + 1) for k in range(N))
        triples[xi] = ParamTriple(tuple(cs[xi]), tuple(hs[xi]), d)
    space = CoordinateSpace.of({"x": "A", "y": "B"},
                               {"A": triples["x"], "B": triples["y"]})
    for xi in ("x", "y"):
        parts[xi] = TruncCondition(triples[xi], tuple(cells[xi]))
    return ProductCondition(space, parts)


def _product_table_oracle(rng: Random, p: ProductCondition, profile, dep_cut):
    ordered = {xi: [cell.sorted_members() for cell in p.parts[xi].cells]
               for xi in p.support}
    N = p.horizon

    def key_of(branch, cut):
        return tuple(tuple(ordered[xi][i].index(branch[pos][i])
                           for i in range(cut))
                     for pos, xi in enumerate(p.support))
    tables = []
    for k in range(N):
        cut = dep_cut(k)
        per_coord = [itertools.product(*(range(len(ordered[xi][i]))
                                         for i in range(cut)))
                     for xi in p.support]
        keys = itertools.product(*[list(pc) for pc in per_coord])
        tables.append({key: rng.choice(profile[k]) for key in keys})

    def fn(branch):
        return tuple(tables[k][key_of(branch, dep_cut(k))] for k in range(N))
    return ProductNameOracle(p, profile, fn)


def _widen_d(p: ProductCondition, floors) -> ProductCondition:
    """Raise every family's d(k) to at least floors[k]."""
    fams = {}
    for fam, triple in p.space.params:
        fams[fam] = ParamTriple(triple.c, triple.h,
                                tuple(max(dv, floors[k])
                                      for k, dv in enumerate(triple.d)))
    space = CoordinateSpace.of(dict(p.space.owner), fams)
    parts = {xi: TruncCondition(fams[space.family_of(xi)], p.parts[xi].cells)
             for xi in p.support}
    return ProductCondition(space, parts)


def product_reading_instance(rng: Random, horizon: int = 3):
    """(p, nu) on two coordinates, nu read early across the product."""
    p = product_instance(rng, horizon)
    profile = tuple(tuple(range(rng.randint(1, 3))) for _ in range(horizon))
    floors = []
    prod = 1
    for k in range(horizon):
        floors.append(prod)
        prod *= len(profile[k])
    p = _widen_d(p, floors)
    nu = _product_table_oracle(rng, p, profile, lambda k: k + 1)
    return p, nu


def product_catch_instance(rng: Random, horizon: int = 3):
    """(p, nu_x, B, xi): nu_x reads only the B coordinate, and xi has a
    norm->=1 level (full union) to catch at."""
    p = product_instance(rng, horizon)
    xi, beta = ("x", "y") if rng.random() < 0.5 else ("y", "x")
    # guarantee a catchable level on xi: replace one level by a full creature
    k0 = rng.randrange(horizon)
    bpart = p.parts[beta]
    bcells = list(bpart.cells)
    bcells[k0] = Creature(bcells[k0].arena, bcells[k0].cap,
                          frozenset({bcells[k0].sorted_members()[0]}))
    p = p.with_part(beta, TruncCondition(bpart.params, tuple(bcells)))
    part = p.parts[xi]
    cells = list(part.cells)
    cells[k0] = full_creature(part.params.c[k0], part.params.h[k0])
    p = p.with_part(xi, TruncCondition(part.params, tuple(cells)))
    assert p.is_modest()
    c_xi = p.parts[xi].params.c
    profile = tuple(tuple(range(c_xi[k])) for k in range(horizon))
    pos_b = p.support.index(beta)
    ordered = [cell.sorted_members() for cell in p.parts[beta].cells]
    tables = [{i: rng.randrange(c_xi[k])
               for i in range(len(ordered[k]))} for k in range(horizon)]

    def fn(branch):
        bb = branch[pos_b]
        return tuple(tables[k][ordered[k].index(bb[k])]
                     for k in range(horizon))
    return p, ProductNameOracle(p, profile, fn), {beta}, xi


def restricted_instance(rng: Random, horizon: int = 3):
    """(p, nu, C, a, e) for the restricted localisation: C holds one of the
    two coordinates; windows sized from the live possibility counts."""
    p = product_instance(rng, horizon)
    C = {rng.choice(p.support)}
    N = horizon
    profile = tuple(tuple(range(rng.randint(1, 3))) for _ in range(N))
    a = tuple(len(profile[k]) + rng.randint(0, 1) for k in range(N))
    counts = [1]
    for k in range(N):
        counts.append(product_poss_count(p, k))
    e = tuple(max(counts[k + 1], 1) for k in range(N))
    # room for the narrow refinement at splits owned outside C
    floors = [max(2 * counts[k] * a[k], counts[k]) for k in range(N)]
    p = _widen_d(p, floors)
    nu = _product_table_oracle(rng, p, profile, lambda k: k + 1)
    return p, nu, C, a, e
