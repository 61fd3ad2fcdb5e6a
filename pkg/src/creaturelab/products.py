"""Finite-support products of the level-creature posets.

A product condition carries one truncated condition per coordinate over a
shared horizon.  Modesty (at most one coordinate splitting per level) makes
product splits linearly ordered, so the single-poset fusion, reading and
localisation algorithms lift coordinate-wise.  Names over products are again
total functions of full product branches, checked exhaustively.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod

from .conditions import (BRANCH_CAP, POSS_CAP, ParamTriple, PreconditionError,
                         TruncCondition, branches, order_check, possibilities)
from .creatures import Creature, bigness_refine, norm, range_refine
from .numeric import subset_count


@dataclass(frozen=True)
class CoordinateSpace:
    """Index set of coordinates, each owned by a parameter family."""

    coords: tuple[str, ...]
    owner: tuple[tuple[str, str], ...]          # coord -> family label
    params: tuple[tuple[str, ParamTriple], ...]  # family label -> parameters

    def __post_init__(self):
        own = dict(self.owner)
        fams = dict(self.params)
        if set(own) != set(self.coords):
            raise ValueError("owner map must cover exactly the coordinates")
        if not set(own.values()) <= set(fams):
            raise ValueError("owner targets an unknown family")
        horizons = {t.horizon for t in fams.values()}
        if len(horizons) > 1:
            raise ValueError("families must share a horizon")

    @staticmethod
    def of(owner: dict, params: dict) -> "CoordinateSpace":
        return CoordinateSpace(tuple(sorted(owner)),
                               tuple(sorted(owner.items())),
                               tuple(sorted(params.items())))

    def family_of(self, coord: str) -> str:
        return dict(self.owner)[coord]

    def triple_of(self, coord: str) -> ParamTriple:
        return dict(self.params)[self.family_of(coord)]

    @property
    def horizon(self) -> int:
        return dict(self.params)[self.params[0][0]].horizon


@dataclass
class ProductCondition:
    space: CoordinateSpace
    parts: dict[str, TruncCondition]

    def __post_init__(self):
        for xi, part in self.parts.items():
            if xi not in self.space.coords:
                raise ValueError(f"coordinate {xi!r} outside the space")
            if part.params != self.space.triple_of(xi):
                raise ValueError(f"part {xi!r} disagrees with its family")

    @property
    def support(self) -> tuple[str, ...]:
        return tuple(sorted(self.parts))

    @property
    def horizon(self) -> int:
        return self.space.horizon

    def splitters(self, level: int) -> list[str]:
        return [xi for xi in self.support
                if len(self.parts[xi].cells[level].members) > 1]

    def is_modest(self) -> bool:
        return all(len(self.splitters(level)) <= 1
                   for level in range(self.horizon))

    def split_levels(self) -> list[tuple[int, str]]:
        """(level, owning coordinate) per product split, ascending; only
        meaningful on modest conditions."""
        out = []
        for level in range(self.horizon):
            for xi in self.splitters(level):
                out.append((level, xi))
        return out

    def s(self, n: int) -> int:
        return self.split_levels()[n][0]

    def with_part(self, xi: str, part: TruncCondition) -> "ProductCondition":
        parts = dict(self.parts)
        parts[xi] = part
        return ProductCondition(self.space, parts)

    def to_json(self) -> dict:
        fams = dict(self.space.params)
        return {"coords": {xi: {"owner": self.space.family_of(xi)}
                           for xi in self.space.coords},
                "families": {fam: {"c": list(t.c), "h": list(t.h),
                                   "d": list(t.d)}
                             for fam, t in sorted(fams.items())},
                "parts": {xi: self.parts[xi].to_json()
                          for xi in self.support}}

    @staticmethod
    def from_json(obj) -> "ProductCondition":
        fams = {fam: ParamTriple(tuple(v["c"]), tuple(v["h"]), tuple(v["d"]))
                for fam, v in obj["families"].items()}
        owner = {xi: v["owner"] for xi, v in obj["coords"].items()}
        space = CoordinateSpace.of(owner, fams)
        parts = {xi: TruncCondition.from_json(v)
                 for xi, v in obj["parts"].items()}
        return ProductCondition(space, parts)


# ---------------------------------------------------------------------------
# modesty and possibilities


def modest_refine(p: ProductCondition) -> ProductCondition:
    """Resolve split collisions: at each level with several splitting
    coordinates, keep the round-robin-preferred one, collapse the rest to
    their first canonical member.  Support is unchanged."""
    support = p.support
    if len(support) <= 1:
        return p
    parts = {xi: list(p.parts[xi].cells) for xi in support}
    pointer = 0
    for level in range(p.horizon):
        splitters = p.splitters(level)
        if not splitters:
            continue
        ranked = sorted(splitters,
                        key=lambda xi: (support.index(xi) - pointer) % len(support))
        keep = ranked[0]
        pointer = (support.index(keep) + 1) % len(support)
        for xi in splitters:
            if xi != keep:
                cell = p.parts[xi].cells[level]
                parts[xi][level] = Creature(
                    cell.arena, cell.cap,
                    frozenset({cell.sorted_members()[0]}))
    out = ProductCondition(
        p.space, {xi: TruncCondition(p.parts[xi].params, tuple(parts[xi]))
                  for xi in support})
    if not out.is_modest():
        raise PreconditionError("refinement failed to reach modesty")
    return out


def product_possibilities(p: ProductCondition, k: int) -> list[tuple]:
    """Selections of one member per level <= k for every coordinate, as
    tuples aligned with sorted support.  k = -1 yields one possibility."""
    pools = [possibilities(p.parts[xi], k) for xi in p.support]
    if prod(len(pool) for pool in pools) > POSS_CAP:
        raise ValueError("possibility enumeration cap exceeded")
    return [tuple(sel) for sel in itertools.product(*pools)]


def product_poss_count(p: ProductCondition, k: int) -> int:
    return prod(len(cell.members)
                for xi in p.support for cell in p.parts[xi].cells[:k + 1])


def product_branches(p: ProductCondition) -> list[tuple]:
    if product_poss_count(p, p.horizon - 1) > BRANCH_CAP:
        raise ValueError("branch enumeration cap exceeded")
    return product_possibilities(p, p.horizon - 1)


def product_restrict(p: ProductCondition, eta: tuple) -> ProductCondition:
    """Freeze the levels covered by the product possibility eta."""
    from .conditions import and_restrict
    parts = dict(p.parts)
    for xi, sel in zip(p.support, eta):
        parts[xi] = and_restrict(parts[xi], sel)
    return ProductCondition(p.space, parts)


def product_order_check(q: ProductCondition, p: ProductCondition,
                        mode="plain") -> bool:
    """q extends p coordinate-wise on supp(p) (supports may grow).  Mode
    ("at_n", n, F) freezes, for each coordinate in F, all levels up to and
    including q's n-th product split (the whole horizon if q has none)."""
    if not set(p.support) <= set(q.support):
        return False
    if not all(order_check(q.parts[xi], p.parts[xi]) for xi in p.support):
        return False
    if mode == "plain":
        return True
    tag, n, F = mode
    if tag != "at_n":
        raise ValueError(f"unknown mode {mode!r}")
    splits = q.split_levels()
    frozen_top = splits[n][0] if n < len(splits) else q.horizon - 1
    for xi in F:
        if xi not in p.support:
            continue
        if any(q.parts[xi].cells[i].members != p.parts[xi].cells[i].members
               for i in range(frozen_top + 1)):
            return False
    return True


# ---------------------------------------------------------------------------
# fusion and scheduling


def product_fuse(chain) -> ProductCondition:
    """Assemble one condition from a chain of (p_n, F_n): level blocks
    (f(n-1), f(n)] come from p_n, where f(n) is its n-th product split;
    coordinates entering at stage n_xi contribute from that stage onward."""
    if not chain:
        raise ValueError("empty chain")
    L = len(chain)
    for n in range(L - 1):
        pn, Fn = chain[n]
        if not set(Fn) <= set(chain[n + 1][1]):
            raise PreconditionError(f"frozen sets shrink at stage {n + 1}")
        if not product_order_check(chain[n + 1][0], pn, ("at_n", n, Fn)):
            raise PreconditionError(
                f"chain link {n + 1} does not extend link {n} "
                f"with the stage-{n} freeze")
    f = [-1]
    for n, (pn, _) in enumerate(chain):
        splits = pn.split_levels()
        if len(splits) <= n:
            raise PreconditionError(
                f"chain element {n} has fewer than {n + 1} product splits")
        f.append(splits[n][0])
    space = chain[0][0].space
    entry = {}
    for n, (_, Fn) in enumerate(chain):
        for xi in Fn:
            entry.setdefault(xi, n)
    support = sorted(set().union(*(set(pn.support) for pn, _ in chain)))
    N = space.horizon
    parts = {}
    for xi in support:
        n_xi = entry.get(xi, L - 1)
        cells = []
        for k in range(N):
            for n in range(L):
                if f[n] < k <= f[n + 1]:
                    stage = n
                    break
            else:
                stage = L - 1
            stage = max(stage, n_xi)
            src = chain[stage][0]
            while xi not in src.parts:
                stage += 1
                src = chain[stage][0]
            cells.append(src.parts[xi].cells[k])
        parts[xi] = TruncCondition(space.triple_of(xi), tuple(cells))
    q = ProductCondition(space, parts)
    for n, (pn, Fn) in enumerate(chain):
        if not product_order_check(q, pn, ("at_n", n, Fn)):
            raise PreconditionError(f"fusion does not honour stage {n}")
    return q


def schedule_plan(n: int) -> dict:
    """Stage-by-stage split ownership: stage j+1 preserves the old splits,
    revisits coordinates 0..j once each, then gives coordinate j+1 its first
    split and j+1 further ones.  |L_j| = (j+1)^2."""
    if n > 10:
        raise ValueError("bookkeeping scale capped at 10")
    owners = [0]
    m = [0]
    sizes = [1]
    for j in range(n):
        owners.extend(range(j + 1))        # one revisit of each old coord
        owners.append(j + 1)               # the new coordinate's first split
        owners.extend([j + 1] * (j + 1))   # and its further splits
        m.append(len(owners) - 1)
        sizes.append(len(owners))
    for j in range(n + 1):
        assert sizes[j] == (j + 1) ** 2
    return {"n": n, "m": m, "sizes": sizes, "owners": owners}


# ---------------------------------------------------------------------------
# names over products


@dataclass
class ProductNameOracle:
    """Total map from full product branches of ``base`` to value tuples,
    one value per level, drawn from ``profile``."""

    base: ProductCondition
    profile: tuple[tuple, ...]
    fn: object

    def __post_init__(self):
        self._cache = {}

    def eval(self, branch: tuple) -> tuple:
        if branch in self._cache:
            return self._cache[branch]
        out = tuple(self.fn(branch))
        if len(out) != self.base.horizon:
            raise ValueError("oracle must return one value per level")
        for k, v in enumerate(out):
            if v not in self.profile[k]:
                raise ValueError(f"oracle value {v!r} outside profile at level {k}")
        self._cache[branch] = out
        return out

    @staticmethod
    def from_table(base: "ProductCondition", profile,
                   table: dict) -> "ProductNameOracle":
        """Table keyed by the canonical branch key: per coordinate the
        comma-joined member indices, coordinates joined by '|'."""
        def fn(branch):
            return table[branch_key(base, branch)]
        return ProductNameOracle(base, tuple(tuple(a) for a in profile), fn)


def branch_key(p: ProductCondition, branch: tuple,
               coords=None) -> str:
    """Canonical string key of a product branch (optionally restricted)."""
    parts = []
    for pos, xi in enumerate(p.support):
        if coords is not None and xi not in coords:
            continue
        ordered = [cell.sorted_members() for cell in p.parts[xi].cells]
        parts.append(",".join(str(ordered[k].index(branch[pos][k]))
                              for k in range(len(branch[pos]))))
    return "|".join(parts)


def _check_product_compat(p: ProductCondition, nu: ProductNameOracle):
    base = nu.base
    if p.support != base.support:
        raise PreconditionError("oracle base support differs")
    if not product_order_check(p, base):
        raise PreconditionError("condition is not an extension of the oracle base")


def _cut(branch: tuple, k: int) -> tuple:
    return tuple(b[:k] for b in branch)


def product_check_reading(p: ProductCondition, nu: ProductNameOracle,
                          mode: str) -> bool:
    """timely: all selections up to each product split level k fix the first
    k values; early: selections strictly below every level fix the prefix."""
    _check_product_compat(p, nu)
    brs = product_branches(p)
    vals = {b: nu.eval(b) for b in brs}
    if mode == "timely":
        cuts = [(level, level + 1) for level, _ in p.split_levels()]
    elif mode == "early":
        cuts = [(k, k) for k in range(1, p.horizon + 1)]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    for k, cut in cuts:
        seen = {}
        for b in brs:
            pre = vals[b][:k]
            if seen.setdefault(_cut(b, cut), pre) != pre:
                return False
    return True


def _decided_product_prefix(p: ProductCondition, eta: tuple, k: int,
                            nu: ProductNameOracle) -> tuple:
    pools = []
    for xi, sel in zip(p.support, eta):
        part = p.parts[xi]
        coord_pools = [[frozenset(t)] for t in sel]
        coord_pools += [cell.sorted_members()
                        for cell in part.cells[len(sel):]]
        pools.append([tuple(b) for b in itertools.product(*coord_pools)])
    out = None
    for branch in itertools.product(*pools):
        pre = nu.eval(tuple(branch))[:k]
        if out is None:
            out = pre
        elif out != pre:
            raise PreconditionError(f"branches disagree on the first {k} values")
    return out


def _decided_product_value(p, eta, k, nu):
    return _decided_product_prefix(p, eta, k + 1, nu)[k]


def _poke(eta: tuple, pos: int, level_value) -> tuple:
    """Extend coordinate ``pos``'s selection in eta by one level."""
    return tuple(sel + (level_value,) if i == pos else sel
                 for i, sel in enumerate(eta))


def product_early_read(p: ProductCondition,
                       nu: ProductNameOracle) -> ProductCondition:
    """Shrink each product split's owning cell by bigness so the name's
    prefix is decided strictly below every level; other coordinates are
    untouched."""
    _check_product_compat(p, nu)
    if not p.is_modest():
        raise PreconditionError("condition is not modest")
    if not product_check_reading(p, nu, "timely"):
        raise PreconditionError("condition does not read the name timely")
    q = p
    for k, xi in p.split_levels():
        d = q.space.triple_of(xi).d[k]
        if product_poss_count(q, k - 1) >= d:
            raise PreconditionError(f"|poss| >= d at split level {k}")
        if prod(len(a) for a in nu.profile[:k]) > d:
            raise PreconditionError(f"value-space product exceeds d at level {k}")
        pos = q.support.index(xi)
        M = q.parts[xi].cells[k]
        for eta in product_possibilities(q, k - 1):
            prefix_of = {t: _decided_product_prefix(q, _poke(eta, pos, t), k, nu)
                         for t in M.sorted_members()}
            index = {}
            for t in M.sorted_members():
                index.setdefault(prefix_of[t], len(index))
            if len(index) > d:
                raise PreconditionError(f"more decision classes than d at level {k}")
            _, M = bigness_refine(M, lambda t: index[prefix_of[t]], d)
        cells = list(q.parts[xi].cells)
        cells[k] = M
        q = q.with_part(xi, TruncCondition(q.parts[xi].params, tuple(cells)))
    if not product_check_reading(q, nu, "early"):
        raise PreconditionError("early agreement failed after refinement")
    return q


def bounding_extract(q: ProductCondition, nu: ProductNameOracle) -> tuple:
    """f(k) = max of the values the name can take at level k; every branch
    is re-verified to stay below f pointwise."""
    if not (product_check_reading(q, nu, "early")
            or product_check_reading(q, nu, "timely")):
        raise PreconditionError("condition reads the name neither early nor timely")
    brs = product_branches(q)
    vals = [nu.eval(b) for b in brs]
    f = tuple(max(v[k] for v in vals) for k in range(q.horizon))
    for v in vals:
        assert all(v[k] <= f[k] for k in range(q.horizon))
    return f


# ---------------------------------------------------------------------------
# catching and restricted localisation


def _depends_only_on(p: ProductCondition, nu: ProductNameOracle,
                     coords) -> bool:
    """Does the name factor through the given coordinates' branches?"""
    idx = [i for i, xi in enumerate(p.support) if xi in coords]
    seen = {}
    for b in product_branches(p):
        key = tuple(b[i] for i in idx)
        v = nu.eval(b)
        if seen.setdefault(key, v) != v:
            return False
    return True


def product_catch(p: ProductCondition, nu_x: ProductNameOracle, B, xi: str,
                  n0: int = 0):
    """Freeze coordinate xi at some level k >= n0 of norm >= 1 to a member
    containing the (B-decided) value x(k); the B coordinates collapse to
    their first canonical branch so x is fully decided."""
    _check_product_compat(p, nu_x)
    B = set(B)
    if xi in B:
        raise PreconditionError("target coordinate cannot carry the name")
    if xi not in p.support:
        raise PreconditionError(f"coordinate {xi!r} outside the support")
    if not _depends_only_on(p, nu_x, B):
        raise PreconditionError(
            "dependence leak: the name reads coordinates outside B")
    parts = dict(p.parts)
    for beta in B:
        part = parts[beta]
        cells = tuple(Creature(cell.arena, cell.cap,
                               frozenset({cell.sorted_members()[0]}))
                      for cell in part.cells)
        parts[beta] = TruncCondition(part.params, cells)
    q = ProductCondition(p.space, parts)
    x = nu_x.eval(product_branches(q)[0])
    target = q.parts[xi]
    for k in range(n0, q.horizon):
        covered = frozenset().union(*target.cells[k].members)
        if len(covered) != target.cells[k].arena:
            continue
        for t in target.cells[k].sorted_members():
            if x[k] in t:
                cells = list(target.cells)
                cells[k] = Creature(target.cells[k].arena,
                                    target.cells[k].cap, frozenset({t}))
                q = q.with_part(xi, TruncCondition(target.params, tuple(cells)))
                pos = q.support.index(xi)
                for b in product_branches(q):
                    assert nu_x.eval(b)[k] in b[pos][k]
                return q, k
    raise PreconditionError(f"no level >= {n0} of norm >= 1 within the horizon")


@dataclass
class RestrictedName:
    """phi as an extensional map: per level, a dict from restricted branches
    (the C-coordinates' member choices) to finite value sets."""

    coords: tuple[str, ...]
    widths: tuple[int, ...]
    cells: tuple[dict, ...]

    def at(self, k: int, cbranch: tuple):
        return self.cells[k][cbranch]


def restricted_localize(p: ProductCondition, nu_x: ProductNameOracle,
                        C, a, e, count_mode: str = "exact"):
    """Build q <= p and a name phi for a slalom over (a, e), read only from
    the C coordinates, catching x at every level.

    Splits owned inside C keep their cells (the value just varies with the
    restricted branch); splits owned outside C shrink so that at most e(k)
    values survive, by the same wide/narrow refinement as the single-poset
    localisation with colors d_beta(k) and range a(k).
    """
    _check_product_compat(p, nu_x)
    if not p.is_modest():
        raise PreconditionError("condition is not modest")
    if not product_check_reading(p, nu_x, "early"):
        raise PreconditionError("condition does not read the name early")
    C = tuple(sorted(set(C) & set(p.support)))
    cidx = [i for i, xi in enumerate(p.support) if xi in C]
    N = p.horizon
    for k in range(N):
        if any(v not in range(a[k]) for v in nu_x.profile[k]):
            raise PreconditionError(f"profile leaves range(a) at level {k}")
    q = p
    split_owner = dict(p.split_levels())

    phi = []
    for k in range(N):
        etas = product_possibilities(q, k - 1)
        m = len(etas)
        owner = split_owner.get(k)
        if owner is not None and owner not in C:
            # the level is decided by a foreign coordinate: shrink its cell
            beta = owner
            triple = q.space.triple_of(beta)
            cdh = subset_count(triple.c[k], triple.h[k], count_mode)
            pos = q.support.index(beta)
            M = q.parts[beta].cells[k]
            if 2 * m * cdh <= e[k]:
                pass  # wide: every decided value fits already
            elif 2 * m * a[k] <= triple.d[k]:
                kcap = e[k] // m
                if a[k] > triple.d[k] * kcap:
                    raise PreconditionError(f"block bound fails at level {k}")
                for eta in etas:
                    valmap = {t: _decided_product_value(q, _poke(eta, pos, t),
                                                        k, nu_x)
                              for t in M.sorted_members()}
                    M = range_refine(M, lambda t: valmap[t], kcap,
                                     triple.d[k], a[k])
                cells = list(q.parts[beta].cells)
                cells[k] = M
                q = q.with_part(beta,
                                TruncCondition(q.parts[beta].params, tuple(cells)))
            else:
                raise PreconditionError(
                    f"clause ii fails at level {k}, coordinate {beta!r}")
        # collect the surviving values per restricted branch
        cell = {}
        for b in product_branches(q):
            key = tuple(b[i] for i in cidx)
            cell.setdefault(key, set()).add(nu_x.eval(b)[k])
        for key, vals in cell.items():
            if len(vals) > e[k]:
                raise PreconditionError(
                    f"clause i fails at level {k}: {len(vals)} values")
        phi.append({key: frozenset(vals) for key, vals in cell.items()})

    name = RestrictedName(C, tuple(e), tuple(phi))
    for b in product_branches(q):
        key = tuple(b[i] for i in cidx)
        v = nu_x.eval(b)
        for k in range(N):
            assert v[k] in name.cells[k][key]
    return q, name
