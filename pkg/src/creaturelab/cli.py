"""Batch front end: every operation on JSON input, plus seeded suites.

Exit codes: 0 success / all properties hold, 1 a property violation or
counterexample was found (the witness is in the report), 2 usage or input
error.  Reports are serialized with sorted keys, so identical invocations
are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from random import Random

from . import conditions as C
from . import connections as X
from . import creatures as Cr
from . import family as F
from . import products as P
from . import relational as R
from . import toys
from .numeric import DEFAULT_PRECISION


def _load(ns):
    if ns.input:
        with open(ns.input) as fh:
            return json.load(fh)
    return json.load(sys.stdin)


def _emit(ns, obj) -> None:
    text = json.dumps(obj, sort_keys=True) + "\n"
    if ns.output:
        with open(ns.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _oracle(obj, p: C.TruncCondition) -> C.NameOracle:
    table = {k: tuple(v) for k, v in obj["table"].items()}
    return C.NameOracle.from_table(p, obj["profile"], table)


def _product_oracle(obj, p: P.ProductCondition) -> P.ProductNameOracle:
    table = {k: tuple(v) for k, v in obj["table"].items()}
    return P.ProductNameOracle.from_table(p, obj["profile"], table)


def _slalom_json(s: X.Slalom) -> dict:
    return s.to_json()


def _restricted_json(p: P.ProductCondition, name: P.RestrictedName) -> dict:
    cidx = [i for i, xi in enumerate(p.support) if xi in name.coords]
    csupp = [p.support[i] for i in cidx]

    def key_of(cbranch):
        parts = []
        for j, xi in enumerate(csupp):
            ordered = [cell.sorted_members() for cell in p.parts[xi].cells]
            parts.append(",".join(str(ordered[k].index(cbranch[j][k]))
                                  for k in range(len(cbranch[j]))))
        return "|".join(parts)
    return {"coords": list(name.coords),
            "widths": list(name.widths),
            "cells": [{key_of(key): sorted(vals) for key, vals in cell.items()}
                      for cell in name.cells]}


# ---------------------------------------------------------------------------
# handlers: return (exit_code, payload)


def _h_norm(ns, data):
    return 0, {"norm": Cr.norm(Cr.Creature.from_json(data["creature"]))}


def _h_lognorm(ns, data):
    M = Cr.Creature.from_json(data["creature"])
    t = Fraction(data["t"])
    return 0, {"cmp": Cr.lognorm_cmp(M, data["d"], t)}


def _h_bigness(ns, data):
    M = Cr.Creature.from_json(data["creature"])
    colors = data["colors"]
    table = dict(zip(M.sorted_members(), colors))
    color, refined = Cr.bigness_refine(M, lambda m: table[m], data["d"])
    return 0, {"color": color, "refined": refined.to_json()}


def _h_range_refine(ns, data):
    M = Cr.Creature.from_json(data["creature"])
    fvals = dict(zip(M.sorted_members(), data["f"]))
    out = Cr.range_refine(M, lambda m: fvals[m], data["k"], data["d"], data["m"])
    return 0, {"refined": out.to_json()}


def _h_poss(ns, data):
    p = C.TruncCondition.from_json(data["condition"])
    k = data["k"]
    count = C.poss_count(p, k)
    out = {"count": count}
    if count <= 10 ** 4:
        out["possibilities"] = [[sorted(sel) for sel in eta]
                                for eta in C.possibilities(p, k)]
    return 0, out


def _h_and(ns, data):
    p = C.TruncCondition.from_json(data["condition"])
    q = C.and_restrict(p, tuple(frozenset(s) for s in data["eta"]))
    return 0, {"condition": q.to_json()}


def _h_order(ns, data):
    q = C.TruncCondition.from_json(data["q"])
    p = C.TruncCondition.from_json(data["p"])
    mode = data.get("mode", "plain")
    if isinstance(mode, dict):
        mode = ("at_n", mode["at_n"])
    ok = C.order_check(q, p, mode)
    return (0 if ok else 1), {"extends": ok}


def _h_fuse(ns, data):
    chain = [C.TruncCondition.from_json(c) for c in data["chain"]]
    return 0, {"condition": C.fuse(chain).to_json()}


def _h_thin(ns, data):
    p = C.TruncCondition.from_json(data["condition"])
    return 0, {"condition": C.thin(p, data["gbound"]).to_json()}


def _h_catch(ns, data):
    p = C.TruncCondition.from_json(data["condition"])
    q, k = C.catch_real(p, data["x"], data.get("n0", 0))
    return 0, {"condition": q.to_json(), "level": k}


def _h_check_reading(ns, data):
    p = C.TruncCondition.from_json(data["condition"])
    nu = _oracle(data["oracle"], p)
    ok = C.check_reading(p, nu, data.get("mode", ns.mode or "timely"))
    return (0 if ok else 1), {"reads": ok}


def _h_early_read(ns, data):
    p = C.TruncCondition.from_json(data["condition"])
    nu = _oracle(data["oracle"], p)
    return 0, {"condition": C.early_read(p, nu).to_json()}


def _h_localize(ns, data):
    p = C.TruncCondition.from_json(data["condition"])
    nu = _oracle(data["oracle"], p)
    q, phi = C.localize(p, nu, tuple(data["a"]), tuple(data["e"]),
                        data.get("k0", 0))
    return 0, {"condition": q.to_json(), "slalom": _slalom_json(phi)}


def _h_modest(ns, data):
    p = P.ProductCondition.from_json(data["condition"])
    return 0, {"condition": P.modest_refine(p).to_json()}


def _h_product_fuse(ns, data):
    chain = [(P.ProductCondition.from_json(c["condition"]),
              tuple(c["frozen"])) for c in data["chain"]]
    return 0, {"condition": P.product_fuse(chain).to_json()}


def _h_schedule(ns, data):
    return 0, P.schedule_plan(data["n"])


def _h_product_early_read(ns, data):
    p = P.ProductCondition.from_json(data["condition"])
    nu = _product_oracle(data["oracle"], p)
    return 0, {"condition": P.product_early_read(p, nu).to_json()}


def _h_bound(ns, data):
    p = P.ProductCondition.from_json(data["condition"])
    nu = _product_oracle(data["oracle"], p)
    return 0, {"f": list(P.bounding_extract(p, nu))}


def _h_product_catch(ns, data):
    p = P.ProductCondition.from_json(data["condition"])
    nu = _product_oracle(data["oracle"], p)
    q, k = P.product_catch(p, nu, set(data["B"]), data["xi"],
                           data.get("n0", 0))
    return 0, {"condition": q.to_json(), "level": k}


def _h_restricted_localize(ns, data):
    p = P.ProductCondition.from_json(data["condition"])
    nu = _product_oracle(data["oracle"], p)
    q, name = P.restricted_localize(p, nu, set(data["C"]),
                                    tuple(data["a"]), tuple(data["e"]))
    return 0, {"condition": q.to_json(), "phi": _restricted_json(q, name)}


def _h_tukey(ns, data):
    Rs = R.FinRelSystem.from_json(data["R"])
    Rp = R.FinRelSystem.from_json(data["Rp"])
    pair = R.TukeyPair(tuple(data["F"]), tuple(data["G"]))
    res = R.check_tukey(Rs, Rp, pair)
    if res == "ok":
        return 0, {"result": "ok"}
    return 1, {"result": "counterexample", "x": res[1], "yp": res[2]}


def _h_dual(ns, data):
    return 0, {"dual": R.dual(R.FinRelSystem.from_json(data["R"])).to_json()}


def _h_brute(ns, data):
    b, d = R.brute_characteristics(R.FinRelSystem.from_json(data["R"]))
    return 0, {"b": b, "d": d}


def _h_maps(ns, data):
    mode = ns.mode or data.get("mode")
    if mode == "l24":
        f, g, tr = X.l24_maps(data["c"], data["h"], data["y"],
                              X.Slalom.from_json(data["S"]))
        out = {"f": list(f), "g": g.to_json()}
    elif mode == "l25":
        f, g, tr = X.l25_maps(data["b"], data["g"], tuple(data["y"]),
                              X.SigmaCover.from_json(data["X"]))
        out = {"f": f, "g": g.to_json()}
    elif mode == "l26":
        phi = tuple(tuple(tuple(c) for c in lvl) for lvl in data["phi"])
        f, g, tr = X.l26_maps(data["c"], data["h"], data["hprime"],
                              X.Slalom.from_json(data["S"]), phi)
        out = {"f": [sorted(s) for s in f], "g": list(g)}
    elif mode == "l27":
        f, g, tr = X.l27_maps(data["c"], data["h"], data["S"], data["y"])
        out = {"f": f.to_json(),
               "g": [sorted(sorted(c) for c in fam) for fam in g]}
    elif mode == "ed":
        f, g, tr = X.ed_maps(data["c"], data["h"], data["x"], data["y"])
        out = {"f": f.to_json(), "g": list(g)}
    else:
        raise ValueError(f"unknown maps mode {mode!r}")
    out["transfer"] = "ok" if tr == "ok" else {"violation": tr[1]}
    return (0 if tr == "ok" else 1), out


def _h_measure(ns, data):
    m = X.escape_measure(X.Slalom.from_json(data["slalom"]),
                         tuple(data["window"]))
    return 0, {"measure": f"{m.numerator}/{m.denominator}"}


def _h_partition(ns, data):
    part = X.build_partition(data["lengths"])
    return 0, {"blocks": [list(b) for b in part.blocks]}


def _h_gch(ns, data):
    return 0, {"profile": list(X.gch_profile(data["c"], data["h"],
                                             data["horizon"]))}


def _h_fbg(ns, data):
    return 0, {"profile": list(X.fbg_profile(data["b"], data["g"],
                                             data["horizon"]))}


def _h_family(ns, data):
    mode = ns.mode or data.get("mode", "build")
    prec = ns.precision or DEFAULT_PRECISION
    cap = ns.cap or F.FAMILY_HEIGHT_CAP
    if mode == "build":
        fam, bnd = F.build_single(data["n0_minus"], data["d0"],
                                  data.get("depth", 2),
                                  data.get("count_mode", "power-bound"),
                                  prec=prec, cap=cap)
        return 0, {"family": fam.to_json(), "bounding": bnd.to_json()}
    if mode == "tree":
        fam = F.build_tree(data.get("d0", 3), data.get("depth", 2),
                           prec=prec, cap=cap)
        return 0, fam.to_json()
    if mode == "verify":
        if data.get("kind", "tree") == "tree":
            fam = F.build_tree(data.get("d0", 3), data.get("depth", 2),
                               prec=prec, cap=cap)
            bnd = fam.bounding
        else:
            fam, bnd = F.build_single(data["n0_minus"], data["d0"],
                                      data.get("depth", 2),
                                      data.get("count_mode", "power-bound"),
                                      prec=prec, cap=cap)
        if "corrupt" in data:
            which = data["corrupt"]
            fam.constructed = False
            if isinstance(fam, F.TreeFamily):
                fam.nodes[which["node"]].__dict__[which["field"]] = which["value"]
            else:
                vals = list(getattr(fam, which["field"]))
                vals[which["k"]] = which["value"]
                setattr(fam, which["field"], tuple(vals))
        cert = F.verify_suitable(fam, bnd, prec=prec, cap=cap)
        summary = F.certificate_summary(cert)
        code = 0 if summary["fail"] == 0 and summary["unknown"] == 0 else 1
        return code, {"certificate": cert, "summary":
                      {k: summary[k] for k in ("total", "pass", "fail",
                                               "unknown")}}
    if mode == "toy":
        return 0, F.toy_family(data.get("seed", ns.seed or 0),
                               data.get("horizon", 3))
    raise ValueError(f"unknown family mode {mode!r}")


# ---------------------------------------------------------------------------
# seeded suites


def _suite_norm(rng, n):
    fails = []
    for i in range(n):
        M = toys.random_creature(rng)
        v = Cr.norm(M)
        covered = frozenset().union(*M.members)
        if (v >= 1) != (len(covered) == M.arena):
            fails.append({"instance": i, "creature": M.to_json()})
    return fails


def _suite_bigness(rng, n):
    fails = []
    for i in range(n):
        M = toys.random_creature(rng)
        d = rng.randint(2, 4)
        coloring = toys.random_coloring(rng, M, d)
        color, Ms = Cr.bigness_refine(M, coloring, d)
        ok = (all(coloring(m) == color for m in Ms.members)
              and Cr.norm(M) + 1 <= d * (Cr.norm(Ms) + 1))
        if not ok:
            fails.append({"instance": i, "creature": M.to_json(), "d": d})
    return fails


def _suite_reading(rng, n):
    fails = []
    for i in range(n):
        p, nu = toys.reading_instance(rng)
        try:
            q = C.early_read(p, nu)
            ok = C.check_reading(q, nu, "early")
        except Exception as ex:  # pragma: no cover - surfaced in the report
            fails.append({"instance": i, "error": str(ex)})
            continue
        if not ok:
            fails.append({"instance": i, "condition": p.to_json()})
    return fails


def _suite_localize(rng, n):
    fails = []
    for i in range(n):
        p, nu, a, e = toys.localize_instance(rng)
        try:
            q, phi = C.localize(p, nu, a, e)
            ok = all(len(phi.cells[k]) <= e[k] for k in range(p.horizon))
            for b in C.branches(q):
                v = nu.eval(b)
                ok = ok and all(v[k] in phi.cells[k]
                                for k in range(p.horizon))
        except Exception as ex:
            fails.append({"instance": i, "error": str(ex)})
            continue
        if not ok:
            fails.append({"instance": i, "condition": p.to_json()})
    return fails


def _suite_tukey(rng, n):
    fails = []
    for i in range(n):
        Rs, Rp, pair = toys.tukey_instance(rng)
        if R.check_tukey(Rs, Rp, pair) != "ok":
            fails.append({"instance": i, "R": Rs.to_json()})
            continue
        b, d = R.brute_characteristics(Rs)
        bp, dp = R.brute_characteristics(Rp)
        if not (R.leq_card(d, dp) and R.leq_card(bp, b)):
            fails.append({"instance": i, "b": b, "d": d, "bp": bp, "dp": dp})
    return fails


def _suite_product_catch(rng, n):
    fails = []
    for i in range(n):
        p, nu, B, xi = toys.product_catch_instance(rng)
        try:
            P.product_catch(p, nu, B, xi)
        except Exception as ex:
            fails.append({"instance": i, "error": str(ex)})
    return fails


def _suite_restricted(rng, n):
    fails = []
    for i in range(n):
        p, nu, Cs, a, e = toys.restricted_instance(rng)
        try:
            P.restricted_localize(p, nu, Cs, a, e)
        except Exception as ex:
            fails.append({"instance": i, "error": str(ex)})
    return fails


def _suite_measure(rng, n):
    fails = []
    for i in range(n):
        N = rng.randint(1, 5)
        c = [rng.randint(1, 6) for _ in range(N)]
        h = [rng.randint(1, ck) for ck in c]
        cells = [rng.sample(range(c[k]), rng.randint(0, h[k]))
                 for k in range(N)]
        S = X.Slalom.of(c, h, cells)
        direct = Fraction(1)
        for k in range(N):
            direct *= Fraction(c[k] - len(cells[k]), c[k])
        mid = rng.randint(0, N)
        split = (X.escape_measure(S, (0, mid))
                 * X.escape_measure(S, (mid, N)))
        if X.escape_measure(S, (0, N)) != direct or split != direct:
            fails.append({"instance": i, "slalom": S.to_json()})
    return fails


_SUITES = {"norm": _suite_norm, "bigness": _suite_bigness,
           "reading": _suite_reading, "localize": _suite_localize,
           "tukey": _suite_tukey, "product-catch": _suite_product_catch,
           "restricted": _suite_restricted, "measure": _suite_measure}


def _h_suite(ns, data):
    name = ns.mode or data.get("suite")
    if name not in _SUITES:
        raise ValueError(f"unknown suite {name!r}")
    n = ns.cap or data.get("instances", 50)
    if ns.seed is None and "seed" not in data:
        raise ValueError("a seed is required for randomized suites")
    rng = Random(ns.seed if ns.seed is not None else data["seed"])
    failures = _SUITES[name](rng, n)
    report = {"suite": name, "instances": n, "failures": failures}
    return (0 if not failures else 1), report


_HANDLERS = {
    "norm": _h_norm, "lognorm": _h_lognorm, "bigness": _h_bigness,
    "range-refine": _h_range_refine, "poss": _h_poss, "and": _h_and,
    "order": _h_order, "fuse": _h_fuse, "thin": _h_thin, "catch": _h_catch,
    "check-reading": _h_check_reading, "early-read": _h_early_read,
    "localize": _h_localize, "modest": _h_modest,
    "product-fuse": _h_product_fuse, "schedule": _h_schedule,
    "product-early-read": _h_product_early_read, "bound": _h_bound,
    "product-catch": _h_product_catch,
    "restricted-localize": _h_restricted_localize,
    "tukey": _h_tukey, "dual": _h_dual, "brute": _h_brute,
    "maps": _h_maps, "measure": _h_measure, "partition": _h_partition,
    "gch": _h_gch, "fbg": _h_fbg, "family": _h_family, "suite": _h_suite,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="creaturelab",
        description="Run a single operation on JSON input, or a seeded suite.")
    ap.add_argument("subcommand", choices=sorted(_HANDLERS))
    ap.add_argument("--input", help="JSON input path (default: stdin)")
    ap.add_argument("--output", help="JSON output path (default: stdout)")
    ap.add_argument("--seed", type=int, help="seed for randomized suites")
    ap.add_argument("--mode", help="subcommand mode (maps/family/suite)")
    ap.add_argument("--precision", type=int, help="tower precision bits")
    ap.add_argument("--cap", type=int,
                    help="tower height cap, or suite instance count")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit:
        return 2
    handler = _HANDLERS[ns.subcommand]
    needs_input = ns.subcommand not in {"suite"} or ns.input
    try:
        data = _load(ns) if needs_input or ns.input else {}
    except (OSError, json.JSONDecodeError) as ex:
        sys.stderr.write(f"input error: {ex}\n")
        return 2
    try:
        code, payload = handler(ns, data)
    except (KeyError, TypeError, ValueError, ArithmeticError) as ex:
        sys.stderr.write(f"error: {type(ex).__name__}: {ex}\n")
        return 2
    _emit(ns, payload)
    return code


if __name__ == "__main__":
    sys.exit(main())
