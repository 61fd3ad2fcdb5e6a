"""Exact counting and rigorous iterated-exponential interval arithmetic.

Quantities in the deeper levels of the growth-sequence recursion are far too
large for exact integers, so they are carried as *towers*: a pair of rational
bounds at some exponential height, where a tower of height k with bounds
[lo, hi] encloses a value v with exp2^k(lo) <= v <= exp2^k(hi).  All rounding
is directed (lower bounds round down, upper bounds round up), so every
comparison that resolves is sound.  Comparisons that do not resolve report
Unknown; callers must raise the precision or fail, never guess.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb, isqrt

PROMOTION_THRESHOLD = 2 ** 64  # promote to the next height above this
DEMOTION_LIMIT = 64            # drop a height when the upper bound is <= this
HEIGHT_CAP = 8
DEFAULT_PRECISION = 96         # fractional bits carried by log2/pow2 bounds
EXACT_BIT_LIMIT = 1 << 26      # largest integer we materialize exactly


class TowerOverflowError(ArithmeticError):
    """The height cap was exceeded."""


class TowerDomainError(ArithmeticError):
    """An operation left the representable domain (e.g. log of <= 0)."""


class Cmp(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    UNKNOWN = "unknown"


def subset_count(m: int, k: int, mode: str = "exact") -> int:
    """Number of subsets of an m-set of size at most k.

    In "power-bound" mode returns m**k instead, a valid upper substitute
    for every k != 1.
    """
    if m < 0 or k < 0:
        raise ValueError("subset_count needs non-negative arguments")
    if mode == "exact":
        return sum(comb(m, i) for i in range(min(m, k) + 1))
    if mode == "power-bound":
        return m ** k
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# directed rational log2 / pow2


def _shr_ceil(n: int, s: int) -> int:
    """ceil(n / 2**s) without materializing 2**s."""
    q = n >> s
    if n > 0 and (n & -n).bit_length() - 1 < s:
        q += 1
    return q


def _floor_log2(x: Fraction) -> int:
    n, d = x.numerator, x.denominator
    if n <= 0:
        raise TowerDomainError("log2 of a non-positive value")
    e = n.bit_length() - d.bit_length()
    if e >= 0:
        ge = (n >> e) >= d
    else:
        ge = (n << -e) >= d
    return e if ge else e - 1


def _sq_chain_floor(t: int, prec: int) -> int:
    """Lower bound of 2**prec * log2(t / 2**prec) for t in [2**prec, 2**(prec+1))."""
    bits = 0
    v = t
    for _ in range(prec):
        v = (v * v) >> prec
        bits <<= 1
        if v >= (2 << prec):
            bits |= 1
            v >>= 1
    return bits


def _log2_bounds(x: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    n, d = x.numerator, x.denominator
    if n <= 0:
        raise TowerDomainError("log2 of a non-positive value")
    if n & (n - 1) == 0 and d & (d - 1) == 0:
        v = Fraction(n.bit_length() - d.bit_length())
        return v, v
    e = _floor_log2(x)
    # mantissa m = x / 2**e lies in (1, 2); lower bound via floor squaring
    s = prec - e
    t = ((n << s) if s >= 0 else (n >> -s)) // d
    lo = e + Fraction(_sq_chain_floor(t, prec), 1 << prec)
    # upper bound: log2(m) = 1 - log2(2/m), bound 2/m = 2**(e+1) d / n from below
    s2 = prec + e + 1
    t2 = ((d << s2) if s2 >= 0 else (d >> -s2)) // n
    hi = e + 1 - Fraction(_sq_chain_floor(t2, prec), 1 << prec)
    return Fraction(lo), Fraction(hi)


def _exp2_frac(m: int, s: int, prec: int, up: bool) -> Fraction:
    """Directed bound of 2**(m / 2**s) for 0 <= m < 2**s."""
    P = prec + 8
    r = 1 << P
    z = 2 << P
    for i in range(1, s + 1):
        sq = isqrt(z << P)
        if up and sq * sq < (z << P):
            sq += 1
        z = sq
        if (m >> (s - i)) & 1:
            r = _shr_ceil(r * z, P) if up else (r * z) >> P
    return Fraction(r, 1 << P)


def _pow2_bounds(x: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    if x.denominator == 1:
        n = x.numerator
        v = Fraction(1 << n) if n >= 0 else Fraction(1, 1 << -n)
        return v, v
    n = x.numerator // x.denominator
    f = x - n
    scale = Fraction(1 << n) if n >= 0 else Fraction(1, 1 << -n)
    s = prec
    mf = (f.numerator << s) // f.denominator
    lo = scale * _exp2_frac(mf, s, prec, up=False)
    hi = scale * _exp2_frac(min(mf + 1, (1 << s) - 1), s, prec, up=True)
    if mf + 1 >= (1 << s):
        hi = scale * 2
    return lo, hi


def _double_slack(height: int, w: Fraction) -> Fraction:
    """A delta with 2 * exp2^height(w) <= exp2^height(w + delta)."""
    if height <= 1:
        return Fraction(1)
    wf = int(w) if w >= 1 else 0
    return Fraction(4, 2 ** min(wf, 126))


def _half_slack(height: int, w: Fraction) -> Fraction:
    """A delta with exp2^height(w - delta) <= exp2^height(w) / 2."""
    if height <= 1:
        return Fraction(1)
    wf = int(w) if w >= 1 else 1
    return Fraction(4, 2 ** min(wf, 126))


# ---------------------------------------------------------------------------
# towers


@dataclass(frozen=True)
class LogTower:
    """Value v with exp2^height(low) <= v <= exp2^height(high)."""

    height: int
    low: Fraction
    high: Fraction

    def __post_init__(self):
        if self.low > self.high:
            raise ValueError("tower bounds out of order")

    @property
    def is_point(self) -> bool:
        return self.low == self.high

    @property
    def is_exact_int(self) -> bool:
        return self.height == 0 and self.is_point and self.low.denominator == 1

    def __repr__(self):
        return f"LogTower(h={self.height}, [{self.low}, {self.high}])"


def tower(v) -> LogTower:
    if isinstance(v, LogTower):
        return v
    if isinstance(v, int):
        return _canonical(0, Fraction(v), Fraction(v))
    if isinstance(v, Fraction):
        return _canonical(0, v, v)
    raise TypeError(f"cannot make a tower from {type(v).__name__}")


def _canonical(height: int, low: Fraction, high: Fraction,
               prec: int = DEFAULT_PRECISION, cap: int = HEIGHT_CAP) -> LogTower:
    while height > 0 and high <= DEMOTION_LIMIT:
        low = _pow2_bounds(low, prec)[0]
        high = _pow2_bounds(high, prec)[1]
        height -= 1
    while low > PROMOTION_THRESHOLD:
        if height + 1 > cap:
            raise TowerOverflowError(f"height cap {cap} exceeded")
        low = _log2_bounds(low, prec)[0]
        high = _log2_bounds(high, prec)[1]
        height += 1
    return LogTower(height, low, high)


def _promote(t: LogTower, prec: int, cap: int) -> LogTower:
    if t.height + 1 > cap:
        raise TowerOverflowError(f"height cap {cap} exceeded")
    lo = _log2_bounds(t.low, prec)[0]
    hi = _log2_bounds(t.high, prec)[1]
    return LogTower(t.height + 1, lo, hi)


def _align(x: LogTower, y: LogTower, prec: int, cap: int):
    while x.height < y.height:
        x = _promote(x, prec, cap)
    while y.height < x.height:
        y = _promote(y, prec, cap)
    return x, y


def _align_soft(x: LogTower, y: LogTower, prec: int, cap: int):
    """Promote the shorter tower while its bounds stay in log2's domain
    (low > 1); heights may still differ on return."""
    while x.height < y.height and x.low > 1:
        x = _promote(x, prec, cap)
    while y.height < x.height and y.low > 1:
        y = _promote(y, prec, cap)
    return x, y


def _dominates(tall: LogTower, short: LogTower, margin: int = 0) -> bool:
    """Sound check that tall >= 2**margin * short across a height gap.

    Uses exp2^j(t) >= t for t >= 1: if tall.low >= short.high + margin then
    exp2^{tall.h}(tall.low) >= exp2^{short.h}(short.high + margin).  A short
    tower with bounds below 1 is below exp2^{short.h}(1), which any taller
    tower with low >= 2 clears by a factor of 4 or more (margin <= 2).
    """
    if tall.height <= short.height:
        return False
    if short.high >= 1:
        return tall.low >= short.high + margin
    return margin <= 2 and tall.low >= 2


def tower_log2(x, *, prec: int = DEFAULT_PRECISION, cap: int = HEIGHT_CAP) -> LogTower:
    x = tower(x)
    if x.height >= 1:
        return _canonical(x.height - 1, x.low, x.high, prec, cap)
    lo = _log2_bounds(x.low, prec)[0]
    hi = _log2_bounds(x.high, prec)[1]
    return _canonical(0, lo, hi, prec, cap)


def tower_exp2(x, *, prec: int = DEFAULT_PRECISION, cap: int = HEIGHT_CAP) -> LogTower:
    x = tower(x)
    if x.height + 1 > cap:
        raise TowerOverflowError(f"height cap {cap} exceeded")
    return _canonical(x.height + 1, x.low, x.high, prec, cap)


def _is_zero(t: LogTower) -> bool:
    return t.height == 0 and t.low == t.high == 0


def tower_add(a, b, *, prec: int = DEFAULT_PRECISION, cap: int = HEIGHT_CAP) -> LogTower:
    x, y = tower(a), tower(b)
    if x.height == 0 and y.height == 0:
        return _canonical(0, x.low + y.low, x.high + y.high, prec, cap)
    if _is_zero(x):
        return y
    if _is_zero(y):
        return x
    x, y = _align_soft(x, y, prec, cap)
    if x.height != y.height:
        short, tall = (x, y) if x.height < y.height else (y, x)
        if _dominates(tall, short):
            # the short summand is below the tall one: sum <= 2 * tall
            slack = _double_slack(tall.height, tall.high)
            return _canonical(tall.height, tall.low, tall.high + slack,
                              prec, cap)
        raise TowerDomainError("cannot add across an unresolved height gap")
    h = x.height
    lo = max(x.low, y.low)
    top = max(x.high, y.high)
    gap = top - min(x.high, y.high)
    if h == 1 and gap >= 2:
        slack = Fraction(2, 2 ** min(int(gap), 126))
    else:
        slack = _double_slack(h, top)
    return _canonical(h, lo, top + slack, prec, cap)


def tower_sub(a, b, *, prec: int = DEFAULT_PRECISION, cap: int = HEIGHT_CAP) -> LogTower:
    x, y = tower(a), tower(b)
    if x.height == 0 and y.height == 0:
        if x.low - y.high < 0:
            raise TowerDomainError("negative difference")
        return _canonical(0, x.low - y.high, x.high - y.low, prec, cap)
    if _is_zero(y):
        return x
    x, y = _align_soft(x, y, prec, cap)
    if x.height != y.height:
        if x.height > y.height and _dominates(x, y, margin=1):
            # the subtrahend is below half of x: difference >= x / 2
            lo = x.low - _half_slack(x.height, x.low)
            return _canonical(x.height, lo, x.high, prec, cap)
        raise TowerDomainError("cannot subtract across an unresolved height gap")
    if y.high > x.low - 1:
        raise TowerDomainError("difference bounds too close to subtract soundly")
    lo = x.low - _half_slack(x.height, x.low)
    return _canonical(x.height, lo, x.high, prec, cap)


def tower_mul(a, b, *, prec: int = DEFAULT_PRECISION, cap: int = HEIGHT_CAP) -> LogTower:
    x, y = tower(a), tower(b)
    if _is_zero(x) or _is_zero(y):
        return tower(0)
    if x.height == 0 and y.height == 0:
        bits = (x.high.numerator.bit_length() + y.high.numerator.bit_length()
                + x.high.denominator.bit_length() + y.high.denominator.bit_length())
        if bits <= EXACT_BIT_LIMIT:
            return _canonical(0, x.low * y.low, x.high * y.high, prec, cap)
    lx = tower_log2(x, prec=prec, cap=cap)
    ly = tower_log2(y, prec=prec, cap=cap)
    return tower_exp2(tower_add(lx, ly, prec=prec, cap=cap), prec=prec, cap=cap)


def tower_div(a, b, *, prec: int = DEFAULT_PRECISION, cap: int = HEIGHT_CAP) -> LogTower:
    x, y = tower(a), tower(b)
    if x.height == 0 and y.height == 0:
        if y.low <= 0:
            raise TowerDomainError("division by a bound interval touching zero")
        return _canonical(0, x.low / y.high, x.high / y.low, prec, cap)
    lx = tower_log2(x, prec=prec, cap=cap)
    ly = tower_log2(y, prec=prec, cap=cap)
    return tower_exp2(tower_sub(lx, ly, prec=prec, cap=cap), prec=prec, cap=cap)


def tower_pow(a, b, *, prec: int = DEFAULT_PRECISION, cap: int = HEIGHT_CAP) -> LogTower:
    x, y = tower(a), tower(b)
    if _is_zero(y):
        return tower(1)
    if x.height == 0 and y.height == 0 and x.is_point and y.is_point \
            and y.low.denominator == 1 and x.low.denominator == 1 and y.low >= 0:
        est = int(y.low) * max(1, int(x.low).bit_length())
        if est <= EXACT_BIT_LIMIT:
            return _canonical(0, x.low ** int(y.low), x.high ** int(y.low), prec, cap)
    lx = tower_log2(x, prec=prec, cap=cap)
    return tower_exp2(tower_mul(y, lx, prec=prec, cap=cap), prec=prec, cap=cap)


def tower_cmp(a, b, *, prec: int = DEFAULT_PRECISION, cap: int = HEIGHT_CAP + 4) -> Cmp:
    """Sound three-way comparison; Unknown when the intervals overlap."""
    if a is b:
        return Cmp.EQUAL
    x, y = tower(a), tower(b)
    x = _canonical(x.height, x.low, x.high, prec, cap)
    y = _canonical(y.height, y.low, y.high, prec, cap)
    x, y = _align_soft(x, y, prec, cap)
    if x.height != y.height:
        if x.height < y.height:
            return Cmp.LESS if _dominates(y, x, margin=1) else Cmp.UNKNOWN
        return Cmp.GREATER if _dominates(x, y, margin=1) else Cmp.UNKNOWN
    if x.is_point and y.is_point:
        if x.low == y.low:
            return Cmp.EQUAL
        return Cmp.LESS if x.low < y.low else Cmp.GREATER
    if x.high < y.low:
        return Cmp.LESS
    if x.low > y.high:
        return Cmp.GREATER
    return Cmp.UNKNOWN


def tower_le(a, b, *, prec: int = DEFAULT_PRECISION, cap: int = HEIGHT_CAP + 4):
    """Sound <=: True / False, or None when undecidable at this precision."""
    if a is b:
        return True
    x, y = tower(a), tower(b)
    x = _canonical(x.height, x.low, x.high, prec, cap)
    y = _canonical(y.height, y.low, y.high, prec, cap)
    x, y = _align_soft(x, y, prec, cap)
    if x.height != y.height:
        if x.height < y.height:
            return True if _dominates(y, x) else None
        return False if _dominates(x, y, margin=1) else None
    if x.high <= y.low:
        return True
    if x.low > y.high:
        return False
    return None


# ---------------------------------------------------------------------------
# expression trees

_OPS = {"const", "add", "mul", "pow", "sub", "div", "subset_count_bound"}


def tower_eval(expr, *, prec: int = DEFAULT_PRECISION, cap: int = HEIGHT_CAP) -> LogTower:
    """Evaluate an expression tree to a rigorous tower enclosure.

    Nodes are {"op": name, "args": [...]}; constants may appear directly as
    decimal strings or integers.
    """
    if isinstance(expr, (int, LogTower)):
        return tower(expr)
    if isinstance(expr, str):
        return tower(int(expr))
    op = expr["op"]
    if op not in _OPS:
        raise ValueError(f"unknown op {op!r}")
    if op == "const":
        return tower(int(expr["value"]))
    args = [tower_eval(e, prec=prec, cap=cap) for e in expr["args"]]
    if op == "add":
        out = args[0]
        for t in args[1:]:
            out = tower_add(out, t, prec=prec, cap=cap)
        return out
    if op == "mul":
        out = args[0]
        for t in args[1:]:
            out = tower_mul(out, t, prec=prec, cap=cap)
        return out
    if op == "sub":
        return tower_sub(args[0], args[1], prec=prec, cap=cap)
    if op == "div":
        return tower_div(args[0], args[1], prec=prec, cap=cap)
    if op == "pow":
        return tower_pow(args[0], args[1], prec=prec, cap=cap)
    # subset_count_bound(m, k): enclosure of |[m]^{<=k}|
    m, k = args
    if m.is_exact_int and k.is_exact_int:
        mi, ki = int(m.low), int(k.low)
        if ki * max(1, mi.bit_length()) <= EXACT_BIT_LIMIT:
            return tower(subset_count(mi, ki, "exact"))
    # 2**min(m,k)-ish lower would need min(); C(m,k) <= sum <= (k+1) m^k
    lo = tower(1)
    hi = tower_mul(tower_add(k, 1, prec=prec, cap=cap),
                   tower_pow(m, k, prec=prec, cap=cap), prec=prec, cap=cap)
    lo, hi = _align(lo, hi, prec, cap)
    return LogTower(lo.height, lo.low, hi.high)


def expr_to_json(expr) -> str:
    return json.dumps(expr, sort_keys=True)


def expr_from_json(text: str):
    return json.loads(text)


def tower_to_json(t: LogTower) -> dict:
    return {"height": t.height,
            "low": f"{t.low.numerator}/{t.low.denominator}",
            "high": f"{t.high.numerator}/{t.high.denominator}"}


def tower_from_json(obj: dict) -> LogTower:
    def frac(s):
        n, _, d = s.partition("/")
        return Fraction(int(n), int(d or 1))
    return LogTower(obj["height"], frac(obj["low"]), frac(obj["high"]))
