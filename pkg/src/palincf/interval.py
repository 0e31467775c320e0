"""Exact rational intervals and certified enclosures of sqrt, log and exp.

Endpoints are kept as unreduced integer pairs; reduction to ``Fraction`` only
happens when ``lo``/``hi`` are read. Continuant-sized numerators make gcd
normalisation the dominant cost otherwise.
"""
from __future__ import annotations

import math
import os
from fractions import Fraction
from functools import lru_cache

DEFAULT_PRECISION_BITS = int(os.environ.get("PALINCF_PRECISION_BITS", "128"))

RELATIONS = ("<", "<=", ">", ">=", "=")


def _pair(x):
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return x, 1
    if isinstance(x, Fraction):
        return x.numerator, x.denominator
    if isinstance(x, tuple) and len(x) == 2:
        n, d = x
        if d == 0:
            raise ZeroDivisionError("zero denominator")
        return (n, d) if d > 0 else (-n, -d)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


def _lt(an, ad, bn, bd):
    return an * bd < bn * ad


def _le(an, ad, bn, bd):
    return an * bd <= bn * ad


class RationalInterval:
    """Closed interval [lo, hi] with exact rational endpoints."""

    __slots__ = ("_ln", "_ld", "_hn", "_hd")

    def __init__(self, lo, hi=None):
        ln, ld = _pair(lo)
        hn, hd = (ln, ld) if hi is None else _pair(hi)
        if _lt(hn, hd, ln, ld):
            raise ValueError("empty interval: lo > hi")
        self._ln, self._ld, self._hn, self._hd = ln, ld, hn, hd

    @classmethod
    def _make(cls, ln, ld, hn, hd):
        obj = object.__new__(cls)
        obj._ln, obj._ld, obj._hn, obj._hd = ln, ld, hn, hd
        return obj

    @classmethod
    def hull(cls, a, b):
        """Smallest interval containing the two rationals ``a`` and ``b``."""
        an, ad = _pair(a)
        bn, bd = _pair(b)
        if _lt(bn, bd, an, ad):
            an, ad, bn, bd = bn, bd, an, ad
        return cls._make(an, ad, bn, bd)

    @property
    def lo(self) -> Fraction:
        return Fraction(self._ln, self._ld)

    @property
    def hi(self) -> Fraction:
        return Fraction(self._hn, self._hd)

    @property
    def lo_pair(self):
        return self._ln, self._ld

    @property
    def hi_pair(self):
        return self._hn, self._hd

    @property
    def width(self) -> Fraction:
        return Fraction(self._hn * self._ld - self._ln * self._hd, self._hd * self._ld)

    def is_point(self) -> bool:
        return self._hn * self._ld == self._ln * self._hd

    def contains(self, x) -> bool:
        if isinstance(x, RationalInterval):
            return _le(self._ln, self._ld, x._ln, x._ld) and _le(x._hn, x._hd, self._hn, self._hd)
        n, d = _pair(x)
        return _le(self._ln, self._ld, n, d) and _le(n, d, self._hn, self._hd)

    def is_positive(self) -> bool:
        return self._ln > 0

    def is_nonnegative(self) -> bool:
        return self._ln >= 0

    # arithmetic

    @staticmethod
    def _coerce(x):
        if isinstance(x, RationalInterval):
            return x
        n, d = _pair(x)
        return RationalInterval._make(n, d, n, d)

    def __add__(self, other):
        o = self._coerce(other)
        return self._make(
            self._ln * o._ld + o._ln * self._ld, self._ld * o._ld,
            self._hn * o._hd + o._hn * self._hd, self._hd * o._hd,
        )

    __radd__ = __add__

    def __neg__(self):
        return self._make(-self._hn, self._hd, -self._ln, self._ld)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if self._ln >= 0 and o._ln >= 0:
            return self._make(self._ln * o._ln, self._ld * o._ld, self._hn * o._hn, self._hd * o._hd)
        cands = [
            (a * b, c * d)
            for a, c in ((self._ln, self._ld), (self._hn, self._hd))
            for b, d in ((o._ln, o._ld), (o._hn, o._hd))
        ]
        lo = hi = cands[0]
        for c in cands[1:]:
            if _lt(c[0], c[1], lo[0], lo[1]):
                lo = c
            if _lt(hi[0], hi[1], c[0], c[1]):
                hi = c
        return self._make(lo[0], lo[1], hi[0], hi[1])

    __rmul__ = __mul__

    def __abs__(self):
        if self._ln >= 0:
            return self
        if self._hn <= 0:
            return -self
        if _lt(-self._ln, self._ld, self._hn, self._hd):
            return self._make(0, 1, self._hn, self._hd)
        return self._make(0, 1, -self._ln, self._ld)

    def square(self):
        a = abs(self)
        return a * a

    def reciprocal(self):
        if self._ln > 0 or self._hn < 0:
            return self._make(self._hd, self._hn, self._ld, self._ln)._fix_signs()
        raise ZeroDivisionError("reciprocal of an interval containing 0")

    def _fix_signs(self):
        ln, ld, hn, hd = self._ln, self._ld, self._hn, self._hd
        if ld < 0:
            ln, ld = -ln, -ld
        if hd < 0:
            hn, hd = -hn, -hd
        return self._make(ln, ld, hn, hd)

    def __truediv__(self, other):
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def max(self, other):
        o = self._coerce(other)
        lo = o.lo_pair if _lt(self._ln, self._ld, o._ln, o._ld) else self.lo_pair
        hi = o.hi_pair if _lt(self._hn, self._hd, o._hn, o._hd) else self.hi_pair
        return self._make(lo[0], lo[1], hi[0], hi[1])

    def min(self, other):
        return -((-self).max(-self._coerce(other)))

    # comparisons

    def status(self, relation: str, other) -> str:
        """Decide ``self <relation> other``: 'holds', 'violated' or 'inconclusive'."""
        o = self._coerce(other)
        if relation == "<":
            if _lt(self._hn, self._hd, o._ln, o._ld):
                return "holds"
            if _le(o._hn, o._hd, self._ln, self._ld):
                return "violated"
        elif relation == "<=":
            if _le(self._hn, self._hd, o._ln, o._ld):
                return "holds"
            if _lt(o._hn, o._hd, self._ln, self._ld):
                return "violated"
        elif relation == ">":
            return o.status("<", self)
        elif relation == ">=":
            return o.status("<=", self)
        elif relation == "=":
            if self.is_point() and o.is_point() and self._ln * o._ld == o._ln * self._ld:
                return "holds"
            if _lt(self._hn, self._hd, o._ln, o._ld) or _lt(o._hn, o._hd, self._ln, self._ld):
                return "violated"
        else:
            raise ValueError(f"unknown relation {relation!r}")
        return "inconclusive"

    def certainly_lt(self, other) -> bool:
        return self.status("<", other) == "holds"

    def __eq__(self, other):
        if not isinstance(other, RationalInterval):
            return NotImplemented
        return (self._ln * other._ld == other._ln * self._ld
                and self._hn * other._hd == other._hn * self._hd)

    def __hash__(self):
        return hash((self.lo, self.hi))

    def __repr__(self):
        if self.is_point():
            return f"RationalInterval({self.lo})"
        return f"RationalInterval({format_dyadic(self._ln, self._ld, 'down')}, " \
               f"{format_dyadic(self._hn, self._hd, 'up')})"

    def to_json(self) -> dict:
        return {
            "lo": format_dyadic(self._ln, self._ld, "down"),
            "hi": format_dyadic(self._hn, self._hd, "up"),
            "approx": format_approx(self._hn, self._hd),
        }


# formatting

_MANT_BITS = 52


def floor_log2(n: int, d: int) -> int:
    """floor(log2(n/d)) for n, d > 0."""
    k = n.bit_length() - d.bit_length()
    if k >= 0:
        if n < (d << k):
            k -= 1
    elif (n << -k) < d:
        k -= 1
    return k


def _scaled(n, d, shift, up):
    # floor or ceil of n * 2**shift / d for n >= 0
    if shift >= 0:
        num, den = n << shift, d
    else:
        num, den = n, d << -shift
    return -(-num // den) if up else num // den


def format_dyadic(n: int, d: int, direction: str) -> str:
    """Hex-float string of n/d rounded outward ('down' or 'up') to 53 bits."""
    if n == 0:
        return "0"
    neg = n < 0
    a = -n if neg else n
    up = (direction == "up") != neg
    k = floor_log2(a, d)
    m = _scaled(a, d, _MANT_BITS - k, up)
    if m >> (_MANT_BITS + 1):
        m >>= 1
        k += 1
    sign = "-" if neg else ""
    return f"{sign}0x1.{m - (1 << _MANT_BITS):013x}p{k:+d}"


def approx_log2(n: int, d: int) -> float:
    """Float estimate of log2(n/d) for n, d > 0, valid for huge arguments."""
    def lg(x):
        b = x.bit_length()
        if b <= 1000:
            return math.log2(x)
        return math.log2(x >> (b - 64)) + (b - 64)
    return lg(n) - lg(d)


def format_approx(n: int, d: int, digits: int = 6) -> str:
    """Human-readable decimal approximation (display only, not a bound)."""
    if n == 0:
        return "0"
    sign = "-" if n < 0 else ""
    t = approx_log2(abs(n), d) * math.log10(2)
    e = math.floor(t)
    mant = 10 ** (t - e)
    s = f"{mant:.{digits}f}"
    if s.startswith("10"):
        e += 1
        s = f"{1:.{digits}f}"
    return f"{sign}{s}e{e:+d}"


# integer roots

def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0, k >= 1."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0 and k >= 1")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def ceil_root(n: int, k: int) -> int:
    """Smallest integer r >= 0 with r**k >= n."""
    r = iroot(n, k)
    return r if r ** k >= n else r + 1


def sqrt_enclosure(x, bits: int = DEFAULT_PRECISION_BITS) -> RationalInterval:
    """Enclosure of sqrt(x) for rational x >= 0, width 2**-bits."""
    n, d = _pair(x)
    if n < 0:
        raise ValueError("sqrt of a negative number")
    s = math.isqrt((n << (2 * bits)) // d)
    if s * s * d == n << (2 * bits):
        return RationalInterval._make(s, 1 << bits, s, 1 << bits)
    return RationalInterval._make(s, 1 << bits, s + 1, 1 << bits)


def sqrt_interval(iv: RationalInterval, bits: int = DEFAULT_PRECISION_BITS) -> RationalInterval:
    if not iv.is_nonnegative():
        raise ValueError("sqrt of an interval reaching below 0")
    lo = sqrt_enclosure(iv.lo_pair, bits)
    hi = sqrt_enclosure(iv.hi_pair, bits)
    return RationalInterval._make(lo._ln, lo._ld, hi._hn, hi._hd)


def rational_power_enclosure(x, num: int, den: int, bits: int = DEFAULT_PRECISION_BITS) -> RationalInterval:
    """Enclosure of x**(num/den) for rational x > 0, integers num and den >= 1."""
    xn, xd = _pair(x)
    if xn <= 0:
        raise ValueError("base must be positive")
    if num < 0:
        return rational_power_enclosure((xd, xn), -num, den, bits)
    pn, pd = xn ** num, xd ** num
    if den == 1:
        return RationalInterval._make(pn, pd, pn, pd)
    scaled_lo = (pn << (den * bits)) // pd
    r = iroot(scaled_lo, den)
    exact = r ** den * pd == pn << (den * bits)
    return RationalInterval._make(r, 1 << bits, r if exact else r + 1, 1 << bits)


# logarithms

_TABLE_BITS = 8
_GUARD = 16


def _atanh_fixed(z: int, w: int, upper: bool) -> int:
    """Bound on atanh(z / 2**w) * 2**w for 0 <= z <= 2**w / 3."""
    if z == 0:
        return 0
    if not upper:
        zz = (z * z) >> w
        total, pw, k = 0, z, 1
        while pw:
            total += pw // k
            pw = (pw * zz) >> w
            k += 2
        return total
    zz = -((-z * z) >> w)
    total, pw, k = 0, z, 1
    while pw > 1:
        total += -(-pw // k)
        pw = -((-pw * zz) >> w)
        k += 2
    # tail of the series: sum_j pw z^{2j}/(k+2j) <= pw / (k (1 - z^2))
    total += -(-(pw << w) // (k * ((1 << w) - zz)))
    return total


def _atanh_ratio(num: int, den: int, w: int, upper: bool) -> int:
    z = -(-(num << w) // den) if upper else (num << w) // den
    return _atanh_fixed(z, w, upper)


@lru_cache(maxsize=None)
def _ln2_fixed(w: int):
    # ln 2 = 2 atanh(1/3)
    return 2 * _atanh_ratio(1, 3, w, False), 2 * _atanh_ratio(1, 3, w, True)


@lru_cache(maxsize=None)
def _ln_table(w: int):
    # ln(1 + j/256) = 2 atanh(j / (512 + j))
    size = 1 << _TABLE_BITS
    return tuple(
        (2 * _atanh_ratio(j, 2 * size + j, w, False), 2 * _atanh_ratio(j, 2 * size + j, w, True))
        for j in range(size)
    )


def _ln_fixed(n: int, d: int, w0: int):
    """(lo, hi, w) with lo/2**w <= ln(n/d) <= hi/2**w."""
    if n <= 0 or d <= 0:
        raise ValueError("log of a non-positive number")
    k = floor_log2(n, d)
    w = w0 + _GUARD + abs(k).bit_length()
    y_lo = _scaled(n, d, w - k, False)
    y_hi = _scaled(n, d, w - k, True)
    size = 1 << _TABLE_BITS
    j = (y_lo >> (w - _TABLE_BITS)) - size
    c = (size + j) << w
    # z = (y - c) / (y + c), computed at both ends of y
    lo_tail = 2 * _atanh_ratio(y_lo * size - c, y_lo * size + c, w, False)
    hi_tail = 2 * _atanh_ratio(y_hi * size - c, y_hi * size + c, w, True)
    tab_lo, tab_hi = _ln_table(w)[j]
    l2_lo, l2_hi = _ln2_fixed(w)
    if k >= 0:
        lo = k * l2_lo + tab_lo + lo_tail
        hi = k * l2_hi + tab_hi + hi_tail
    else:
        lo = k * l2_hi + tab_lo + lo_tail
        hi = k * l2_lo + tab_hi + hi_tail
    return lo, hi, w


def ln_enclosure(x, bits: int = DEFAULT_PRECISION_BITS) -> RationalInterval:
    """Certified enclosure of the natural log of a positive rational."""
    n, d = _pair(x)
    lo, hi, w = _ln_fixed(n, d, bits)
    return RationalInterval._make(lo, 1 << w, hi, 1 << w)


def ln_interval(iv: RationalInterval, bits: int = DEFAULT_PRECISION_BITS) -> RationalInterval:
    if not iv.is_positive():
        raise ValueError("log of an interval reaching 0")
    if iv.is_point():
        return ln_enclosure(iv.lo_pair, bits)
    lo, _, wl = _ln_fixed(*iv.lo_pair, bits)
    _, hi, wh = _ln_fixed(*iv.hi_pair, bits)
    return RationalInterval._make(lo, 1 << wl, hi, 1 << wh)


def _exp_fixed(n: int, d: int, w: int, upper: bool):
    """Bound on exp(n/d) for n/d >= 0 as (value, shift): value / 2**shift."""
    l2_lo, l2_hi = _ln2_fixed(w)
    # k = floor(x / ln2_hi) keeps the reduced argument non-negative
    k = (n << w) // (d * l2_hi)
    if upper:
        r = -(-((n << w) - k * l2_lo * d) // d)
    else:
        r = ((n << w) - k * l2_hi * d) // d
    one = 1 << w
    total, term, i = one, one, 1
    if not upper:
        while term:
            term = (term * r >> w) // i
            total += term
            i += 1
    else:
        while term > 1 or i <= 2:
            term = -(-(-(-term * r >> w)) // i)
            total += term
            i += 1
        # remaining terms are bounded by a geometric tail of ratio <= 1/2
        total += 2 * term
    return total, w - k


def exp_interval(iv: RationalInterval, bits: int = DEFAULT_PRECISION_BITS) -> RationalInterval:
    """Certified enclosure of exp over a non-negative interval."""
    if not iv.is_nonnegative():
        raise ValueError("exp_interval expects a non-negative interval")
    w = bits + _GUARD
    lo_v, lo_s = _exp_fixed(*iv.lo_pair, w, False)
    hi_v, hi_s = _exp_fixed(*iv.hi_pair, w, True)

    def as_pair(v, s):
        return (v, 1 << s) if s >= 0 else (v << -s, 1)

    ln_, ld_ = as_pair(lo_v, lo_s)
    hn_, hd_ = as_pair(hi_v, hi_s)
    return RationalInterval._make(ln_, ld_, hn_, hd_)


def format_decimal(n: int, d: int, digits: int, direction: str) -> str:
    """n/d rounded outward to a fixed number of decimals ('down' or 'up')."""
    scale = 10 ** digits
    num = n * scale
    v = -(-num // d) if direction == "up" else num // d
    sign = "-" if v < 0 else ""
    v = abs(v)
    return f"{sign}{v // scale}.{v % scale:0{digits}d}"


def interval_to_state(iv: RationalInterval) -> list:
    """Exact, JSON-friendly form (hex strings) of the unreduced endpoints."""
    return [format(x, "x") if x >= 0 else "-" + format(-x, "x") for x in (iv._ln, iv._ld, iv._hn, iv._hd)]


def interval_from_state(state) -> RationalInterval:
    ln, ld, hn, hd = (int(x, 16) for x in state)
    return RationalInterval._make(ln, ld, hn, hd)
