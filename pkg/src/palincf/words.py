"""Palindromic prefixes, quasi-palindromic prefixes and periodicity scans.

Words are sequences of integers compared by equality only. Internally all
positions are 0-based; witness lengths (r, u, v) count symbols.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

# words longer than this are truncated before the O(n^2) offset scan
DEFAULT_SCAN_BUDGET = 20000


def manacher(word):
    """Return (d1, d2): odd and even palindrome radii at each centre.

    d1[i] is the number of odd palindromes centred at i; d2[i] the number of
    even palindromes whose right centre is i.
    """
    s = list(word)
    n = len(s)
    d1 = [0] * n
    l, r = 0, -1
    for i in range(n):
        k = 1 if i > r else min(d1[l + r - i], r - i + 1)
        while i - k >= 0 and i + k < n and s[i - k] == s[i + k]:
            k += 1
        d1[i] = k
        if i + k - 1 > r:
            l, r = i - k + 1, i + k - 1
    d2 = [0] * n
    l, r = 0, -1
    for i in range(n):
        k = 0 if i > r else min(d2[l + r - i + 1], r - i + 1)
        while i - k - 1 >= 0 and i + k < n and s[i - k - 1] == s[i + k]:
            k += 1
        d2[i] = k
        if i + k - 1 > r:
            l, r = i - k, i + k - 1
    return d1, d2


def palindromic_prefix_lengths(word) -> list:
    """All n >= 1 such that word[:n] is a palindrome, increasing."""
    d1, d2 = manacher(word)
    n = len(d1)
    out = []
    for m in range(1, n + 1):
        k = m // 2
        if m % 2:
            if d1[k] >= k + 1:
                out.append(m)
        elif d2[k] >= k:
            out.append(m)
    return out


def is_palindrome(word) -> bool:
    w = list(word)
    return w == w[::-1]


def z_function(s) -> list:
    n = len(s)
    z = [0] * n
    if n:
        z[0] = n
    l = r = 0
    for i in range(1, n):
        k = min(r - i, z[i - l]) if i < r else 0
        while i + k < n and s[k] == s[i + k]:
            k += 1
        z[i] = k
        if i + k > r:
            l, r = i, i + k
    return z


def mirror_match_lengths(word) -> list:
    """L[e] = largest l with word[e - j] == word[j] for all j < l (capped at e + 1)."""
    w = list(word)
    n = len(w)
    sentinel = object()
    z = z_function(w + [sentinel] + w[::-1])
    return [z[n + 1 + (n - 1 - e)] for e in range(n)]


@dataclass(frozen=True, order=True)
class QuasiPalindromeWitness:
    """Prefix W U V mirror(U) with |W| = r, |U| = u, |V| = v."""
    r: int
    u: int
    v: int

    def __post_init__(self):
        if self.r < 0 or self.u < 1 or self.v < 0:
            raise ValueError("need r >= 0, u >= 1, v >= 0")

    @property
    def order(self) -> Fraction:
        return Fraction(self.v, self.u)

    @property
    def offset_ratio(self):
        return math.inf if self.r == 0 else Fraction(self.u, self.r)

    @property
    def length(self) -> int:
        return self.r + 2 * self.u + self.v

    # indices used by the approximation bounds
    @property
    def s(self) -> int:
        """End of the mirrored block for r = 0, end of W U otherwise."""
        return 2 * self.u + self.v if self.r == 0 else self.r + self.u

    @property
    def t(self) -> int:
        return self.length

    def verify(self, word) -> bool:
        r, u, v = self.r, self.u, self.v
        if self.length > len(word):
            return False
        return all(word[r + u + v + i] == word[r + u - 1 - i] for i in range(u))

    def to_json(self) -> dict:
        return {"r": self.r, "u": self.u, "v": self.v, "order": str(self.order),
                "offset_ratio": "inf" if self.r == 0 else str(self.offset_ratio)}


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def find_quasi_palindrome_witnesses(word, w_max, u_min: int = 1, all_v: bool = False) -> list:
    """Prefixes U V mirror(U) with |V| <= w_max |U|, one per |U| (smallest |V|).

    With all_v=True every admissible v is returned instead.
    """
    w_max = _as_fraction(w_max)
    if w_max < 0 or u_min < 1:
        raise ValueError("need w_max >= 0 and u_min >= 1")
    n = len(word)
    if n == 0:
        return []
    L = mirror_match_lengths(word)
    out = []
    if all_v:
        for e in range(n):
            for u in range(max(u_min, 1), min(L[e], (e + 1) // 2) + 1):
                v = e + 1 - 2 * u
                if v <= w_max * u:
                    out.append(QuasiPalindromeWitness(0, u, v))
        out.sort(key=lambda x: (x.u, x.v))
        return out

    # positions e sorted by L[e]; deactivate those with L[e] < u as u grows
    nxt = list(range(n + 1))

    def find(i):
        root = i
        while nxt[root] != root:
            root = nxt[root]
        while nxt[i] != root:
            nxt[i], i = root, nxt[i]
        return root

    by_len = sorted(range(n), key=L.__getitem__)
    k = 0
    for u in range(1, n // 2 + 1):
        while k < n and L[by_len[k]] < u:
            e = by_len[k]
            nxt[e] = e + 1
            k += 1
        if u < u_min:
            continue
        lo = 2 * u - 1
        hi = min(n - 1, lo + math.floor(w_max * u))
        e = find(lo)
        if e <= hi:
            out.append(QuasiPalindromeWitness(0, u, e - lo))
    return out


def _mirror_runs(arr: np.ndarray, budget: int):
    """Yield (g, A_g) where A_g[x] = #i with a[x - i] == a[x + g + i] consecutively from i = 0."""
    n = len(arr)
    prev2 = np.zeros(n, dtype=np.int32)  # A_{g+2}
    prev1 = np.zeros(n, dtype=np.int32)  # A_{g+1}
    for g in range(min(budget, n - 1), 0, -1):
        cur = np.zeros(n, dtype=np.int32)
        eq = arr[: n - g] == arr[g:]
        cur[: n - g] = eq
        # extend outward: A_g[x] = 1 + A_{g+2}[x - 1] when the centre pair matches
        cur[1: n - g] += eq[1:] * prev2[: n - g - 1]
        yield g, cur
        prev2, prev1 = prev1, cur


def find_offset_witnesses(word, w_max, wprime_min, u_min: int = 1, all_witnesses: bool = False,
                          scan_budget: int = DEFAULT_SCAN_BUDGET) -> list:
    """Prefixes W U V mirror(U) with |W| >= 1, |V| <= w_max |U| and |U| >= wprime_min |W|.

    One witness per |U|: the one ending earliest, ties broken by smallest |V|.
    Words longer than scan_budget are scanned on their first scan_budget symbols.
    """
    w_max = _as_fraction(w_max)
    wp = _as_fraction(wprime_min)
    if wp <= 0:
        raise ValueError("wprime_min must be positive")
    if w_max < 0 or u_min < 1:
        raise ValueError("need w_max >= 0 and u_min >= 1")
    n = min(len(word), scan_budget)
    if n < 3:
        return []
    ids: dict = {}
    arr = np.asarray([ids.setdefault(a, len(ids)) for a in word[:n]], dtype=np.int64)
    a, b = wp.numerator, wp.denominator
    umax = n // 2
    us = np.arange(umax + 1, dtype=np.int64)
    # x0 = r + u - 1 must not exceed floor(u (a + b) / a) - 1
    xmax = (us * (a + b)) // a - 1
    big = np.iinfo(np.int64).max
    best_t = np.full(umax + 1, big, dtype=np.int64)
    best_g = np.zeros(umax + 1, dtype=np.int64)
    found = []
    vmax = math.floor(w_max * umax)
    for g, A in _mirror_runs(arr, n - 1):
        v = g - 1
        if v > vmax:
            continue
        hi = np.minimum(A, np.arange(n, dtype=np.int32))
        if all_witnesses:
            xs = np.nonzero(hi >= u_min)[0]
            for x in xs:
                for u in range(u_min, int(hi[x]) + 1):
                    if v <= w_max * u and x <= xmax[u]:
                        found.append(QuasiPalindromeWitness(int(x) - u + 1, u, v))
            continue
        pm = np.maximum.accumulate(hi)
        first = np.searchsorted(pm, us, side="left")  # smallest x with hi[x] >= u
        ok = (first < n) & (first <= xmax) & (us >= u_min)
        # v <= w_max u
        ok &= v * w_max.denominator <= w_max.numerator * us
        t = np.where(ok, first + g + us, big)
        better = t <= best_t  # g decreasing, so ties resolve to smaller v
        best_g = np.where(better & ok, g, best_g)
        best_t = np.where(better & ok, t, best_t)
    if all_witnesses:
        return sorted(set(found), key=lambda x: (x.u, x.r, x.v))
    out = []
    for u in range(umax + 1):
        if best_t[u] != big:
            g = int(best_g[u])
            x0 = int(best_t[u]) - g - u
            out.append(QuasiPalindromeWitness(x0 - u + 1, u, g - 1))
    return out


def eventual_periodicity_scan(word, max_period: int, max_preperiod: int) -> Optional[tuple]:
    """Smallest period p <= max_period (then its least preperiod) consistent with the prefix.

    A candidate needs at least two full periods after the preperiod. A None
    result only says no small period was seen; it does not certify aperiodicity.
    """
    if max_period < 1 or max_preperiod < 1:
        raise ValueError("bounds must be >= 1")
    w = list(word)
    n = len(w)
    for p in range(1, max_period + 1):
        last_bad = -1
        for i in range(n - p - 1, -1, -1):
            if w[i] != w[i + p]:
                last_bad = i
                break
        pre = last_bad + 1
        if pre <= max_preperiod and n - pre >= 2 * p:
            return pre, p
    return None
