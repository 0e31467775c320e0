"""Exact continued-fraction arithmetic for words [0; a_1, ..., a_n]."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .evidence import decided
from .interval import RationalInterval, DEFAULT_PRECISION_BITS, sqrt_enclosure


def check_word(word, allow_empty=True) -> tuple:
    w = tuple(word)
    if not w and not allow_empty:
        raise ValueError("partial-quotient word must be nonempty")
    for i, a in enumerate(w):
        if not isinstance(a, int) or isinstance(a, bool) or a < 1:
            raise ValueError(f"partial quotient at position {i + 1} must be a positive integer, got {a!r}")
    return w


@dataclass(frozen=True)
class ConvergentTable:
    """Convergents p_l/q_l of [0; a_1, ..., a_n] for l = 0..n."""
    word: tuple
    p: tuple
    q: tuple

    def __len__(self):
        return len(self.p)

    @property
    def n(self) -> int:
        return len(self.word)

    @property
    def rows(self):
        return [(i, self.p[i], self.q[i]) for i in range(len(self.p))]

    def convergent(self, l: int) -> Fraction:
        return Fraction(self.p[l], self.q[l])

    def alpha_enclosure(self, depth: int | None = None) -> RationalInterval:
        """Interval between convergents depth-1 and depth; contains every extension's value."""
        d = self.n if depth is None else depth
        if not 1 <= d <= self.n:
            raise ValueError(f"depth {d} outside 1..{self.n}")
        return RationalInterval.hull((self.p[d - 1], self.q[d - 1]), (self.p[d], self.q[d]))


def iter_convergents(word, state=(1, 0, 0, 1)) -> Iterator[tuple]:
    """Yield (p_l, q_l) for l = 1, 2, ...; state is (p_{l-2}, q_{l-2}, p_{l-1}, q_{l-1})."""
    pp, qp, p, q = state
    for a in word:
        pp, qp, p, q = p, q, a * p + pp, a * q + qp
        yield p, q


def convergent_table(word) -> ConvergentTable:
    w = check_word(word, allow_empty=False)
    ps, qs = [0], [1]
    for p, q in iter_convergents(w):
        ps.append(p)
        qs.append(q)
    return ConvergentTable(w, tuple(ps), tuple(qs))


def continuant(word) -> int:
    w = check_word(word)
    prev, cur = 0, 1
    for a in w:
        prev, cur = cur, a * cur + prev
    return cur


def mirror(word) -> list:
    return list(word)[::-1]


def cf_value(word) -> Fraction:
    """Exact value of [0; a_1, ..., a_n], evaluated from the tail."""
    w = check_word(word)
    num, den = 0, 1
    for a in reversed(w):
        num, den = den, a * den + num
    return Fraction(num, den)


def mirror_ratio(word, l: int) -> Fraction:
    """q_{l-1}/q_l, checked against the value of [0; a_l, ..., a_1]."""
    w = check_word(word)
    if not 2 <= l <= len(w):
        raise ValueError(f"index {l} outside 2..{len(w)}")
    t = convergent_table(w[:l])
    ratio = Fraction(t.q[l - 1], t.q[l])
    direct = cf_value(mirror(w[:l]))
    if ratio != direct:
        raise AssertionError(f"mirror identity failed at l={l}: {ratio} != {direct}")
    return ratio


def continuant_sandwich(word, k: int):
    """(K_k * K_{m-k}, K_m, 2 K_k K_{m-k}) for the split after position k."""
    w = check_word(word)
    m = len(w)
    if not 1 <= k <= m - 1:
        raise ValueError(f"split point {k} outside 1..{m - 1}")
    lower = continuant(w[:k]) * continuant(w[k:])
    value = continuant(w)
    if not lower <= value <= 2 * lower:
        raise AssertionError(f"continuant sandwich failed at k={k}")
    return lower, value, 2 * lower


def evaluate_interval(word, l: int) -> RationalInterval:
    """Closed interval with endpoints p_l/q_l and p_{l+1}/q_{l+1}."""
    w = check_word(word)
    if l < 0 or l + 1 > len(w):
        raise ValueError(f"need l + 1 <= {len(w)} quotients, got l={l}")
    t = convergent_table(w[:l + 1])
    return t.alpha_enclosure(l + 1)


def reversed_tail_values(word) -> list:
    """x_m = [a_m; a_{m-1}, ..., a_1] = q_m / q_{m-1}; their product is q_n."""
    t = convergent_table(word)
    return [Fraction(t.q[m], t.q[m - 1]) for m in range(1, t.n + 1)]


def fibonacci_pair(k: int):
    """(F_k, F_{k+1}) by fast doubling."""
    if k == 0:
        return 0, 1
    a, b = fibonacci_pair(k >> 1)
    c = a * (2 * b - a)
    d = a * a + b * b
    return (d, c + d) if k & 1 else (c, d)


def golden_power(k: int, bits: int = DEFAULT_PRECISION_BITS) -> RationalInterval:
    """Enclosure of theta^k using theta^k = F_k theta + F_{k-1}."""
    f_prev, f_k = fibonacci_pair(k - 1) if k >= 1 else (1, 0)
    root5 = sqrt_enclosure(5, bits)
    theta = (root5 + 1) * RationalInterval(Fraction(1, 2))
    return theta * f_k + f_prev


def golden_lower_bound_holds(q: int, k: int) -> bool:
    """Exact test of 20 q^2 >= theta^(2k+2)."""
    # theta^(2k+2) = F theta + G with F = F_{2k+2}, G = F_{2k+1}; theta = (1 + sqrt 5)/2
    g, f = fibonacci_pair(2 * k + 1)
    lhs = 40 * q * q - 2 * g - f
    return lhs >= 0 and lhs * lhs >= 5 * f * f


def golden_lower_bound_check(table: ConvergentTable, bits: int = DEFAULT_PRECISION_BITS) -> list:
    """Per-index evidence for q_k >= theta^(k+1) / (2 sqrt 5), decided with integers."""
    out = []
    for k in range(1, len(table.q)):
        q = table.q[k]
        out.append(decided(
            k, "20*q_k^2 >= theta^(2k+2)",
            RationalInterval(20 * q * q), ">=", golden_power(2 * k + 2, bits),
            golden_lower_bound_holds(q, k),
        ))
    return out


_LOG2_3_UP = Fraction(317, 200)


def growth_floor_failures(q_values: Sequence[int]) -> list:
    """Indices l violating q_l >= (3/2)^l (l >= 5) or q_l^2 >= 2^l (l >= 3).

    q_values[l] is q_l; entries below the floors' starting indices are ignored.
    """
    bad = []
    pow3 = 1
    for l, q in enumerate(q_values):
        if l > 0:
            pow3 *= 3
        if l >= 3 and 2 * (q.bit_length() - 1) < l and q * q < (1 << l):
            bad.append((l, "q^2 >= 2^l"))
        if l >= 5:
            # q >= 2^(bl-1) and (3/2)^l < 2^(l*(log2(3)-1)) give a cheap sufficient test
            if q.bit_length() - 1 >= math.ceil((_LOG2_3_UP - 1) * l):
                continue
            if (q << l) < pow3:
                bad.append((l, "q >= (3/2)^l"))
    return bad


def determinant_failures(table: ConvergentTable) -> list:
    return [l for l in range(1, len(table.p))
            if abs(table.p[l] * table.q[l - 1] - table.p[l - 1] * table.q[l]) != 1]


def matrix_product(word):
    """Product of [[a, 1], [1, 0]] over the word, as ((q_n, q_{n-1}), (p_n, p_{n-1}))."""
    m = ((1, 0), (0, 1))
    for a in check_word(word):
        (x, y), (z, t) = m
        m = ((a * x + y, x), (a * z + t, z))
    return m


def composite_convergents(table: ConvergentTable, t: int, r: int):
    """Last two convergents of [0; a_1..a_t, a_r..a_1] from the prefix table.

    Returns (P, Q, P', Q') where P/Q is the full value and P'/Q' the previous
    convergent; uses M_t times the transpose of M_r.
    """
    p, q = table.p, table.q
    if r == 0:
        return p[t], q[t], p[t - 1], q[t - 1]
    Q = q[t] * q[r] + q[t - 1] * q[r - 1]
    Qp = q[t] * p[r] + q[t - 1] * p[r - 1]
    P = p[t] * q[r] + p[t - 1] * q[r - 1]
    Pp = p[t] * p[r] + p[t - 1] * p[r - 1]
    return P, Q, Pp, Qp

