"""Partial-quotient word families and the sequence-spec grammar.

Families: Thue-Morse words, Baker words a^l1 b^l2 a^l3 ..., and the
inductive palindromic construction with a prescribed approximation order.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .cf_core import check_word
from .interval import RationalInterval, ceil_root, rational_power_enclosure, DEFAULT_PRECISION_BITS


# Thue-Morse

def thue_morse_word(a: int, b: int, N: int) -> list:
    """a_n = a when the binary digit sum of n is odd, b otherwise, for n = 1..N."""
    if a == b:
        raise ValueError("Thue-Morse letters must differ")
    check_word([a, b])
    if N < 1:
        raise ValueError("N must be >= 1")
    return [a if bin(n).count("1") & 1 else b for n in range(1, N + 1)]


# run-length helpers

def run_length_encode(word) -> list:
    out = []
    for x in word:
        if out and out[-1][0] == x:
            out[-1][1] += 1
        else:
            out.append([x, 1])
    return [tuple(r) for r in out]


def run_length_decode(runs) -> list:
    out = []
    for x, k in runs:
        if k < 1:
            raise ValueError("run lengths must be >= 1")
        out.extend([x] * k)
    return out


# Baker words

@dataclass(frozen=True)
class BakerSpec:
    """Word a^l1 b^l2 a^l3 ... from explicit lambdas or the rule l_{n+1} = ceil(gamma l_n)."""
    a: int
    b: int
    lambdas: Optional[tuple] = None
    gamma: Optional[Fraction] = None
    seed: int = 1

    def __post_init__(self):
        check_word([self.a, self.b])
        if self.a == self.b:
            raise ValueError("Baker letters must differ")
        if (self.lambdas is None) == (self.gamma is None):
            raise ValueError("give exactly one of lambdas or gamma")
        if self.lambdas is not None:
            lams = tuple(self.lambdas)
            if not lams or any(not isinstance(x, int) or x < 1 for x in lams):
                raise ValueError("lambdas must be positive integers")
            object.__setattr__(self, "lambdas", lams)
        else:
            g = Fraction(self.gamma)
            if g <= 0:
                raise ValueError("gamma must be positive")
            if self.seed < 1:
                raise ValueError("seed must be >= 1")
            object.__setattr__(self, "gamma", g)

    def lambda_terms(self, count: int) -> list:
        """First count terms of Lambda (fewer if an explicit list is shorter)."""
        if self.lambdas is not None:
            return list(self.lambdas[:count])
        out = []
        lam = self.seed
        for _ in range(count):
            out.append(lam)
            lam = max(1, math.ceil(self.gamma * lam))
        return out

    def letter(self, k: int) -> int:
        """Letter of the k-th block (1-based)."""
        return self.a if k % 2 else self.b

    def block_bounds(self, blocks: int) -> list:
        """c_0 = 0, c_k = l_1 + ... + l_k."""
        c = [0]
        for lam in self.lambda_terms(blocks):
            c.append(c[-1] + lam)
        return c

    def blocks_for_length(self, N: int) -> int:
        """Number of Lambda terms needed to cover N symbols."""
        k, total = 0, 0
        while total < N:
            k += 1
            terms = self.lambda_terms(k)
            if len(terms) < k:
                raise ValueError(f"explicit lambda list exhausted after {total} symbols, {N} requested")
            total += terms[-1]
        return k

    def canonical(self) -> str:
        if self.lambdas is not None:
            return f"baker({self.a},{self.b};lambdas={','.join(map(str, self.lambdas))})"
        return f"baker({self.a},{self.b};gamma={self.gamma},seed={self.seed})"


def baker_word(spec: BakerSpec, N: int) -> list:
    if N < 1:
        raise ValueError("N must be >= 1")
    k = spec.blocks_for_length(N)
    runs = [(spec.letter(i + 1), lam) for i, lam in enumerate(spec.lambda_terms(k))]
    return run_length_decode(runs)[:N]


def baker_spec_from_runs(word) -> BakerSpec:
    """Inverse of baker_word for a word that ends on a block boundary."""
    runs = run_length_encode(word)
    if len(runs) < 2:
        raise ValueError("need at least two runs to recover both letters")
    a, b = runs[0][0], runs[1][0]
    for i, (x, _) in enumerate(runs):
        if x != (a if i % 2 == 0 else b):
            raise ValueError("runs do not alternate between two letters")
    return BakerSpec(a, b, lambdas=tuple(k for _, k in runs))


# approximation-order functions

@dataclass(frozen=True)
class ApproxOrderFunction:
    """phi(x) = c x^(-s) with rational c > 0 and s > 2, or a table of (x, phi(x)).

    Psi(x) = x^2 phi(x) must be non-increasing; for tables this is checked at
    load and values between table points are bounded by the neighbouring
    entries (step functions), never interpolated.
    """
    c: Optional[Fraction] = None
    s: Optional[Fraction] = None
    table: Optional[tuple] = None

    def __post_init__(self):
        if self.table is None:
            c, s = Fraction(self.c), Fraction(self.s)
            if c <= 0 or s <= 2:
                raise ValueError("power family needs c > 0 and s > 2")
            object.__setattr__(self, "c", c)
            object.__setattr__(self, "s", s)
        else:
            rows = tuple((Fraction(x), Fraction(y)) for x, y in self.table)
            if len(rows) < 2:
                raise ValueError("table needs at least two points")
            prev_x, prev_psi = None, None
            for x, y in rows:
                if x < 1 or y <= 0:
                    raise ValueError("table needs x >= 1 and phi(x) > 0")
                if prev_x is not None and x <= prev_x:
                    raise ValueError("table x values must increase")
                psi = x * x * y
                if prev_psi is not None and psi > prev_psi:
                    raise ValueError(f"x^2 phi(x) increases at x = {x}")
                prev_x, prev_psi = x, psi
            object.__setattr__(self, "table", rows)

    @classmethod
    def power(cls, c=1, s=3):
        return cls(c=Fraction(c), s=Fraction(s))

    @classmethod
    def from_table(cls, rows):
        return cls(table=tuple(rows))

    @property
    def is_power(self) -> bool:
        return self.table is None

    def canonical(self) -> str:
        if self.is_power:
            return f"thm5({self.c},{self.s})"
        return "thm5-table(" + ";".join(f"{x}:{y}" for x, y in self.table) + ")"

    # table helpers: Psi is bracketed by its values at neighbouring points

    def _table_bracket(self, x: Fraction):
        rows = self.table
        if x < rows[0][0] or x > rows[-1][0]:
            raise TableExhausted(f"x = {float(x):.6g} outside the table range")
        lo_i = max(i for i, (tx, _) in enumerate(rows) if tx <= x)
        hi_i = min(i for i, (tx, _) in enumerate(rows) if tx >= x)
        psi = [tx * tx * ty for tx, ty in rows]
        return psi[hi_i], psi[lo_i]

    def psi_at_most(self, x: Fraction, bound: Fraction) -> bool:
        """Certified test of Psi(x) <= bound."""
        if self.is_power:
            # c x^(2 - s) <= T  <=>  x^(u - 2v) >= (c / T)^v  with s = u / v
            u, v = self.s.numerator, self.s.denominator
            return x ** (u - 2 * v) >= (self.c / bound) ** v
        return self._table_bracket(x)[1] <= bound

    def ceil_inv_psi(self, q: int) -> int:
        """ceil(1 / Psi(q)); for tables an upper bound built from a lower bound on Psi."""
        if self.is_power:
            u, v = self.s.numerator, self.s.denominator
            cn, cd = self.c.numerator, self.c.denominator
            # smallest b with (b c)^v >= q^(u - 2v)
            root = ceil_root(q ** (u - 2 * v) * cd ** v, v)
            return -(-root // cn)
        lo = self._table_bracket(Fraction(q))[0]
        return math.ceil(1 / lo)

    def phi_enclosure(self, x, bits: int = DEFAULT_PRECISION_BITS) -> RationalInterval:
        x = Fraction(x)
        if self.is_power:
            u, v = self.s.numerator, self.s.denominator
            return rational_power_enclosure(x, -u, v, bits) * self.c
        psi_lo, psi_hi = self._table_bracket(x)
        return RationalInterval(psi_lo / (x * x), psi_hi / (x * x))

    def psi_enclosure(self, x, bits: int = DEFAULT_PRECISION_BITS) -> RationalInterval:
        x = Fraction(x)
        return self.phi_enclosure(x, bits) * (x * x)


class TableExhausted(ValueError):
    pass


# inductive construction

@dataclass(frozen=True)
class Theorem5State:
    """Quotients built so far with the large-quotient positions n_1 < n_2 < ...

    tail holds (p_{L-1}, q_{L-1}, p_L, q_L) for the current length L so the next
    stage can continue the recurrence without rebuilding the table.
    """
    phi: ApproxOrderFunction
    quotients: tuple
    checkpoints: tuple
    completions: tuple
    tail: tuple
    q_before: tuple = ()  # q_{n_j - 1} for each checkpoint

    @property
    def stages(self) -> int:
        return len(self.checkpoints)

    @property
    def length(self) -> int:
        return len(self.quotients)

    def large(self, j: int) -> int:
        """b_{n_j} for 1-based stage j."""
        return self.quotients[self.checkpoints[j - 1] - 1]


def _advance(tail, word):
    pp, qp, p, q = tail
    for a in word:
        pp, qp, p, q = p, q, a * p + pp, a * q + qp
    return pp, qp, p, q


def _threshold_ok(phi: ApproxOrderFunction, n: int, bound: Fraction) -> bool:
    # Psi((3/2)^(n-1)) <= bound; since Psi is non-increasing this covers every larger index
    return phi.psi_at_most(Fraction(3, 2) ** (n - 1), bound)


def _least_index(phi: ApproxOrderFunction, lower: int, bound: Fraction) -> int:
    """Least n > lower with the threshold satisfied at n."""
    n = lower + 1
    if phi.is_power:
        # jump close to the answer, then walk to the least admissible index
        u, v = phi.s.numerator, phi.s.denominator
        k = Fraction(u - 2 * v, v)
        # math.log accepts big integers, so the ratio c / bound never underflows
        need = (math.log(phi.c.numerator) - math.log(phi.c.denominator)
                + math.log(bound.denominator) - math.log(bound.numerator))
        est = int(need / (float(k) * math.log(1.5))) + 1
        n = max(n, est - 2)
        while n - 1 > lower and _threshold_ok(phi, n - 1, bound):
            n -= 1
    while not _threshold_ok(phi, n, bound):
        n += 1
    return n


def _stage(state: Theorem5State | None, phi: ApproxOrderFunction) -> Theorem5State:
    if state is None:
        quotients, checkpoints, completions, q_before = [], [], [], []
        tail = (1, 0, 0, 1)
        lower, bound = 5, Fraction(1, 10)
    else:
        quotients = list(state.quotients)
        checkpoints = list(state.checkpoints)
        completions = list(state.completions)
        q_before = list(state.q_before)
        tail = state.tail
        nj = checkpoints[-1]
        lower = nj if len(checkpoints) == 1 else 2 * nj
        bound = Fraction(1, 10 * state.large(len(checkpoints)))
    n = _least_index(phi, lower, bound)
    if not (n - 1 <= lower or not _threshold_ok(phi, n - 1, bound)):
        raise AssertionError(f"index {n} is not the least admissible one")
    for extra in (1, 2, 5):
        if not _threshold_ok(phi, n + extra, bound):
            raise ValueError("x^2 phi(x) is not non-increasing on the probed points")
    ones = [1] * (n - 1 - len(quotients))
    tail = _advance(tail, ones)
    quotients += ones
    q = tail[3]
    b = phi.ceil_inv_psi(q)
    if checkpoints and b < 10 * quotients[checkpoints[-1] - 1]:
        raise AssertionError(f"large quotient {b} at {n} is below ten times the previous one")
    if not checkpoints and b < 10:
        raise AssertionError("first large quotient is below 10")
    quotients.append(b)
    tail = _advance(tail, [b])
    checkpoints.append(n)
    q_before.append(q)
    if len(checkpoints) >= 2:
        # complete by symmetry around the new centre
        mirror_part = quotients[: n - 1][::-1]
        tail = _advance(tail, mirror_part)
        quotients += mirror_part
        completions.append(2 * n - 1)
    return Theorem5State(phi, tuple(quotients), tuple(checkpoints), tuple(completions), tail,
                         tuple(q_before))


def theorem5_word(phi: ApproxOrderFunction, stages: int) -> Theorem5State:
    """Run the construction for the given number of stages."""
    if stages < 1:
        raise ValueError("need at least one stage")
    state = None
    for j in range(stages):
        try:
            state = _stage(state, phi)
        except TableExhausted as exc:
            done = 0 if state is None else state.stages
            raise TableExhausted(f"{exc}; largest completed stage: {done}") from None
    return state


def extend_stage(state: Theorem5State) -> Theorem5State:
    return _stage(state, state.phi)


def truncate(state: Theorem5State, N: int) -> list:
    """First N quotients, extending the construction when needed."""
    while state.length < N:
        state = extend_stage(state)
    return list(state.quotients[:N])


def corrupt_large_quotient(state: Theorem5State, j: int, delta: int = -1) -> tuple:
    """Quotients with b_{n_j} shifted by delta (the mirror copy is left untouched)."""
    q = list(state.quotients)
    pos = state.checkpoints[j - 1] - 1
    q[pos] += delta
    if q[pos] < 1:
        raise ValueError("corruption would make a quotient non-positive")
    return tuple(q)


def misplace_large_quotient(state: Theorem5State, j: int, shift: int = 1) -> tuple:
    """Quotients with b_{n_j} swapped with the 1 that sits shift places later."""
    q = list(state.quotients)
    pos = state.checkpoints[j - 1] - 1
    if q[pos + shift] != 1:
        raise ValueError("target position does not hold a 1")
    q[pos], q[pos + shift] = q[pos + shift], q[pos]
    return tuple(q)


# sequence-spec grammar

class SpecParseError(ValueError):
    def __init__(self, text: str, pos: int, msg: str):
        self.text, self.pos, self.msg = text, pos, msg
        super().__init__(f"{msg} at position {pos}: {text!r}\n{' ' * (pos + 1)}^")


@dataclass(frozen=True)
class SequenceSpec:
    kind: str  # explicit | runs | tm | baker | thm5
    params: tuple = ()
    baker: Optional[BakerSpec] = None
    phi: Optional[ApproxOrderFunction] = None

    def canonical(self) -> str:
        if self.kind == "explicit":
            return "explicit:[" + ",".join(map(str, self.params)) + "]"
        if self.kind == "runs":
            return "runs:" + ",".join(f"{x}^{k}" for x, k in self.params)
        if self.kind == "tm":
            return f"tm({self.params[0]},{self.params[1]})"
        if self.kind == "baker":
            return self.baker.canonical()
        return self.phi.canonical()

    def __str__(self):
        return self.canonical()

    @property
    def finite_length(self) -> Optional[int]:
        if self.kind == "explicit":
            return len(self.params)
        if self.kind == "runs":
            return sum(k for _, k in self.params)
        if self.kind == "baker" and self.baker.lambdas is not None:
            return sum(self.baker.lambdas)
        return None

    def word(self, N: Optional[int] = None, stages: Optional[int] = None) -> list:
        """Generate N symbols (or the whole finite word, or thm5 stages)."""
        if self.kind == "thm5":
            if stages is not None:
                w = list(theorem5_word(self.phi, stages).quotients)
                return w if N is None else w[:N]
            if N is None:
                raise ValueError("thm5 needs N or a stage count")
            return truncate(theorem5_word(self.phi, 1), N)
        limit = self.finite_length
        if N is None:
            if limit is None:
                raise ValueError(f"{self.canonical()} is infinite; give N")
            N = limit
        if limit is not None and N > limit:
            raise ValueError(f"{self.canonical()} has only {limit} symbols, {N} requested")
        if self.kind == "explicit":
            return list(self.params[:N])
        if self.kind == "runs":
            return run_length_decode(self.params)[:N]
        if self.kind == "tm":
            return thue_morse_word(self.params[0], self.params[1], N)
        return baker_word(self.baker, N)


class _Cursor:
    def __init__(self, text):
        self.text, self.pos = text, 0

    def fail(self, msg):
        raise SpecParseError(self.text, self.pos, msg)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos] == " ":
            self.pos += 1

    def eat(self, lit):
        self.skip()
        if not self.text.startswith(lit, self.pos):
            self.fail(f"expected {lit!r}")
        self.pos += len(lit)

    def peek(self, lit):
        self.skip()
        return self.text.startswith(lit, self.pos)

    def integer(self, what="integer"):
        self.skip()
        m = re.compile(r"\d+").match(self.text, self.pos)
        if not m:
            self.fail(f"expected {what}")
        self.pos = m.end()
        return int(m.group())

    def positive(self, what="positive integer"):
        start = self.pos
        x = self.integer(what)
        if x < 1:
            self.pos = start
            self.skip()
            self.fail(f"expected {what}")
        return x

    def rational(self, what="rational"):
        self.skip()
        m = re.compile(r"\d+(/\d+)?").match(self.text, self.pos)
        if not m:
            self.fail(f"expected {what}")
        if m.group(1) and int(m.group(1)[1:]) == 0:
            self.fail("zero denominator")
        self.pos = m.end()
        return Fraction(m.group())

    def word(self):
        self.skip()
        m = re.compile(r"[a-z0-9]+").match(self.text, self.pos)
        if not m:
            self.fail("expected a name")
        self.pos = m.end()
        return m.group()

    def end(self):
        self.skip()
        if self.pos != len(self.text):
            self.fail("unexpected trailing text")


def parse_spec(text: str) -> SequenceSpec:
    """Parse `explicit:[..]`, `runs:x^k,..`, `tm(a,b)`, `baker(a,b;..)` or `thm5(c,s)`."""
    cur = _Cursor(text)
    cur.skip()
    start = cur.pos
    name = cur.word()
    if name == "explicit":
        cur.eat(":")
        cur.eat("[")
        vals = [cur.positive()]
        while cur.peek(","):
            cur.eat(",")
            vals.append(cur.positive())
        cur.eat("]")
        cur.end()
        return SequenceSpec("explicit", tuple(vals))
    if name == "runs":
        cur.eat(":")
        runs = []
        while True:
            x = cur.positive("quotient")
            cur.eat("^")
            k = cur.positive("run length")
            runs.append((x, k))
            if not cur.peek(","):
                break
            cur.eat(",")
        cur.end()
        return SequenceSpec("runs", tuple(runs))
    if name == "tm":
        cur.eat("(")
        a = cur.positive()
        cur.eat(",")
        b_pos = cur.pos
        b = cur.positive()
        cur.eat(")")
        cur.end()
        if a == b:
            cur.pos = b_pos
            cur.fail("Thue-Morse letters must differ")
        return SequenceSpec("tm", (a, b))
    if name == "baker":
        cur.eat("(")
        a = cur.positive()
        cur.eat(",")
        b_pos = cur.pos
        b = cur.positive()
        if a == b:
            cur.pos = b_pos
            cur.fail("Baker letters must differ")
        cur.eat(";")
        key_pos = cur.pos
        key = cur.word()
        cur.eat("=")
        if key == "lambdas":
            lams = [cur.positive("lambda")]
            while cur.peek(","):
                cur.eat(",")
                lams.append(cur.positive("lambda"))
            spec = BakerSpec(a, b, lambdas=tuple(lams))
        elif key == "gamma":
            g_pos = cur.pos
            g = cur.rational("gamma")
            if g <= 0:
                cur.pos = g_pos
                cur.fail("gamma must be positive")
            seed = 1
            if cur.peek(","):
                cur.eat(",")
                cur.eat("seed")
                cur.eat("=")
                seed = cur.positive("seed")
            spec = BakerSpec(a, b, gamma=g, seed=seed)
        else:
            cur.pos = key_pos
            cur.fail("expected 'lambdas' or 'gamma'")
        cur.eat(")")
        cur.end()
        return SequenceSpec("baker", baker=spec)
    if name == "thm5":
        cur.eat("(")
        c_pos = cur.pos
        c = cur.rational("c")
        if c <= 0:
            cur.pos = c_pos
            cur.fail("c must be positive")
        cur.eat(",")
        s_pos = cur.pos
        s = cur.rational("s")
        if s <= 2:
            cur.pos = s_pos
            cur.skip()
            cur.fail("s must exceed 2")
        cur.eat(")")
        cur.end()
        return SequenceSpec("thm5", phi=ApproxOrderFunction.power(c, s))
    cur.pos = start
    cur.fail(f"unknown sequence kind {name!r}")
