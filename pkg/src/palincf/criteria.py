"""Hypothesis checkers and inequality certificates for the palindromic criteria.

Every inequality is decided by comparing exact rational enclosures. The real
number alpha is enclosed between two consecutive convergents of the longest
available prefix; logarithms and square roots use the certified enclosures
from ``interval``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .cf_core import check_word, composite_convergents, convergent_table, growth_floor_failures, ConvergentTable
from .evidence import CriterionReport, InequalityEvidence, decided
from .generators import ApproxOrderFunction, BakerSpec, Theorem5State, baker_word, extend_stage
from .interval import (
    DEFAULT_PRECISION_BITS, RationalInterval, approx_log2, exp_interval, format_decimal,
    interval_from_state, interval_to_state, ln_enclosure, ln_interval, sqrt_enclosure, sqrt_interval,
)
from .words import (
    QuasiPalindromeWitness, find_offset_witnesses, find_quasi_palindrome_witnesses,
    palindromic_prefix_lengths, DEFAULT_SCAN_BUDGET,
)

# extra convergents beyond an index before alpha's enclosure is used, doubled on overlap
BASE_DEPTH = 8
MAX_DOUBLINGS = 3
DEPTH_MARGIN = BASE_DEPTH << MAX_DOUBLINGS


def golden_bound_constant(bits: int = DEFAULT_PRECISION_BITS) -> RationalInterval:
    """20 / theta^3 = 20 sqrt(5) - 40."""
    return sqrt_enclosure(5, bits) * 20 - 40


def _alpha(p_prev, q_prev, p, q) -> RationalInterval:
    return RationalInterval.hull((p_prev, q_prev), (p, q))


# growth of q_l^(1/l)

class _Extremes:
    """Running enclosures of min and max of a family of intervals."""

    def __init__(self):
        self.min_lo = self.min_hi = self.max_lo = self.max_hi = None
        self.argmin = self.argmax = None

    def add(self, l: int, iv: RationalInterval):
        lo, hi = iv.lo_pair, iv.hi_pair

        def less(a, b):
            return a[0] * b[1] < b[0] * a[1]

        if self.min_lo is None:
            self.min_lo, self.min_hi, self.max_lo, self.max_hi = lo, hi, lo, hi
            self.argmin = self.argmax = l
            return
        if less(lo, self.min_lo):
            self.min_lo = lo
        if less(hi, self.min_hi):
            self.min_hi, self.argmin = hi, l
        if less(self.max_lo, lo):
            self.max_lo, self.argmax = lo, l
        if less(self.max_hi, hi):
            self.max_hi = hi

    @property
    def empty(self):
        return self.min_lo is None

    def minimum(self) -> RationalInterval:
        return RationalInterval._make(*self.min_lo, *self.min_hi)

    def maximum(self) -> RationalInterval:
        return RationalInterval._make(*self.max_lo, *self.max_hi)

    def to_state(self):
        if self.empty:
            return None
        return {"min": interval_to_state(self.minimum()), "max": interval_to_state(self.maximum()),
                "argmin": self.argmin, "argmax": self.argmax}

    @classmethod
    def from_state(cls, st):
        e = cls()
        if st is not None:
            mn, mx = interval_from_state(st["min"]), interval_from_state(st["max"])
            e.min_lo, e.min_hi = mn.lo_pair, mn.hi_pair
            e.max_lo, e.max_hi = mx.lo_pair, mx.hi_pair
            e.argmin, e.argmax = st["argmin"], st["argmax"]
        return e


def log_growth(q: int, l: int, bits: int) -> RationalInterval:
    """Enclosure of log(q) / l."""
    return ln_enclosure(q, bits) * RationalInterval(Fraction(1, l))


def default_windows(l_max: int):
    return (max(1, l_max // 2), l_max), (max(1, l_max // 4), l_max)


@dataclass
class GrowthEstimate:
    """Windowed extremes of q_l^(1/l), kept in log form until reported."""
    window: tuple
    sensitivity: tuple
    main: _Extremes
    wide: _Extremes
    floor_failures: list = field(default_factory=list)
    bits: int = DEFAULT_PRECISION_BITS

    @property
    def log_m(self) -> RationalInterval:
        return self.main.minimum()

    @property
    def log_M(self) -> RationalInterval:
        return self.main.maximum()

    @property
    def m_hat(self) -> RationalInterval:
        return exp_interval(self.log_m, self.bits)

    @property
    def M_hat(self) -> RationalInterval:
        return exp_interval(self.log_M, self.bits)

    def threshold(self, ext: Optional[_Extremes] = None) -> RationalInterval:
        """2 log M / log m - 1 over the given window."""
        ext = ext or self.main
        return ext.maximum() * 2 / ext.minimum() - 1

    def to_json(self) -> dict:
        def pack(ext, window):
            return {
                "window": list(window),
                "m_hat": exp_interval(ext.minimum(), self.bits).to_json(),
                "M_hat": exp_interval(ext.maximum(), self.bits).to_json(),
                "argmin": ext.argmin, "argmax": ext.argmax,
            }
        out = pack(self.main, self.window)
        out["sensitivity"] = pack(self.wide, self.sensitivity)
        out["floor_failures"] = [list(x) for x in self.floor_failures]
        return out


class GrowthAccumulator:
    """Streaming version of growth_exponents, fed one (l, q_l) at a time."""

    def __init__(self, l_max: int, window=None, bits: int = DEFAULT_PRECISION_BITS):
        self.window, self.sensitivity = default_windows(l_max) if window is None else (window, window)
        if window is not None:
            span = window[1] - window[0]
            self.sensitivity = (max(1, window[1] - 2 * span), window[1])
        self.bits = bits
        self.main = _Extremes()
        self.wide = _Extremes()
        self.floor_failures = []

    def feed(self, l: int, q: int):
        if l >= 3 and 2 * (q.bit_length() - 1) < l and q * q < (1 << l):
            self.floor_failures.append((l, "q^2 >= 2^l"))
        w0, w1 = self.window
        s0, s1 = self.sensitivity
        if s0 <= l <= s1 or w0 <= l <= w1:
            iv = log_growth(q, l, self.bits)
            if w0 <= l <= w1:
                self.main.add(l, iv)
            if s0 <= l <= s1:
                self.wide.add(l, iv)

    def estimate(self) -> GrowthEstimate:
        if self.main.empty:
            raise ValueError(f"growth window {self.window} is empty")
        return GrowthEstimate(self.window, self.sensitivity, self.main, self.wide,
                              list(self.floor_failures), self.bits)

    def to_state(self):
        return {"window": list(self.window), "sensitivity": list(self.sensitivity),
                "main": self.main.to_state(), "wide": self.wide.to_state(),
                "floor_failures": [list(x) for x in self.floor_failures]}

    @classmethod
    def from_state(cls, st, bits):
        g = cls.__new__(cls)
        g.window, g.sensitivity = tuple(st["window"]), tuple(st["sensitivity"])
        g.bits = bits
        g.main = _Extremes.from_state(st["main"])
        g.wide = _Extremes.from_state(st["wide"])
        g.floor_failures = [tuple(x) for x in st["floor_failures"]]
        return g


def growth_exponents(table, window=None, bits: int = DEFAULT_PRECISION_BITS) -> GrowthEstimate:
    """Certified min and max of q_l^(1/l) over [l_0, l_max] (default: second half)."""
    q = table.q if isinstance(table, ConvergentTable) else list(table)
    l_max = len(q) - 1
    if window is not None:
        l0, l1 = window
        if not 1 <= l0 <= l1 <= l_max:
            raise ValueError(f"window {window} outside 1..{l_max}")
    acc = GrowthAccumulator(l_max, window, bits)
    for l in range(1, l_max + 1):
        acc.feed(l, q[l])
    return acc.estimate()


def root_enclosure(q: int, l: int, bits: int = 64) -> RationalInterval:
    """Enclosure of q^(1/l)."""
    return exp_interval(log_growth(q, l, bits), bits)


def csv_row(l: int, q: int, flags: str, bits: int = 64) -> str:
    iv = root_enclosure(q, l, bits)
    return f"{l},{format_decimal(*iv.lo_pair, 12, 'down')},{format_decimal(*iv.hi_pair, 12, 'up')},{flags}\n"


CSV_HEADER = "l,root_lo,root_hi,marks\n"


# alpha words and mutations

def apply_mutations(word, mutations) -> list:
    """Copy of word with (position, value) replacements, positions 1-based."""
    w = list(word)
    for pos, val in mutations or ():
        if not 1 <= pos <= len(w):
            raise ValueError(f"mutation position {pos} outside 1..{len(w)}")
        if val < 1:
            raise ValueError("mutated quotient must be positive")
        w[pos - 1] = val
    return w


# palindromic prefixes

class Theorem1Scanner:
    """Streaming check of the palindromic-prefix bounds.

    The word fixes the convergents p_n/q_n; alpha is enclosed using the
    (possibly mutated) alpha word. Only the recurrence tails, the pending
    palindromic indices and the evidence so far are kept, so the scan can be
    checkpointed and resumed.
    """

    def __init__(self, word, prefix_cap=None, bits=DEFAULT_PRECISION_BITS, mutations=(), window=None):
        self.word = check_word(word, allow_empty=False)
        self.cap = len(self.word) if prefix_cap is None else min(prefix_cap, len(self.word))
        self.bits = bits
        self.mutations = tuple(tuple(m) for m in mutations)
        self.alpha_word = apply_mutations(self.word[:self.cap], self.mutations)
        self.a1 = self.word[0]
        pals = palindromic_prefix_lengths(self.word[:self.cap])
        self.tested = [n for n in pals if n + DEPTH_MARGIN <= self.cap]
        self.untested = [n for n in pals if n + DEPTH_MARGIN > self.cap]
        self._pal_set = set(pals)
        self._tested_set = set(self.tested)
        self.l = 0
        self.tail = (1, 0, 0, 1)
        self.alpha_tail = (1, 0, 0, 1)
        self.pending = []  # [n, p_n, q_n, p_{n-1}, q_{n-1}, extra]
        self.evidence = []
        self.growth = GrowthAccumulator(self.cap, window, bits)

    def advance(self, upto: int, csv=None):
        upto = min(upto, self.cap)
        pp, qp, p, q = self.tail
        ap, aqp, a_p, a_q = self.alpha_tail
        mutated = bool(self.mutations)
        while self.l < upto:
            l = self.l + 1
            a = self.word[l - 1]
            pp, qp, p, q = p, q, a * p + pp, a * q + qp
            if mutated:
                b = self.alpha_word[l - 1]
                ap, aqp, a_p, a_q = a_p, a_q, b * a_p + ap, b * a_q + aqp
            else:
                ap, aqp, a_p, a_q = pp, qp, p, q
            self.l = l
            self.growth.feed(l, q)
            if csv is not None:
                csv.write(csv_row(l, q, "pal" if l in self._pal_set else ""))
            if l in self._tested_set:
                self.pending.append([l, p, q, pp, qp, BASE_DEPTH])
            if self.pending:
                self._resolve(l, ap, aqp, a_p, a_q)
        self.tail = (pp, qp, p, q)
        self.alpha_tail = (ap, aqp, a_p, a_q)

    def _items(self, n, p, q, pm, qm, alpha, depth):
        err1 = abs(alpha - (p, q))
        err2 = abs(alpha.square() - (pm, q))
        worst = err1.max(err2)
        rhs = RationalInterval((self.a1 + 3, q * q))
        items = [
            decided(n, "p_n = q_{n-1}", RationalInterval(p), "=", RationalInterval(qm), p == qm, depth=depth),
            InequalityEvidence(n, "max(|alpha - p_n/q_n|, |alpha^2 - p_{n-1}/q_n|) < (a_1+3)/q_n^2",
                               worst, "<", rhs, depth=depth),
        ]
        # exponent e_n > 3/2  <=>  worst^2 q_n^3 < 1; implied by the bound above once q_n > (a_1+3)^2
        kind = "theorem" if q > (self.a1 + 3) ** 2 else "info"
        lhs = worst.square() * (q ** 3)
        hn, hd = worst.hi_pair
        e_est = None if hn <= 0 else round(-approx_log2(hn, hd) / approx_log2(q, 1), 6) if q > 1 else None
        items.append(InequalityEvidence(n, "e_n > 3/2 (max-term^2 * q_n^3 < 1)", lhs, "<", RationalInterval(1),
                                        kind=kind, depth=depth, extra={"e_n_estimate": e_est}))
        return items

    def _resolve(self, l, ap, aqp, a_p, a_q):
        keep = []
        for item in self.pending:
            n, p, q, pm, qm, extra = item
            if l < n + extra:
                keep.append(item)
                continue
            items = self._items(n, p, q, pm, qm, _alpha(ap, aqp, a_p, a_q), l)
            open_items = [e for e in items if e.status == "inconclusive" and e.kind != "info"]
            if open_items and extra < DEPTH_MARGIN:
                item[5] = extra * 2
                keep.append(item)
                continue
            self.evidence.extend(items)
        self.pending = keep

    def finished(self) -> bool:
        return self.l >= self.cap

    def report(self, word_spec="") -> CriterionReport:
        if not self.finished():
            raise RuntimeError("scan not finished")
        est = self.growth.estimate()
        notes = [f"palindromic prefix lengths found: {len(self.tested) + len(self.untested)}; "
                 f"tested: {len(self.tested)} (need {DEPTH_MARGIN} extra quotients for alpha)"]
        if self.untested:
            notes.append(f"untested palindromic lengths (too close to the prefix end): {self.untested}")
        if self.mutations:
            notes.append("alpha enclosed from a mutated word: " +
                         ", ".join(f"{p}:{v}" for p, v in self.mutations))
        ev = sorted(self.evidence, key=lambda e: e.n)
        rep = CriterionReport("thm1", word_spec, self.cap, self.bits,
                              witnesses=[{"palindrome_length": n} for n in self.tested],
                              evidence=ev, growth=est.to_json(), notes=notes)
        return rep

    # checkpoint state

    def to_state(self) -> dict:
        def h(x):
            return format(x, "x")
        return {
            "l": self.l,
            "tail": [h(x) for x in self.tail],
            "alpha_tail": [h(x) for x in self.alpha_tail],
            "pending": [[n, h(p), h(q), h(pm), h(qm), extra] for n, p, q, pm, qm, extra in self.pending],
            "evidence": [evidence_to_state(e) for e in self.evidence],
            "growth": self.growth.to_state(),
        }

    def load_state(self, st: dict):
        def u(x):
            return int(x, 16)
        self.l = st["l"]
        self.tail = tuple(u(x) for x in st["tail"])
        self.alpha_tail = tuple(u(x) for x in st["alpha_tail"])
        self.pending = [[n, u(p), u(q), u(pm), u(qm), extra] for n, p, q, pm, qm, extra in st["pending"]]
        self.evidence = [evidence_from_state(e) for e in st["evidence"]]
        self.growth = GrowthAccumulator.from_state(st["growth"], self.bits)


def evidence_to_state(e: InequalityEvidence) -> dict:
    return {"n": e.n, "label": e.label, "lhs": interval_to_state(e.lhs), "relation": e.relation,
            "rhs": interval_to_state(e.rhs), "kind": e.kind, "depth": e.depth, "status": e.status,
            "extra": e.extra}


def evidence_from_state(d: dict) -> InequalityEvidence:
    return InequalityEvidence(d["n"], d["label"], interval_from_state(d["lhs"]), d["relation"],
                              interval_from_state(d["rhs"]), kind=d["kind"], depth=d["depth"],
                              status=d["status"], extra=d["extra"])


def theorem1_evidence(word, prefix_cap=None, bits: int = DEFAULT_PRECISION_BITS, mutations=(),
                      word_spec: str = "", window=None) -> CriterionReport:
    scanner = Theorem1Scanner(word, prefix_cap, bits, mutations, window)
    scanner.advance(scanner.cap)
    return scanner.report(word_spec)


# quasi-palindromic prefixes

def _prepare(word, prefix_cap, mutations):
    """Witnesses are searched in the first prefix_cap quotients; alpha uses every quotient given."""
    full = check_word(word, allow_empty=False)
    cap = len(full) if prefix_cap is None else min(prefix_cap, len(full))
    table = convergent_table(full)
    alpha_table = convergent_table(apply_mutations(full, mutations)) if mutations else table
    return full[:cap], cap, table, alpha_table.alpha_enclosure()


def quasi_palindrome_items(table: ConvergentTable, alpha: RationalInterval, wit: QuasiPalindromeWitness,
                           depth: int) -> list:
    """Bounds at s = 2u + v for a prefix U V mirror(U) (r = |U| here)."""
    u, s = wit.u, wit.s
    p, q = table.p, table.q
    qs, qs1, ps, ps1, qr = q[s], q[s - 1], p[s], p[s - 1], q[u]
    f1 = abs(alpha * qs - qs1)
    f2 = abs(alpha * qs - ps)
    f3 = abs(alpha * qs1 - ps1)
    inv_qr2 = RationalInterval((1, qr * qr))
    extra = {"r": wit.r, "u": u, "v": wit.v, "s": s}
    return [
        InequalityEvidence(s, "|q_s alpha - q_{s-1}| < q_s q_u^-2", f1, "<", inv_qr2 * qs, depth=depth, extra=extra),
        InequalityEvidence(s, "|q_s alpha - p_s| < 1/q_s", f2, "<", RationalInterval((1, qs)), depth=depth,
                           extra=extra),
        InequalityEvidence(s, "|q_{s-1} alpha - p_{s-1}| < 1/q_{s-1}", f3, "<", RationalInterval((1, qs1)),
                           depth=depth, extra=extra),
        InequalityEvidence(s, "|L1 L2 L3 L4|(q_s, q_{s-1}, p_s, p_{s-1}) < q_u^-2",
                           f2 * f3 * f1 * qs1, "<", inv_qr2, depth=depth, extra=extra),
    ]


def offset_items(table: ConvergentTable, alpha: RationalInterval, wit: QuasiPalindromeWitness,
                 depth: int) -> list:
    """Bounds for the composite convergent P/Q = [0; W U V mirror(U) mirror(W)]."""
    r, s, t = wit.r, wit.s, wit.t
    q = table.q
    P, Q, Pp, Qp = composite_convergents(table, t, r)
    qt, qs, qr = q[t], q[s], q[r]
    g1 = abs(alpha * Q - P)
    g2 = abs(alpha * Qp - Pp)
    g3 = abs(alpha * Q - Qp)
    inv_qt2 = RationalInterval((1, qt * qt))
    inv_qs2 = RationalInterval((1, qs * qs))
    extra = {"r": r, "u": wit.u, "v": wit.v, "s": s, "t": t}
    pt = RationalInterval
    return [
        InequalityEvidence(t, "|Q alpha - P| < Q q_t^-2", g1, "<", inv_qt2 * Q, depth=depth, extra=extra),
        InequalityEvidence(t, "|Q' alpha - P'| < Q' q_t^-2", g2, "<", inv_qt2 * Qp, depth=depth, extra=extra),
        InequalityEvidence(t, "|Q alpha - Q'| < Q q_s^-2", g3, "<", inv_qs2 * Q, depth=depth, extra=extra),
        InequalityEvidence(t, "|L1 L2 L3 L4|(Q, Q', P, P') < Q^4 q_t^-4 q_s^-2", g1 * g2 * g3 * Qp, "<",
                           inv_qt2.square() * inv_qs2 * (Q ** 4), depth=depth, extra=extra),
        decided(t, "q_t q_r <= Q", pt(qt * qr), "<=", pt(Q), qt * qr <= Q, extra=extra),
        decided(t, "Q <= 2 q_t q_r", pt(Q), "<=", pt(2 * qt * qr), Q <= 2 * qt * qr, extra=extra),
        decided(t, "q_s^2 <= Q", pt(qs * qs), "<=", pt(Q), qs * qs <= Q, extra=extra),
        decided(t, "Q <= q_t^2", pt(Q), "<=", pt(qt * qt), Q <= qt * qt, extra=extra),
    ]


def _usable(witnesses, depth):
    use = [w for w in witnesses if w.t + BASE_DEPTH <= depth]
    return use, len(witnesses) - len(use)


def _witness_json(w: QuasiPalindromeWitness) -> dict:
    d = w.to_json()
    d.update({"s": w.s, "t": w.t})
    return d


def theorem2_evidence(word, w_max, prefix_cap=None, u_min: int = 1, bits: int = DEFAULT_PRECISION_BITS,
                      mutations=(), word_spec: str = "", window=None) -> CriterionReport:
    w, cap, table, alpha = _prepare(word, prefix_cap, mutations)
    found = find_quasi_palindrome_witnesses(w, w_max, u_min)
    use, skipped = _usable(found, table.n)
    ev = []
    for wit in use:
        ev.extend(quasi_palindrome_items(table, alpha, wit, table.n))
    growth = growth_exponents(table, window, bits)
    notes = [f"quasi-palindromic prefixes with v/u <= {Fraction(w_max)}: {len(found)}; tested: {len(use)}"]
    if skipped:
        notes.append(f"{skipped} witnesses end within {BASE_DEPTH} quotients of the last available quotient and were not tested")
    if found:
        notes.append(f"largest u found: {found[-1].u}")
    rep = CriterionReport("thm2", word_spec, cap, bits, witnesses=[_witness_json(x) for x in use],
                          evidence=ev, growth=growth.to_json(), notes=notes)
    if not use:
        rep.reason = "no quasi-palindromic prefix witnesses in the prefix"
    return rep


def theorem3_evidence(word, w_max, wprime_min, prefix_cap=None, u_min: int = 1,
                      bits: int = DEFAULT_PRECISION_BITS, mutations=(), word_spec: str = "", window=None,
                      witnesses=None, scan_budget: int = DEFAULT_SCAN_BUDGET) -> CriterionReport:
    w, cap, table, alpha = _prepare(word, prefix_cap, mutations)
    if witnesses is None:
        found = find_offset_witnesses(w, w_max, wprime_min, u_min, scan_budget=scan_budget)
    else:
        found = list(witnesses)
        for x in found:
            if x.r == 0:
                raise ValueError("witnesses with r = 0 belong to the palindromic-prefix checker (thm2)")
            if not x.verify(w):
                raise ValueError(f"{x} is not a quasi-palindromic prefix of the word")
    use, skipped = _usable(found, table.n)
    growth = growth_exponents(table, window, bits)
    thr = growth.threshold()
    ev = []
    for wit in use:
        ev.extend(offset_items(table, alpha, wit, table.n))
        ev.append(InequalityEvidence(wit.t, "u/r > 2 log M / log m - 1", RationalInterval(Fraction(wit.u, wit.r)),
                                     ">", thr, kind="info",
                                     extra={"r": wit.r, "u": wit.u, "v": wit.v, "window": list(growth.window)}))
    ev.append(InequalityEvidence(cap, "w' > 2 log M / log m - 1", RationalInterval(Fraction(wprime_min)), ">", thr,
                                 kind="hypothesis", extra={"window": list(growth.window)}))
    notes = [f"offset witnesses with v/u <= {Fraction(w_max)} and u/r >= {Fraction(wprime_min)}: "
             f"{len(found)}; tested: {len(use)}",
             f"growth threshold over window {list(growth.window)}: {thr.to_json()['approx']}; "
             f"over {list(growth.sensitivity)}: {growth.threshold(growth.wide).to_json()['approx']}"]
    if len(w) > scan_budget:
        notes.append(f"offset scan limited to the first {scan_budget} quotients")
    if skipped:
        notes.append(f"{skipped} witnesses end within {BASE_DEPTH} quotients of the last available quotient and were not tested")
    rep = CriterionReport("thm3", word_spec, cap, bits, witnesses=[_witness_json(x) for x in use],
                          evidence=ev, growth=growth.to_json(), notes=notes)
    if not use:
        rep.reason = "no offset quasi-palindrome witnesses in the prefix"
    return rep


def subspace_products(word, w_max, wprime_min, prefix_cap=None, u_min: int = 1,
                      bits: int = DEFAULT_PRECISION_BITS, mutations=(), word_spec: str = "",
                      window=None, scan_budget: int = DEFAULT_SCAN_BUDGET) -> CriterionReport:
    """Linear-form product bounds for both witness types (no growth hypothesis)."""
    w, cap, table, alpha = _prepare(word, prefix_cap, mutations)
    plain, skip1 = _usable(find_quasi_palindrome_witnesses(w, w_max, u_min), table.n)
    offset, skip2 = _usable(find_offset_witnesses(w, w_max, wprime_min, u_min, scan_budget=scan_budget), table.n)
    ev = []
    for wit in plain:
        ev.extend(quasi_palindrome_items(table, alpha, wit, table.n))
    for wit in offset:
        ev.extend(offset_items(table, alpha, wit, table.n))
    growth = growth_exponents(table, window, bits)
    notes = [f"prefix witnesses tested: {len(plain)} (skipped {skip1}); "
             f"offset witnesses tested: {len(offset)} (skipped {skip2})"]
    rep = CriterionReport("subspace_products", word_spec, cap, bits,
                          witnesses=[_witness_json(x) for x in plain + offset],
                          evidence=ev, growth=growth.to_json(), notes=notes)
    if not ev:
        rep.reason = "no witnesses in the prefix"
    return rep


# Baker words

def quadratic_fixed_point(a: int, bits: int = DEFAULT_PRECISION_BITS) -> RationalInterval:
    """alpha_a = (a + sqrt(a^2 + 4)) / 2 = [a; a, a, ...]."""
    return (sqrt_enclosure(a * a + 4, bits) + a) * RationalInterval(Fraction(1, 2))


def baker_bound_from_rho(rho: RationalInterval, bits: int = DEFAULT_PRECISION_BITS) -> RationalInterval:
    """(1 + sqrt(8 rho^2 + 1)) / (2 rho) for rho > 0."""
    return (sqrt_interval(rho.square() * 8 + 1, bits) + 1) / (rho * 2)


@dataclass(frozen=True)
class BakerThreshold:
    a: int
    b: int
    rho: RationalInterval
    bound: RationalInterval
    sqrt2: RationalInterval

    def to_json(self):
        return {"a": self.a, "b": self.b, "rho": self.rho.to_json(), "baker_bound": self.bound.to_json(),
                "sqrt2": self.sqrt2.to_json()}


def baker_threshold(a: int, b: int, bits: int = DEFAULT_PRECISION_BITS) -> BakerThreshold:
    """rho = log alpha_b / log alpha_a (with b > a) and the bound (1 + sqrt(8 rho^2 + 1)) / (2 rho)."""
    check_word([a, b])
    if a == b:
        raise ValueError("a and b must differ")
    a, b = min(a, b), max(a, b)
    work = bits + 16
    la = ln_interval(quadratic_fixed_point(a, work), work)
    lb = ln_interval(quadratic_fixed_point(b, work), work)
    rho = lb / la
    bound = baker_bound_from_rho(rho, work)
    sqrt2 = sqrt_enclosure(2, work)
    if bound.status(">", sqrt2) != "holds" or bound.status("<", 2) != "holds":
        raise AssertionError(f"bound for ({a},{b}) not certified inside (sqrt 2, 2)")
    return BakerThreshold(a, b, rho, bound, sqrt2)


def theorem4_ratio_scan(spec: BakerSpec, n_terms: int, bits: int = DEFAULT_PRECISION_BITS,
                        word_spec: str = "") -> CriterionReport:
    """Ratios l_{n+1}/l_n on the tail half, compared with sqrt 2 exactly and with the Baker bound."""
    lams = spec.lambda_terms(n_terms)
    if len(lams) < 2:
        raise ValueError("need at least two lambda terms")
    thr = baker_threshold(spec.a, spec.b, bits)
    start = max(1, len(lams) // 2)
    ev = []
    for n in range(start, len(lams)):
        lo, hi = lams[n - 1], lams[n]
        ratio = RationalInterval(Fraction(hi, lo))
        ev.append(decided(n, "lambda_{n+1}^2 > 2 lambda_n^2", RationalInterval(hi * hi), ">",
                          RationalInterval(2 * lo * lo), hi * hi > 2 * lo * lo, kind="hypothesis",
                          extra={"ratio": f"{hi}/{lo}"}))
        ev.append(InequalityEvidence(n, "lambda_{n+1}/lambda_n > Baker bound", ratio, ">", thr.bound, kind="info"))
    ratios = [Fraction(lams[i + 1], lams[i]) for i in range(len(lams) - 1)]
    tail = ratios[start - 1:]
    notes = [f"tail window n = {start}..{len(lams) - 1}; min ratio {min(tail)} (whole range min {min(ratios)})",
             f"Baker bound for ({thr.a},{thr.b}): {thr.bound.to_json()['approx']}"]
    return CriterionReport("thm4", word_spec or spec.canonical(), sum(lams), bits,
                           witnesses=[{"lambdas": lams}], evidence=ev, growth=None, notes=notes)


def log_values(table: ConvergentTable, lo: int, hi: int, bits: int):
    """Enclosures of log x_m = log(q_m / q_{m-1}) for m = lo..hi."""
    return {m: ln_enclosure((table.q[m], table.q[m - 1]), bits) for m in range(lo, hi + 1)}


def _block_items(label, letter, lam, ms, logs, log_fixed, bound, n):
    total = RationalInterval(0)
    dev = RationalInterval(0)
    for m in ms:
        total = total + logs[m]
        dev = dev + abs(logs[m] - log_fixed)
    extra = {"first": ms[0], "last": ms[-1], "letter": letter, "length": lam}
    return [
        InequalityEvidence(n, f"sum |log x_m - log alpha_{letter}| over {label} < 20/theta^3", dev, "<", bound,
                           extra=extra),
        InequalityEvidence(n, f"|{label} - lambda log alpha_{letter}| < 20/theta^3",
                           abs(total - log_fixed * lam), "<", bound, extra=extra),
        InequalityEvidence(n, f"|{label} - log alpha_{letter}| < 20/theta^3 (as printed)",
                           abs(total - log_fixed), "<", bound, kind="as-printed", extra=extra),
    ]


def block_log_sums(spec: BakerSpec, stage: int, bits: int = DEFAULT_PRECISION_BITS, word=None,
                   word_spec: str = "") -> CriterionReport:
    """Block sums of log x_m for stage n of a Baker word.

    A_{2j+1}, B_{2j+2} run over the blocks of W; the primed sums run over the
    same lengths inside U. Each block is certified through the matched-tail
    bound (sum of |log x_m - log alpha|) and the resulting
    |A - lambda log alpha|; the unscaled |A - log alpha| is recorded as an
    as-printed item.
    """
    if stage < 2:
        raise ValueError("stage must be >= 2")
    n = stage
    lams = spec.lambda_terms(2 * n)
    if len(lams) < 2 * n:
        raise ValueError(f"stage {n} needs {2 * n} lambda terms")
    lam = [None] + lams  # 1-based
    c = [0]
    for x in lams:
        c.append(c[-1] + x)
    d, e = [0], [0]
    for k in range(1, n + 1):
        d.append(d[-1] + lam[2 * k])
        e.append(e[-1] + lam[2 * k - 1])
    r_n, s_n = c[2 * n - 2], c[2 * n]
    w = list(word) if word is not None else baker_word(spec, s_n)
    if len(w) < s_n:
        raise ValueError(f"block boundaries reach {s_n} but the word has {len(w)} quotients")
    table = convergent_table(w[:s_n])
    logs = log_values(table, 1, s_n, bits)
    la = ln_interval(quadratic_fixed_point(spec.a, bits), bits)
    lb = ln_interval(quadratic_fixed_point(spec.b, bits), bits)
    bound = golden_bound_constant(bits)
    ev = []
    for j in range(0, n - 1):
        a_rng = list(range(c[2 * j] + 1, c[2 * j + 1] + 1))
        b_rng = list(range(c[2 * j + 1] + 1, c[2 * j + 2] + 1))
        ev += _block_items(f"A_{2 * j + 1}", spec.a, lam[2 * j + 1], a_rng, logs, la, bound, 2 * j + 1)
        ev += _block_items(f"B_{2 * j + 2}", spec.b, lam[2 * j + 2], b_rng, logs, lb, bound, 2 * j + 2)
    primed_ok = lam[2 * n - 1] >= e[n - 1] and lam[2 * n] >= d[n - 1]
    notes = [f"stage {n}: r_n = {r_n}, s_n = {s_n}"]
    if primed_ok:
        for j in range(0, n - 1):
            a_rng = list(range(r_n + e[j] + 1, r_n + e[j + 1] + 1))
            b_rng = list(range(r_n + lam[2 * n - 1] + d[j] + 1, r_n + lam[2 * n - 1] + d[j + 1] + 1))
            ev += _block_items(f"A'_{2 * j + 1}", spec.a, lam[2 * j + 1], a_rng, logs, la, bound, 2 * j + 1)
            ev += _block_items(f"B'_{2 * j + 2}", spec.b, lam[2 * j + 2], b_rng, logs, lb, bound, 2 * j + 2)
    else:
        notes.append("primed sums skipped: lambda_{2n-1} < e_{n-1} or lambda_{2n} < d_{n-1}")
    printed = [x for x in ev if x.kind == "as-printed"]
    bad = [x.extra["length"] for x in printed if x.status != "holds"]
    notes.append(f"as-printed unscaled form: {len(printed) - len(bad)}/{len(printed)} hold"
                 + (f"; fails for block lengths {sorted(set(bad))}" if bad else ""))
    return CriterionReport("lemma6", word_spec or spec.canonical(), s_n, bits,
                           witnesses=[{"stage": n, "lambdas": lams}], evidence=ev, notes=notes)


def _cf_value_full(word) -> Fraction:
    """Value of [x_1; x_2, ..., x_k] (integer part first)."""
    w = check_word(word, allow_empty=False)
    val = Fraction(w[-1])
    for a in reversed(w[:-1]):
        val = a + 1 / val
    return val


def lemma6_sum(xs, ys, bits: int = DEFAULT_PRECISION_BITS) -> InequalityEvidence:
    """sum_k |log x^(k) - log y^(k)| < 20/theta^3 for expansions agreeing in their first k quotients.

    xs and ys are lists of finite expansions [x_1; x_2, ...] given as words.
    """
    if len(xs) != len(ys):
        raise ValueError("sequences must have equal length")
    total = RationalInterval(0)
    for k, (x, y) in enumerate(zip(xs, ys), start=1):
        if len(x) < k or len(y) < k or list(x[:k]) != list(y[:k]):
            raise ValueError(f"pair {k} does not share its first {k} partial quotients")
        total = total + abs(ln_enclosure(_cf_value_full(x), bits) - ln_enclosure(_cf_value_full(y), bits))
    return InequalityEvidence(len(xs), "sum |log x^(k) - log y^(k)| < 20/theta^3", total, "<",
                              golden_bound_constant(bits))


# prescribed approximation order

def theorem5_verify(state: Theorem5State, phi: Optional[ApproxOrderFunction] = None,
                    bits: int = DEFAULT_PRECISION_BITS, quotients=None, alpha_mutations=(),
                    word_spec: str = "") -> CriterionReport:
    """Two-sided convergent bounds at every index, the order bounds at the
    large-quotient indices, and the lower bound at every other index >= n_2.

    quotients optionally replaces the leading quotients (corruption tests);
    alpha is enclosed by one further stage of the construction.
    """
    phi = phi or state.phi
    if state.stages < 2:
        raise ValueError("need at least two completed stages")
    L = state.length
    full = list(extend_stage(state).quotients)
    if quotients is not None:
        full[:len(quotients)] = list(quotients)
    table = convergent_table(full)
    alpha_table = convergent_table(apply_mutations(full, alpha_mutations)) if alpha_mutations else table
    alpha = alpha_table.alpha_enclosure()
    depth = len(full)
    p, q = table.p, table.q
    b = full
    ev = []
    for n in range(1, L + 1):
        err = abs(alpha - (p[n - 1], q[n - 1]))
        q2 = q[n - 1] * q[n - 1]
        bn = b[n - 1]
        ev.append(InequalityEvidence(n, "1/(q_{n-1}^2 (b_n+2)) < |alpha - p_{n-1}/q_{n-1}|",
                                     RationalInterval((1, q2 * (bn + 2))), "<", err, depth=depth))
        ev.append(InequalityEvidence(n, "|alpha - p_{n-1}/q_{n-1}| < 1/(q_{n-1}^2 b_n)", err, "<",
                                     RationalInterval((1, q2 * bn)), depth=depth))
    checkpoints = state.checkpoints
    for j, nj in enumerate(checkpoints, start=1):
        qq = q[nj - 1]
        f = phi.phi_enclosure(qq, bits)
        err = abs(alpha - (p[nj - 1], qq))
        ev.append(InequalityEvidence(nj - 1, "phi(q)/(1 + 3 q^2 phi(q)) < |alpha - p/q| at q = q_{n_j-1}",
                                     f / (f * (3 * qq * qq) + 1), "<", err, depth=depth, extra={"j": j}))
        ev.append(InequalityEvidence(nj - 1, "|alpha - p/q| < phi(q) at q = q_{n_j-1}", err, "<", f,
                                     depth=depth, extra={"j": j}))
    special = {nj - 1 for nj in checkpoints}
    for n in range(checkpoints[1], L + 1):
        if n in special:
            continue
        err = abs(alpha - (p[n], q[n]))
        ev.append(InequalityEvidence(n, "|alpha - p_n/q_n| >= 3 phi(q_n)", err, ">=",
                                     phi.phi_enclosure(q[n], bits) * 3, depth=depth))
    ev.sort(key=lambda x: x.n)
    notes = [f"checkpoints n_j = {list(checkpoints)}; palindromic completions {list(state.completions)}",
             f"large quotients b_(n_j) = {[state.large(j) for j in range(1, state.stages + 1)]}",
             f"alpha enclosed with {depth} quotients (one further stage)"]
    if quotients is not None:
        notes.append("leading quotients replaced (corruption test)")
    return CriterionReport("thm5", word_spec or phi.canonical(), L, bits,
                           witnesses=[{"n_j": nj, "b": b[nj - 1]} for nj in checkpoints],
                           evidence=ev, notes=notes)
