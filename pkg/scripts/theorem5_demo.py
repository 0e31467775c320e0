"""Build the prescribed-order word for phi(q) = c q^-s and check every bound."""
import argparse
import time
from fractions import Fraction

from palincf.criteria import theorem5_verify
from palincf.generators import ApproxOrderFunction, misplace_large_quotient, theorem5_word


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--c", default="1")
    ap.add_argument("--s", default="3")
    ap.add_argument("--stages", type=int, default=3)
    args = ap.parse_args()
    phi = ApproxOrderFunction.power(Fraction(args.c), Fraction(args.s))
    start = time.perf_counter()
    st = theorem5_word(phi, args.stages)
    rep = theorem5_verify(st)
    print(f"checkpoints {list(st.checkpoints)}, completions {list(st.completions)}")
    print(f"large quotients {[st.large(j) for j in range(1, st.stages + 1)]}")
    print(f"{len(rep.evidence)} items, verdict {rep.verdict}, {time.perf_counter() - start:.3f} s")
    control = theorem5_verify(st, quotients=misplace_large_quotient(st, 2))
    print(f"misplaced b_(n_2): {control.verdict}")


if __name__ == "__main__":
    main()
