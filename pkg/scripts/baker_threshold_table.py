"""Print the Baker bound (1 + sqrt(8 rho^2 + 1)) / (2 rho) for small letter pairs."""
import argparse

from palincf.criteria import baker_threshold


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-letter", type=int, default=6)
    ap.add_argument("--bits", type=int, default=128)
    args = ap.parse_args()
    print("a  b  rho          bound")
    for a in range(1, args.max_letter + 1):
        for b in range(a + 1, args.max_letter + 1):
            t = baker_threshold(a, b, args.bits)
            print(f"{a:<2} {b:<2} {float(t.rho.lo):.10f}  {float(t.bound.lo):.10f}")


if __name__ == "__main__":
    main()
