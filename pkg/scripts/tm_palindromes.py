"""Palindromic-prefix bounds on a Thue-Morse prefix, one line per palindrome."""
import argparse

from palincf.criteria import theorem1_evidence
from palincf.generators import thue_morse_word


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=int, default=1)
    ap.add_argument("--b", type=int, default=2)
    ap.add_argument("--n", type=int, default=20000)
    args = ap.parse_args()
    rep = theorem1_evidence(thue_morse_word(args.a, args.b, args.n), word_spec=f"tm({args.a},{args.b})")
    for e in rep.evidence:
        if e.label.startswith("max("):
            print(f"n = {e.n:>7}  {e.status:<12} margin {e.margin_log2} bits")
    for note in rep.notes:
        print(note)
    print(rep.verdict)


if __name__ == "__main__":
    main()
