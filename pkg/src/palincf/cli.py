"""Command-line front end: generate words, analyze them, checkpoint and resume long scans."""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional

from . import criteria
from .evidence import CriterionReport
from .generators import SpecParseError, parse_spec, theorem5_word
from .interval import DEFAULT_PRECISION_BITS
from .words import DEFAULT_SCAN_BUDGET, palindromic_prefix_lengths

CRITERIA = ("thm1", "thm2", "thm3", "thm4", "thm5", "lemma6", "products")
EXIT_OK, EXIT_THEOREM, EXIT_INCONCLUSIVE, EXIT_STOPPED, EXIT_USAGE = 0, 1, 2, 3, 64
CHECKPOINT_VERSION = 1


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    criterion: str
    spec: Optional[str] = None
    word_file: Optional[str] = None
    n: Optional[int] = None
    stages: Optional[int] = None
    prefix: Optional[int] = None
    precision_bits: int = DEFAULT_PRECISION_BITS
    w_max: str = "1"
    wprime_min: str = "1"
    u_min: int = 1
    window: Optional[list] = None
    stage: Optional[int] = None
    mutations: list = field(default_factory=list)
    scan_budget: int = DEFAULT_SCAN_BUDGET

    def validate(self):
        if self.criterion not in CRITERIA:
            raise UsageError(f"unknown criterion {self.criterion!r}")
        if (self.spec is None) == (self.word_file is None):
            raise UsageError("give exactly one of --spec or --word")
        if self.prefix is not None and self.prefix < 10:
            raise UsageError("--prefix must be >= 10")
        if self.precision_bits < 64:
            raise UsageError("--precision-bits must be >= 64")
        if self.criterion in ("thm4", "lemma6", "thm5") and self.spec is None:
            raise UsageError(f"{self.criterion} needs --spec")
        if Fraction(self.w_max) < 0 or Fraction(self.wprime_min) <= 0:
            raise UsageError("need --w-max >= 0 and --wprime-min > 0")


# word files

def write_word(path, word, spec_text):
    with open(path, "w") as fh:
        fh.write(f"# spec: {spec_text}\n# length: {len(word)}\n")
        for a in word:
            fh.write(f"{a}\n")


def read_word(path):
    """(word, spec header or None)."""
    spec = None
    word = []
    with open(path) as fh:
        for i, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# spec:"):
                    spec = line[len("# spec:"):].strip()
                continue
            try:
                a = int(line)
            except ValueError:
                raise UsageError(f"{path}:{i}: not an integer: {line!r}") from None
            if a < 1:
                raise UsageError(f"{path}:{i}: partial quotients must be positive")
            word.append(a)
    if not word:
        raise UsageError(f"{path}: no partial quotients")
    return word, spec


def sha256_word(word) -> str:
    h = hashlib.sha256()
    for a in word:
        h.update(f"{a}\n".encode())
    return h.hexdigest()


def load_word(cfg: RunConfig):
    """(word, word_spec label) for word-based criteria."""
    if cfg.word_file is not None:
        word, header = read_word(cfg.word_file)
        label = header or f"file:sha256={sha256_word(word)[:16]}"
    else:
        seq = parse_spec(cfg.spec)
        label = seq.canonical()
        if seq.kind == "thm5":
            if cfg.n is None and cfg.stages is None:
                raise UsageError("thm5 specs need --n or --stages")
            word = seq.word(N=cfg.n, stages=cfg.stages)
        else:
            n = cfg.n
            if n is None and seq.finite_length is None:
                n = cfg.prefix
                if n is None:
                    raise UsageError(f"{label} is infinite; give --n or --prefix")
            word = seq.word(N=n)
    if cfg.prefix is not None:
        word = word[:cfg.prefix]
    return word, label


# CSV curves

def write_curve(path, word, marks):
    """Rows (l, q_l^(1/l) enclosure, marks) for l = 1..len(word)."""
    from .cf_core import iter_convergents
    with open(path, "w") as fh:
        fh.write(criteria.CSV_HEADER)
        for l, (_, q) in enumerate(iter_convergents(word), start=1):
            fh.write(criteria.csv_row(l, q, marks.get(l, "")))


def curve_marks(word, report: CriterionReport):
    marks = {}

    def add(l, tag):
        marks[l] = tag if l not in marks else marks[l] + ";" + tag
    for n in palindromic_prefix_lengths(word):
        add(n, "pal")
    for w in report.witnesses:
        if "t" in w:
            add(w["t"], f"w(r={w['r']},u={w['u']},v={w['v']})")
        elif "n_j" in w:
            add(w["n_j"], "n_j")
    return marks


# analysis

def run_report(cfg: RunConfig) -> CriterionReport:
    """Non-streaming criteria (everything except thm1)."""
    bits = cfg.precision_bits
    window = tuple(cfg.window) if cfg.window else None
    w_max, wp = Fraction(cfg.w_max), Fraction(cfg.wprime_min)
    muts = [tuple(m) for m in cfg.mutations]
    c = cfg.criterion
    if c in ("thm4", "lemma6", "thm5"):
        seq = parse_spec(cfg.spec)
        if c == "thm5":
            if seq.kind != "thm5":
                raise UsageError("thm5 needs a thm5(c,s) spec")
            stages = cfg.stages or 3
            if stages < 2:
                raise UsageError("thm5 needs --stages >= 2")
            state = theorem5_word(seq.phi, stages)
            return criteria.theorem5_verify(state, bits=bits, alpha_mutations=muts, word_spec=seq.canonical())
        if seq.kind != "baker":
            raise UsageError(f"{c} needs a baker(...) spec")
        if c == "thm4":
            n_terms = cfg.n or 40
            if seq.baker.lambdas is not None:
                n_terms = min(n_terms, len(seq.baker.lambdas))
            return criteria.theorem4_ratio_scan(seq.baker, n_terms, bits, seq.canonical())
        stage = cfg.stage or 2
        return criteria.block_log_sums(seq.baker, stage, bits, word_spec=seq.canonical())
    word, label = load_word(cfg)
    if c == "thm2":
        return criteria.theorem2_evidence(word, w_max, None, cfg.u_min, bits, muts, label, window)
    if c == "thm3":
        return criteria.theorem3_evidence(word, w_max, wp, None, cfg.u_min, bits, muts, label, window,
                                          scan_budget=cfg.scan_budget)
    if c == "products":
        return criteria.subspace_products(word, w_max, wp, None, cfg.u_min, bits, muts, label, window,
                                          scan_budget=cfg.scan_budget)
    raise UsageError(f"criterion {c} is streamed")


def curve_word(cfg: RunConfig, report: CriterionReport):
    if cfg.criterion in ("thm4", "lemma6", "thm5"):
        seq = parse_spec(cfg.spec)
        return seq.word(N=report.prefix_len) if seq.kind != "thm5" else \
            list(theorem5_word(seq.phi, cfg.stages or 3).quotients)
    return load_word(cfg)[0]


def write_text(path, text):
    """Atomic write for regular files; plain write for devices and pipes."""
    if os.path.exists(path) and not os.path.isfile(path):
        with open(path, "w") as fh:
            fh.write(text)
        return
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def emit(report: CriterionReport, out) -> int:
    text = report.dumps()
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)
    print(f"verdict: {report.verdict}", file=sys.stderr)
    return report.exit_code


# checkpoints (streamed palindromic-prefix scan)

def _checksum(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def save_checkpoint(path, cfg: RunConfig, word_hash: str, scanner, csv_path, csv_offset):
    payload = {
        "version": CHECKPOINT_VERSION,
        "config": asdict(cfg),
        "word_sha256": word_hash,
        "csv": csv_path,
        "csv_offset": csv_offset,
        "scanner": scanner.to_state(),
    }
    doc = {"payload": payload, "checksum": _checksum(payload)}
    write_text(path, json.dumps(doc, sort_keys=True))


def load_checkpoint(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read checkpoint {path}: {exc}") from None
    if not isinstance(doc, dict) or "payload" not in doc or "checksum" not in doc:
        raise UsageError(f"{path} is not a checkpoint file")
    if _checksum(doc["payload"]) != doc["checksum"]:
        raise UsageError(f"checkpoint {path} failed its checksum; refusing to resume")
    if doc["payload"].get("version") != CHECKPOINT_VERSION:
        raise UsageError("unsupported checkpoint version")
    return doc["payload"]


def stream_thm1(cfg: RunConfig, out, csv_path, checkpoint, every, stop_at, resume_payload=None) -> int:
    word, label = load_word(cfg)
    word_hash = sha256_word(word)
    window = tuple(cfg.window) if cfg.window else None
    scanner = criteria.Theorem1Scanner(word, None, cfg.precision_bits, [tuple(m) for m in cfg.mutations], window)
    csv_fh = None
    if resume_payload is not None:
        if resume_payload["word_sha256"] != word_hash:
            raise UsageError("word does not match the checkpoint")
        scanner.load_state(resume_payload["scanner"])
        if csv_path:
            if resume_payload["csv"] is None or not os.path.exists(csv_path):
                raise UsageError("checkpoint has no CSV to continue")
            csv_fh = open(csv_path, "r+")
            csv_fh.seek(resume_payload["csv_offset"])
            csv_fh.truncate()
    elif csv_path:
        csv_fh = open(csv_path, "w")
        csv_fh.write(criteria.CSV_HEADER)
    try:
        target = scanner.cap if stop_at is None else min(stop_at, scanner.cap)
        step = every or target
        while scanner.l < target:
            scanner.advance(min(target, scanner.l + step), csv_fh)
            if checkpoint:
                if csv_fh:
                    csv_fh.flush()
                save_checkpoint(checkpoint, cfg, word_hash, scanner, csv_path,
                                csv_fh.tell() if csv_fh else 0)
        if checkpoint and resume_payload is None and scanner.l == 0:
            save_checkpoint(checkpoint, cfg, word_hash, scanner, csv_path, csv_fh.tell() if csv_fh else 0)
    finally:
        if csv_fh:
            csv_fh.close()
    if not scanner.finished():
        print(f"stopped at l = {scanner.l}; resume with: palincf resume --checkpoint {checkpoint}",
              file=sys.stderr)
        return EXIT_STOPPED
    return emit(scanner.report(label), out)


# commands

def cmd_gen(args) -> int:
    seq = parse_spec(args.spec)
    if seq.kind == "thm5":
        if args.n is None and args.stages is None:
            raise UsageError("thm5 specs need --n or --stages")
        word = seq.word(N=args.n, stages=args.stages)
    else:
        if args.n is None and seq.finite_length is None:
            raise UsageError(f"{seq.canonical()} is infinite; give --n")
        word = seq.word(N=args.n)
    if args.out:
        write_word(args.out, word, seq.canonical())
    else:
        sys.stdout.write(f"# spec: {seq.canonical()}\n# length: {len(word)}\n")
        sys.stdout.write("".join(f"{a}\n" for a in word))
    return EXIT_OK


def config_from_args(args) -> RunConfig:
    window = None
    if args.window:
        try:
            lo, hi = (int(x) for x in args.window.split(":"))
        except ValueError:
            raise UsageError("--window expects LO:HI") from None
        window = [lo, hi]
    muts = []
    for m in args.mutate or ():
        try:
            pos, val = (int(x) for x in m.split(":"))
        except ValueError:
            raise UsageError("--mutate expects POS:VALUE") from None
        muts.append([pos, val])
    cfg = RunConfig(args.criterion, args.spec, args.word, args.n, args.stages, args.prefix,
                    args.precision_bits, str(Fraction(args.w_max)), str(Fraction(args.wprime_min)),
                    args.u_min, window, args.stage, muts, args.scan_budget)
    cfg.validate()
    return cfg


def cmd_analyze(args) -> int:
    cfg = config_from_args(args)
    if cfg.criterion == "thm1":
        return stream_thm1(cfg, args.out, args.csv, args.checkpoint, args.checkpoint_every, args.stop_at)
    if args.checkpoint or args.stop_at:
        raise UsageError("checkpointing is only available for the streamed thm1 scan")
    report = run_report(cfg)
    if args.csv:
        word = curve_word(cfg, report)
        write_curve(args.csv, word, curve_marks(word, report))
    return emit(report, args.out)


def cmd_resume(args) -> int:
    payload = load_checkpoint(args.checkpoint)
    cfg = RunConfig(**payload["config"])
    if args.spec is not None and parse_spec(args.spec).canonical() != (
            parse_spec(cfg.spec).canonical() if cfg.spec else None):
        raise UsageError(f"--spec {args.spec!r} does not match the checkpoint spec {cfg.spec!r}")
    csv_path = payload["csv"]
    return stream_thm1(cfg, args.out, csv_path, args.checkpoint, args.checkpoint_every, args.stop_at,
                       resume_payload=payload)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="palincf", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a partial-quotient word, one quotient per line")
    g.add_argument("--spec", required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--stages", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    a = sub.add_parser("analyze", help="check a criterion and write a JSON report")
    a.add_argument("--spec")
    a.add_argument("--word", help="word file written by gen")
    a.add_argument("--n", type=int, help="number of quotients (or Lambda terms for thm4)")
    a.add_argument("--stages", type=int)
    a.add_argument("--criterion", required=True, choices=CRITERIA)
    a.add_argument("--prefix", type=int)
    a.add_argument("--precision-bits", type=int, default=DEFAULT_PRECISION_BITS)
    a.add_argument("--w-max", default="1")
    a.add_argument("--wprime-min", default="1")
    a.add_argument("--u-min", type=int, default=1)
    a.add_argument("--window", help="growth window LO:HI")
    a.add_argument("--stage", type=int, help="stage for lemma6")
    a.add_argument("--scan-budget", type=int, default=DEFAULT_SCAN_BUDGET)
    a.add_argument("--mutate", action="append", metavar="POS:VALUE",
                   help="enclose alpha using a word with this quotient replaced")
    a.add_argument("--out")
    a.add_argument("--csv")
    a.add_argument("--checkpoint")
    a.add_argument("--checkpoint-every", type=int)
    a.add_argument("--stop-at", type=int, help="stop after this many quotients (exit 3)")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("resume", help="continue a checkpointed thm1 scan")
    r.add_argument("--checkpoint", required=True)
    r.add_argument("--spec", help="refuse unless it matches the checkpoint")
    r.add_argument("--out")
    r.add_argument("--checkpoint-every", type=int)
    r.add_argument("--stop-at", type=int)
    r.set_defaults(func=cmd_resume)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SpecParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
