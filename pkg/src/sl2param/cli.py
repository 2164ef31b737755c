"""Command line: factor a matrix, verify a certificate, run seeded corpora.

Exit codes: 0 ok, 1 verification failure, 2 search exhausted, 3 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import random
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from statistics import mean

from . import families as fam
from .errors import SearchExhausted, VerificationFailed
from .families import MalformedCertificate
from .reduce import PipelineConfig, RunStats, factorize_matrix
from .ring import CLASS_NUMBER_ONE, QuadRing, iter_by_norm, ring
from .sl2 import Matrix2

EXIT_OK, EXIT_VERIFY, EXIT_SEARCH, EXIT_INPUT = 0, 1, 2, 3

CSV_COLUMNS = ("d", "index", "cert_len", "trials", "max_t", "millis")

# integer words used for ZWORD factors in generated matrices
_GEN_ZWORDS = (fam.J, fam.J_INV, ((1, 1), (-1, 0)), ((0, -1), (1, 1)))


def small_elements(R: QuadRing, max_norm: int) -> list:
    out = []
    for e in iter_by_norm(R, 0):
        if e.norm() > max_norm:
            break
        out.append(e)
    return out


def random_word(R: QuadRing, rng: random.Random, word_len: int, param_max_norm: int) -> list:
    params = small_elements(R, param_max_norm)
    word = []
    for _ in range(word_len):
        kind = rng.choice(("E12", "E21", "ZWORD"))
        if kind == "ZWORD":
            word.append(fam.ZWORD(rng.choice(_GEN_ZWORDS)))
        else:
            word.append(fam.Factor(kind, (rng.choice(params),)))
    return word


def random_matrix(R: QuadRing, seed, index: int, word_len: int = 8, param_max_norm: int = 20) -> Matrix2:
    """The index-th corpus matrix of field R for a given seed."""
    rng = random.Random(f"{seed}:{R.d}:{index}")
    return fam.eval_word(random_word(R, rng, word_len, param_max_norm), R)


# -- input parsing -------------------------------------------------------------


def _parse_ring(d: int) -> QuadRing:
    try:
        return ring(d)
    except ValueError as exc:
        raise MalformedCertificate(str(exc)) from None


def _entry(v):
    # a bare integer stands for a rational entry
    if isinstance(v, (int, str)) and not isinstance(v, bool):
        return [v, 0]
    return v


def parse_matrix(R: QuadRing, source: str) -> Matrix2:
    """'identity', a JSON 2x2 matrix, or a file holding one."""
    if source == "identity":
        return Matrix2.identity(R)
    text = source
    if not source.lstrip().startswith("["):
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise MalformedCertificate(f"cannot read {source}: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedCertificate(f"invalid matrix JSON: {exc}") from None
    if isinstance(obj, dict) and "target" in obj:
        obj = obj["target"]
    if isinstance(obj, list):
        obj = [[_entry(v) for v in row] if isinstance(row, list) else row for row in obj]
    M = fam.matrix_from_json(R, obj)
    if M.det() != 1:
        raise MalformedCertificate(f"determinant is {M.det()}, not 1")
    return M


# -- run reports -------------------------------------------------------------


@dataclass
class RunRow:
    d: int
    index: int
    cert_len: int | None
    trials: int
    max_t: int
    millis: int

    def csv_row(self) -> list:
        return [self.d, self.index, "" if self.cert_len is None else self.cert_len, self.trials, self.max_t, self.millis]


@dataclass
class RunReport:
    rows: list = field(default_factory=list)

    def aggregate(self, d: int | None = None) -> dict:
        rows = [r for r in self.rows if d is None or r.d == d]
        done = [r for r in rows if r.cert_len is not None]
        out = {"count": len(rows), "ok": len(done)}
        for key in ("cert_len", "trials", "max_t", "millis"):
            vals = [getattr(r, key) for r in done]
            if vals:
                out[key] = (min(vals), max(vals), mean(vals))
        return out

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(r.csv_row())


# -- commands ------------------------------------------------------------------


def _config(args) -> PipelineConfig:
    cfg = PipelineConfig(seed=args.seed)
    if getattr(args, "budget", None):
        cfg.budget = args.budget
    return cfg


def cmd_factor(args) -> int:
    try:
        R = _parse_ring(args.d)
        M = parse_matrix(R, args.matrix)
    except MalformedCertificate as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        cert = factorize_matrix(M, _config(args))
    except SearchExhausted as exc:
        print(f"search exhausted: {exc}", file=sys.stderr)
        return EXIT_SEARCH
    except VerificationFailed as exc:
        print(f"verification failed:\n{exc}", file=sys.stderr)
        return EXIT_VERIFY
    except NotImplementedError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = fam.certificate_to_json(cert)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        cert = fam.certificate_from_json(Path(args.file).read_text())
    except OSError as exc:
        print(f"cannot read {args.file}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (MalformedCertificate, ValueError) as exc:
        print(f"malformed certificate: {exc}", file=sys.stderr)
        return EXIT_INPUT
    res = fam.verify_certificate(cert)
    if not res.ok:
        print(res.report(), file=sys.stderr)
        return EXIT_VERIFY
    print(f"ok: {len(cert.factors)} factors")
    return EXIT_OK


def run_corpus(fields, count: int, seed, word_len: int, param_max_norm: int,
               cfg: PipelineConfig | None = None, timing: bool = True, cert_dir: Path | None = None):
    """Factor and verify a seeded corpus; returns (report, exit code)."""
    report = RunReport()
    status = EXIT_OK
    for d in fields:
        R = ring(d)
        for i in range(count):
            M = random_matrix(R, seed, i, word_len, param_max_norm)
            stats = RunStats()
            t0 = time.perf_counter()
            cert_len = None
            try:
                cert = factorize_matrix(M, cfg or PipelineConfig(seed=seed), stats)
                cert_len = len(cert.factors)
                if cert_dir is not None:
                    (cert_dir / f"cert_{-d}_{i}.json").write_text(fam.certificate_to_json(cert))
            except SearchExhausted as exc:
                print(f"d={d} index={i}: search exhausted: {exc}", file=sys.stderr)
                status = EXIT_SEARCH
            except VerificationFailed as exc:
                print(f"d={d} index={i}: verification failed: {exc}", file=sys.stderr)
                if status == EXIT_OK:
                    status = EXIT_VERIFY
            millis = round((time.perf_counter() - t0) * 1000) if timing else 0
            report.rows.append(RunRow(d, i, cert_len, stats.trials, stats.max_t, millis))
    return report, status


def _fields(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad field list {text!r}") from None


def cmd_selftest(args) -> int:
    bad = [d for d in args.fields if d not in CLASS_NUMBER_ONE]
    if bad:
        print(f"invalid input: fields {bad} are not class number one", file=sys.stderr)
        return EXIT_INPUT
    cert_dir = Path(args.certs) if args.certs else None
    if cert_dir is not None:
        cert_dir.mkdir(parents=True, exist_ok=True)
    cfg = _config(args)
    report, status = run_corpus(args.fields, args.count, args.seed, args.gen_word_len, args.param_max_norm,
                                cfg, timing=not args.no_timing, cert_dir=cert_dir)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            report.write_csv(fh)
    else:
        report.write_csv(sys.stdout)
    for d in args.fields:
        agg = report.aggregate(d)
        parts = [f"d={d}", f"ok={agg['ok']}/{agg['count']}"]
        for key in ("cert_len", "max_t", "millis"):
            if key in agg:
                lo, hi, avg = agg[key]
                parts.append(f"{key}={lo}/{hi}/{avg:.1f}")
        print(" ".join(parts), file=sys.stderr)
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sl2param", description="SL2 factorization certificates over imaginary quadratic integers")
    sub = p.add_subparsers(dest="cmd", required=True)

    f = sub.add_parser("factor", help="factor one matrix and write its certificate")
    f.add_argument("--d", type=int, required=True)
    f.add_argument("--matrix", required=True, help="'identity', a JSON 2x2 matrix, or a file")
    f.add_argument("--out")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--budget", type=int)
    f.set_defaults(func=cmd_factor)

    v = sub.add_parser("verify", help="check a certificate file")
    v.add_argument("file")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("selftest", help="factor a seeded random corpus and report statistics")
    s.add_argument("--fields", type=_fields, default=list(CLASS_NUMBER_ONE))
    s.add_argument("--count", type=int, default=25)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--gen-word-len", type=int, default=8)
    s.add_argument("--param-max-norm", type=int, default=20)
    s.add_argument("--budget", type=int)
    s.add_argument("--csv")
    s.add_argument("--certs", help="directory for the certificates")
    s.add_argument("--no-timing", action="store_true", help="write 0 for millis so the CSV is reproducible")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
