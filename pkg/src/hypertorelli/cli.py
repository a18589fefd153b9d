"""Command-line entry point ``hypertorelli``.

Exit codes: 0 success, 1 input error, 2 precondition violation, 3 resource cap.
Every JSON document carries the tool version and an echo of the run
configuration; keys are sorted so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from json import JSONDecodeError
from pathlib import Path

import numpy as np

from . import __version__
from .cohomology import h1_tangent
from .corpus import (
    ATTEMPT_CAP,
    CapExceeded,
    load_corpus,
    load_spec,
    random_smooth_spec,
    sample_rng,
    save_spec,
    spec_to_dict,
)
from .euler_kernels import (
    SheafKClass,
    apply_kernel,
    beilinson_truncation_class,
    box,
    convolve,
    diag,
    euler_pairing,
    normalize_diag,
    p_class,
    q_class,
    test_family,
)
from .exact_arith import FieldConfig, FieldError, rank_array
from .hodge import full_diamond, hochschild_homology, kuznetsov_hochschild
from .jacobian import DomainError, hilbert_oracle, is_smooth, jacobian_ring, socle_degree
from .polyring import HypersurfaceSpec, PolyParseError, format_poly
from .torelli import (
    Ambiguity,
    WFormatError,
    decode,
    encode,
    hypothesis_check,
    jacobian_equivalent,
    read_w,
    write_w,
)

EXIT_OK, EXIT_INPUT, EXIT_PRECONDITION, EXIT_CAP = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    command: str
    d: int | None
    n: int | None
    field: str
    seed: int
    count: int | None
    input: list[str] | None
    output: str | None
    corpus: list[str] | None
    attempt_cap: int
    decode_attempts: int
    workers: int


def _config(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        d=args.degree,
        n=args.dim,
        field=_field(args).tag,
        seed=args.seed,
        count=getattr(args, "count", None),
        input=args.input or None,
        output=args.output,
        corpus=args.corpus or None,
        attempt_cap=args.attempt_cap,
        decode_attempts=args.decode_attempts,
        workers=args.workers,
    )


def _field(args) -> FieldConfig:
    if args.field == "rational":
        return FieldConfig.rational()
    return FieldConfig.prime_field(args.prime)


def _dump(doc: dict, compact: bool) -> str:
    if compact:
        return json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return json.dumps(doc, sort_keys=True, indent=2)


def _envelope(args, result: dict) -> dict:
    return {"tool": "hypertorelli", "version": __version__, "config": asdict(_config(args)), "result": result}


# --- input resolution ---------------------------------------------------------


def _specs_from_args(args, want: int | None = None) -> list[tuple[str, HypersurfaceSpec]]:
    out = []
    for name in args.corpus or []:
        out.append((f"corpus:{name}", load_corpus(name)[0]))
    for path in args.input or []:
        out.append((path, load_spec(path)))
    if args.poly is not None:
        if args.dim is None:
            raise CliError("--poly needs --dim", EXIT_INPUT)
        spec = HypersurfaceSpec.parse(args.poly, args.dim, args.degree, _field(args))
        out.append(("inline", spec))
    if not out:
        raise CliError("no input: use --input, --corpus or --poly", EXIT_INPUT)
    if want is not None and len(out) != want:
        raise CliError(f"expected {want} input spec(s), got {len(out)}", EXIT_INPUT)
    return out


def _require_dn(args) -> tuple[int, int]:
    if args.degree is None or args.dim is None:
        raise CliError("--degree and --dim are required", EXIT_INPUT)
    return args.degree, args.dim


# --- analyze --------------------------------------------------------------------


def _hh_json(table) -> dict:
    return {"dims": {str(a): h for a, h in sorted(table.dims.items())}, "k_exceptional": table.k_exceptional}


def analyze_spec(spec: HypersurfaceSpec) -> dict:
    d, n = spec.d, spec.n
    if d < 2:
        raise CliError("analyze needs degree >= 2", EXIT_INPUT)
    hyp = hypothesis_check(d, n)
    sigma = socle_degree(d, n)
    ring = jacobian_ring(spec)
    dims = ring.dims(sigma + 1)
    oracle = [hilbert_oracle(d, n, k) for k in range(sigma + 2)]
    smooth = dims[-1] == 0
    report = {
        "spec": spec_to_dict(spec),
        "smooth": smooth,
        "fano": hyp.fano,
        "eligible": hyp.eligible,
        "reason": hyp.reason,
        "socle_degree": sigma,
        "jacobian_dims": dims,
        "cross_checks": {"hilbert_match": dims == oracle},
    }
    if not smooth:
        return report
    hodge = full_diamond(spec)
    report["hodge"] = {
        "primitive_middle": list(hodge.primitive_middle),
        "full_middle": list(hodge.full_middle),
        "nondiagonal": hodge.nondiagonal,
        "surrogate": hodge.surrogate,
    }
    hh = {"variety": _hh_json(hochschild_homology(spec))}
    if spec.fano:
        hh["kuznetsov"] = _hh_json(kuznetsov_hochschild(spec))
    report["hh"] = hh
    try:
        tangent = h1_tangent(spec)
    except DomainError:
        tangent = None
    if tangent is not None:
        report["h1_tangent"] = [tangent.h0_TX, tangent.h1_TX]
        report["cross_checks"]["h1_equals_Jd"] = tangent.h1_TX == ring.dim(d)
    return report


def cmd_analyze(args) -> tuple[dict, int]:
    results = []
    for label, spec in _specs_from_args(args):
        rep = analyze_spec(spec)
        rep["source"] = label
        results.append(rep)
    code = EXIT_OK
    if args.require_smooth and not all(r["smooth"] for r in results):
        code = EXIT_PRECONDITION
    return {"reports": results}, code


# --- encode / decode / compare ------------------------------------------------


def cmd_encode(args) -> tuple[dict, int]:
    label, spec = _specs_from_args(args, want=1)[0]
    if not is_smooth(spec):
        raise CliError("encode needs a smooth hypersurface", EXIT_PRECONDITION)
    enc = encode(spec)
    if args.output:
        write_w(enc, args.output)
    return {"source": label, "rows": enc.W.rows, "cols": enc.W.cols, "written": args.output}, EXIT_OK


def _decode_summary(enc, res) -> dict:
    return {
        "d": enc.d,
        "n": enc.n,
        "field": enc.field.tag,
        "dimW": enc.dim,
        "dimP": res.partials_space.rows,
        "dimF": res.candidate_space.rows,
        "ambiguity": res.ambiguity.value,
        "validated": res.validated,
        "representative": format_poly(res.representative) if res.representative is not None else None,
        "decode_attempts": res.attempts,
    }


def cmd_decode(args) -> tuple[dict, int]:
    if not args.input or len(args.input) != 1:
        raise CliError("decode needs exactly one --input W file", EXIT_INPUT)
    enc = read_w(args.input[0])
    res = decode(enc, sample_rng(args.seed, 0, 1), attempts=args.decode_attempts)
    summary = _decode_summary(enc, res)
    if args.output and res.representative is not None:
        spec = HypersurfaceSpec(enc.n, enc.d, res.representative, strict=False)
        save_spec(spec, args.output, ambiguity=res.ambiguity.value)
        summary["written"] = args.output
    return summary, EXIT_OK


def cmd_compare(args) -> tuple[dict, int]:
    specs = _specs_from_args(args, want=2)
    (la, a), (lb, b) = specs
    for label, s in specs:
        if not is_smooth(s):
            raise CliError(f"{label} is singular", EXIT_PRECONDITION)
    try:
        verdict = jacobian_equivalent(a, b)
    except FieldError as exc:
        raise CliError(str(exc), EXIT_INPUT) from None
    return {"left": la, "right": lb, "equivalent": verdict}, EXIT_OK


# --- random / roundtrip ----------------------------------------------------------


def _random_task(job: tuple) -> dict:
    d, n, tag, seed, i, cap = job
    try:
        s = random_smooth_spec(d, n, FieldConfig.from_tag(tag), seed, i, cap=cap)
    except CapExceeded as exc:
        return {"sample": i, "capped": True, "attempts": exc.attempts}
    return {"sample": i, "capped": False, "attempts": s.attempts,
            "spec": spec_to_dict(s.spec, seed=seed, sample=i, attempts=s.attempts)}


def _map(func, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [func(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, jobs))


def _prime_field_or_fail(args) -> FieldConfig:
    field = _field(args)
    if not field.is_prime:
        raise CliError("random sampling needs --field prime", EXIT_INPUT)
    return field


def _sample_jobs(args) -> list[tuple]:
    d, n = _require_dn(args)
    field = _prime_field_or_fail(args)
    field.check_hypersurface(d, n)
    return [(d, n, field.tag, args.seed, i, args.attempt_cap) for i in range(args.count)]


def _cap_stats(rows: list[dict]) -> dict:
    capped = [r["sample"] for r in rows if r["capped"]]
    attempts = [r["attempts"] for r in rows if not r["capped"]]
    return {
        "capped_samples": capped,
        "total_attempts": sum(r["attempts"] for r in rows),
        "max_attempts": max(attempts) if attempts else None,
    }


def cmd_random(args) -> tuple[dict, int]:
    rows = _map(_random_task, _sample_jobs(args), args.workers)
    stats = _cap_stats(rows)
    specs = [r["spec"] for r in rows if not r["capped"]]
    if args.output:
        out = Path(args.output)
        out.mkdir(parents=True, exist_ok=True)
        for s in specs:
            (out / f"spec_{s['sample']:04d}.json").write_text(json.dumps(s, sort_keys=True, indent=2) + "\n")
    code = EXIT_CAP if stats["capped_samples"] else EXIT_OK
    return {"specs": specs, "rejection": stats}, code


def _proportional(f, g) -> bool:
    if g is None:
        return False
    return rank_array(np.vstack([f.vector(), g.vector()]), f.field) == 1


def roundtrip_row(spec: HypersurfaceSpec, seed: int, index: int, attempts: int) -> dict:
    enc = encode(spec)
    res = decode(enc, sample_rng(seed, index, 1), attempts=attempts)
    return {
        "dimW": enc.dim,
        "dimP": res.partials_space.rows,
        "dimF": res.candidate_space.rows,
        "ambiguity": res.ambiguity.value,
        "validated": res.validated,
        "proportional_to_input": _proportional(spec.f, res.representative),
        "decode_attempts": res.attempts,
    }


def _roundtrip_task(job: tuple) -> dict:
    kind = job[0]
    if kind == "corpus":
        _, name, seed, idx, attempts = job
        spec = load_corpus(name)[0]
        row = {"sample": f"corpus:{name}", "capped": False, "attempts": 0}
        row.update(roundtrip_row(spec, seed, idx, attempts))
        return row
    _, d, n, tag, seed, i, cap, attempts = job
    try:
        s = random_smooth_spec(d, n, FieldConfig.from_tag(tag), seed, i, cap=cap)
    except CapExceeded as exc:
        return {"sample": i, "capped": True, "attempts": exc.attempts}
    row = {"sample": i, "capped": False, "attempts": s.attempts}
    row.update(roundtrip_row(s.spec, seed, i, attempts))
    return row


def cmd_roundtrip(args) -> tuple[dict, int]:
    jobs: list[tuple] = []
    if args.count:
        jobs += [("random", *j, args.decode_attempts) for j in _sample_jobs(args)]
    base = args.count or 0
    for k, name in enumerate(args.corpus or []):
        jobs.append(("corpus", name, args.seed, base + k, args.decode_attempts))
    if not jobs:
        raise CliError("nothing to do: give --count or --corpus", EXIT_INPUT)
    rows = _map(_roundtrip_task, jobs, args.workers)
    done = [r for r in rows if not r["capped"]]
    hist: dict[str, int] = {}
    for r in done:
        hist[str(r["dimF"])] = hist.get(str(r["dimF"]), 0) + 1
    aggregate = {
        "samples": len(done),
        "validated": sum(r["validated"] for r in done),
        "proportional": sum(r["proportional_to_input"] for r in done),
        "ambiguity": {a.value: sum(r["ambiguity"] == a.value for r in done) for a in Ambiguity},
        "dimF_histogram": hist,
        "rejection": _cap_stats(rows),
    }
    if args.output:
        lines = [json.dumps(r, sort_keys=True) for r in rows]
        lines.append(json.dumps({"aggregate": aggregate}, sort_keys=True))
        Path(args.output).write_text("\n".join(lines) + "\n")
    code = EXIT_CAP if aggregate["rejection"]["capped_samples"] else EXIT_OK
    return {"rows": rows, "aggregate": aggregate}, code


# --- kernels ----------------------------------------------------------------------


def kernel_checks(d: int, n: int) -> dict:
    if not 1 <= d < n + 2:
        raise CliError("kernels needs 1 <= d < n + 2", EXIT_PRECONDITION)
    q0, p0 = q_class(d, n, 0), p_class(d, n, 0)
    q_ok = {str(i): q_class(d, n, i) == diag(d, n, i) - beilinson_truncation_class(d, n, i) for i in range(d)}
    pd = p_class(d, n, d)
    e00 = euler_pairing(p0, p0)
    delta = pd - p0
    family = test_family(d, n)
    return {
        "d": d,
        "n": n,
        "q_identity_ok": q_ok,
        "q0_idempotent": convolve(q0, q0) == q0,
        "box_kills_q0": convolve(box(d, n, 0, 0), q0).is_zero(),
        "p0_idempotent": convolve(p0, p0) == p0,
        "p0_annihilates_collection": all(
            apply_kernel(p0, SheafKClass.line_bundle(d, n, i)).is_zero() for i in range(n - d + 2)
        ),
        "periodicity_chi_ok": euler_pairing(p0, pd) == e00 and euler_pairing(pd, pd) == e00,
        "periodicity_pairing_family_ok": all(
            euler_pairing(T, delta) == 0 and euler_pairing(delta, T) == 0 for T in family
        ),
        "normalized_equality_diagnostic": normalize_diag(delta).is_zero(),
        "p0": str(p0),
        "chi_p0_p0": e00,
    }


def cmd_kernels(args) -> tuple[dict, int]:
    d, n = _require_dn(args)
    return kernel_checks(d, n), EXIT_OK


# --- argument parsing ---------------------------------------------------------------


COMMANDS = {
    "analyze": cmd_analyze,
    "encode": cmd_encode,
    "decode": cmd_decode,
    "compare": cmd_compare,
    "random": cmd_random,
    "kernels": cmd_kernels,
    "roundtrip": cmd_roundtrip,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-d", "--degree", type=int)
    common.add_argument("-n", "--dim", type=int, help="dimension of X (n + 2 variables)")
    common.add_argument("--field", choices=("rational", "prime"), default="prime")
    common.add_argument("--prime", type=int, default=10007)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--input", action="append", help="spec JSON (or W file for decode); repeatable")
    common.add_argument("--output")
    common.add_argument("--corpus", action="append", help="bundled corpus member; repeatable")
    common.add_argument("--poly", help="inline polynomial in x0..x{n+1}")
    common.add_argument("--json", action="store_true", help="compact single-line JSON")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--attempt-cap", type=int, default=ATTEMPT_CAP)
    common.add_argument("--decode-attempts", type=int, default=64)

    parser = argparse.ArgumentParser(prog="hypertorelli", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name in ("random", "roundtrip"):
            p.add_argument("--count", type=int, default=None if name == "roundtrip" else 1)
        if name == "analyze":
            p.add_argument("--require-smooth", action="store_true",
                           help="exit 2 when an input is singular")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.seed < 0 or args.seed >= 2**64:
            parser.error("--seed must be a 64-bit unsigned integer")
    except SystemExit as exc:
        # argparse uses 2 for usage errors; here 2 means a failed precondition
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        result, code = COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (PolyParseError, WFormatError, FieldError, JSONDecodeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(_dump(_envelope(args, result), args.json))
    return code


if __name__ == "__main__":
    sys.exit(main())
