"""Command-line front end.

Exit codes: 0 success, 1 a verify battery failed, 2 bad arguments or
parameters, 3 a construction or evaluation could not be certified (divergent
penalty, no light-tail certificate, unstable minimax limit), 4 malformed
stream or container.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from typing import List, Optional

from . import batteries, codec
from .errors import (CodingError, DivergentEntropy, DivergentPenalty, InvalidParameter,
                     NonStabilized, NotVerifiablyLightTailed, StreamError)
from .exp_huffman import exp_huffman
from .golomb import ONES, ZEROS, GolombCode, SWEEP_HEADER, optimal_k, sweep_rows
from .light_tail import UnaryEndedCode, build_unary_ended
from .minimax import max_pointwise_redundancy, minimax_golomb_k, minimax_reduced_code
from .model import (FiniteWeights, GeometricSource, Regime, SourceModel, classify, renyi_order,
                    source_from_json)
from .penalty_eval import penalty, renyi_entropy

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_UNCERTIFIED, EXIT_STREAM = 0, 1, 2, 3, 4


def fmt(x) -> str:
    return format(x, ".12g")


def _rounded(obj):
    """Floats cut to 12 significant digits, recursively."""
    if isinstance(obj, float):
        return float(fmt(obj)) if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(v) for v in obj]
    return obj


def _json_arg(value: str) -> str:
    """Inline JSON, or the path of a file holding it."""
    text = value.strip()
    if text.startswith(("{", "[")):
        return text
    with open(value, encoding="utf-8") as fh:
        return fh.read()


def _source(args) -> SourceModel:
    if not args.source:
        raise InvalidParameter("--source is required")
    return source_from_json(_json_arg(args.source))


def _emit(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(_rounded(obj), indent=2) + "\n"


def _with_prefix(spec, prefix: str):
    if isinstance(spec, GolombCode):
        return GolombCode(spec.k, prefix)
    return spec


def _summary(source: SourceModel, spec, a: Optional[float], tol: float) -> dict:
    lengths = spec.code_lengths()
    out = {}
    if isinstance(spec, GolombCode):
        out["k"] = spec.k
    elif isinstance(spec, UnaryEndedCode):
        out["r"] = spec.r
    out["lengths_head"] = lengths.first(min(20, lengths.size or 20))
    if a is not None:
        out["a"] = a
        out["penalty"] = penalty(source, lengths, a, tol)
        if classify(a) is not Regime.DEGENERATE:
            out["entropy"] = renyi_entropy(source, renyi_order(a), tol)
            out["redundancy"] = out["penalty"] - out["entropy"]
    prof = max_pointwise_redundancy(source, lengths)
    out["max_redundancy"] = prof.sup_value
    return out


def cmd_optimal(args) -> int:
    source = _source(args)
    if args.maxred:
        if isinstance(source, GeometricSource):
            spec = GolombCode(minimax_golomb_k(source.theta))
        else:
            spec = minimax_reduced_code(source)
        a = args.a
    else:
        if args.a is None:
            raise InvalidParameter("give --a or --maxred")
        a = args.a
        if isinstance(source, GeometricSource):
            spec = GolombCode(optimal_k(source.theta, a))
        elif isinstance(source, FiniteWeights):
            spec = exp_huffman(source, a)
        else:
            spec = build_unary_ended(source, a)
    spec = _with_prefix(spec, args.prefix_convention)
    _emit(args, _dump({"codespec": spec.to_dict(), "summary": _summary(source, spec, a, args.tol)}))
    return EXIT_OK


def _read_symbols(path: Optional[str]) -> List[int]:
    fh = open(path, encoding="utf-8") if path and path != "-" else sys.stdin
    try:
        out = []
        for n, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(int(line))
            except ValueError:
                raise InvalidParameter(f"line {n}: not an integer: {line!r}") from None
        return out
    finally:
        if fh is not sys.stdin:
            fh.close()


def cmd_encode(args) -> int:
    if not args.spec:
        raise InvalidParameter("--spec is required")
    spec = codec.spec_from_json(_json_arg(args.spec))
    if args.prefix_convention_given:
        spec = _with_prefix(spec, args.prefix_convention)
    blob = codec.write_container(spec, _read_symbols(args.input))
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(blob)
    else:
        sys.stdout.buffer.write(blob)
    return EXIT_OK


def cmd_decode(args) -> int:
    if args.input and args.input != "-":
        with open(args.input, "rb") as fh:
            data = fh.read()
    else:
        data = sys.stdin.buffer.read()
    spec, symbols = codec.read_container(data)
    if args.spec and codec.spec_from_json(_json_arg(args.spec)).to_dict() != spec.to_dict():
        raise InvalidParameter("container code description differs from --spec")
    _emit(args, "".join(f"{s}\n" for s in symbols))
    return EXIT_OK


def cmd_eval(args) -> int:
    source = _source(args)
    if not args.spec:
        raise InvalidParameter("--spec is required")
    spec = codec.spec_from_json(_json_arg(args.spec))
    _emit(args, _dump({"codespec": spec.to_dict(), "summary": _summary(source, spec, args.a, args.tol)}))
    return EXIT_OK


def parse_grid(text: str) -> List[float]:
    """Comma-separated values, or start:stop:step (stop included up to rounding)."""
    text = text.strip()
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise InvalidParameter(f"grid {text!r} should be start:stop:step with step > 0")
        start, stop, step = parts
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(max(n, 0))]
    return [float(x) for x in text.split(",") if x.strip()]


def cmd_sweep(args) -> int:
    thetas = parse_grid(args.theta_grid)
    a_values = parse_grid(args.a_grid) if args.a_grid else [args.a if args.a is not None else 1.0]
    for t in thetas:
        if not 0.0 < t < 1.0:
            raise InvalidParameter(f"theta grid value {t} outside (0, 1)")
    for a in a_values:
        if not a > 0.5:
            raise InvalidParameter(f"a grid value {a} outside (0.5, inf)")
    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for theta, a, k, pen, ent, red in sweep_rows(thetas, a_values):
            w.writerow([fmt(theta), fmt(a), k, fmt(pen), fmt(ent), fmt(red)])
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def cmd_verify(args) -> int:
    report = batteries.run(args.battery, seed=args.seed)
    _emit(args, _dump(report))
    return EXIT_OK if report["passed"] else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--source", help="source model as JSON or a JSON file path")
    common.add_argument("--a", type=float, help="penalty base a > 0")
    common.add_argument("--maxred", action="store_true", help="minimize maximum pointwise redundancy")
    common.add_argument("--tol", type=float, default=1e-12, help="numeric tolerance for sums")
    common.add_argument("--seed", type=int, default=batteries.DEFAULT_SEED)
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--prefix-convention", choices=(ONES, ZEROS), default=None,
                        help="Golomb quotient prefix: 1^q 0 (ones) or 0^q 1 (zeros)")
    common.add_argument("--spec", help="code description as JSON or a JSON file path")
    common.add_argument("--in", dest="input", help="input path (default stdin)")

    p = argparse.ArgumentParser(prog="expcodes", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("optimal", parents=[common], help="construct the optimal code for a source")
    sub.add_parser("encode", parents=[common], help="encode newline-separated integers")
    sub.add_parser("decode", parents=[common], help="decode a container to integers")
    sub.add_parser("eval", parents=[common], help="penalty, entropy and redundancy of a code")
    sw = sub.add_parser("sweep", parents=[common], help="CSV of optimal Golomb redundancy")
    sw.add_argument("--theta-grid", default="0.01:0.99:0.01")
    sw.add_argument("--a-grid", help="comma list or start:stop:step (overrides --a)")
    vf = sub.add_parser("verify", parents=[common], help="run a verification battery")
    vf.add_argument("battery", choices=sorted(batteries.BATTERIES))
    return p


COMMANDS = {"optimal": cmd_optimal, "encode": cmd_encode, "decode": cmd_decode,
            "eval": cmd_eval, "sweep": cmd_sweep, "verify": cmd_verify}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    args.prefix_convention_given = args.prefix_convention is not None
    if args.prefix_convention is None:
        args.prefix_convention = ONES
    try:
        return COMMANDS[args.command](args)
    except StreamError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_STREAM
    except (DivergentPenalty, DivergentEntropy, NotVerifiablyLightTailed, NonStabilized) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_UNCERTIFIED
    except (CodingError, ValueError, KeyError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
