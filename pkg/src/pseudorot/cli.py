"""``pseudorot`` command line.

Exit codes: 0 success, 1 malformed input, 2 hypothesis not satisfied,
3 no certificate at the available resolution (or a certificate failed
verification).
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .arc_finder import ArcTheoremCertificate, FindArcPolicy, find_arc, verify_certificate
from .arc_geometry import EssentialArc
from .band_maps import map_from_spec
from .disc import disc_from_spec, factorize_disc
from .errors import HypothesisError, InvalidInputError, ResolutionError
from .farey import (farey_approximations, find_farey_containing, iterate_plan,
                    no_integer_check, parse_interval)
from .rotation import rotation_estimate
from .tiling import build_tiling, conjugacy_error_budget, exact_partition, width_identity

log = logging.getLogger("pseudorot")

EXIT_OK, EXIT_INPUT, EXIT_HYPOTHESIS, EXIT_RESOLUTION = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _load_json(source: str):
    """Read JSON from a file path, or parse ``source`` itself if it is not a file."""
    p = Path(source)
    try:
        text = p.read_text() if p.exists() else source
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"cannot parse JSON from {source!r}: {exc}") from None


def _emit(data, out: str | None) -> None:
    text = json.dumps(data, indent=1)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_rot_set(args) -> int:
    m = map_from_spec(_load_json(args.map))
    est = rotation_estimate(m, args.n, args.grid)
    _emit(est.as_dict(), args.out)
    return EXIT_OK


def cmd_farey(args) -> int:
    if args.interval:
        iv = parse_interval(args.interval)
    elif args.alpha is not None:
        iv = find_farey_containing(args.alpha, args.min_denom_sum)
    else:
        raise InvalidInputError("give --alpha or --interval")
    plan = iterate_plan(iv)
    approx = farey_approximations(iv)
    _emit({
        "interval": str(iv),
        "mediant": str(iv.mediant),
        "n_k": list(plan.n_k),
        "sigma": list(plan.sigma),
        "approximations": [list(pq) for pq in approx.seq],
        "a": list(approx.a),
        "no_integer": no_integer_check(iv),
        "error_budget": conjugacy_error_budget(iv).as_dict(),
    }, args.out)
    return EXIT_OK


def cmd_find_arc(args) -> int:
    h = map_from_spec(_load_json(args.map))
    iv = parse_interval(args.interval)
    policy = FindArcPolicy(eps=args.eps, max_retries=args.max_retries, seed=args.seed)
    cert = find_arc(h, iv, policy)
    _emit(cert.to_json(), args.out)
    if args.svg:
        from .plotting import plot_certificate
        plot_certificate(cert, args.svg)
    log.info("certificate: min distance %.3g, order %s", cert.min_pairwise_distance,
             list(cert.cyclic_order))
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify_certificate(_load_json(args.cert))
    _emit(report, args.out)
    return EXIT_OK if report["ok"] else EXIT_RESOLUTION


def cmd_tiling(args) -> int:
    iv = parse_interval(args.interval)
    tiling = build_tiling(iv, args.alpha)
    cover = tiling.coverage(args.samples, args.seed)
    data = tiling.as_dict()
    data["coverage"] = cover
    data["width_identity"] = str(width_identity(iv, args.alpha))
    data["exact_partition"] = exact_partition(iv, args.alpha)
    _emit(data, args.out)
    if args.svg:
        from .plotting import plot_tiling
        plot_tiling(tiling, args.svg)
    ok = cover["uncovered"] == 0 and cover["interior_overlaps"] == 0
    return EXIT_OK if ok else EXIT_RESOLUTION


def cmd_factorize(args) -> int:
    h = disc_from_spec(_load_json(args.spec))
    fac = factorize_disc(h, args.eps, args.mode, args.grid)
    data = fac.to_json()
    data["report"] = fac.report(h, args.grid)
    _emit(data, args.out)
    return EXIT_OK if data["report"]["ok"] else EXIT_RESOLUTION


def cmd_render(args) -> int:
    from .plotting import plot_arcs, plot_certificate
    data = _load_json(args.input)
    if isinstance(data, dict) and "interval" in data and "arc" in data:
        plot_certificate(ArcTheoremCertificate.from_json(data), args.out)
    else:
        items = data if isinstance(data, list) else [data]
        arcs = [EssentialArc.from_json(a) for a in items]
        window = tuple(args.window) if args.window else None
        plot_arcs(arcs, args.out, [str(i) for i in range(len(arcs))], window=window)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pseudorot", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--seed", type=int, default=0, help="seed for Monte Carlo checks (default 0)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker cap; computations currently run in one thread")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rot-set", help="estimate the rotation set of a lifted map")
    p.add_argument("--map", required=True, help="map spec JSON file or inline JSON")
    p.add_argument("--n", type=int, default=100, help="number of iterates")
    p.add_argument("--grid", type=int, default=256, help="sample grid resolution")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_rot_set)

    p = sub.add_parser("farey", help="Farey interval data: n_k, sigma, approximations")
    p.add_argument("--alpha", help="number to locate (decimal or p/q)")
    p.add_argument("--min-denom-sum", type=int, default=8, help="stop once q + q2 reaches this")
    p.add_argument("--interval", help="explicit interval p/q:p2/q2 instead of --alpha")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_farey)

    p = sub.add_parser("find-arc", help="build and certify an arc for a map and interval")
    p.add_argument("--map", required=True, help="map spec JSON file or inline JSON")
    p.add_argument("--interval", required=True, help="Farey interval p/q:p2/q2")
    p.add_argument("--eps", type=float, help="initial brick size (default: derived)")
    p.add_argument("--max-retries", type=int, default=3, help="eps halvings before giving up")
    p.add_argument("--out", help="certificate JSON path (default stdout)")
    p.add_argument("--svg", help="figure path (.svg or .png)")
    p.set_defaults(func=cmd_find_arc)

    p = sub.add_parser("verify", help="recheck a certificate from its map, interval and arc")
    p.add_argument("--cert", required=True, help="certificate JSON")
    p.add_argument("--out", help="report JSON path (default stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("tiling", help="dynamical tiling for a rotation")
    p.add_argument("--interval", required=True, help="Farey interval p/q:p2/q2")
    p.add_argument("--alpha", required=True, help="rotation number inside the interval")
    p.add_argument("--samples", type=int, default=100_000, help="Monte Carlo sample count")
    p.add_argument("--out", help="report JSON path (default stdout)")
    p.add_argument("--svg", help="figure path (.svg or .png)")
    p.set_defaults(func=cmd_tiling)

    p = sub.add_parser("factorize-disc", help="split a disc map into eps-small factors")
    p.add_argument("--spec", required=True, help="disc map spec JSON file or inline JSON")
    p.add_argument("--eps", type=float, required=True, help="closeness bound per factor")
    p.add_argument("--mode", choices=["fixed", "arcs"], default="fixed",
                   help="fixed: map fixes the boundary circle; arcs: map fixes two boundary arcs")
    p.add_argument("--grid", type=int, default=200, help="sup-distance grid size")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("render", help="draw a certificate or a list of arcs")
    p.add_argument("input", help="certificate JSON or arc JSON (object or list)")
    p.add_argument("--out", required=True, help="figure path (.svg or .png)")
    p.add_argument("--window", type=float, nargs=2, metavar=("X0", "X1"), help="x-range")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except HypothesisError as exc:
        print(f"hypothesis not satisfied: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except ResolutionError as exc:
        print(f"no certificate at this resolution: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except (InvalidInputError, OSError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
