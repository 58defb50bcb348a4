"""Command-line surface: batch analysis, sweeps, searches, data emission.

Every run resolves its arguments into a flat config dict whose SHA-256
prefix is embedded in all emitted artifacts, and the config itself is
written beside any output file, so a results file always identifies the
exact invocation that produced it.  Identical config and seed give
byte-identical output.

Exit codes: 0 success, 1 check failure (mc-check disagreement), 2 parse
errors (malformed graph6 or candidate files), 3 validation errors (bad
values or missing parameters), 4 resource limits (sizes the exact
engines refuse).
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import os
import sys

from . import __version__
from .codes import (
    GraphCode,
    InvalidCodeError,
    branched_chain_code,
    cube_code,
    decorated_pentagon_code,
    pentagon_code,
    shor_22_code,
    star_code,
    tree_code,
)
from .graphs import Graph
from .polynomials import break_even
from .losstree import (
    load_or_build,
    monte_carlo_decode,
    success_polynomial,
    total_polynomial,
)
from .errordecode import logical_flip_rates
from .modular import LayerStack, logical_transmission
from .fusion import FusionModel, adaptive_fusion, transversal_fusion
from .apps import FbqcSpec, RepeaterSpec, fbqc_loss_threshold, rgs_link_probability
from .search import Objective, enumerate_candidates, optimize
from .opsets import ResourceLimitError

EXIT_OK = 0
EXIT_CHECK = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_RESOURCE = 4

TOOL = "graphcode-lt"


class CliError(Exception):
    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code


# -- argument resolution -----------------------------------------------------------

_LIBRARY = {
    "pentagon": pentagon_code,
    "decorated-pentagon": decorated_pentagon_code,
    "cube": cube_code,
    "branched-chain": branched_chain_code,
    "shor22": shor_22_code,
}


def resolve_code(graph: str, input_vertex: int) -> GraphCode:
    """A library name, star<N>, tree:<b1,b2,..>, or a graph6 string."""
    if graph in _LIBRARY:
        return _LIBRARY[graph]()
    if graph.startswith("star"):
        try:
            return star_code(int(graph[4:]))
        except ValueError:
            raise CliError(EXIT_PARSE, f"bad star size in {graph!r}")
    if graph.startswith("tree:"):
        try:
            branching = [int(b) for b in graph[5:].split(",")]
            return tree_code(branching)
        except ValueError:
            raise CliError(EXIT_PARSE, f"bad tree branching in {graph!r}")
    try:
        g = Graph.from_graph6(graph)
    except Exception as exc:
        raise CliError(EXIT_PARSE, f"malformed graph6 {graph!r}: {exc}")
    try:
        return GraphCode(g, input_vertex)
    except InvalidCodeError as exc:
        raise CliError(EXIT_VALIDATION, str(exc))


def parse_grid(text: str, name: str) -> list[float]:
    """Comma-separated values, or start:stop:step inclusive of the stop."""
    text = text.strip()
    if not text:
        raise CliError(EXIT_VALIDATION, f"{name} is empty")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise CliError(EXIT_VALIDATION,
                           f"{name} range must be start:stop:step, got {text!r}")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise CliError(EXIT_VALIDATION, f"{name} has non-numeric entries")
        if step <= 0 or stop < start:
            raise CliError(EXIT_VALIDATION, f"{name} range is not increasing")
        out = []
        k = 0
        while True:
            v = start + k * step
            if v > stop + 1e-12:
                break
            out.append(round(v, 12))
            k += 1
        return out
    try:
        values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise CliError(EXIT_VALIDATION, f"{name} has non-numeric entries")
    if not values:
        raise CliError(EXIT_VALIDATION, f"{name} is empty")
    return values


def check_unit(value: float, name: str, lo: float = 0.0, hi: float = 1.0):
    if not lo <= value <= hi:
        raise CliError(EXIT_VALIDATION,
                       f"{name} must lie in [{lo}, {hi}], got {value}")
    return value


# -- artifact emission -------------------------------------------------------------


def config_hash(config: dict) -> str:
    # The hash identifies the computation; where the artifact lands
    # must not change it, or reruns to a new path would never match.
    hashed = {k: v for k, v in config.items() if k != "out"}
    blob = json.dumps(hashed, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _write(out: str | None, text: str, config: dict):
    if out:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)
        sidecar = {"tool": TOOL, "version": __version__,
                   "config_hash": config_hash(config), "config": config}
        with open(out + ".config.json", "w", encoding="ascii") as fh:
            fh.write(json.dumps(sidecar, sort_keys=True, indent=1) + "\n")
    else:
        sys.stdout.write(text)


def emit_rows(header: list[str], rows: list[list], config: dict,
              out: str | None, fmt: str):
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# {TOOL} {__version__} config={config_hash(config)}\n")
        buf.write(",".join(header) + "\n")
        for row in rows:
            buf.write(",".join(_cell(v) for v in row) + "\n")
        _write(out, buf.getvalue(), config)
    else:
        payload = {"tool": TOOL, "version": __version__,
                   "config_hash": config_hash(config), "config": config,
                   "result": [dict(zip(header, row)) for row in rows]}
        _write(out, json.dumps(payload, sort_keys=True, indent=1) + "\n", config)


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


# -- subcommands -------------------------------------------------------------------


def cmd_analyze(args, config) -> int:
    code = resolve_code(args.graph, args.input_vertex)
    rows = []
    for kind in ("X", "Y", "Z", "arbitrary"):
        poly = success_polynomial(load_or_build(code, kind))
        be = break_even(poly)
        rows.append([kind, poly.to_string(),
                     "" if be is None else be])
    if args.format is None and args.out is None:
        for kind, text, be in rows:
            tail = "no break-even" if be == "" else f"break-even {be:.6f}"
            print(f"{kind}: {text}  ({tail})")
        return EXIT_OK
    emit_rows(["basis", "polynomial", "break_even"], rows, config,
              args.out, args.format or "csv")
    return EXIT_OK


def cmd_tree(args, config) -> int:
    code = resolve_code(args.graph, args.input_vertex)
    kind = "arbitrary" if args.basis in ("A", "arbitrary") else args.basis
    tree = load_or_build(code, kind)
    payload = {"tool": TOOL, "version": __version__,
               "config_hash": config_hash(config), "config": config,
               "result": json.loads(tree.to_json())}
    _write(args.out, json.dumps(payload, sort_keys=True, indent=1) + "\n",
           config)
    return EXIT_OK


def cmd_sweep(args, config) -> int:
    code = resolve_code(args.graph, args.input_vertex)
    if args.eta_grid is None and args.lambda_grid is None:
        raise CliError(EXIT_VALIDATION,
                       "sweep needs --eta-grid (loss) or --lambda-grid (error)")
    if args.eta_grid is not None:
        etas = [check_unit(v, "--eta-grid entry")
                for v in parse_grid(args.eta_grid, "--eta-grid")]
        polys = {k: success_polynomial(load_or_build(code, k))
                 for k in ("X", "Y", "Z", "arbitrary")}
        rows = [[eta] + [1.0 - polys[k].evaluate(eta)
                         for k in ("X", "Y", "Z", "arbitrary")]
                for eta in etas]
        emit_rows(["eta", "loss_x", "loss_y", "loss_z", "loss_arbitrary"],
                  rows, config, args.out, args.format or "csv")
        return EXIT_OK
    lams = [check_unit(v, "--lambda-grid entry", hi=1.0 / 3.0)
            for v in parse_grid(args.lambda_grid, "--lambda-grid")]
    rows = []
    for lam in lams:
        fx, fy, fz = logical_flip_rates(code, (2 * lam,) * 3)
        rows.append([lam, fx, fy, fz])
    emit_rows(["lambda", "flip_x", "flip_y", "flip_z"], rows, config,
              args.out, args.format or "csv")
    return EXIT_OK


def _eta_list(args) -> list[float]:
    if args.eta_grid is not None:
        return [check_unit(v, "--eta-grid entry")
                for v in parse_grid(args.eta_grid, "--eta-grid")]
    if args.eta is not None:
        return [check_unit(args.eta, "--eta")]
    raise CliError(EXIT_VALIDATION, "need --eta or --eta-grid")


def cmd_fusion(args, config) -> int:
    code = resolve_code(args.graph, args.input_vertex)
    engine = adaptive_fusion if args.mode != "transversal" else transversal_fusion
    rows = []
    for eta in _eta_list(args):
        r = engine(code, FusionModel(args.pfail, eta))
        rows.append([eta, r.p_success, r.p_fail_logical, r.p_loss_logical,
                     r.erasure_xx, r.erasure_zz])
    emit_rows(["eta", "p_success", "p_fail_logical", "p_loss_logical",
               "erasure_xx", "erasure_zz"], rows, config, args.out,
              args.format or "csv")
    return EXIT_OK


def cmd_concat(args, config) -> int:
    code = resolve_code(args.graph, args.input_vertex)
    if args.depth < 1:
        raise CliError(EXIT_VALIDATION, f"--depth must be >= 1, got {args.depth}")
    rows = []
    for eta in _eta_list(args):
        stack = LayerStack([code] * args.depth, args.mode, eta)
        r = logical_transmission(stack)
        rows.append([eta, r.x, r.y, r.z, r.a, stack.qubit_count])
    emit_rows(["eta", "x", "y", "z", "arbitrary", "qubits"], rows, config,
              args.out, args.format or "csv")
    return EXIT_OK


def cmd_rgs(args, config) -> int:
    code = resolve_code(args.graph, args.input_vertex)
    stations = args.depth
    if stations < 1:
        raise CliError(EXIT_VALIDATION, f"--depth must be >= 1, got {stations}")
    spec = RepeaterSpec(code, p_fail=args.pfail, stations=stations,
                        adaptive=args.mode != "transversal")
    rows = []
    for eta in _eta_list(args):
        p_link = rgs_link_probability(spec, eta)
        rows.append([1.0 - eta, p_link, p_link ** stations])
    emit_rows(["ell", "p_link", "p_end_to_end"], rows, config, args.out,
              args.format or "csv")
    return EXIT_OK


def cmd_fbqc(args, config) -> int:
    code = resolve_code(args.graph, args.input_vertex)
    p_fails = parse_grid(str(args.pfail), "--pfail")
    rows = []
    for pf in p_fails:
        if not 0.0 < pf <= 1.0:
            raise CliError(EXIT_VALIDATION, f"p_fail must lie in (0, 1], got {pf}")
        spec = FbqcSpec(code, pf, adaptive=args.mode != "transversal")
        rows.append([pf, fbqc_loss_threshold(spec)])
    emit_rows(["p_fail", "loss_threshold"], rows, config, args.out,
              args.format or "csv")
    return EXIT_OK


def cmd_search(args, config) -> int:
    if args.threads < 1:
        raise CliError(EXIT_VALIDATION,
                       f"--threads must be >= 1, got {args.threads}")
    source = args.graph
    if source.startswith("n:"):
        try:
            n_total = int(source[2:])
        except ValueError:
            raise CliError(EXIT_PARSE, f"bad candidate size {source!r}")
        if n_total < 2:
            raise CliError(EXIT_VALIDATION,
                           f"candidate size must be >= 2, got {n_total}")
        candidates = enumerate_candidates(n_total)
    else:
        if not os.path.exists(source):
            raise CliError(EXIT_VALIDATION, f"no candidate file {source!r}")
        candidates = enumerate_candidates(source=source)
    objective = Objective(args.kind, eta=args.eta if args.eta is not None else 0.70,
                          p_fail=args.pfail,
                          adaptive=args.mode != "transversal")
    checkpoint = None
    cache_dir = os.environ.get("GRAPHCODE_LT_CACHE")
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        checkpoint = os.path.join(
            cache_dir, f"search_{config_hash(config)}.ckpt")
    try:
        result = optimize(objective, candidates, workers=args.threads,
                          checkpoint=checkpoint)
    except ValueError as exc:
        raise CliError(EXIT_PARSE, str(exc))
    header = json.dumps({"tool": TOOL, "version": __version__,
                         "config_hash": config_hash(config), "config": config},
                        sort_keys=True)
    _write(args.out, header + "\n" + result.to_jsonl(), config)
    return EXIT_OK


def cmd_mc_check(args, config) -> int:
    code = resolve_code(args.graph, args.input_vertex)
    kind = "arbitrary" if args.basis in ("A", "arbitrary") else args.basis
    eta = check_unit(args.eta if args.eta is not None else 0.9, "--eta")
    if args.trials < 1:
        raise CliError(EXIT_VALIDATION, f"--trials must be >= 1, got {args.trials}")
    tree = load_or_build(code, kind)
    conserved = total_polynomial(tree).eta_coefficients() == {0: 1}
    exact = success_polynomial(tree).evaluate(eta)
    mc = monte_carlo_decode(code, tree, eta, args.trials, seed=args.seed)
    diff = abs(mc.estimate - exact)
    ok = conserved and diff <= 4.0 * mc.stderr + 1e-15
    print(f"{'PASS' if ok else 'FAIL'} exact={exact:.6f} "
          f"mc={mc.estimate:.6f} stderr={mc.stderr:.6f} "
          f"conservation={'ok' if conserved else 'VIOLATED'}")
    return EXIT_OK if ok else EXIT_CHECK


# -- wiring ------------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, *, graph_required=True):
    p.add_argument("--graph", required=graph_required,
                   help="library name, star<N>, tree:<b,..>, or graph6")
    p.add_argument("--input-vertex", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default=None)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog=TOOL, description=__doc__)
    top.add_argument("--version", action="version",
                     version=f"{TOOL} {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="polynomials and break-even points")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("tree", help="compiled decision tree as JSON")
    _add_common(p)
    p.add_argument("--basis", choices=("X", "Y", "Z", "A", "arbitrary"),
                   default="arbitrary")
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("sweep", help="loss or error grids as CSV")
    _add_common(p)
    p.add_argument("--eta-grid", default=None)
    p.add_argument("--lambda-grid", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fusion", help="logical fusion outcome probabilities")
    _add_common(p)
    p.add_argument("--pfail", type=float, default=0.5)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--eta-grid", default=None)
    p.add_argument("--mode", choices=("adaptive", "transversal"),
                   default="adaptive")
    p.set_defaults(func=cmd_fusion)

    p = sub.add_parser("concat", help="layered-stack logical transmission")
    _add_common(p)
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--mode", choices=("cascaded", "concatenated"),
                   default="concatenated")
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--eta-grid", default=None)
    p.set_defaults(func=cmd_concat)

    p = sub.add_parser("rgs", help="repeater link success probabilities")
    _add_common(p)
    p.add_argument("--pfail", type=float, default=0.5)
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--eta-grid", default=None)
    p.add_argument("--depth", type=int, default=1,
                   help="number of stations in the chain")
    p.add_argument("--mode", choices=("adaptive", "transversal"),
                   default="adaptive")
    p.set_defaults(func=cmd_rgs)

    p = sub.add_parser("fbqc", help="fusion-network loss thresholds")
    _add_common(p)
    p.add_argument("--pfail", default="0.5",
                   help="single value or comma list")
    p.add_argument("--mode", choices=("adaptive", "transversal"),
                   default="adaptive")
    p.set_defaults(func=cmd_fbqc)

    p = sub.add_parser("search", help="rank candidate codes by an objective")
    p.add_argument("kind", choices=("pauli_all_bases", "arbitrary",
                                    "fusion_success", "fbqc_threshold"))
    p.add_argument("--graph", required=True,
                   help="n:<vertices> to generate, or a candidate file")
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--pfail", type=float, default=0.5)
    p.add_argument("--mode", choices=("adaptive", "transversal"),
                   default="adaptive")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default=None)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("mc-check", help="Monte Carlo versus exact polynomial")
    _add_common(p)
    p.add_argument("--basis", choices=("X", "Y", "Z", "A", "arbitrary"),
                   default="arbitrary")
    p.add_argument("--eta", type=float, default=None)
    p.add_argument("--trials", type=int, default=10 ** 6)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_mc_check)

    return top


def resolved_config(args) -> dict:
    skip = {"func"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = resolved_config(args)
    try:
        return args.func(args, config)
    except CliError as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ResourceLimitError as exc:
        print(f"{TOOL}: resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
