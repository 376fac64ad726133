"""Command-line entry point: ``dacnet run | verify | gen-graph``.

Exit codes: 0 ok, 1 usage or configuration error, 2 verification failure,
3 numerical divergence.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .baselines import DivergenceError
from .experiment import ConfigError, config_field_names, load_config, run_experiment
from .formats import write_coords, write_edge_list
from .graph import GraphError, random_geometric_graph

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_DIVERGED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parser():
    p = _Parser(prog="dacnet", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run an experiment from a key=value config file")
    run.add_argument("--config", help="config file; every key can be overridden with --key")
    for name in config_field_names():
        run.add_argument(f"--{name}", dest=f"cfg_{name}", metavar="VALUE")

    ver = sub.add_parser("verify", help="run the property suite")
    ver.add_argument("--quick", action="store_true")
    ver.add_argument("--seed", type=int, default=1)
    ver.add_argument("--corrupt-partition", action="store_true", help=argparse.SUPPRESS)

    gen = sub.add_parser("gen-graph", help="write a random geometric graph as an edge list")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)
    gen.add_argument("--coords", help="also write the coordinate sidecar here")
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            overrides = {k[4:]: v for k, v in vars(args).items()
                         if k.startswith("cfg_") and v is not None}
            cfg = load_config(args.config, overrides)
            result = run_experiment(cfg)
            for path in result.files:
                print(path)
            return EXIT_OK
        if args.command == "verify":
            from .verify import format_report, run_suite
            results = run_suite(args.seed, args.quick, args.corrupt_partition)
            print(format_report(results))
            return EXIT_OK if all(ok for _, ok, _, _ in results) else EXIT_VERIFY
        if args.command == "gen-graph":
            gg = random_geometric_graph(args.n, args.seed)
            write_edge_list(gg.graph, args.out)
            if args.coords:
                write_coords(gg.coords, args.coords)
            print(f"{args.out}: n={gg.graph.n} m={gg.graph.n_edges} redraws={gg.redraws}")
            return EXIT_OK
    except (ConfigError, GraphError, FileNotFoundError) as exc:
        print(f"dacnet: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as exc:
        print(f"dacnet: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
