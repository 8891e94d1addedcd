"""Command line entry point: ``adaptivecrowd run`` and ``adaptivecrowd sweep``."""
import argparse
import logging
import sys
from pathlib import Path

from .config import RunConfig, load_config, updated
from .exceptions import ConfigurationError, InvariantViolation
from .harness import emit_summary, emit_trace, replicate, sweep

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _grid(kind):
    def parse(text):
        items = []
        for tok in text.split(","):
            tok = tok.strip()
            items.append(None if tok.lower() in ("none", "inf") else kind(tok))
        return items
    return parse


def _add_common(p, grid):
    p.add_argument("--config", type=Path, help="flat key = value config file")
    p.add_argument("--condition", choices=("solo", "static", "dynamic"))
    p.add_argument("--agents", type=int)
    p.add_argument("--rounds", type=int)
    p.add_argument("--kappa", type=int)
    p.add_argument("--lambda", dest="lambda_", type=_grid(int) if grid else int)
    p.add_argument("--rho", type=_grid(float) if grid else float)
    p.add_argument("--eta", type=_grid(float) if grid else float)
    p.add_argument("--seed", type=int)
    p.add_argument("--replications", type=int)
    p.add_argument("--signal-channel", choices=("gaussian", "scatter"))
    p.add_argument("--shock-mode", choices=("none", "deterministic", "bernoulli"))
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = _Parser(prog="adaptivecrowd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    _add_common(sub.add_parser("run", help="run one configuration (all replications)"), grid=False)
    sw = sub.add_parser("sweep", help="sweep lambda x rho x eta grids")
    _add_common(sw, grid=True)
    sw.add_argument("--workers", type=int, default=1)
    return parser


def _config_from(args, grid):
    cfg = load_config(args.config) if args.config else RunConfig()
    flat = {
        "condition": args.condition, "n": args.agents, "rounds": args.rounds,
        "kappa": args.kappa, "seed": args.seed, "replications": args.replications,
        "signal_channel": args.signal_channel, "shock_mode": args.shock_mode,
    }
    if not grid:
        flat.update({"lambda_": args.lambda_, "eta": args.eta})
        if args.rho is not None:
            # an explicit rho replaces the default fixed shock rounds
            flat.update({"rho": args.rho, "shock_rounds": []})
    return updated(cfg, {k: v for k, v in flat.items() if v is not None})


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            cfg = _config_from(args, grid=False)
            out = emit_trace(replicate(cfg), args.out)
            print(f"wrote {out / 'trace.csv'} and {out / 'metrics.csv'}")
        else:
            cfg = _config_from(args, grid=True)
            table = sweep(cfg,
                          args.lambda_ or [cfg.lambda_],
                          args.rho or [cfg.rho],
                          args.eta or [cfg.eta],
                          cfg.replications, workers=args.workers)
            args.out.mkdir(parents=True, exist_ok=True)
            path = emit_summary(table, args.out / "summary.csv")
            print(f"wrote {path}")
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}; snapshot: {exc.snapshot!r}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
