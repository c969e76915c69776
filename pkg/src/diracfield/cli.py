"""Command-line front end for the sector-spectrum and dynamics engine.

Thin layer over the harness run modes: it assembles a RunConfig from an
optional flat key=value file plus per-flag overrides, runs the requested
mode, and writes the table to stdout or --out.  `serve` starts the HTTP
service exposing the same modes.
"""

import argparse
import sys

from .harness import FORMATS, RunConfig, load_config, render_table, run_mode

# flag dest -> RunConfig field; only flags the user passed become overrides
_CONFIG_DESTS = (
    "dimension", "m", "A", "B", "alpha", "gamma", "scale", "n", "j",
    "theta", "t_min", "t_max", "t_steps", "gamma_min", "gamma_max",
    "gamma_steps", "n_range", "n_max_truncation", "output_path",
    "format", "seed", "workers",
)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH",
                        help="flat key=value run configuration file")
    parser.add_argument("--seed", type=int, dest="seed", metavar="N",
                        help="seed for randomized cross-checks")
    parser.add_argument("--out", dest="output_path", metavar="PATH",
                        help="write the table here instead of stdout")
    parser.add_argument("--format", choices=FORMATS, dest="format",
                        help="output format (default csv)")
    model = parser.add_argument_group("model overrides")
    model.add_argument("--m", type=float, dest="m", help="rest mass")
    model.add_argument("--alpha", type=float, dest="alpha",
                       help="ladder field coupling")
    model.add_argument("--gamma", type=float, dest="gamma",
                       help="static field coupling")
    model.add_argument("--A", type=float, dest="A",
                       help="field coupling weight A")
    model.add_argument("--B", type=float, dest="B",
                       help="field coupling weight B")
    model.add_argument("--theta", type=float, dest="theta",
                       help="initial doublet mixing angle")
    model.add_argument("--n", type=int, dest="n",
                       help="sector index / initial oscillator level")
    model.add_argument("--dimension", type=int, choices=(1, 2, 3),
                       dest="dimension", help="spatial dimension")
    model.add_argument("--convention", type=float, dest="scale",
                       metavar="SCALE", help="ladder normalization scale")


def _add_grid(parser: argparse.ArgumentParser) -> None:
    grid = parser.add_argument_group("grid overrides")
    grid.add_argument("--t-min", type=float, dest="t_min")
    grid.add_argument("--t-max", type=float, dest="t_max")
    grid.add_argument("--t-steps", type=int, dest="t_steps")
    grid.add_argument("--gamma-min", type=float, dest="gamma_min")
    grid.add_argument("--gamma-max", type=float, dest="gamma_max")
    grid.add_argument("--gamma-steps", type=int, dest="gamma_steps")
    grid.add_argument("--workers", type=int, dest="workers",
                      help="trajectory worker threads (results keep grid order)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diracfield",
        description="Spectra and entanglement dynamics of a confined "
                    "fermion coupled to a two-component field.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_spec = sub.add_parser("spectrum",
                            help="closed-form vs numeric sector spectra")
    _add_common(p_spec)
    p_spec.add_argument("--n-range", dest="n_range", metavar="A:B",
                        help="sectors to tabulate: a:b inclusive, a single "
                             "value, or a comma list")
    p_spec.add_argument("--j", dest="j", metavar="J",
                        help="total angular momentum for dimension 3, "
                             "e.g. 1/2 or 3/2")

    p_ev = sub.add_parser("evolve", help="purity and entropy along a time grid")
    _add_common(p_ev)
    _add_grid(p_ev)

    p_sw = sub.add_parser("sweep",
                          help="entanglement grid over (gamma, t)")
    _add_common(p_sw)
    _add_grid(p_sw)

    p_vf = sub.add_parser("verify",
                          help="cross-check closed forms, blocks and dynamics")
    _add_common(p_vf)
    p_vf.add_argument("--n-max-truncation", type=int, dest="n_max_truncation",
                      help="Fock cap for the block-vs-full check")

    p_srv = sub.add_parser("serve", help="start the HTTP service")
    p_srv.add_argument("--host", default="127.0.0.1")
    p_srv.add_argument("--port", type=int, default=8000)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {}
    for dest in _CONFIG_DESTS:
        value = getattr(args, dest, None)
        if value is not None:
            overrides[dest] = value
    overrides["mode"] = args.command
    if args.config:
        return load_config(args.config, overrides)
    config = RunConfig(**overrides)
    config.validate()
    return config


def _write_output(config: RunConfig, text: str) -> None:
    if config.output_path:
        with open(config.output_path, "w", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "serve":
        import uvicorn

        from .service import create_app
        uvicorn.run(create_app(), host=args.host, port=args.port)
        return 0
    try:
        config = config_from_args(args)
        table = run_mode(config)
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _write_output(config, render_table(table, config.format))
    if config.mode == "verify" and not table["metadata"]["ok"]:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
