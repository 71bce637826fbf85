"""Command-line entry point: ``projsplit <scenario> [options]``."""

import argparse
import sys

from .experiments import EXIT_CONFIG, SCENARIOS, ConfigError, preset_config, run_experiment


def parse_sv(text):
    """Parse ``--sv``: a preset name or ``k=v`` pairs with 1-based k.

    Returns ``(preset, values)`` with exactly one of the two set.
    """
    text = text.strip()
    if text in ("geometric", "staircase"):
        return text, None
    pairs = {}
    for item in text.split(","):
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"bad --sv entry {item!r}; expected k=v")
        try:
            k, v = int(key), float(val)
        except ValueError as exc:
            raise ConfigError(f"bad --sv entry {item!r}") from exc
        if k in pairs:
            raise ConfigError(f"duplicate --sv index {k}")
        pairs[k] = v
    if sorted(pairs) != list(range(1, len(pairs) + 1)):
        raise ConfigError("--sv indices must be 1..r without gaps")
    return None, tuple(pairs[k] for k in range(1, len(pairs) + 1))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="projsplit", description="Projected fixed-point iteration experiments.")
    p.add_argument("scenario", choices=SCENARIOS)
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--delta", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--noise-divisor", type=float)
    p.add_argument("--noise-convention", choices=("std", "variance"))
    p.add_argument("--sv", help="preset name (geometric, staircase) or k=v,... singular values")
    p.add_argument("--phi-r", type=float, help="counter-example: right angle of Y0 in degrees")
    p.add_argument("--phi-l", type=float, help="counter-example: left angle of Y0 in degrees")
    p.add_argument("--sigma0", type=float, help="counter-example: singular value of Y0")
    p.add_argument("--csv", metavar="PATH")
    p.add_argument("--svg", metavar="PATH")
    p.add_argument("--cert", metavar="PATH")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        sv_preset, sv_spec = parse_sv(args.sv) if args.sv else (None, None)
        cfg = preset_config(
            args.scenario,
            n=args.n, m=args.m, r=args.r, delta=args.delta, eta=args.eta, seed=args.seed,
            max_iters=args.max_iters, tol=args.tol, noise_divisor=args.noise_divisor,
            noise_convention=args.noise_convention, sv_preset=sv_preset, sv_spec=sv_spec,
            phi_r=args.phi_r, phi_l=args.phi_l, sigma0=args.sigma0,
            csv=args.csv, svg=args.svg, cert=args.cert,
        )
    except (ConfigError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run_experiment(cfg)


if __name__ == "__main__":
    sys.exit(main())
