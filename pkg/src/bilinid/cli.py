"""Command line entry point: ``bilinid <mode> [options]``.

Exit status is 0 on success, 2 on an invalid configuration and 3 when
``--assert`` is given and an acceptance band fails.
"""
import argparse
import json
import logging
import sys
from pathlib import Path

from .errors import ConfigError
from .harness import MODES, ENSEMBLES, ExperimentConfig, check_bands, csv_text, run_experiment, write_results

EXIT_CONFIG = 2
EXIT_BAND = 3


def build_parser():
    parser = argparse.ArgumentParser(prog="bilinid", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--config", type=Path, help="JSON experiment config")
        p.add_argument("--out", type=Path, help="directory for <mode>.csv and <mode>.json")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--assert", dest="check", action="store_true", help="fail with status 3 outside acceptance bands")
        p.add_argument("--ensemble", choices=ENSEMBLES)
        for name in ("n1", "n2", "s1", "s2", "m-min", "m-max", "restarts", "max-iters", "samples"):
            p.add_argument(f"--{name}", type=int)
        p.add_argument("--record-timing", action="store_true", default=None)
    return parser


def config_from_args(args):
    d = {}
    if args.config is not None:
        try:
            d = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError({"config": f"cannot read {args.config}: {exc}"}) from exc
    d["mode"] = args.mode
    for key in ("seed", "trials", "ensemble", "n1", "n2", "s1", "s2", "m_min", "m_max", "restarts",
                "max_iters", "samples", "record_timing"):
        value = getattr(args, key)
        if value is not None:
            d[key] = value
    return ExperimentConfig.from_dict(d)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rec = run_experiment(cfg, threads=max(1, args.threads))
    if args.out is not None:
        write_results(rec, args.out / f"{cfg.mode}.csv")
    sys.stdout.write(csv_text(rec))
    if rec.threshold_marker is not None:
        print(f"# threshold_marker={rec.threshold_marker}")
    if args.check:
        bad = check_bands(rec)
        for line in bad:
            print(f"FAIL {line}", file=sys.stderr)
        if bad:
            return EXIT_BAND
    return 0


if __name__ == "__main__":
    sys.exit(main())
