"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 1 anything else.  Set
ADAPTNET_LOG=info (or debug) for progress detail on stderr.
"""

import argparse
import logging
import os
import sys

from .config import ConfigError, load_config
from .harness import COMMANDS, run_scenario

log = logging.getLogger("adaptnet")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adaptnet",
        description="Deterministic multi-UAV sensing/communication experiments.",
    )
    parser.add_argument("command", choices=COMMANDS, help="experiment to run")
    parser.add_argument("--config", required=True, help="JSON scenario file")
    parser.add_argument("--out", required=True, help="output directory for artifacts")
    parser.add_argument(
        "--seed", type=int, default=None, help="overrides the config seed"
    )
    parser.add_argument(
        "--input",
        default=None,
        help="trajectory CSV for the cluster/frechet commands "
        "(overrides input_csv in the config)",
    )
    return parser


def main(argv=None) -> int:
    level_name = os.environ.get("ADAPTNET_LOG", "warning").upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("seed: must be >= 0, got %d" % args.seed)
            cfg.seed = args.seed
        artifacts = run_scenario(cfg, args.command, args.out, input_path=args.input)
    except ConfigError as exc:
        print("configuration error: %s" % exc, file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print(
            "interrupted; partial artifacts end in truncation markers",
            file=sys.stderr,
        )
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        log.debug("unhandled failure", exc_info=True)
        print("error: %s" % exc, file=sys.stderr)
        return 1
    for name in sorted(artifacts):
        log.info("%s -> %s", name, artifacts[name])
    print("wrote %d artifacts to %s" % (len(artifacts), os.path.abspath(args.out)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
