import argparse
import logging
import sys

import commands
from app import configure_logging, load_config
from errors import PartitionLabError

VARIANTS = ("none", "one", "two")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="partition-lab",
        description="Fractal expansion of the partition function p(n): evaluation, traces, "
                    "symbolic recurrences and their verification")
    parser.add_argument("--format", choices=("text", "machine"), default=None,
                        help="output mode (default: PARTITION_LAB_OUTPUT or text)")
    parser.add_argument("--catalog", default=None, help="catalog file of line-delimited records")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="p(n) by fractal evaluation and both oracles")
    p.add_argument("n", type=int)
    p.set_defaults(handler=commands.cmd_eval)

    p = sub.add_parser("trace", help="render the zoom steps of p(n)")
    p.add_argument("n", type=int)
    p.add_argument("--tail", choices=VARIANTS, default="none", help="top parcels replaced by closed terms")
    p.set_defaults(handler=commands.cmd_trace)

    p = sub.add_parser("derive", help="derive a recurrence from two symbolic expansions")
    p.add_argument("--cap", type=int, required=True)
    p.add_argument("--pn", choices=VARIANTS, default="one")
    p.add_argument("--pn1", choices=VARIANTS, default="one")
    p.add_argument("--out", default=None, help="also write the record to this file")
    p.set_defaults(handler=commands.cmd_derive)

    p = sub.add_parser("verify", help="check a recurrence against the oracle")
    p.add_argument("--file", default=None, help="records written by derive --out or mine")
    p.add_argument("--coefficients", default=None, help="inline list such as 1:1,2:1,5:-1,7:-1,12:1")
    p.add_argument("--from", dest="start", type=int, default=None)
    p.add_argument("--to", type=int, default=None)
    p.set_defaults(handler=commands.cmd_verify)

    p = sub.add_parser("mine", help="derive, verify and deduplicate recurrences over many caps")
    p.add_argument("--caps", default="12-24", help="range 12-24 or list 12,16,24")
    p.add_argument("--to", type=int, default=None, help="largest n scanned for empirical ranges")
    p.add_argument("--db", nargs="?", const="default", default=None,
                   help="also store the catalog in a database (DATABASE_URL if no URL is given)")
    p.set_defaults(handler=commands.cmd_mine)

    p = sub.add_parser("bench", help="time the three ways of computing p(n)")
    p.add_argument("sizes", nargs="?", default="", help="comma-separated n values")
    p.add_argument("--no-fractal", action="store_true")
    p.set_defaults(handler=commands.cmd_bench)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--mutant", action="store_true", help="run the suite against a corrupted generator rule")
    p.set_defaults(handler=commands.cmd_selftest)

    p = sub.add_parser("export", help="export the catalog as markdown, html or jsonl")
    p.add_argument("--to", dest="to_format", choices=("markdown", "html", "jsonl"), default="markdown")
    p.add_argument("--out", default=None)
    p.add_argument("--db", nargs="?", const="default", default=None, help="read from the database instead")
    p.set_defaults(handler=commands.cmd_export)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(output_mode=args.format, catalog_path=args.catalog)
        configure_logging(cfg.log_level, args.verbose)
        return args.handler(args, cfg)
    except PartitionLabError as e:
        logging.error(f"{args.command} failed: {str(e)}")
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
