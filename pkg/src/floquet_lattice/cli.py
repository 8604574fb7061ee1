"""``simulate`` command line entry point."""
from __future__ import annotations

import argparse
import json
import sys

from .errors import InvalidInputError
from .harness import KINDS, PRESETS, load_config, preset_config, run


def build_parser():
    parser = argparse.ArgumentParser(
        prog="simulate",
        description="Run one Floquet power-law hopping experiment and write its data files.",
    )
    parser.add_argument("config", nargs="?", help="TOML config file (omit to use --preset)")
    parser.add_argument("--preset", default="armonk-defaults", choices=sorted(PRESETS),
                        help="parameter set filling keys missing from the config")
    parser.add_argument("--kind", choices=KINDS)
    parser.add_argument("--out", dest="out_dir")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--shots", type=int)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            config = load_config(args.config, preset=args.preset)
        else:
            config = preset_config(args.preset)
        overrides = {k: getattr(args, k) for k in ("kind", "out_dir", "seed", "shots")
                     if getattr(args, k) is not None}
        if overrides:
            config = config.replace(**overrides)
    except (OSError, InvalidInputError) as exc:
        print(f"simulate: {exc}", file=sys.stderr)
        return 2
    manifest = run(config)
    print(json.dumps({"status": manifest.status, "out_dir": config.out_dir,
                      "files": sorted(manifest.files), "errors": manifest.errors}, indent=2))
    return 0 if manifest.ok else 1


if __name__ == "__main__":
    sys.exit(main())
