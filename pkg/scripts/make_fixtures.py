#!/usr/bin/env python3
"""Regenerate the bundled synthetic city dataset under data/fixtures.

The output is deterministic for a given seed, so a regeneration with the
default seed reproduces the committed files byte for byte.
"""

import argparse
import json
from pathlib import Path

from bikerisk.synth import DEFAULT_SEED, generate_fixtures


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=Path(__file__).resolve().parent.parent / "data" / "fixtures",
                        type=Path, help="target directory")
    parser.add_argument("--seed", default=DEFAULT_SEED, type=int)
    args = parser.parse_args()
    manifest = generate_fixtures(args.out, seed=args.seed)
    print(json.dumps(manifest, indent=2))


if __name__ == "__main__":
    main()
