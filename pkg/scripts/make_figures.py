#!/usr/bin/env python3
"""Emit the posterior correspondence curves (table + SVG charts).

Produces one table/chart pair relating input posteriors to their 4th-order
values and one for the 6th order, mirroring how the transform is usually
visualized: monotone through (0,0), (0.5,0.5), (1,1), steepest near 0.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from minkdecode import cli  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default="figures")
    parser.add_argument("--grid-points", type=int, default=201)
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for order in (4, 6):
        code = cli.main([
            "curves",
            "--order", "2", "--order", str(order),
            "--grid-points", str(args.grid_points),
            "--out", str(out / f"correspondence_order{order}.txt"),
            "--svg", str(out / f"correspondence_order{order}.svg"),
        ])
        if code != 0:
            return code
        print(f"wrote {out / f'correspondence_order{order}.txt'} (+ .svg)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
