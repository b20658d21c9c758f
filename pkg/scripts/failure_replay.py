"""Static vs sequentially updated proposal under repeated failures in one direction.

Prints the failed bin's mass relative to its prior share after each failure,
next to 0.1**j / prod(normalisers), and writes a polar SVG strip of snapshots.
"""
import argparse
import math
from pathlib import Path

import numpy as np

from bayesrrdt.cli import failure_replay
from bayesrrdt.render import render_polar


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=15)
    ap.add_argument("--beta", type=float, default=0.9)
    ap.add_argument("--lam", type=float, default=math.pi / 4)
    ap.add_argument("--kappa", type=float, default=1.0)
    ap.add_argument("--angle", type=float, default=math.pi / 2)
    ap.add_argument("--every", type=int, default=5)
    ap.add_argument("--out", type=Path, default=Path("replay"))
    args = ap.parse_args()

    static, bayes, angles = failure_replay([args.angle] * args.count, args.beta, args.lam,
                                           args.kappa, args.angle)
    b = int(np.argmin(np.abs(angles - args.angle)))
    print("step  share_of_prior   (1-beta)^j   static_share")
    for j in range(args.count + 1):
        print(f"{j:4d}  {bayes[j][b] / bayes[0][b]:.6e}   {(1 - args.beta) ** j:.3e}   "
              f"{static[j][b] / static[0][b]:.1f}")

    args.out.mkdir(parents=True, exist_ok=True)
    for j in [1, *range(args.every, args.count + 1, args.every)]:
        svg = render_polar({"static": (angles, static[j], "#1f77b4"),
                            "bayes": (angles, bayes[j], "#d62728")}, title=f"after {j} failures")
        (args.out / f"polar_step_{j:03d}.svg").write_text(svg)
    print(f"snapshots in {args.out}")


if __name__ == "__main__":
    main()
