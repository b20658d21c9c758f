"""Run shipped scenarios and print a combined results table.

    python scripts/run_table.py --scenarios room,clutter --repeats 5 --out results

Writes per-scenario CSV and markdown (same layout as ``bayesrrdt run``) plus
``summary.md`` with the final-checkpoint columns of every scenario.
"""
import argparse
import logging
from pathlib import Path

from bayesrrdt import bench


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--scenarios", default="room,maze,clutter,arm_passage")
    ap.add_argument("--planners", default=None, help="comma-separated subset")
    ap.add_argument("--repeats", type=int, default=None)
    ap.add_argument("--node-budget", type=int, default=None)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")

    shipped = bench.shipped_scenarios()
    planners = args.planners.split(",") if args.planners else None
    args.out.mkdir(parents=True, exist_ok=True)
    summary = []
    for name in args.scenarios.split(","):
        s = bench.load_scenario(shipped[name])
        res = bench.run_experiment(s, args.seed, planners, args.repeats, args.node_budget)
        (args.out / f"{name}.csv").write_text(bench.export(res.rows, "csv"))
        table = bench.export(res.rows, "markdown")
        (args.out / f"{name}.md").write_text(table)
        slowest = max(res.records, key=lambda r: r.elapsed)
        summary.append(f"## {name}\n\n{table}\nslowest run: {slowest.name} ({slowest.elapsed:.1f}s)\n")
        print(summary[-1])
    (args.out / "summary.md").write_text("\n".join(summary))


if __name__ == "__main__":
    main()
