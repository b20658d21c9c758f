"""Regenerate the bundled scenario files under src/bayesrrdt/scenarios/.

The clutter layout comes from a seeded generator; the output is frozen to
JSON, so rerunning this script reproduces the shipped files byte for byte.
"""
import argparse
import json
import math
from pathlib import Path

import numpy as np
import shapely

OUT = Path(__file__).resolve().parents[1] / "src" / "bayesrrdt" / "scenarios"
CLUTTER_SEED = 2024


def rect(x0, y0, x1, y1):
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]


def planners(gamma, kappa=2.0, **rrdt):
    base = {"epsilon_gamma": gamma, "kappa": kappa, **rrdt}
    return [
        {"name": "rrt_star", "kind": "rrt_star", "params": {"gamma": gamma}},
        {"name": "birrt_star", "kind": "birrt_star", "params": {"gamma": gamma}},
        {"name": "informed_rrt_star", "kind": "informed_rrt_star", "params": {"gamma": gamma}},
        {"name": "rrdt_stationary", "kind": "rrdt", "params": {**base, "bayesian": False}},
        {"name": "rrdt_bayes", "kind": "rrdt", "params": {**base, "bayesian": True}},
    ]


def point_world(obstacles, resolution):
    return {"bounds": [[0, 100], [0, 100]], "robot": {"type": "point"},
            "motion_check_resolution": resolution, "obstacles": obstacles}


def room():
    obs = [
        rect(20, 15, 35, 30), rect(55, 10, 70, 22), rect(15, 55, 28, 75),
        rect(42, 40, 58, 56), rect(70, 45, 85, 60), rect(35, 75, 60, 85),
        rect(75, 78, 88, 90),
    ]
    return {"name": "room", "description": "Open room with scattered furniture blocks.",
            "world": point_world(obs, 0.25), "q_init": [5, 5], "q_goal": [95, 95],
            "node_budget": 10000, "repeats": 20, "planners": planners(150.0)}


def maze():
    obs = []
    gap = 3.0
    # horizontal walls with narrow gaps on alternating sides
    for y, gx in [(20, 88), (40, 9), (60, 88), (80, 9)]:
        obs.append(rect(0, y, gx, y + 2))
        obs.append(rect(gx + gap, y, 100, y + 2))
    # dead-end stubs inside each corridor
    obs += [rect(30, 0, 32, 14), rect(60, 6, 62, 20), rect(45, 22, 47, 34), rect(70, 28, 72, 40),
            rect(25, 42, 27, 54), rect(55, 48, 57, 60), rect(35, 62, 37, 74), rect(75, 68, 77, 80),
            rect(50, 82, 52, 94)]
    return {"name": "maze", "description": "Serpentine corridors joined by 3-unit gaps.",
            "world": point_world(obs, 0.25), "q_init": [5, 5], "q_goal": [95, 95],
            "node_budget": 50000, "repeats": 20, "planners": planners(40.0)}


def clutter(count=160, seed=CLUTTER_SEED):
    rng = np.random.default_rng(seed)
    keep_clear = [shapely.Point(5, 5).buffer(4), shapely.Point(95, 95).buffer(4)]
    obs = []
    while len(obs) < count:
        w, h = rng.uniform(2, 7, 2)
        x, y = rng.uniform(0, 100 - w), rng.uniform(0, 100 - h)
        poly = rect(*(round(v, 3) for v in (x, y, x + w, y + h)))
        if any(shapely.Polygon(poly).intersects(c) for c in keep_clear):
            continue
        obs.append(poly)
    return {"name": "clutter", "description": f"{count} random boxes (generator seed {seed}).",
            "world": point_world(obs, 0.25), "q_init": [5, 5], "q_goal": [95, 95],
            "node_budget": 10000, "repeats": 20, "planners": planners(40.0)}


def arm_passage():
    # two blocks leave a slot at y in (-0.3, 0.3); the goal pose reaches through it
    obs = [rect(1.5, 0.3, 2.5, 2.0), rect(1.5, -2.0, 2.5, -0.3)]
    world = {"robot": {"type": "planar_arm", "link_lengths": [1.0, 1.0, 1.0], "base": [0.0, 0.0],
                       "joint_limits": [[-math.pi, math.pi]] * 3},
             "motion_check_resolution": 0.02, "obstacles": obs}
    return {"name": "arm_passage", "description": "3-link arm threading a narrow slot.",
            "world": world, "q_init": [math.pi / 2, 0.0, 0.0], "q_goal": [0.0, 0.0, 0.0],
            "node_budget": 5000, "repeats": 20, "planners": planners(6.0, bins_per_axis=36)}


BUILDERS = {"room": room, "maze": maze, "clutter": clutter, "arm_passage": arm_passage}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=OUT)
    ap.add_argument("names", nargs="*", default=list(BUILDERS))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name in args.names:
        path = args.out / f"{name}.json"
        path.write_text(json.dumps(BUILDERS[name](), indent=1) + "\n")
        print(path)


if __name__ == "__main__":
    main()
