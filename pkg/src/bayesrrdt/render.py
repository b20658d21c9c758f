"""SVG output for planning graphs, solution paths and directional distributions."""
from __future__ import annotations

import colorsys
import xml.etree.ElementTree as ET

import numpy as np

from .cspace import PlanarArm, World, forward_kinematics

PATH_COLOUR = "#d62728"
EDGE_GREY = "#9a9a9a"


def tree_colours(tree_ids) -> dict:
    """Distinct stroke colour per tree id (golden-ratio hue walk)."""
    out, used = {}, set()
    for i, t in enumerate(sorted(set(tree_ids))):
        hue = (i * 0.6180339887498949) % 1.0
        light = 0.35 + 0.2 * ((i // 7) % 2)
        r, g, b = colorsys.hls_to_rgb(hue, light, 0.75)
        code = (round(r * 255) << 16) | (round(g * 255) << 8) | round(b * 255)
        # rounding can repeat a colour for large tree counts; step to the next free one
        while code in used:
            code = (code + 1) % 0x1000000
        used.add(code)
        out[t] = f"#{code:06x}"
    return out


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _points(xy) -> str:
    return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in xy)


def _svg(extent, pixels: int = 800) -> tuple[ET.Element, ET.Element]:
    x0, y0, x1, y1 = (float(v) for v in extent)
    w, h = x1 - x0, y1 - y0
    root = ET.Element("svg", xmlns="http://www.w3.org/2000/svg",
                      viewBox=f"{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}",
                      width=str(pixels), height=str(max(1, round(pixels * h / w))))
    ET.SubElement(root, "rect", x=_fmt(x0), y=_fmt(y0), width=_fmt(w), height=_fmt(h),
                  fill="white", stroke="black", **{"stroke-width": _fmt(0.002 * max(w, h))})
    # flip y so the plot reads with +y up
    body = ET.SubElement(root, "g", transform=f"matrix(1 0 0 -1 0 {_fmt(y0 + y1)})")
    return root, body


def render_record(world: World, record: dict, show_trees: bool = True, show_path: bool = True,
                  colour_by_tree: bool = False) -> str:
    """SVG of a run record: obstacles, graph (optionally per-tree colours), solution path.

    Point worlds are drawn in C-space.  Arm worlds are drawn in the workspace:
    graph nodes and edges by end-effector position, and the solution as the
    end-effector trace plus the link poses along it.
    """
    arm = isinstance(world.robot, PlanarArm)
    extent = world.workspace_extent() if arm else world.bounds.T.ravel()
    root, body = _svg(extent)
    scale = float(max(extent[2] - extent[0], extent[3] - extent[1]))
    stroke = _fmt(0.002 * scale)

    obstacles = ET.SubElement(body, "g", attrib={"class": "obstacles"})
    for poly in world.obstacles:
        ET.SubElement(obstacles, "polygon", points=_points(poly), fill="#444444",
                      attrib={"class": "obstacle"})

    def project(q):
        q = np.asarray(q, dtype=float)
        return forward_kinematics(world, q)[-1, 1] if arm else q[:2]

    if show_trees and record.get("nodes"):
        xy = np.array([project(q) for q in record["nodes"]])
        tree_ids = record.get("tree_ids") or [0] * len(xy)
        colours = tree_colours(tree_ids) if colour_by_tree else {}
        edges = ET.SubElement(body, "g", attrib={"class": "edges"},
                              **{"stroke-width": stroke})
        for u, v, _ in record.get("edges", []):
            colour = colours.get(tree_ids[u], EDGE_GREY)
            ET.SubElement(edges, "line", x1=_fmt(xy[u, 0]), y1=_fmt(xy[u, 1]), x2=_fmt(xy[v, 0]),
                          y2=_fmt(xy[v, 1]), stroke=colour)
        nodes = ET.SubElement(body, "g", attrib={"class": "nodes"})
        r = _fmt(0.003 * scale)
        for i, (x, y) in enumerate(xy):
            ET.SubElement(nodes, "circle", cx=_fmt(x), cy=_fmt(y), r=r,
                          fill=colours.get(tree_ids[i], "#1f77b4"))

    path = record.get("path")
    if show_path and path:
        if arm:
            poses = ET.SubElement(body, "g", attrib={"class": "poses"}, fill="none",
                                  stroke="#2ca02c", **{"stroke-width": stroke})
            for q in path:
                segs = forward_kinematics(world, q)
                chain = [segs[0, 0]] + [s[1] for s in segs]
                ET.SubElement(poses, "polyline", points=_points(chain),
                              attrib={"class": "pose"})
        ET.SubElement(body, "polyline", points=_points([project(q) for q in path]), fill="none",
                      stroke=PATH_COLOUR, attrib={"class": "path"},
                      **{"stroke-width": _fmt(0.006 * scale)})
    return _tostring(root)


def render_polar(curves: dict, title: str = "", pixels: int = 400) -> str:
    """Polar plot of 2D directional masses, one closed curve per entry of ``curves``.

    ``curves`` maps a label to ``(angles, mass, colour)``; radii are scaled so
    the largest mass across curves touches the unit circle.
    """
    root, body = _svg((-1.2, -1.2, 1.2, 1.2), pixels)
    top = max(float(np.max(m)) for _, m, _ in curves.values()) or 1.0
    ET.SubElement(body, "circle", cx="0", cy="0", r="1", fill="none", stroke="#cccccc",
                  **{"stroke-width": "0.005"})
    for label, (angles, mass, colour) in curves.items():
        r = np.asarray(mass) / top
        xy = np.stack([r * np.cos(angles), r * np.sin(angles)], axis=1)
        ET.SubElement(body, "polygon", points=_points(xy), fill="none", stroke=colour,
                      attrib={"class": "mass", "data-label": label},
                      **{"stroke-width": "0.01"})
    if title:
        ET.SubElement(root, "title").text = title
    return _tostring(root)


def _tostring(root: ET.Element) -> str:
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"
