"""Compiled geometry and nearest-neighbour kernels.

Obstacles are packed as ``verts`` (M, 2), ``offs`` (P + 1,) and ``bbox``
(P, 4) holding ``xmin, ymin, xmax, ymax`` per polygon.
"""
import heapq

import numpy as np
from numba import njit

_EPS = 1e-12


@njit(cache=True)
def _orient(ax, ay, bx, by, cx, cy):
    v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    scale = abs(bx - ax) + abs(by - ay) + abs(cx - ax) + abs(cy - ay)
    if abs(v) <= _EPS * scale * scale:
        return 0
    return 1 if v > 0 else -1


@njit(cache=True)
def _in_box(ax, ay, bx, by, px, py):
    return (min(ax, bx) - _EPS <= px <= max(ax, bx) + _EPS
            and min(ay, by) - _EPS <= py <= max(ay, by) + _EPS)


@njit(cache=True)
def segments_intersect(ax, ay, bx, by, cx, cy, dx, dy):
    """Closed segment test; touching and collinear overlap count."""
    d1 = _orient(cx, cy, dx, dy, ax, ay)
    d2 = _orient(cx, cy, dx, dy, bx, by)
    d3 = _orient(ax, ay, bx, by, cx, cy)
    d4 = _orient(ax, ay, bx, by, dx, dy)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True
    if d1 == 0 and _in_box(cx, cy, dx, dy, ax, ay):
        return True
    if d2 == 0 and _in_box(cx, cy, dx, dy, bx, by):
        return True
    if d3 == 0 and _in_box(ax, ay, bx, by, cx, cy):
        return True
    if d4 == 0 and _in_box(ax, ay, bx, by, dx, dy):
        return True
    return False


@njit(cache=True)
def _point_in_poly(px, py, verts, start, stop):
    inside = False
    j = stop - 1
    for i in range(start, stop):
        ax = verts[j, 0]
        ay = verts[j, 1]
        bx = verts[i, 0]
        by = verts[i, 1]
        # boundary counts as inside
        if _orient(ax, ay, bx, by, px, py) == 0 and _in_box(ax, ay, bx, by, px, py):
            return True
        if (ay > py) != (by > py):
            xint = ax + (py - ay) * (bx - ax) / (by - ay)
            if px < xint:
                inside = not inside
        j = i
    return inside


@njit(cache=True)
def point_collides(px, py, verts, offs, bbox):
    for p in range(bbox.shape[0]):
        if px < bbox[p, 0] or px > bbox[p, 2] or py < bbox[p, 1] or py > bbox[p, 3]:
            continue
        if _point_in_poly(px, py, verts, offs[p], offs[p + 1]):
            return True
    return False


@njit(cache=True)
def segment_collides(ax, ay, bx, by, verts, offs, bbox):
    sx0 = min(ax, bx)
    sx1 = max(ax, bx)
    sy0 = min(ay, by)
    sy1 = max(ay, by)
    for p in range(bbox.shape[0]):
        if sx1 < bbox[p, 0] or sx0 > bbox[p, 2] or sy1 < bbox[p, 1] or sy0 > bbox[p, 3]:
            continue
        start = offs[p]
        stop = offs[p + 1]
        if _point_in_poly(ax, ay, verts, start, stop):
            return True
        j = stop - 1
        for i in range(start, stop):
            if segments_intersect(ax, ay, bx, by, verts[j, 0], verts[j, 1],
                                  verts[i, 0], verts[i, 1]):
                return True
            j = i
    return False


@njit(cache=True)
def _in_bounds(q, lo, hi):
    for i in range(q.shape[0]):
        if not (lo[i] <= q[i] <= hi[i]):
            return False
    return True


@njit(cache=True)
def point_valid(q, lo, hi, verts, offs, bbox):
    if not _in_bounds(q, lo, hi):
        return False
    return not point_collides(q[0], q[1], verts, offs, bbox)


@njit(cache=True)
def arm_links(q, links, base):
    n = q.shape[0]
    out = np.empty((n, 2, 2))
    x = base[0]
    y = base[1]
    theta = 0.0
    for i in range(n):
        theta += q[i]
        nx = x + links[i] * np.cos(theta)
        ny = y + links[i] * np.sin(theta)
        out[i, 0, 0] = x
        out[i, 0, 1] = y
        out[i, 1, 0] = nx
        out[i, 1, 1] = ny
        x = nx
        y = ny
    return out


@njit(cache=True)
def arm_valid(q, lo, hi, links, base, verts, offs, bbox):
    if not _in_bounds(q, lo, hi):
        return False
    segs = arm_links(q, links, base)
    n = segs.shape[0]
    for i in range(n):
        if segment_collides(segs[i, 0, 0], segs[i, 0, 1], segs[i, 1, 0], segs[i, 1, 1],
                            verts, offs, bbox):
            return False
    # adjacent links share a joint and are never flagged
    for i in range(n):
        for j in range(i + 2, n):
            if segments_intersect(segs[i, 0, 0], segs[i, 0, 1], segs[i, 1, 0], segs[i, 1, 1],
                                  segs[j, 0, 0], segs[j, 0, 1], segs[j, 1, 0], segs[j, 1, 1]):
                return False
    return True


@njit(cache=True)
def config_valid(q, is_arm, lo, hi, links, base, verts, offs, bbox):
    if is_arm:
        return arm_valid(q, lo, hi, links, base, verts, offs, bbox)
    return point_valid(q, lo, hi, verts, offs, bbox)


@njit(cache=True)
def subdivisions(a, b, res):
    """Power-of-two segment count so halving ``res`` nests the check points."""
    d2 = 0.0
    for i in range(a.shape[0]):
        d2 += (b[i] - a[i]) ** 2
    length = np.sqrt(d2)
    m = 1
    while m * res < length:
        m *= 2
    return m


@njit(cache=True)
def motion_valid(a, b, res, is_arm, lo, hi, links, base, verts, offs, bbox):
    # canonical endpoint order keeps the check symmetric bit for bit
    swap = False
    for i in range(a.shape[0]):
        if a[i] != b[i]:
            swap = a[i] > b[i]
            break
    if swap:
        a, b = b, a
    if not config_valid(a, is_arm, lo, hi, links, base, verts, offs, bbox):
        return False
    if not config_valid(b, is_arm, lo, hi, links, base, verts, offs, bbox):
        return False
    m = subdivisions(a, b, res)
    q = np.empty(a.shape[0])
    for k in range(1, m):
        t = k / m
        for i in range(a.shape[0]):
            q[i] = a[i] * (1.0 - t) + b[i] * t
        if not config_valid(q, is_arm, lo, hi, links, base, verts, offs, bbox):
            return False
    return True


@njit(cache=True)
def batch_valid(qs, is_arm, lo, hi, links, base, verts, offs, bbox):
    out = np.empty(qs.shape[0], dtype=np.bool_)
    for i in range(qs.shape[0]):
        out[i] = config_valid(qs[i], is_arm, lo, hi, links, base, verts, offs, bbox)
    return out


@njit(cache=True)
def near(nodes, n, q, radius):
    r2 = radius * radius
    buf = np.empty(n, dtype=np.int64)
    k = 0
    for i in range(n):
        s = 0.0
        for j in range(q.shape[0]):
            s += (nodes[i, j] - q[j]) ** 2
        if s <= r2:
            buf[k] = i
            k += 1
    return buf[:k]


@njit(cache=True)
def nearest_in_tree(nodes, n, tree, tid, q):
    best = -1
    best_d = np.inf
    for i in range(n):
        if tree[i] != tid:
            continue
        s = 0.0
        for j in range(q.shape[0]):
            s += (nodes[i, j] - q[j]) ** 2
        if s < best_d:
            best_d = s
            best = i
    return best


@njit(cache=True)
def edge_length(nodes, u, v):
    s = 0.0
    for j in range(nodes.shape[1]):
        s += (nodes[u, j] - nodes[v, j]) ** 2
    return np.sqrt(s)


@njit(cache=True)
def near_with_length(nodes, n, i, radius):
    """Nodes within ``radius`` of node ``i`` (excluding it) and their edge lengths."""
    r2 = radius * radius
    idx = np.empty(n, dtype=np.int64)
    k = 0
    for v in range(n):
        if v == i:
            continue
        s = 0.0
        for j in range(nodes.shape[1]):
            s += (nodes[v, j] - nodes[i, j]) ** 2
        if s <= r2:
            idx[k] = v
            k += 1
    lengths = np.empty(k)
    for m in range(k):
        lengths[m] = edge_length(nodes, i, idx[m])
    return idx[:k], lengths


@njit(cache=True)
def relax(s, u, v, w, head, nxt, to, wt, dist, pred):
    """Propagate a distance decrease from root ``s`` through edge (u, v)."""
    nd = dist[s, u] + w
    if not nd < dist[s, v]:
        return 0
    dist[s, v] = nd
    pred[s, v] = u
    heap = [(nd, v)]
    pops = 0
    while len(heap) > 0:
        dx, x = heapq.heappop(heap)
        pops += 1
        if dx > dist[s, x]:
            continue
        e = head[x]
        while e >= 0:
            y = to[e]
            ny = dx + wt[e]
            if ny < dist[s, y]:
                dist[s, y] = ny
                pred[s, y] = x
                heapq.heappush(heap, (ny, y))
            e = nxt[e]
    return pops


@njit(cache=True)
def link(u, v, ne, nodes, head, nxt, to, wt, dist, pred):
    """Insert undirected edge (u, v) as half-edges ne, ne + 1 and update root distances."""
    w = edge_length(nodes, u, v)
    to[ne] = v
    wt[ne] = w
    nxt[ne] = head[u]
    head[u] = ne
    to[ne + 1] = u
    wt[ne + 1] = w
    nxt[ne + 1] = head[v]
    head[v] = ne + 1
    for s in range(dist.shape[0]):
        relax(s, u, v, w, head, nxt, to, wt, dist, pred)
        relax(s, v, u, w, head, nxt, to, wt, dist, pred)
    return w


@njit(cache=True)
def improving(node, cand, lengths, dist, tol):
    """Mask of candidates whose edge to ``node`` would shorten a root distance."""
    out = np.zeros(cand.shape[0], dtype=np.bool_)
    for k in range(cand.shape[0]):
        v = cand[k]
        w = lengths[k]
        for s in range(dist.shape[0]):
            if dist[s, node] + w < dist[s, v] - tol or dist[s, v] + w < dist[s, node] - tol:
                out[k] = True
                break
    return out


@njit(cache=True)
def near_in_tree(nodes, n, tree, tid, q, radius):
    """Nodes created in tree ``tid`` within ``radius`` of ``q`` and their distances."""
    r2 = radius * radius
    idx = np.empty(n, dtype=np.int64)
    k = 0
    for v in range(n):
        if tree[v] != tid:
            continue
        s = 0.0
        for j in range(q.shape[0]):
            s += (nodes[v, j] - q[j]) ** 2
        if s <= r2:
            idx[k] = v
            k += 1
    lengths = np.empty(k)
    for m in range(k):
        s = 0.0
        for j in range(q.shape[0]):
            s += (nodes[idx[m], j] - q[j]) ** 2
        lengths[m] = np.sqrt(s)
    return idx[:k], lengths
