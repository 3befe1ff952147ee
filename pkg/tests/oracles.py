"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import math

import numpy as np


def brute_force_hull(points, tol=1e-9):
    """Hull vertices by the O(n^3) rule: a point is extreme iff it is not in any triangle
    or segment of other points. Returns the set of extreme points (unordered)."""
    pts = np.unique(np.round(np.asarray(points, float), 12), axis=0)
    n = len(pts)
    if n <= 2:
        return pts
    extreme = []
    for k in range(n):
        p = pts[k]
        others = np.delete(pts, k, axis=0)
        inside = False
        for i, j, l in itertools.combinations(range(len(others)), 3):
            if _in_triangle(p, others[i], others[j], others[l], tol):
                inside = True
                break
        if not inside:
            for i, j in itertools.combinations(range(len(others)), 2):
                if _on_segment(p, others[i], others[j], tol):
                    inside = True
                    break
        if not inside:
            extreme.append(p)
    return np.array(extreme)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _in_triangle(p, a, b, c, tol):
    d1, d2, d3 = _cross(a, b, p), _cross(b, c, p), _cross(c, a, p)
    if abs(_cross(a, b, c)) <= tol:
        return False
    neg = d1 < -tol or d2 < -tol or d3 < -tol
    pos = d1 > tol or d2 > tol or d3 > tol
    return not (neg and pos)


def _on_segment(p, a, b, tol):
    if abs(_cross(a, b, p)) > tol:
        return False
    return min(a[0], b[0]) - tol <= p[0] <= max(a[0], b[0]) + tol and \
        min(a[1], b[1]) - tol <= p[1] <= max(a[1], b[1]) + tol


def vertex_feasibility(A, b, keep_idx, points, box=1e5, tol=1e-9):
    """For each point (values of the kept variables) decide whether some assignment
    of the other variables satisfies ``A x <= b``.

    Exhaustive vertex search: the free variables are boxed to ``[-box, box]``,
    so a non-empty slice has a vertex, and every vertex solves a square
    subsystem of active rows.  All subsystems are solved in one batch.
    """
    A = np.asarray(A, float)
    b = np.asarray(b, float)
    points = np.asarray(points, float).reshape(len(points), len(keep_idx))
    free = [j for j in range(A.shape[1]) if j not in keep_idx]
    m = len(free)
    if m == 0:
        return np.all(points @ A[:, keep_idx].T <= b + tol, axis=1)
    Af = np.vstack([A[:, free], np.eye(m), -np.eye(m)])
    Ak = np.vstack([A[:, keep_idx], np.zeros((2 * m, len(keep_idx)))])
    rhs = np.concatenate([b, np.full(2 * m, box)])[None, :] - points @ Ak.T  # (P, rows)
    combos = np.array(list(itertools.combinations(range(len(Af)), m)))
    subs = Af[combos]  # (C, m, m)
    combos = combos[np.abs(np.linalg.det(subs)) > 1e-9]
    inv = np.linalg.inv(Af[combos])  # (C, m, m)
    slack = tol * np.maximum(1.0, np.abs(rhs))
    feasible = np.zeros(len(points), bool)
    for chunk in np.array_split(np.arange(len(combos)), max(1, len(combos) // 64)):
        y = np.einsum("cij,pcj->pci", inv[chunk], rhs[:, combos[chunk]])  # (P, c, m)
        lhs = y @ Af.T  # (P, c, rows)
        feasible |= np.all(lhs <= (rhs + slack)[:, None, :], axis=2).any(axis=1)
    return feasible


def gaussian_entropy_bits(cov):
    """Differential entropy minus the constant term, via plain numpy det."""
    return 0.5 * math.log2(np.linalg.det(cov))


def handcoded_cmi(G: dict, A, B, C=()):
    """I(A;B|C) from explicit covariance determinants; assumes full-rank subsets."""
    def det(names):
        if not names:
            return 1.0
        rows = np.array([G[n] for n in names])
        return float(np.linalg.det(rows @ rows.T))
    A, B, C = list(A), list(B), list(C)
    return 0.5 * math.log2(det(A + C) * det(B + C) / (det(A + B + C) * det(C)))


def relay_grid_capacity(P, Pr, a, K, n=100_001):
    """Max-min over a rho grid; a lower bound within about 1e-5 bits."""
    rho = np.linspace(0.0, 1.0, n)
    mac = 0.5 * np.log2(1 + P + a * a * Pr + 2 * a * rho * np.sqrt(P * Pr))
    bc = 0.5 * np.log2(1 + (1 - rho ** 2) * K * K * P)
    return float(np.minimum(mac, bc).max())


def relay_closed_form(P, Pr, a, K):
    """Equal-cut solution: K^2 P rho^2 + 2 a sqrt(P Pr) rho + P + a^2 Pr - K^2 P = 0."""
    mac = lambda r: 0.5 * math.log2(1 + P + a * a * Pr + 2 * a * r * math.sqrt(P * Pr))
    bc = lambda r: 0.5 * math.log2(1 + (1 - r * r) * K * K * P)
    if K == 0:
        return 0.0
    roots = np.roots([K * K * P, 2 * a * math.sqrt(P * Pr), P + a * a * Pr - K * K * P])
    cands = [0.0, 1.0] + [float(r.real) for r in roots if abs(r.imag) < 1e-12 and 0 <= r.real <= 1]
    return max(min(mac(r), bc(r)) for r in cands)


def cmg_region_points(P1, P2, a12, a21, betas):
    """Corner points of the seven-inequality HK polygons written out with scalar SNR formulas."""
    pts = []
    lg = lambda x: 0.5 * math.log2(x)
    for b1, b2 in betas:
        v1, v2 = (1 - b1) * P1, (1 - b2) * P2
        n1 = 1 + a21 ** 2 * v2  # receiver 1 noise plus private interference
        n2 = 1 + a12 ** 2 * v1
        a1 = lg((1 + P1 + a21 ** 2 * v2) / n1)  # I(Y1;X1|U2)
        a2 = lg((1 + P2 + a12 ** 2 * v1) / n2)
        b1_ = lg((1 + P1 + a21 ** 2 * P2) / n1)  # I(Y1;X1U2)
        b2_ = lg((1 + P2 + a12 ** 2 * P1) / n2)
        c1 = lg((1 + v1 + a21 ** 2 * v2) / n1)  # I(Y1;X1|U1U2)
        c2 = lg((1 + v2 + a12 ** 2 * v1) / n2)
        d1 = lg((1 + v1 + a21 ** 2 * P2) / n1)  # I(Y1;X1U2|U1)
        d2 = lg((1 + v2 + a12 ** 2 * P1) / n2)
        rows = [(1, 0, a1), (0, 1, a2), (1, 1, b1_ + c2), (1, 1, c1 + b2_), (1, 1, d1 + d2),
                (2, 1, b1_ + c1 + d2), (1, 2, b2_ + c2 + d1), (-1, 0, 0.0), (0, -1, 0.0)]
        for (p, q, r), (s, t, u) in itertools.combinations(rows, 2):
            det = p * t - q * s
            if abs(det) < 1e-12:
                continue
            x, y = (r * t - q * u) / det, (p * u - r * s) / det
            if all(e * x + f * y <= g + 1e-9 for e, f, g in rows):
                pts.append((x, y))
    return np.array(pts)
