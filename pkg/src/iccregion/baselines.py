"""Reference regions: Han-Kobayashi (CMG form), degraded relay capacity, Gaussian vector broadcast."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import gaussian_core as gc
from .icc_model import ChannelParams
from .region_geom import Region2D, convex_hull

PSD_TOL = 1e-9
_GOLDEN = (math.sqrt(5) - 1) / 2


# ---------------------------------------------------------------- GVBC


@dataclass(frozen=True)
class GvbcInput:
    S: np.ndarray
    B: np.ndarray
    D: np.ndarray
    H1: np.ndarray
    H2: np.ndarray

    @classmethod
    def from_params(cls, params: ChannelParams, c: float, B, D=None) -> "GvbcInput":
        S = np.array([[params.P1, c], [c, params.P2]], float)
        B = np.asarray(B, float)
        D = S - B if D is None else np.asarray(D, float)
        return cls(S, B, D, np.array([1.0, params.a21]), np.array([params.a12, 1.0]))


def _check_psd(name, m):
    m = np.asarray(m, float)
    if m.shape != (2, 2) or not np.allclose(m, m.T, atol=PSD_TOL):
        raise ValueError(f"{name} must be a symmetric 2x2 matrix")
    if np.linalg.eigvalsh(m).min() < -PSD_TOL * max(1.0, np.abs(m).max()):
        raise ValueError(f"{name} must be positive semi-definite")


def _quad(h, m):
    return float(h @ m @ h)


def gvbc_pairs(inp: GvbcInput):
    """The two rate pairs (bits) for encoding order user 1 first / user 2 first."""
    for name, m in (("S", inp.S), ("B", inp.B), ("D", inp.D), ("S - B - D", inp.S - inp.B - inp.D)):
        _check_psd(name, m)
    h1b, h1bd = _quad(inp.H1, inp.B), _quad(inp.H1, inp.B + inp.D)
    h2d, h2bd = _quad(inp.H2, inp.D), _quad(inp.H2, inp.B + inp.D)
    h2b, h1d = _quad(inp.H2, inp.B), _quad(inp.H1, inp.D)
    log = lambda x: 0.5 * math.log2(x)
    pair1 = (log(1 + h1b), log((1 + h2bd) / (1 + h2b)))
    pair2 = (log((1 + h1bd) / (1 + h1d)), log(1 + h2d))
    return pair1, pair2


def _gvbc_slices(params: ChannelParams, resolution: int):
    """Rate pairs for each correlation value ``c``, one (n, 2) array per slice."""
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    P1, P2 = params.P1, params.P2
    cmax = math.sqrt(P1 * P2)
    phis = np.linspace(0.0, np.pi, resolution, endpoint=False)
    ts = np.linspace(0.0, 1.0, resolution)
    h1 = np.array([1.0, params.a21])
    h2 = np.array([params.a12, 1.0])
    rot = np.stack([np.stack([np.cos(phis), -np.sin(phis)], 1),
                    np.stack([np.sin(phis), np.cos(phis)], 1)], 1)  # (F, 2, 2)
    t1, t2 = (x.ravel() for x in np.meshgrid(ts, ts, indexing="ij"))
    for c in np.linspace(-cmax, cmax, resolution):
        S = np.array([[P1, c], [c, P2]])
        w, v = np.linalg.eigh(S)
        root = v @ np.diag(np.sqrt(np.clip(w, 0, None))) @ v.T
        # Gains of each rotated eigen-direction of B seen by the two receivers.
        g1 = (h1 @ root @ rot) ** 2  # (F, 2)
        g2 = (h2 @ root @ rot) ** 2
        b1 = np.outer(g1[:, 0], t1) + np.outer(g1[:, 1], t2)  # (F, T)
        b2 = np.outer(g2[:, 0], t1) + np.outer(g2[:, 1], t2)
        s1, s2 = float(h1 @ S @ h1), float(h2 @ S @ h2)
        d1, d2 = np.maximum(s1 - b1, 0.0), np.maximum(s2 - b2, 0.0)
        first = np.column_stack([0.5 * np.log2(1 + b1).ravel(),
                                 0.5 * np.log2((1 + s2) / (1 + b2)).ravel()])
        second = np.column_stack([0.5 * np.log2((1 + s1) / (1 + d1)).ravel(),
                                  0.5 * np.log2(1 + d2).ravel()])
        yield np.vstack([first, second])


def gvbc_rate_grid(params: ChannelParams, resolution: int) -> np.ndarray:
    """Both rate pairs over the boundary parameterisation, shape (n, 2).

    B = S^1/2 U diag(t1, t2) U^T S^1/2 with U a rotation, D = S - B.
    """
    return np.vstack(list(_gvbc_slices(params, resolution)))


def gvbc_region(params: ChannelParams, resolution: int = 17) -> Region2D:
    hull = np.zeros((1, 2))
    for pts in _gvbc_slices(params, resolution):
        # Projections onto the axes add only the two intercepts to the hull.
        axes = np.diag(pts.max(axis=0))
        pts = np.vstack([hull, pts, axes])
        hull = convex_hull(pts).vertices
    return Region2D(convex_hull(hull))


# ---------------------------------------------------------------- relay


@dataclass(frozen=True)
class RelayResult:
    capacity: float
    rho: float
    degraded: bool  # degradedness established (K >= 1)


def _golden_max(f, lo=0.0, hi=1.0, tol=1e-9):
    a, b = lo, hi
    c, d = b - _GOLDEN * (b - a), a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = (a + b) / 2
    best = max((f(x), x), (f(lo), lo), (f(hi), hi))
    return best[1], best[0]


def relay_rates(params: ChannelParams, relay: str, rho):
    """The two max-min terms (multi-access cut, broadcast cut) at correlation ``rho``."""
    if relay == "user2_relays":
        P, Pr, a, = params.P1, params.P2, params.a21
    elif relay == "user1_relays":
        P, Pr, a = params.P2, params.P1, params.a12
    else:
        raise ValueError("relay must be 'user1_relays' or 'user2_relays'")
    rho = np.asarray(rho, float)
    mac = 0.5 * np.log2(1 + P + a * a * Pr + 2 * a * rho * math.sqrt(P * Pr))
    bc = 0.5 * np.log2(1 + (1 - rho ** 2) * params.K ** 2 * P)
    return mac, bc


def relay_capacity(params: ChannelParams, relay: str = "user2_relays") -> RelayResult:
    """Max over rho in [0, 1] of the min of both cuts; golden-section to 1e-9.

    The min of an increasing and a decreasing function of rho is unimodal.
    """
    f = lambda r: float(min(relay_rates(params, relay, r)))
    rho, cap = _golden_max(f)
    return RelayResult(cap, rho, params.K >= 1.0)


# ---------------------------------------------------------------- Han-Kobayashi


def hk_model(params: ChannelParams, beta1: float, beta2: float) -> gc.LinearGaussianModel:
    """X_t = U_t + V_t with common power fraction ``beta_t``."""
    u1, v1 = math.sqrt(beta1 * params.P1), math.sqrt((1 - beta1) * params.P1)
    u2, v2 = math.sqrt(beta2 * params.P2), math.sqrt((1 - beta2) * params.P2)
    terms = {
        "U1": {"u1": u1}, "U2": {"u2": u2},
        "X1": {"u1": u1, "v1": v1}, "X2": {"u2": u2, "v2": v2},
        "Y1": {"u1": u1, "v1": v1, "u2": params.a21 * u2, "v2": params.a21 * v2, "z1": 1.0},
        "Y2": {"u1": params.a12 * u1, "v1": params.a12 * v1, "u2": u2, "v2": v2, "z2": 1.0},
    }
    return gc.LinearGaussianModel.from_terms(("u1", "v1", "u2", "v2", "z1", "z2"), terms)


def hk_bounds(params: ChannelParams, beta1: float, beta2: float):
    """Rows ``(a, b, r)`` of ``a R1 + b R2 <= r`` for one common-power split."""
    m = hk_model(params, beta1, beta2)
    I = lambda a, b, c=(): gc.conditional_mutual_information(m, a, b, c)
    a1 = I("Y1", "X1", "U2")
    a2 = I("Y2", "X2", "U1")
    b1 = I("Y1", ["X1", "U2"])
    b2 = I("Y2", ["X2", "U1"])
    c1 = I("Y1", "X1", ["U1", "U2"])
    c2 = I("Y2", "X2", ["U1", "U2"])
    d1 = I("Y1", ["X1", "U2"], "U1")
    d2 = I("Y2", ["X2", "U1"], "U2")
    return [
        (1, 0, a1),
        (0, 1, a2),
        (1, 1, b1 + c2),
        (1, 1, c1 + b2),
        (1, 1, d1 + d2),
        (2, 1, b1 + c1 + d2),
        (1, 2, b2 + c2 + d1),
        (-1, 0, 0.0),
        (0, -1, 0.0),
    ]


def hk_polygon(params: ChannelParams, beta1: float, beta2: float):
    from .polytope_fme import halfplane_polygon

    return halfplane_polygon(hk_bounds(params, beta1, beta2))


def hk_region(params: ChannelParams, resolution: int = 17) -> Region2D:
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    grid = np.linspace(0.0, 1.0, resolution)
    pts = [hk_polygon(params, b1, b2).vertices for b1 in grid for b2 in grid]
    return Region2D(convex_hull(np.vstack(pts)))
