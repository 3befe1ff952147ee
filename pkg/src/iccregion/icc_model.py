"""Gaussian interference channel with transmitter conferencing.

Two evaluation routes share one bound table:

* ``achievable_polygon`` builds a :class:`LinearGaussianModel`, fills the bound
  system with mutual informations from :mod:`gaussian_core`, and projects it
  with :func:`polytope_fme.project`.
* ``sweep`` projects the bound table once with symbolic right-hand sides
  (one parameter per bound) and then evaluates whole batches of grid points
  with vectorised log-determinants and half-plane intersection.

Side Z2 is always obtained from side Z1 by the user swap: swap the channel
parameters and the two users' splits, compute side Z1, and mirror.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from . import gaussian_core as gc
from .polytope_fme import LinearInequality, LinearSystem, polygon_from_system, project
from .region_geom import (
    ALLOWED_SLOPES,
    EMPTY_POLYGON,
    SLOPE_TOL,
    Polygon2D,
    Region2D,
    convex_hull,
    hull_union,
)

POWER_TOL = 1e-12
SIDES = ("Z1", "Z2")


# ---------------------------------------------------------------- parameters


@dataclass(frozen=True)
class ChannelParams:
    """Standard-form channel; every noise variance is 1."""

    P1: float
    P2: float
    a12: float
    a21: float
    K: float = 0.0

    def __post_init__(self):
        for name in ("P1", "P2", "a12", "a21", "K"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValueError(f"{name} must be a finite number")
        if self.P1 <= 0 or self.P2 <= 0:
            raise ValueError("powers P1, P2 must be positive")
        if self.a12 < 0 or self.a21 < 0 or self.K < 0:
            raise ValueError("gains a12, a21, K must be non-negative")

    def swapped(self) -> "ChannelParams":
        return ChannelParams(self.P2, self.P1, self.a21, self.a12, self.K)


@dataclass(frozen=True)
class UserSplit:
    """Power fractions (private, common, cooperative, own cell index, other cell index).

    ``relay_sign`` is the sign with which the other user's cell index is
    transmitted (+1 adds coherently with its owner's copy at the owner's
    receiver, -1 lets the relayed copy cancel interference elsewhere).
    """

    alpha: float = 1.0
    beta: float = 0.0
    gamma: float = 0.0
    theta: float = 0.0
    mu: float = 0.0
    relay_sign: int = 1

    def __post_init__(self):
        if self.relay_sign not in (1, -1):
            raise ValueError("relay_sign must be +1 or -1")
        parts = self.as_tuple()
        if any(not math.isfinite(p) or p < -POWER_TOL or p > 1 + POWER_TOL for p in parts):
            raise ValueError(f"power fractions must lie in [0, 1], got {parts}")
        if abs(sum(parts) - 1.0) > POWER_TOL:
            raise ValueError(f"power fractions must sum to 1, got {sum(parts)!r}")

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.theta, self.mu)


@dataclass(frozen=True)
class PowerSplit:
    user1: UserSplit = field(default_factory=UserSplit)
    user2: UserSplit = field(default_factory=UserSplit)

    def swapped(self) -> "PowerSplit":
        return PowerSplit(self.user2, self.user1)


@dataclass(frozen=True)
class DpcCoeffs:
    """Inflation coefficients of the four DPC auxiliaries of the decoding side."""

    lambda_M: float = 0.0
    lambda_N: float = 0.0
    lambda_G: float = 0.0
    lambda_H: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(x) for x in self.as_tuple()):
            raise ValueError("DPC coefficients must be finite")

    def as_tuple(self):
        return (self.lambda_M, self.lambda_N, self.lambda_G, self.lambda_H)


@dataclass(frozen=True)
class SweepConfig:
    resolution: int = 9
    lambda_grid: tuple[float, ...] = (0.0, 0.5, 1.0, 1.5)
    sides: tuple[str, ...] = SIDES
    relay_signs: tuple[int, ...] = (1, -1)
    zero_cooperation: bool = False
    chunk_size: int = 20000

    def __post_init__(self):
        if not isinstance(self.resolution, int) or self.resolution < 2:
            raise ValueError("resolution must be an integer >= 2")
        grid = tuple(float(x) for x in self.lambda_grid)
        if not grid or not all(math.isfinite(x) for x in grid):
            raise ValueError("lambda_grid must be a non-empty list of finite numbers")
        object.__setattr__(self, "lambda_grid", grid)
        sides = tuple(self.sides)
        if not sides or any(s not in SIDES for s in sides):
            raise ValueError(f"sides must be a non-empty subset of {SIDES}")
        object.__setattr__(self, "sides", sides)
        signs = tuple(int(x) for x in self.relay_signs)
        if not signs or any(x not in (1, -1) for x in signs) or len(set(signs)) != len(signs):
            raise ValueError("relay_signs must be a non-empty subset of (1, -1)")
        object.__setattr__(self, "relay_signs", signs)
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")


# ---------------------------------------------------------------- naming

_DIGIT_SWAP = str.maketrans("12", "21")


def swap_name(name: str) -> str:
    return name.translate(_DIGIT_SWAP)


def _check_side(side: str):
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")


# ---------------------------------------------------------------- signal model

SOURCES = ("e_Vp1", "e_U1", "e_W1", "e_S1", "e_Vp2", "e_U2", "e_W2", "e_S2",
           "e_Z1", "e_Z2", "e_Zt1", "e_Zt2")


def _amplitudes(P: float, u: UserSplit):
    v, c, w, s, m = (math.sqrt(max(f, 0.0) * P) for f in u.as_tuple())
    return v, c, w, s, u.relay_sign * m


def interference_amplitude(params: ChannelParams, split: PowerSplit) -> float:
    """Received amplitude at Y1 of the cell index S2 (both transmitters send it)."""
    m1 = _amplitudes(params.P1, split.user1)[4]
    s2 = _amplitudes(params.P2, split.user2)[3]
    return m1 + params.a21 * s2


def mmse_dpc(params: ChannelParams, split: PowerSplit, scale: float = 1.0) -> DpcCoeffs:
    """MMSE-style inflation for the side-Z1 auxiliaries, times ``scale``.

    For a layer with transmit amplitude ``a``, received amplitude ``A`` at Y1
    and residual noise power ``n`` the coefficient is ``a * A / (A**2 + n)``;
    for layers received at their transmit amplitude this is ``p / (p + n)``.
    Layers without power get 0.
    """
    v1, u1, w1, s1, _ = _amplitudes(params.P1, split.user1)
    v2, _, w2, _, m2 = _amplitudes(params.P2, split.user2)
    other = 1.0 + params.a21 ** 2 * (v2 ** 2 + w2 ** 2)
    n_joint = other + w1 ** 2

    def lam(a, A, n):
        return 0.0 if a * a < POWER_TOL else scale * a * A / (A * A + n)

    return DpcCoeffs(
        lambda_M=lam(v1, v1, n_joint),
        lambda_N=lam(u1, u1, n_joint),
        lambda_G=lam(w1, w1, other),
        lambda_H=lam(s1, s1 + params.a21 * m2, n_joint),
    )


def _z1_terms(params: ChannelParams, split: PowerSplit, dpc: DpcCoeffs):
    v1, u1, w1, s1, m1 = _amplitudes(params.P1, split.user1)
    v2, u2, w2, s2, m2 = _amplitudes(params.P2, split.user2)
    x1 = {"e_Vp1": v1, "e_U1": u1, "e_W1": w1, "e_S1": s1, "e_S2": m1}
    x2 = {"e_Vp2": v2, "e_U2": u2, "e_W2": w2, "e_S2": s2, "e_S1": m2}

    def lin(*pairs):
        out: dict[str, float] = {}
        for gain, terms in pairs:
            for k, v in terms.items():
                out[k] = out.get(k, 0.0) + gain * v
        return out

    b = interference_amplitude(params, split)
    lm, ln, lg, lh = dpc.as_tuple()
    return {
        "X1": x1,
        "X2": x2,
        "Y1": lin((1.0, x1), (params.a21, x2), (1.0, {"e_Z1": 1.0})),
        "Y2": lin((params.a12, x1), (1.0, x2), (1.0, {"e_Z2": 1.0})),
        "Yt1": lin((params.K, x1), (1.0, {"e_Zt1": 1.0})),
        "Yt2": lin((params.K, x2), (1.0, {"e_Zt2": 1.0})),
        "M1": {"e_Vp1": v1, "e_S2": lm * b},
        "N1": {"e_U1": u1, "e_S2": ln * b},
        "G1": {"e_W1": w1, "e_S2": lg * b},
        "H1": {"e_S1": s1, "e_S2": lh * b},
        "V2": {"e_Vp2": v2, "e_U2": u2, "e_S2": s2},
        "U2": {"e_U2": u2},
        "W2": {"e_W2": w2},
        "S2": {"e_S2": 1.0},
    }


def build_signal_model(params: ChannelParams, split: PowerSplit, dpc: DpcCoeffs,
                       side: str = "Z1") -> gc.LinearGaussianModel:
    """Joint Gaussian model of every variable appearing in one side's bounds.

    For side Z2 ``dpc`` holds the coefficients of the user-2 auxiliaries
    (M2, N2, G2, H2), inflated against the received S1.
    """
    _check_side(side)
    if side == "Z2":
        model = build_signal_model(params.swapped(), split.swapped(), dpc, "Z1")
        return model.rename({n: swap_name(n) for n in model.sources + model.variables})
    model = gc.LinearGaussianModel.from_terms(SOURCES, _z1_terms(params, split, dpc))
    for x, P in (("X1", params.P1), ("X2", params.P2)):
        assert abs(model.variance(x) - P) <= 1e-9 * max(1.0, P), "power constraint violated"
    return model


# ---------------------------------------------------------------- bound table

# Superposition centres: a codeword's conditional entropy is taken given these.
CENTERS = {"M1": ("N1", "H1"), "V2": ("U2", "S2")}


@dataclass(frozen=True)
class Bound:
    label: str
    lhs: dict
    kind: str  # "bin": rhs = -I(A;B|C); "dec": codebook-aware joint decoding term
    targets: tuple
    side_info: tuple
    cond: tuple = ()


def _dec(label, lhs, targets, side_info):
    return Bound(label, lhs, "dec", tuple(targets), tuple(side_info))


def _bin(label, lhs, a, b, c=()):
    return Bound(label, lhs, "bin", (a,), (b,), tuple(c))


BOUNDS_Z1: tuple[Bound, ...] = (
    _bin("1", {"R11": 1, "L11": -1}, "M1", "S2", ("N1", "H1")),
    _bin("2", {"R12": 1, "L12": -1}, "N1", "S2"),
    _bin("3", {"R13": 1, "L13": -1}, "G1", "S2"),
    _bin("4", {"R10": 1, "L10": -1}, "H1", "S2"),
    _dec("5", {"L11": 1}, ["M1"], ["Y1", "N1", "H1", "U2"]),
    _dec("6", {"L11": 1, "L12": 1}, ["N1", "M1"], ["Y1", "H1", "U2"]),
    _dec("7", {"L11": 1, "L10": 1}, ["H1", "M1"], ["Y1", "N1", "U2"]),
    _dec("8", {"L11": 1, "R21": 1}, ["U2", "M1"], ["Y1", "N1", "H1"]),
    _dec("9", {"L11": 1, "L12": 1, "L10": 1}, ["N1", "H1", "M1"], ["Y1", "U2"]),
    _dec("10", {"L11": 1, "L12": 1, "R21": 1}, ["N1", "U2", "M1"], ["Y1", "H1"]),
    _dec("11", {"L11": 1, "L10": 1, "R21": 1}, ["H1", "U2", "M1"], ["Y1", "N1"]),
    _dec("12", {"L11": 1, "L12": 1, "L10": 1, "R21": 1}, ["N1", "H1", "U2", "M1"], ["Y1"]),
    _dec("13", {"L13": 1, "R10": -1}, ["G1"], ["Y1", "M1", "N1", "H1", "U2"]),
    _dec("14", {"L13": 1}, ["G1"], ["Yt1", "H1", "S2"]),
    _dec("15", {"R22": 1}, ["V2"], ["Y2", "U2", "S2", "N1"]),
    _dec("16", {"R22": 1, "R21": 1}, ["U2", "V2"], ["Y2", "S2", "N1"]),
    _dec("17", {"R22": 1, "R20": 1}, ["S2", "V2"], ["Y2", "U2", "N1"]),
    _dec("18", {"R22": 1, "L12": 1}, ["N1", "V2"], ["Y2", "U2", "S2"]),
    _dec("19", {"R22": 1, "R21": 1, "R20": 1}, ["U2", "S2", "V2"], ["Y2", "N1"]),
    _dec("20", {"R22": 1, "R21": 1, "L12": 1}, ["U2", "N1", "V2"], ["Y2", "S2"]),
    _dec("21", {"R22": 1, "R20": 1, "L12": 1}, ["S2", "N1", "V2"], ["Y2", "U2"]),
    _dec("22", {"R22": 1, "R21": 1, "R20": 1, "L12": 1}, ["U2", "S2", "N1", "V2"], ["Y2"]),
    _dec("23", {"R23": 1, "R20": -1}, ["W2"], ["Y2", "V2", "U2", "S2", "N1"]),
    _dec("24", {"R23": 1}, ["W2"], ["Yt2", "H1", "S2"]),
)

RATE_VARS_Z1 = ("R1", "R2", "R11", "R12", "R13", "R10", "L10", "L11", "L12", "L13",
                "R21", "R22", "R23", "R20")


def bound_value(model: gc.LinearGaussianModel, bound: Bound, rename=lambda n: n) -> float:
    """Right-hand side of one bound, in bits."""
    r = lambda names: tuple(rename(n) for n in names)
    if bound.kind == "bin":
        return -gc.conditional_mutual_information(
            model, r(bound.targets), r(bound.side_info), r(bound.cond))
    # Decode the targets one by one; each codeword is conditioned on its
    # superposition centre, so only its own codebook's randomness counts.
    total = 0.0
    known = list(bound.side_info)
    for t in bound.targets:
        centre = CENTERS.get(t, ())
        rest = [k for k in known if k not in centre]
        if rest:
            total += gc.conditional_mutual_information(model, r([t]), r(rest), r(centre))
        known.append(t)
    return total


def _structural_rows_z1():
    rows = []
    for total, parts in (("R1", ("R11", "R12", "R13")), ("R2", ("R21", "R22", "R23"))):
        eq = {total: 1, **{p: -1 for p in parts}}
        rows.append((eq, 0.0))
        rows.append(({k: -v for k, v in eq.items()}, 0.0))
    for v in RATE_VARS_Z1:
        rows.append(({v: -1}, 0.0))
    for j in "1230":
        rows.append(({f"R1{j}": 1, f"L1{j}": -1}, 0.0))
    return rows


def bound_system(model: gc.LinearGaussianModel, side: str = "Z1") -> LinearSystem:
    """All bounds of one side, plus rate-sum equalities and sign constraints."""
    _check_side(side)
    ren = swap_name if side == "Z2" else (lambda n: n)
    ineqs = [
        LinearInequality.leq({ren(k): v for k, v in b.lhs.items()}, bound_value(model, b, ren))
        for b in BOUNDS_Z1
    ]
    ineqs += [
        LinearInequality.leq({ren(k): v for k, v in coeffs.items()}, rhs)
        for coeffs, rhs in _structural_rows_z1()
    ]
    return LinearSystem(tuple(ren(v) for v in RATE_VARS_Z1), tuple(ineqs))


def achievable_polygon(params: ChannelParams, split: PowerSplit, dpc: DpcCoeffs,
                       side: str = "Z1") -> Polygon2D:
    """Projection of one side's bound system onto (R1, R2)."""
    model = build_signal_model(params, split, dpc, side)
    system = project(bound_system(model, side), ("R1", "R2"))
    return polygon_from_system(system, ("R1", "R2"))


# ---------------------------------------------------------------- compiled projection


@dataclass(frozen=True, eq=False)
class CompiledProjection:
    """Projected rows ``a*R1 + b*R2 <= W @ theta`` with theta = (1, bound values)."""

    normals: np.ndarray  # (m, 2)
    weights: np.ndarray  # (m, 1 + n_bounds)
    conditions: np.ndarray  # (c, 1 + n_bounds): 0 <= W @ theta

    @functools.cached_property
    def directions(self) -> tuple[np.ndarray, list[np.ndarray]]:
        """Distinct normals and, for each, the indices of rows sharing it."""
        uniq, inverse = np.unique(self.normals, axis=0, return_inverse=True)
        return uniq, [np.flatnonzero(inverse.ravel() == k) for k in range(len(uniq))]

    def tightest(self, theta: np.ndarray) -> np.ndarray:
        """Smallest right-hand side per distinct normal, shape (N, d)."""
        rhs = theta @ self.weights.T
        _, groups = self.directions
        return np.stack([rhs[:, g].min(axis=1) for g in groups], axis=1)


@functools.lru_cache(maxsize=None)
def compiled_projection() -> CompiledProjection:
    nb = len(BOUNDS_Z1)
    ineqs = []
    for k, b in enumerate(BOUNDS_Z1):
        w = np.zeros(nb + 1)
        w[k + 1] = 1.0
        ineqs.append(LinearInequality.leq(b.lhs, w))
    for coeffs, _ in _structural_rows_z1():
        ineqs.append(LinearInequality.leq(coeffs, np.zeros(nb + 1)))
    # Binning rows carry -I: flip the sign of their parameter so theta >= 0.
    for k, b in enumerate(BOUNDS_Z1):
        if b.kind == "bin":
            w = np.zeros(nb + 1)
            w[k + 1] = -1.0
            ineqs[k] = LinearInequality.leq(b.lhs, w)
    out = project(LinearSystem(RATE_VARS_Z1, tuple(ineqs)), ("R1", "R2"))
    normals, weights, conds = [], [], []
    for row in out.ineqs:
        a, b = float(row.coef("R1")), float(row.coef("R2"))
        if a == 0 and b == 0:
            conds.append(np.asarray(row.rhs))  # 0 <= W @ theta
        else:
            normals.append((a, b))
            weights.append(np.asarray(row.rhs))
    normals_arr = np.array(normals, float)
    axis_rows = (normals_arr <= 0).all(axis=1) & ((normals_arr == 0).sum(axis=1) == 1)
    # Sweeps rely on down-closed polygons (see pareto_front).
    assert np.all((normals_arr >= 0).all(axis=1) | axis_rows), "unexpected facet orientation"
    return CompiledProjection(
        normals_arr,
        np.array(weights, float),
        np.array(conds, float).reshape(-1, nb + 1),
    )


# Bounds whose value is I(...) with theta = value; binning ones are stored as +I.
_VAR_ORDER = ("Y1", "Y2", "Yt1", "Yt2", "M1", "N1", "G1", "H1", "V2", "U2", "W2", "S2")
_VAR_INDEX = {v: i for i, v in enumerate(_VAR_ORDER)}


def _entropy_plan():
    """Per bound, a list of (sign, subset) with value = sum sign * h(subset)."""
    plans = []
    for b in BOUNDS_Z1:
        terms: list[tuple[float, frozenset]] = []
        if b.kind == "bin":
            a, bb, c = set(b.targets), set(b.side_info), set(b.cond)
            terms += [(1, a | c), (1, bb | c), (-1, a | bb | c), (-1, c)]
        else:
            for t in b.targets:
                centre = set(CENTERS.get(t, ()))
                terms += [(1, centre | {t}), (-1, centre)]
            terms += [(-1, set(b.targets) | set(b.side_info)), (1, set(b.side_info))]
        plans.append([(s, frozenset(x)) for s, x in terms if x])
    subsets = sorted({x for p in plans for _, x in p}, key=lambda s: (len(s), sorted(s)))
    return plans, subsets


_PLANS, _SUBSETS = _entropy_plan()


def _batch_rows(params: ChannelParams, a1: np.ndarray, a2: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Coefficient tensor (N, 12 vars, 12 sources) for side Z1.

    ``a1``/``a2`` are (N, 5) amplitude arrays, ``lam`` is (N, 4).  The
    composite V2 is replaced by its private layer; every bound conditions V2
    on its superposition centre, so the entropy differences are unchanged.
    """
    n = len(a1)
    src = {s: i for i, s in enumerate(SOURCES)}
    G = np.zeros((n, len(_VAR_ORDER), len(SOURCES)))
    v1, u1, w1, s1, m1 = a1.T
    v2, u2, w2, s2, m2 = a2.T
    x1 = np.zeros((n, len(SOURCES)))
    x2 = np.zeros((n, len(SOURCES)))
    for arr, cols in ((x1, (("e_Vp1", v1), ("e_U1", u1), ("e_W1", w1), ("e_S1", s1), ("e_S2", m1))),
                      (x2, (("e_Vp2", v2), ("e_U2", u2), ("e_W2", w2), ("e_S2", s2), ("e_S1", m2)))):
        for name, amp in cols:
            arr[:, src[name]] += amp
    V = _VAR_INDEX
    G[:, V["Y1"]] = x1 + params.a21 * x2
    G[:, V["Y1"], src["e_Z1"]] += 1
    G[:, V["Y2"]] = params.a12 * x1 + x2
    G[:, V["Y2"], src["e_Z2"]] += 1
    G[:, V["Yt1"]] = params.K * x1
    G[:, V["Yt1"], src["e_Zt1"]] += 1
    G[:, V["Yt2"]] = params.K * x2
    G[:, V["Yt2"], src["e_Zt2"]] += 1
    b = m1 + params.a21 * s2
    for var, own, amp, k in (("M1", "e_Vp1", v1, 0), ("N1", "e_U1", u1, 1),
                             ("G1", "e_W1", w1, 2), ("H1", "e_S1", s1, 3)):
        G[:, V[var], src[own]] = amp
        G[:, V[var], src["e_S2"]] = lam[:, k] * b
    G[:, V["V2"], src["e_Vp2"]] = v2
    G[:, V["U2"], src["e_U2"]] = u2
    G[:, V["W2"], src["e_W2"]] = w2
    G[:, V["S2"], src["e_S2"]] = 1.0
    return G


def _logdet(cov: np.ndarray, idx: list[int]) -> np.ndarray:
    """Natural log-determinant of a principal submatrix, batched over the last axis.

    ``cov`` has shape (vars, vars, N); a Cholesky factorisation on contiguous
    length-N vectors is much faster than many tiny LAPACK calls.
    """
    k = len(idx)
    L = [[None] * k for _ in range(k)]
    out = 0.0
    for j in range(k):
        d = cov[idx[j], idx[j]].copy()
        for p in range(j):
            d -= L[j][p] * L[j][p]
        out = out + np.log(d)
        root = np.sqrt(d)
        for i in range(j + 1, k):
            v = cov[idx[i], idx[j]].copy()
            for p in range(j):
                v -= L[i][p] * L[j][p]
            L[i][j] = v / root
        L[j][j] = root
    return out


_SUBSET_INDEX = [[_VAR_INDEX[v] for v in sorted(s, key=_VAR_INDEX.get)] for s in _SUBSETS]


def _batch_theta(params: ChannelParams, a1, a2, lam) -> np.ndarray:
    """Bound values (N, 1 + n_bounds) with slot 0 = 1 and binning terms as +I."""
    G = _batch_rows(params, a1, a2, lam)
    cov = np.ascontiguousarray((G @ G.transpose(0, 2, 1)).transpose(1, 2, 0))
    # Zero-power variables carry no information: make them independent unit
    # variables so they drop out of every log-determinant.
    ii = np.arange(cov.shape[0])
    dead = cov[ii, ii] < gc.EIG_TOL  # (vars, N)
    if dead.any():
        cov[dead[:, None, :] | dead[None, :, :]] = 0.0
        cov[ii, ii] = np.where(dead, 1.0, cov[ii, ii])
    n = len(G)
    h = {subset: _logdet(cov, idx) for subset, idx in zip(_SUBSETS, _SUBSET_INDEX)}
    theta = np.empty((n, len(BOUNDS_Z1) + 1))
    theta[:, 0] = 1.0
    for k, plan in enumerate(_PLANS):
        val = np.zeros(n)
        for sign, subset in plan:
            val += sign * h[subset]
        theta[:, k + 1] = np.maximum(val / (2 * np.log(2.0)), 0.0)
    return theta


def _batch_lambda(params: ChannelParams, a1, a2, scale: float) -> np.ndarray:
    v1, u1, w1, s1, _ = a1.T
    v2, _, w2, _, m2 = a2.T
    other = 1.0 + params.a21 ** 2 * (v2 ** 2 + w2 ** 2)
    joint = other + w1 ** 2

    def lam(a, A, n):
        return np.where(a * a < POWER_TOL, 0.0, scale * a * A / (A * A + n))

    return np.stack([lam(v1, v1, joint), lam(u1, u1, joint), lam(w1, w1, other),
                     lam(s1, s1 + params.a21 * m2, joint)], axis=1)


def _pair_vertices(normals: np.ndarray, rhs: np.ndarray):
    """Candidate vertices (N, P, 2) from every non-parallel pair of rows."""
    i, j = np.triu_indices(len(normals), 1)
    det = normals[i, 0] * normals[j, 1] - normals[j, 0] * normals[i, 1]
    ok = np.abs(det) > 1e-12
    i, j, det = i[ok], j[ok], det[ok]
    ri, rj = rhs[:, i], rhs[:, j]
    x = (ri * normals[j, 1] - normals[i, 1] * rj) / det
    y = (normals[i, 0] * rj - ri * normals[j, 0]) / det
    return np.stack([x, y], axis=2)


@dataclass
class _BatchPolygons:
    points: np.ndarray  # (N, P, 2)
    feasible: np.ndarray  # (N, P)
    nonempty: np.ndarray  # (N,)
    violations: np.ndarray  # (N,) count of disallowed-slope edges
    audited: np.ndarray  # (N,) polygon was non-degenerate


def _batch_polygons(theta: np.ndarray, tol: float = 1e-9) -> _BatchPolygons:
    comp = compiled_projection()
    normals, _ = comp.directions
    rhs = comp.tightest(theta)
    pts = _pair_vertices(normals, rhs)
    resid = pts @ normals.T - rhs[:, None, :]  # (N, P, d)
    scale = np.maximum(1.0, np.abs(rhs))[:, None, :]
    feasible = np.all(resid <= tol * scale, axis=2)
    cond_ok = np.ones(len(theta), bool)
    if len(comp.conditions):
        cond_ok = np.all(theta @ comp.conditions.T >= -tol, axis=1)
    feasible &= cond_ok[:, None]
    nonempty = feasible.any(axis=1)

    # An edge lies on row k when feasible vertices on that line spread apart.
    on_line = feasible[:, :, None] & (np.abs(resid) <= tol * scale)
    tang = np.stack([-normals[:, 1], normals[:, 0]], axis=1)
    t = pts[:, :, :1] * tang[:, 0] + pts[:, :, 1:] * tang[:, 1]
    hi = np.where(on_line, t, -np.inf).max(axis=1)
    lo = np.where(on_line, t, np.inf).min(axis=1)
    edge = (hi - lo) > 1e-9  # (N, m)
    slope = _row_slopes(normals)
    allowed = np.array([_slope_ok(s) for s in slope])
    unit = normals / np.hypot(normals[:, :1], normals[:, 1:])
    # A polygon is degenerate when all its edges are parallel.
    ref = np.argmax(edge, axis=1)
    cross = np.abs(unit[ref][:, None, 0] * unit[None, :, 1] - unit[ref][:, None, 1] * unit[None, :, 0])
    audited = np.any(edge & (cross > 1e-9), axis=1)
    violations = np.where(audited, (edge & ~allowed[None]).sum(axis=1), 0)
    return _BatchPolygons(pts, feasible, nonempty, violations, audited)


def _row_slopes(normals: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.where(np.abs(normals[:, 1]) < 1e-12, np.inf, -normals[:, 0] / np.where(
            normals[:, 1] == 0, 1.0, normals[:, 1]))


def _slope_ok(s: float) -> bool:
    if np.isinf(s):
        return True
    return any(not np.isinf(a) and abs(s - a) <= SLOPE_TOL for a in ALLOWED_SLOPES)


def compiled_polygon(params: ChannelParams, split: PowerSplit, dpc_scale: float = 1.0,
                     side: str = "Z1") -> Polygon2D:
    """Single grid point through the batched route (MMSE inflation times ``dpc_scale``)."""
    _check_side(side)
    if side == "Z2":
        poly = compiled_polygon(params.swapped(), split.swapped(), dpc_scale, "Z1")
        return convex_hull(poly.vertices[:, ::-1]) if len(poly) else poly
    a1 = np.array([_amplitudes(params.P1, split.user1)])
    a2 = np.array([_amplitudes(params.P2, split.user2)])
    theta = _batch_theta(params, a1, a2, _batch_lambda(params, a1, a2, dpc_scale))
    bp = _batch_polygons(theta)
    if not bp.nonempty[0]:
        return EMPTY_POLYGON
    return convex_hull(bp.points[0][bp.feasible[0]])


# ---------------------------------------------------------------- sweeps


def simplex_grid(resolution: int, parts: int = 5) -> np.ndarray:
    """All compositions of ``resolution - 1`` steps into ``parts`` fractions, lexicographic."""
    n = resolution - 1
    rows = [c for c in itertools.product(range(n + 1), repeat=parts) if sum(c) == n]
    return np.array(sorted(rows), float) / n


def user_grid(cfg: SweepConfig) -> np.ndarray:
    """Rows of (alpha, beta, gamma, theta, mu, relay_sign); the sign only varies where mu > 0."""
    if cfg.zero_cooperation:
        b = np.linspace(0.0, 1.0, cfg.resolution)
        return np.stack([1 - b, b, 0 * b, 0 * b, 0 * b, 1 + 0 * b], axis=1)
    base = simplex_grid(cfg.resolution)
    blocks = []
    for sign in cfg.relay_signs:
        rows = base if sign == cfg.relay_signs[0] else base[base[:, 4] > 0]
        blocks.append(np.column_stack([rows, np.full(len(rows), float(sign))]))
    return np.vstack(blocks)


def _grid_amplitudes(grid: np.ndarray, P: float) -> np.ndarray:
    amp = np.sqrt(grid[:, :5] * P)
    amp[:, 4] *= grid[:, 5]
    return amp


@dataclass
class SweepResult:
    region: Region2D
    n_points: int
    n_polygons: int
    n_empty: int
    n_audited: int
    slope_violations: int
    best_r1: tuple  # (value, side, split, dpc_scale)
    best_r2: tuple


def _fractions(row, sign: int = 1) -> UserSplit:
    row = [float(x) for x in row]
    if len(row) == 6:
        sign = int(row.pop())
    return UserSplit(*row, relay_sign=sign)


def _sweep_side(params: ChannelParams, grid: np.ndarray, cfg: SweepConfig):
    """Sweep side Z1 for ``params``; returns hull points and bookkeeping."""
    g1, g2 = np.meshgrid(np.arange(len(grid)), np.arange(len(grid)), indexing="ij")
    i1, i2 = g1.ravel(), g2.ravel()
    amp1 = _grid_amplitudes(grid, params.P1)
    amp2 = _grid_amplitudes(grid, params.P2)
    hull_pts = []
    stats = dict(points=0, polys=0, empty=0, audited=0, violations=0)
    best = {0: (-np.inf, None), 1: (-np.inf, None)}
    for scale in cfg.lambda_grid:
        for start in range(0, len(i1), cfg.chunk_size):
            j1, j2 = i1[start:start + cfg.chunk_size], i2[start:start + cfg.chunk_size]
            a1, a2 = amp1[j1], amp2[j2]
            lam = _batch_lambda(params, a1, a2, scale)
            if scale != 0.0:
                # Points where inflation is void repeat the scale-0 evaluation.
                b = a1[:, 4] + params.a21 * a2[:, 3]
                keep = np.any(np.abs(lam * b[:, None]) > 0, axis=1)
                j1, j2, a1, a2, lam = j1[keep], j2[keep], a1[keep], a2[keep], lam[keep]
                if not len(j1):
                    continue
            theta = _batch_theta(params, a1, a2, lam)
            bp = _batch_polygons(theta)
            stats["points"] += len(j1)
            stats["polys"] += int(bp.nonempty.sum())
            stats["empty"] += int((~bp.nonempty).sum())
            stats["audited"] += int(bp.audited.sum())
            stats["violations"] += int(bp.violations.sum())
            pts = pareto_front(bp.points[bp.feasible])
            if len(pts):
                hull_pts.append(pts)
            for axis in (0, 1):
                vals = np.where(bp.feasible, bp.points[:, :, axis], -np.inf).max(axis=1)
                k = int(np.argmax(vals))
                if vals[k] > best[axis][0]:
                    best[axis] = (float(vals[k]), (int(j1[k]), int(j2[k]), scale))
    return hull_pts, stats, best


def pareto_front(pts: np.ndarray) -> np.ndarray:
    """Points not dominated componentwise by another point.

    Every per-point polygon is down-closed in the positive quadrant (all
    projected normals except the two axis rows are non-negative), so only
    the Pareto front, the origin and the axis projections can be hull vertices.
    """
    if len(pts) == 0:
        return pts
    pts = pts[np.lexsort((-pts[:, 1], -pts[:, 0]))]
    prev_max = np.maximum.accumulate(np.concatenate([[-np.inf], pts[:-1, 1]]))
    return pts[pts[:, 1] > prev_max]


def sweep(params: ChannelParams, cfg: SweepConfig = SweepConfig()) -> SweepResult:
    """Hull of every per-point polygon over the grid, DPC scales and sides."""
    grid = user_grid(cfg)
    hull_pts = []
    total = dict(points=0, polys=0, empty=0, audited=0, violations=0)
    best_r1 = best_r2 = (-np.inf, None, None, None)
    for side in cfg.sides:
        p = params if side == "Z1" else params.swapped()
        pts, stats, best = _sweep_side(p, grid, cfg)
        for k in total:
            total[k] += stats[k]
        if side == "Z1":
            pts_side = pts
            r1, r2 = best[0], best[1]
        else:
            pts_side = [v[:, ::-1] for v in pts]
            r1, r2 = best[1], best[0]
        hull_pts += pts_side
        for cand, target in ((r1, "r1"), (r2, "r2")):
            val, where = cand
            if where is None:
                continue
            j1, j2, scale = where
            u1, u2 = _fractions(grid[j1]), _fractions(grid[j2])
            split = PowerSplit(u1, u2) if side == "Z1" else PowerSplit(u2, u1)
            entry = (val, side, split, scale)
            if target == "r1" and val > best_r1[0]:
                best_r1 = entry
            if target == "r2" and val > best_r2[0]:
                best_r2 = entry
    if hull_pts:
        front = pareto_front(np.vstack(hull_pts))
        corners = [[0.0, 0.0], [front[:, 0].max(), 0.0], [0.0, front[:, 1].max()]]
        region = Region2D(convex_hull(np.vstack([front, corners])))
    else:
        region = Region2D(EMPTY_POLYGON)
    return SweepResult(region, total["points"], total["polys"], total["empty"],
                       total["audited"], total["violations"], best_r1, best_r2)


def sweep_region(params: ChannelParams, cfg: SweepConfig = SweepConfig()) -> Region2D:
    return sweep(params, cfg).region


# ---------------------------------------------------------------- polish

_TRANSFERS = [(i, j) for i in range(5) for j in range(5) if i != j]


def _split_arrays(split: PowerSplit) -> np.ndarray:
    return np.array([u.as_tuple() + (u.relay_sign,) for u in (split.user1, split.user2)], float)


def _axis_value(params, arr, scale, side, axis) -> float:
    rows = arr.copy()
    rows[:, :5] = np.clip(rows[:, :5], 0, 1)
    rows[:, :5] /= rows[:, :5].sum(axis=1, keepdims=True)
    split = PowerSplit(_fractions(rows[0]), _fractions(rows[1]))
    poly = compiled_polygon(params, split, scale, side)
    return float(poly.vertices[:, axis].max()) if len(poly) else -np.inf


def polish_intercept(params: ChannelParams, start: tuple, axis: int,
                     iterations: int = 20, step: float = 0.125) -> float:
    """Coordinate ascent on one axis intercept by pairwise transfers of power fraction.

    ``start`` is a ``(value, side, split, dpc_scale)`` entry of a sweep result.
    """
    value, side, split, scale = start
    arr = _split_arrays(split)
    best = _axis_value(params, arr, scale, side, axis)
    for _ in range(iterations):
        improved = False
        for user in (0, 1):
            for i, j in _TRANSFERS:
                delta = min(step, arr[user, i])
                if delta <= 0:
                    continue
                cand = arr.copy()
                cand[user, i] -= delta
                cand[user, j] += delta
                cand[user, :5] /= cand[user, :5].sum()
                val = _axis_value(params, cand, scale, side, axis)
                if val > best + 1e-12:
                    arr, best, improved = cand, val, True
        for s in (scale * 0.9, scale * 1.1, scale + 0.05, max(scale - 0.05, 0.0)):
            val = _axis_value(params, arr, s, side, axis)
            if val > best + 1e-12:
                scale, best, improved = s, val, True
        if not improved:
            step /= 2
    return max(best, value)


def polished_intercepts(params: ChannelParams, cfg: SweepConfig = SweepConfig(),
                        result: SweepResult | None = None) -> tuple[float, float]:
    result = result or sweep(params, cfg)
    return (polish_intercept(params, result.best_r1, 0),
            polish_intercept(params, result.best_r2, 1))


# ---------------------------------------------------------------- ideal conferencing


def ideal_split(theta1: float, theta2: float, sign1: int = 1, sign2: int = 1) -> PowerSplit:
    """All power on the cell-index layers: fraction ``theta_t`` on the own index."""
    return PowerSplit(UserSplit(0, 0, 0, theta1, 1 - theta1, sign1),
                      UserSplit(0, 0, 0, theta2, 1 - theta2, sign2))


def ideal_point(params: ChannelParams, split: PowerSplit, lam_h: float,
                side: str = "Z1") -> tuple[float, float] | None:
    """Corner of the reduced-bound rectangle for a cell-index-only split.

    On side Z1, H1 is inflated against S2 with coefficient ``lam_h`` and the
    corner is ``(I(Y1;H1) - I(H1;S2), I(Y2;S2))``.  Returns ``None`` when the
    first coordinate is negative.
    """
    _check_side(side)
    if any(u.alpha or u.beta or u.gamma for u in (split.user1, split.user2)):
        raise ValueError("ideal conferencing needs alpha = beta = gamma = 0")
    if side == "Z2":
        pt = ideal_point(params.swapped(), split.swapped(), lam_h, "Z1")
        return None if pt is None else (pt[1], pt[0])
    model = build_signal_model(params, split, DpcCoeffs(lambda_H=lam_h))
    r1 = gc.mutual_information(model, "Y1", "H1") - gc.mutual_information(model, "H1", "S2")
    r2 = gc.mutual_information(model, "Y2", "S2")
    if r1 < -gc.MI_TOL:
        return None
    return max(r1, 0.0), r2


def ideal_conferencing_region(params: ChannelParams, cfg: SweepConfig = SweepConfig()) -> Region2D:
    """Hull of the reduced-bound rectangles over theta grids, relay signs and DPC scales."""
    ts = np.linspace(0.0, 1.0, cfg.resolution)
    pts = [(0.0, 0.0)]
    for side in cfg.sides:
        p_side = params if side == "Z1" else params.swapped()
        for t1, t2 in itertools.product(ts, ts):
            for s1, s2 in itertools.product(cfg.relay_signs, cfg.relay_signs):
                split = ideal_split(float(t1), float(t2), s1, s2)
                base = mmse_dpc(p_side, split if side == "Z1" else split.swapped()).lambda_H
                for scale in cfg.lambda_grid:
                    pt = ideal_point(params, split, scale * base, side)
                    if pt is not None:
                        r1, r2 = pt
                        pts += [(r1, 0.0), (0.0, r2), (r1, r2)]
    return Region2D(convex_hull(pts))
