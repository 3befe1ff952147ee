"""Linear inequality systems over named rate variables and Fourier-Motzkin projection.

Coefficients are exact :class:`fractions.Fraction` values.  The right-hand
side is either a float or a 1-D weight vector ``w`` standing for ``w @ theta``
with ``theta >= 0`` elementwise (slot 0 is conventionally the constant 1).
Vector right-hand sides let one symbolic elimination serve every numerical
instance of a bound family; every pruning rule used here is valid for all
admissible ``theta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .region_geom import EMPTY_POLYGON, Polygon2D, convex_hull

RHS_TOL = 1e-9


class UnboundedRegionError(ValueError):
    """Raised when a projected region is unbounded (a bounding row is missing)."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def _rhs_leq(a, b, tol: float = RHS_TOL) -> bool:
    """True when rhs ``a`` is at most ``b`` for every admissible parameter vector."""
    return bool(np.all(np.asarray(a) <= np.asarray(b) + tol))


def _rhs_scale(r, k: Fraction):
    if isinstance(r, np.ndarray):
        return r * float(k)
    return float(r) * float(k)


@dataclass(frozen=True)
class LinearInequality:
    """``sum(coeffs[v] * v) <= rhs``.

    An empty ``coeffs`` mapping is a bare condition ``0 <= rhs``; elimination
    produces these and they decide feasibility.
    """

    coeffs: Mapping[str, Fraction]
    rhs: float | np.ndarray
    history: frozenset = field(default=frozenset(), compare=False)

    def __post_init__(self):
        coeffs = {v: _frac(c) for v, c in self.coeffs.items() if c != 0}
        object.__setattr__(self, "coeffs", coeffs)
        rhs = self.rhs
        if isinstance(rhs, np.ndarray):
            rhs = rhs.astype(float)
        else:
            rhs = float(rhs)
        object.__setattr__(self, "rhs", rhs)

    @classmethod
    def leq(cls, coeffs: Mapping[str, object], rhs) -> "LinearInequality":
        if not any(c != 0 for c in coeffs.values()):
            raise ValueError("an inequality needs at least one nonzero coefficient")
        return cls(coeffs, rhs)

    @classmethod
    def geq(cls, coeffs: Mapping[str, object], rhs) -> "LinearInequality":
        return cls.leq({v: -_frac(c) for v, c in coeffs.items()}, -rhs)

    @property
    def is_condition(self) -> bool:
        return not self.coeffs

    def coef(self, var: str) -> Fraction:
        return self.coeffs.get(var, Fraction(0))

    def normalized(self) -> "LinearInequality":
        """Scale so that the first nonzero coefficient (by name) has magnitude 1."""
        if not self.coeffs:
            return self
        lead = abs(self.coeffs[min(self.coeffs)])
        if lead == 1:
            return self
        return replace(
            self,
            coeffs={v: c / lead for v, c in self.coeffs.items()},
            rhs=_rhs_scale(self.rhs, 1 / lead),
        )

    def direction(self) -> tuple:
        return tuple(sorted(self.coeffs.items()))

    def always_satisfied(self) -> bool:
        return self.is_condition and _rhs_leq(np.zeros_like(np.asarray(self.rhs)), self.rhs)

    def evaluate(self, point: Mapping[str, float]) -> float:
        return sum(float(c) * point[v] for v, c in self.coeffs.items())

    def __str__(self):
        terms = " + ".join(f"{c}*{v}" for v, c in sorted(self.coeffs.items())) or "0"
        return f"{terms} <= {self.rhs}"


@dataclass(frozen=True)
class LinearSystem:
    vars: tuple[str, ...]
    ineqs: tuple[LinearInequality, ...]
    eliminated: int = 0

    def __post_init__(self):
        vars_ = tuple(self.vars)
        if len(set(vars_)) != len(vars_):
            raise ValueError("duplicate variable names")
        ineqs = tuple(self.ineqs)
        known = set(vars_)
        for ineq in ineqs:
            unknown = set(ineq.coeffs) - known
            if unknown:
                raise ValueError(f"inequality references undeclared vars {sorted(unknown)}")
        object.__setattr__(self, "vars", vars_)
        object.__setattr__(self, "ineqs", ineqs)

    def __len__(self):
        return len(self.ineqs)

    def with_history(self) -> "LinearSystem":
        """Tag every row with its own index as ancestry, if not tagged yet."""
        if all(i.history for i in self.ineqs):
            return self
        ineqs = tuple(
            i if i.history else replace(i, history=frozenset([k]))
            for k, i in enumerate(self.ineqs)
        )
        return replace(self, ineqs=ineqs, eliminated=0)

    def is_feasible_at(self, point: Mapping[str, float], tol: float = RHS_TOL) -> bool:
        for ineq in self.ineqs:
            if isinstance(ineq.rhs, np.ndarray):
                raise TypeError("point tests need numeric right-hand sides")
            if ineq.evaluate(point) > ineq.rhs + tol:
                return False
        return True

    def evaluate_rhs(self, theta: np.ndarray) -> "LinearSystem":
        """Instantiate vector right-hand sides at parameter vector ``theta``."""
        theta = np.asarray(theta, dtype=float)
        ineqs = tuple(
            replace(i, rhs=float(np.asarray(i.rhs) @ theta) if isinstance(i.rhs, np.ndarray) else i.rhs)
            for i in self.ineqs
        )
        return replace(self, ineqs=ineqs)


def _combine(p: LinearInequality, n: LinearInequality, v: str) -> LinearInequality:
    cp, cn = p.coef(v), -n.coef(v)
    coeffs = {}
    for var in set(p.coeffs) | set(n.coeffs):
        if var == v:
            continue
        c = cn * p.coef(var) + cp * n.coef(var)
        if c != 0:
            coeffs[var] = c
    rhs = _rhs_scale(p.rhs, cn) + _rhs_scale(n.rhs, cp)
    return LinearInequality(coeffs, rhs, p.history | n.history).normalized()


def _prune_by_history(ineqs: list[LinearInequality], eliminated: int) -> list[LinearInequality]:
    # Chernikov: a combination of more than k+1 rows after k eliminations is
    # redundant; rows whose ancestry strictly contains another's are too.
    ineqs = [i for i in ineqs if len(i.history) <= eliminated + 1]
    histories = sorted({i.history for i in ineqs}, key=len)
    dominated = set()
    for idx, h in enumerate(histories):
        for g in histories[:idx]:
            if len(g) < len(h) and g < h:
                dominated.add(h)
                break
    return [i for i in ineqs if i.history not in dominated]


def eliminate_variable(system: LinearSystem, v: str) -> LinearSystem:
    """Project out ``v`` by pairing each upper bound on it with each lower bound."""
    if v not in system.vars:
        return system
    system = system.with_history()
    pos, neg, rest = [], [], []
    for ineq in system.ineqs:
        c = ineq.coef(v)
        (pos if c > 0 else neg if c < 0 else rest).append(ineq)
    derived = [_combine(p, n, v) for p in pos for n in neg]
    eliminated = system.eliminated + 1
    rows = _prune_by_history(rest + derived, eliminated)
    vars_ = tuple(x for x in system.vars if x != v)
    return LinearSystem(vars_, tuple(rows), eliminated)


def _nonneg_certificates(ineqs: Sequence[LinearInequality]) -> dict[str, LinearInequality]:
    """Rows of the form ``-x <= r`` with ``r <= 0``, i.e. certificates of ``x >= 0``."""
    certs = {}
    for ineq in ineqs:
        if len(ineq.coeffs) == 1:
            (var, c), = ineq.coeffs.items()
            if c < 0 and _rhs_leq(ineq.rhs, np.zeros_like(np.asarray(ineq.rhs)), 0.0):
                certs.setdefault(var, ineq)
    return certs


def _dominates(r: LinearInequality, s: LinearInequality, nonneg: set[str]) -> bool:
    """``r`` together with the nonnegativity rows implies ``s``."""
    if not _rhs_leq(r.rhs, s.rhs):
        return False
    for var in set(r.coeffs) | set(s.coeffs):
        cr, cs = r.coef(var), s.coef(var)
        if cr == cs:
            continue
        if var not in nonneg or cs > cr:
            return False
    return True


def remove_redundant(system: LinearSystem) -> LinearSystem:
    """Drop trivial conditions, duplicates, scaled duplicates, and dominated rows.

    A row ``s`` is dominated by ``r`` when the two agree on every variable not
    known to be nonnegative, ``s`` has no larger coefficient on the nonnegative
    ones, and ``s`` has no smaller right-hand side.  Nonnegativity is read off
    rows already in the system, and those certificate rows are never removed.
    """
    rows = [i.normalized() for i in system.ineqs if not i.always_satisfied()]

    by_direction: dict[tuple, list[LinearInequality]] = {}
    for row in rows:
        group = by_direction.setdefault(row.direction(), [])
        if any(_rhs_leq(kept.rhs, row.rhs) for kept in group):
            continue
        group[:] = [kept for kept in group if not _rhs_leq(row.rhs, kept.rhs)]
        group.append(row)
    rows = [r for group in by_direction.values() for r in group]

    certs = _nonneg_certificates(rows)
    protected = {id(c) for c in certs.values()}
    nonneg = set(certs)
    keep = []
    for k, s in enumerate(rows):
        if id(s) in protected:
            keep.append(s)
            continue
        redundant = False
        for j, r in enumerate(rows):
            if j == k or r.direction() == s.direction():
                continue
            if _dominates(r, s, nonneg):
                # Mutual domination means equal rows; keep the earlier one.
                if _dominates(s, r, nonneg) and k < j:
                    continue
                redundant = True
                break
        if not redundant:
            keep.append(s)
    return replace(system, ineqs=tuple(keep))


def _elimination_cost(system: LinearSystem, v: str) -> int:
    pos = sum(1 for i in system.ineqs if i.coef(v) > 0)
    neg = sum(1 for i in system.ineqs if i.coef(v) < 0)
    return pos * neg


def project(system: LinearSystem, keep: Iterable[str]) -> LinearSystem:
    """Eliminate every variable not in ``keep``.

    At each step the variable with the fewest upper-by-lower products is
    removed (ties by name), followed by :func:`remove_redundant`.
    """
    keep = set(keep)
    unknown = keep - set(system.vars)
    if unknown:
        raise ValueError(f"cannot keep undeclared vars {sorted(unknown)}")
    system = remove_redundant(system.with_history())
    while True:
        todo = [v for v in system.vars if v not in keep]
        if not todo:
            return system
        v = min(todo, key=lambda x: (_elimination_cost(system, x), x))
        system = remove_redundant(eliminate_variable(system, v))


def _halfplanes(system: LinearSystem, axes: tuple[str, str]):
    """Rows as ``(a, b, r)`` for ``a*x + b*y <= r``; ``None`` if a condition fails."""
    rows = []
    for ineq in system.ineqs:
        if isinstance(ineq.rhs, np.ndarray):
            raise TypeError("polygon extraction needs numeric right-hand sides")
        a, b = float(ineq.coef(axes[0])), float(ineq.coef(axes[1]))
        if a == 0 and b == 0:
            if ineq.rhs < -RHS_TOL:
                return None
            continue
        rows.append((a, b, ineq.rhs))
    return rows


def halfplane_polygon(rows: Sequence[tuple[float, float, float]], tol: float = RHS_TOL) -> Polygon2D:
    """Intersection of half-planes ``a*x + b*y <= r``.

    Raises :class:`UnboundedRegionError` when the intersection is non-empty but
    unbounded.
    """
    rows = [(float(a), float(b), float(r)) for a, b, r in rows]
    if not rows:
        raise UnboundedRegionError("no bounding rows")
    scale = [max(abs(a), abs(b)) for a, b, _ in rows]
    pts = []
    for i in range(len(rows)):
        a1, b1, r1 = rows[i]
        for j in range(i + 1, len(rows)):
            a2, b2, r2 = rows[j]
            det = a1 * b2 - a2 * b1
            if abs(det) < 1e-12:
                continue
            x = (r1 * b2 - b1 * r2) / det
            y = (a1 * r2 - r1 * a2) / det
            if all(a * x + b * y <= r + tol * s for (a, b, r), s in zip(rows, scale)):
                pts.append((x, y))

    # The recession cone {d : a.d <= 0 for all rows} is non-trivial exactly
    # when some row boundary direction lies in it.
    def in_cone(dx, dy):
        return all(a * dx + b * dy <= 1e-12 * s for (a, b, _), s in zip(rows, scale))

    unbounded_dir = any(
        in_cone(-b * sgn, a * sgn) for a, b, _ in rows for sgn in (1.0, -1.0)
    )
    if pts:
        if unbounded_dir:
            raise UnboundedRegionError("feasible region is unbounded")
        return convex_hull(pts)
    # No vertex: either empty, or a region containing a line (all normals parallel).
    a0, b0, _ = rows[0]
    norm = np.hypot(a0, b0)
    nx, ny = a0 / norm, b0 / norm
    lo, hi = -np.inf, np.inf
    for a, b, r in rows:
        along = a * nx + b * ny
        if abs(a * ny - b * nx) > 1e-12 * max(abs(a), abs(b)):
            return EMPTY_POLYGON
        if along > 0:
            hi = min(hi, r / along)
        else:
            lo = max(lo, r / along)
    if lo <= hi + tol:
        raise UnboundedRegionError("feasible region is unbounded")
    return EMPTY_POLYGON


def polygon_from_system(system: LinearSystem, axes: tuple[str, str] | None = None) -> Polygon2D:
    """Convex polygon of a two-variable system, counter-clockwise.

    An infeasible system yields :data:`EMPTY_POLYGON`; a feasible but
    unbounded one raises :class:`UnboundedRegionError`.
    """
    if axes is None:
        if set(system.vars) == {"R1", "R2"}:
            axes = ("R1", "R2")
        else:
            axes = tuple(system.vars)
    if len(axes) != 2 or set(axes) != set(system.vars):
        raise ValueError(f"system must have exactly two variables, got {system.vars}")
    rows = _halfplanes(system, axes)
    if rows is None:
        return EMPTY_POLYGON
    return halfplane_polygon(rows)


def system_from_polygon(poly: Polygon2D, axes: tuple[str, str] = ("R1", "R2")) -> LinearSystem:
    """Inequality description of a non-degenerate CCW polygon (one row per edge)."""
    v = poly.vertices
    if len(v) < 3:
        raise ValueError("need a polygon with at least three vertices")
    ineqs = []
    for (x1, y1), (x2, y2) in zip(v, np.roll(v, -1, axis=0)):
        # Interior lies to the left of each CCW edge.
        a, b = y2 - y1, x1 - x2
        ineqs.append(LinearInequality({axes[0]: _frac(a), axes[1]: _frac(b)}, a * x1 + b * y1))
    return LinearSystem(axes, tuple(ineqs))
