"""Weierstrass polynomials over a disc with holes.

Coefficients are bivariate polynomials over the Gaussian rationals, evaluated
exactly; the base space and generator loops are kept in rational coordinates
so geometric predicates (containment, segment-disc intersection, winding
numbers) are decided without floating error. Root finding is numerical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np


class GeometryError(RuntimeError):
    """A requested geometric construction is infeasible."""


class MultipleRootError(RuntimeError):
    """Roots came closer than the resolution tolerance."""


class RootFindingError(RuntimeError):
    """The simultaneous iteration failed to converge."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return Fraction(int(x[0]), int(x[1]))
    raise ValueError(f"expected a rational, got {x!r}")


@dataclass(frozen=True)
class GaussianRational:
    """Element of Q(i) with exact rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _frac(self.re))
        object.__setattr__(self, "im", _frac(self.im))

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    def __truediv__(self, other: "GaussianRational") -> "GaussianRational":
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        return GaussianRational((self.re * other.re + self.im * other.im) / d,
                                (self.im * other.re - self.re * other.im) / d)

    def __pow__(self, k: int) -> "GaussianRational":
        if k < 0:
            raise ValueError("negative powers not supported")
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    @staticmethod
    def from_int(n: int) -> "GaussianRational":
        return GaussianRational(Fraction(n))

    @staticmethod
    def i() -> "GaussianRational":
        return GaussianRational(Fraction(0), Fraction(1))


QI_ZERO = GaussianRational()
QI_ONE = GaussianRational(Fraction(1))


class BivariatePolyQi:
    """Polynomial in two real variables with Gaussian rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[tuple, GaussianRational]] = None):
        cleaned = {}
        for key, val in (terms or {}).items():
            du, dv = int(key[0]), int(key[1])
            if du < 0 or dv < 0:
                raise ValueError("negative exponents are not allowed")
            if not val.is_zero():
                cleaned[(du, dv)] = val
        self.terms = cleaned

    @staticmethod
    def constant(c: GaussianRational) -> "BivariatePolyQi":
        return BivariatePolyQi({(0, 0): c})

    @staticmethod
    def zero() -> "BivariatePolyQi":
        return BivariatePolyQi({})

    @staticmethod
    def variable_u() -> "BivariatePolyQi":
        return BivariatePolyQi({(1, 0): QI_ONE})

    @staticmethod
    def variable_v() -> "BivariatePolyQi":
        return BivariatePolyQi({(0, 1): QI_ONE})

    def __add__(self, other: "BivariatePolyQi") -> "BivariatePolyQi":
        out = dict(self.terms)
        for key, val in other.terms.items():
            out[key] = out.get(key, QI_ZERO) + val
        return BivariatePolyQi(out)

    def __sub__(self, other: "BivariatePolyQi") -> "BivariatePolyQi":
        out = dict(self.terms)
        for key, val in other.terms.items():
            out[key] = out.get(key, QI_ZERO) - val
        return BivariatePolyQi(out)

    def __mul__(self, other) -> "BivariatePolyQi":
        if isinstance(other, GaussianRational):
            return BivariatePolyQi(
                {k: v * other for k, v in self.terms.items()})
        out: dict = {}
        for (a, b), va in self.terms.items():
            for (c, d), vb in other.terms.items():
                key = (a + c, b + d)
                out[key] = out.get(key, QI_ZERO) + va * vb
        return BivariatePolyQi(out)

    def __pow__(self, k: int) -> "BivariatePolyQi":
        out = BivariatePolyQi.constant(QI_ONE)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, BivariatePolyQi) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"BivariatePolyQi({self.terms!r})"

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((du + dv for du, dv in self.terms), default=0)

    def eval_exact(self, u: Fraction, v: Fraction) -> GaussianRational:
        u, v = _frac(u), _frac(v)
        pow_u: dict[int, Fraction] = {0: Fraction(1)}
        pow_v: dict[int, Fraction] = {0: Fraction(1)}
        out = QI_ZERO
        for (du, dv), c in self.terms.items():
            if du not in pow_u:
                pow_u[du] = u ** du
            if dv not in pow_v:
                pow_v[dv] = v ** dv
            scale = pow_u[du] * pow_v[dv]
            out = out + GaussianRational(c.re * scale, c.im * scale)
        return out

    def eval_complex(self, u: float, v: float) -> complex:
        out = 0j
        for (du, dv), c in self.terms.items():
            out += complex(c) * (u ** du) * (v ** dv)
        return out

    @classmethod
    def from_w_powers(cls, coeffs: Sequence[GaussianRational]) -> "BivariatePolyQi":
        """Polynomial sum(c_k * w^k) with w = u + i v, expanded over (u, v)."""
        w = BivariatePolyQi({(1, 0): QI_ONE, (0, 1): GaussianRational.i()})
        out = BivariatePolyQi.zero()
        power = BivariatePolyQi.constant(QI_ONE)
        for c in coeffs:
            out = out + power * c
            power = power * w
        return out

    def to_json(self) -> list:
        items = sorted(self.terms.items())
        return [[du, dv, c.re.numerator, c.re.denominator,
                 c.im.numerator, c.im.denominator] for (du, dv), c in items]

    @classmethod
    def from_json(cls, data: Iterable) -> "BivariatePolyQi":
        terms = {}
        for du, dv, ren, red, imn, imd in data:
            terms[(int(du), int(dv))] = GaussianRational(
                Fraction(int(ren), int(red)), Fraction(int(imn), int(imd)))
        return cls(terms)


def _json_frac(x: Fraction) -> list:
    return [x.numerator, x.denominator]


@dataclass(frozen=True)
class Disc:
    center: tuple[Fraction, Fraction]
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center", (_frac(self.center[0]), _frac(self.center[1])))
        object.__setattr__(self, "radius", _frac(self.radius))
        if self.radius <= 0:
            raise ValueError("disc radius must be positive")

    def to_json(self) -> dict:
        return {"c": [_json_frac(self.center[0]), _json_frac(self.center[1])],
                "r": _json_frac(self.radius)}

    @classmethod
    def from_json(cls, data: Mapping) -> "Disc":
        return cls((_frac(data["c"][0]), _frac(data["c"][1])), _frac(data["r"]))


def _dist2(p, q) -> Fraction:
    dx, dy = p[0] - q[0], p[1] - q[1]
    return dx * dx + dy * dy


def _segment_dist2(p, q, c) -> Fraction:
    """Exact squared distance from point c to segment pq."""
    dx, dy = q[0] - p[0], q[1] - p[1]
    length2 = dx * dx + dy * dy
    if length2 == 0:
        return _dist2(p, c)
    t = ((c[0] - p[0]) * dx + (c[1] - p[1]) * dy) / length2
    t = max(Fraction(0), min(Fraction(1), t))
    ex, ey = p[0] + t * dx - c[0], p[1] + t * dy - c[1]
    return ex * ex + ey * ey


@dataclass(frozen=True)
class BaseSpace:
    """Closed disc minus disjoint open sub-discs, with a marked basepoint."""

    outer: Disc
    holes: tuple[Disc, ...]
    basepoint: tuple[Fraction, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "holes", tuple(self.holes))
        object.__setattr__(
            self, "basepoint", (_frac(self.basepoint[0]), _frac(self.basepoint[1])))
        for h in self.holes:
            margin = self.outer.radius - h.radius
            if margin <= 0 or _dist2(h.center, self.outer.center) >= margin * margin:
                raise ValueError(f"hole {h} is not strictly inside the outer disc")
        for i, a in enumerate(self.holes):
            for b in self.holes[i + 1:]:
                s = a.radius + b.radius
                if _dist2(a.center, b.center) <= s * s:
                    raise ValueError(f"holes {a} and {b} overlap or touch")
        if not self.contains(*self.basepoint):
            raise ValueError("basepoint must lie in the space")
        for h in self.holes:
            if _dist2(self.basepoint, h.center) <= h.radius * h.radius:
                raise ValueError("basepoint must avoid hole closures")

    @property
    def rank(self) -> int:
        return len(self.holes)

    def contains(self, u, v) -> bool:
        p = (_frac(u), _frac(v))
        if _dist2(p, self.outer.center) > self.outer.radius ** 2:
            return False
        return all(_dist2(p, h.center) >= h.radius ** 2 for h in self.holes)

    def segment_inside(self, p, q) -> bool:
        """Both endpoints in the space and the segment misses every open hole."""
        if not (self.contains(*p) and self.contains(*q)):
            return False
        return all(_segment_dist2(p, q, h.center) >= h.radius ** 2
                   for h in self.holes)

    def bounding_box(self):
        cx, cy = self.outer.center
        r = self.outer.radius
        return (cx - r, cx + r, cy - r, cy + r)

    def to_json(self) -> dict:
        return {"outer": self.outer.to_json(),
                "holes": [h.to_json() for h in self.holes],
                "basepoint": [_json_frac(self.basepoint[0]), _json_frac(self.basepoint[1])]}

    @classmethod
    def from_json(cls, data: Mapping) -> "BaseSpace":
        return cls(Disc.from_json(data["outer"]),
                   tuple(Disc.from_json(h) for h in data["holes"]),
                   (_frac(data["basepoint"][0]), _frac(data["basepoint"][1])))


def default_base_space(m: int) -> BaseSpace:
    """Outer disc of radius 10 with m unit holes spaced along the x-axis."""
    if m < 0:
        raise ValueError("hole count must be nonnegative")
    holes = tuple(
        Disc((Fraction(4 * j - 2 * (m - 1)), Fraction(0)), Fraction(1))
        for j in range(m))
    return BaseSpace(Disc((Fraction(0), Fraction(0)), Fraction(10)), holes,
                     (Fraction(0), Fraction(-8)))


def extend_base_space(space: BaseSpace, extra: int, gap: int = 4) -> BaseSpace:
    """Append unit holes to the right of the existing ones."""
    if extra <= 0:
        return space
    holes = list(space.holes)
    x = max((h.center[0] for h in holes), default=Fraction(-gap))
    for _ in range(extra):
        x = x + gap
        holes.append(Disc((x, Fraction(0)), Fraction(1)))
    return BaseSpace(space.outer, tuple(holes), space.basepoint)


@dataclass(frozen=True)
class LoopPath:
    """Closed polyline with rational vertices, based at its first vertex."""

    vertices: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        verts = tuple((_frac(p[0]), _frac(p[1])) for p in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 2 or verts[0] != verts[-1]:
            raise ValueError("a loop must start and end at the same vertex")

    def to_json(self) -> list:
        return [[_json_frac(x), _json_frac(y)] for x, y in self.vertices]

    @classmethod
    def from_json(cls, data) -> "LoopPath":
        return cls(tuple((_frac(x), _frac(y)) for x, y in data))


def validate_loop(space: BaseSpace, loop: LoopPath):
    """Exact check that every vertex and segment stays inside the space."""
    for p, q in zip(loop.vertices, loop.vertices[1:]):
        if not space.contains(*p):
            raise GeometryError(f"vertex {p} leaves the space")
        if not space.segment_inside(p, q):
            for h in space.holes:
                if _segment_dist2(p, q, h.center) < h.radius ** 2:
                    raise GeometryError(f"segment {p}-{q} crosses hole {h}")
            raise GeometryError(f"segment {p}-{q} leaves the outer disc")


def winding_number(loop: LoopPath, point: tuple[Fraction, Fraction]) -> int:
    """Exact winding number of the polyline around a point off the path."""
    px, py = _frac(point[0]), _frac(point[1])
    total = 0
    for (ax, ay), (bx, by) in zip(loop.vertices, loop.vertices[1:]):
        if ay <= py < by:  # upward crossing
            if (bx - ax) * (py - ay) - (by - ay) * (px - ax) > 0:
                total += 1
        elif by <= py < ay:  # downward crossing
            if (bx - ax) * (py - ay) - (by - ay) * (px - ax) < 0:
                total -= 1
    return total


def _rational_unit(angle: float, scale_bits: int = 20) -> tuple[Fraction, Fraction]:
    s = 1 << scale_bits
    return (Fraction(round(math.cos(angle) * s), s),
            Fraction(round(math.sin(angle) * s), s))


def generator_loops(space: BaseSpace, circle_vertices: int = 16,
                    ring_factor: Fraction = Fraction(2)) -> list[LoopPath]:
    """One polygonal loop per hole: out from the basepoint, once around
    counterclockwise, and back. The winding matrix against the hole centers
    is verified to be the identity."""
    ring_factor = _frac(ring_factor)
    holes = space.holes
    for a, b in zip(holes, holes[1:]):
        if a.center[0] >= b.center[0]:
            raise GeometryError("holes must be ordered by center abscissa")
    loops = []
    for idx, hole in enumerate(holes):
        cx, cy = hole.center
        rho = ring_factor * hole.radius
        bottom = (cx, cy - rho)
        ring = [bottom]
        for j in range(1, circle_vertices):
            ang = -math.pi / 2 + 2 * math.pi * j / circle_vertices
            cos_a, sin_a = _rational_unit(ang)
            ring.append((cx + rho * cos_a, cy + rho * sin_a))
        ring.append(bottom)
        verts = [space.basepoint] + ring + [space.basepoint]
        loop = LoopPath(tuple(verts))
        try:
            validate_loop(space, loop)
        except GeometryError as exc:
            raise GeometryError(f"loop around hole {idx + 1}: {exc}") from exc
        for jdx, other in enumerate(holes):
            expected = 1 if jdx == idx else 0
            if winding_number(loop, other.center) != expected:
                raise GeometryError(
                    f"loop around hole {idx + 1} winds wrongly about hole {jdx + 1}")
        loops.append(loop)
    return loops


class WeierstrassPoly:
    """Monic polynomial in z whose coefficients are maps on a base space.

    When a base space is attached, construction samples a grid over it and
    requires every fiber to have distinct roots, which is the defining
    property of these polynomials.
    """

    def __init__(self, degree: int, coeffs: Sequence[BivariatePolyQi],
                 base: Optional[BaseSpace] = None, validate: bool = True,
                 validation_density: int = 15):
        if degree < 1:
            raise ValueError("degree must be at least 1")
        if len(coeffs) != degree:
            raise ValueError("expected one coefficient per power 0..degree-1")
        self.degree = degree
        self.coeffs = tuple(coeffs)
        self.base = base
        if base is not None and validate:
            self._validate_on_grid(validation_density)

    def _validate_on_grid(self, density: int):
        for u, v in sample_grid(self.base, density):
            values = [complex(c.eval_exact(u, v)) for c in self.coeffs]
            try:
                roots_at(values)
            except (MultipleRootError, RootFindingError) as exc:
                raise ValueError(
                    f"repeated roots over ({float(u):.3f}, {float(v):.3f}): "
                    f"not a Weierstrass polynomial on this space") from exc

    def eval_exact(self, u, v) -> list[GaussianRational]:
        u, v = _frac(u), _frac(v)
        if self.base is not None and not self.base.contains(u, v):
            raise ValueError(f"point ({u}, {v}) is outside the base space")
        return [c.eval_exact(u, v) for c in self.coeffs]

    def eval_complex(self, u: float, v: float) -> np.ndarray:
        return np.array([c.eval_complex(u, v) for c in self.coeffs], dtype=complex)

    def __eq__(self, other) -> bool:
        return (isinstance(other, WeierstrassPoly)
                and self.degree == other.degree and self.coeffs == other.coeffs)

    def to_json(self) -> dict:
        return {"degree": self.degree, "coeffs": [c.to_json() for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: Mapping, base: Optional[BaseSpace] = None,
                  validate: bool = False) -> "WeierstrassPoly":
        return cls(int(data["degree"]),
                   [BivariatePolyQi.from_json(c) for c in data["coeffs"]],
                   base=base, validate=validate)


def eval_poly(f: WeierstrassPoly, x) -> list[GaussianRational]:
    """Exact coefficients of the fiber polynomial over a rational point."""
    return f.eval_exact(x[0], x[1])


def sample_grid(space: BaseSpace, density: int) -> list[tuple[Fraction, Fraction]]:
    """Rational tensor grid over the bounding box, filtered to the space."""
    if density < 2:
        raise ValueError("grid density must be at least 2")
    x0, x1, y0, y1 = space.bounding_box()
    pts = []
    for i in range(density):
        u = x0 + (x1 - x0) * Fraction(i, density - 1)
        for j in range(density):
            v = y0 + (y1 - y0) * Fraction(j, density - 1)
            if space.contains(u, v):
                pts.append((u, v))
    return pts


def _monic_array(coeffs: Sequence[complex]) -> np.ndarray:
    n = len(coeffs)
    p = np.empty(n + 1, dtype=complex)
    p[0] = 1.0
    for j, a in enumerate(coeffs):
        p[n - j] = a
    return p


def discriminant_at(coeffs: Sequence[complex]) -> complex:
    """Discriminant of the monic polynomial with the given low-order coefficients.

    Computed as (-1)^(n(n-1)/2) Res(f, f') via the Sylvester determinant, so
    it equals the product of squared root differences.
    """
    n = len(coeffs)
    if n == 0:
        raise ValueError("degree must be at least 1")
    if n == 1:
        return 1.0 + 0j
    p = _monic_array(coeffs)
    dp = np.array([(n - k) * p[k] for k in range(n)], dtype=complex)
    size = 2 * n - 1
    m = np.zeros((size, size), dtype=complex)
    for row in range(n - 1):
        m[row, row:row + n + 1] = p
    for row in range(n):
        m[n - 1 + row, row:row + n] = dp
    det = np.linalg.det(m)
    sign = -1.0 if (n * (n - 1) // 2) % 2 else 1.0
    return complex(sign * det)


def roots_at(coeffs: Sequence[complex], max_iterations: int = 1200,
             gap_rtol: float = 1e-7) -> np.ndarray:
    """All roots of the monic polynomial, via simultaneous Aberth iteration
    seeded on a circle of radius 1 + max|coeff|, polished by Newton steps.

    Raises MultipleRootError when the computed roots are too close to
    separate reliably.
    """
    n = len(coeffs)
    if n == 0:
        raise ValueError("degree must be at least 1")
    if n == 1:
        return np.array([-coeffs[0]], dtype=complex)
    p = _monic_array(coeffs)
    dp = np.polyder(p)
    radius = 1.0 + max(abs(a) for a in coeffs)
    roots = None
    for attempt in range(3):
        offset = 0.25 + 0.31 * attempt
        z = radius * np.exp(2j * np.pi * (np.arange(n) + offset) / n)
        if _aberth_iterate(p, dp, z, max_iterations):
            roots = z
            break
    if roots is None:
        raise RootFindingError("simultaneous iteration failed to converge")
    for _ in range(4):
        val = np.polyval(p, roots)
        der = np.polyval(dp, roots)
        mask = der != 0
        roots[mask] -= val[mask] / der[mask]
    scale = 1.0 + max(abs(a) for a in coeffs)
    residual = np.abs(np.polyval(p, roots))
    if residual.max() > 1e-10 * scale:
        raise RootFindingError(f"residual {residual.max():.2e} too large")
    root_scale = 1.0 + np.abs(roots).max()
    diffs = np.abs(roots[:, None] - roots[None, :])
    np.fill_diagonal(diffs, np.inf)
    if diffs.min() < gap_rtol * root_scale:
        raise MultipleRootError(
            f"root gap {diffs.min():.2e} below tolerance")
    return roots


def _aberth_iterate(p, dp, z, max_iterations) -> bool:
    abs_p = np.abs(p)
    eps = np.finfo(float).eps
    for _ in range(max_iterations):
        val = np.polyval(p, z)
        # roundoff floor of the evaluation itself; converged when reached
        floor = eps * np.polyval(abs_p, np.abs(z))
        if np.all(np.abs(val) <= 8.0 * floor):
            return True
        der = np.polyval(dp, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = np.where(der != 0, val / der, 0.1 + 0.1j)
            pairwise = z[:, None] - z[None, :]
            np.fill_diagonal(pairwise, np.inf)
            sums = (1.0 / pairwise).sum(axis=1)
            denom = 1.0 - newton * sums
            step = np.where(denom != 0, newton / denom, newton)
        if not np.all(np.isfinite(step)):
            return False
        z -= step
        if np.abs(step).max() < 1e-14 * (1.0 + np.abs(z).max()):
            return True
    return False
