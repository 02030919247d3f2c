"""Quantitative polynomial approximation of coefficient maps.

A sampled coefficient map is approximated componentwise (real and imaginary
parts separately) by bivariate polynomials with rational coefficients. The
certificate records the componentwise sup errors against the bound
eps/(4n), the summed bound eps/2, and a discriminant check along the
straight-line homotopy between the original and fitted maps, all of which
together guarantee the fitted map stays in the space of separable
polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .wpoly import (
    BaseSpace,
    BivariatePolyQi,
    GaussianRational,
    WeierstrassPoly,
    discriminant_at,
    roots_at,
    sample_grid,
)

DEFAULT_GRID_DENSITY = 41
DEFAULT_T_MESH = 17
DEFAULT_DENOMINATOR_BOUND = 10 ** 6
DEFAULT_CONSERVATISM = 0.5


class DegreeExhaustedError(RuntimeError):
    """No polynomial up to the degree cap met the required bound."""


@dataclass(frozen=True, eq=False)
class SampledCoeffMap:
    """Coefficient map sampled on rational grid points of the base space."""

    grid: tuple[tuple[Fraction, Fraction], ...]
    values: tuple[tuple[complex, ...], ...]
    provenance: str = ""

    def __post_init__(self):
        if not self.grid:
            raise ValueError("grid must be nonempty")
        if len(self.grid) != len(self.values):
            raise ValueError("one value tuple per grid point required")
        n = len(self.values[0])
        for row in self.values:
            if len(row) != n:
                raise ValueError("inconsistent coefficient count")
            if abs(discriminant_at(row)) == 0.0:
                raise ValueError("sampled map touches the discriminant locus")

    @property
    def degree(self) -> int:
        return len(self.values[0])


def sample_coeff_function(space: BaseSpace,
                          fn: Callable[[Fraction, Fraction], Sequence[complex]],
                          density: int = DEFAULT_GRID_DENSITY,
                          provenance: str = "") -> SampledCoeffMap:
    grid = tuple(sample_grid(space, density))
    values = tuple(tuple(complex(c) for c in fn(u, v)) for u, v in grid)
    return SampledCoeffMap(grid, values, provenance)


def sample_poly_map(f: WeierstrassPoly, space: BaseSpace,
                    density: int = DEFAULT_GRID_DENSITY,
                    provenance: str = "exact polynomial map") -> SampledCoeffMap:
    return sample_coeff_function(
        space, lambda u, v: [complex(c.eval_exact(u, v)) for c in f.coeffs],
        density, provenance)


def estimate_eps(coeff_map: SampledCoeffMap,
                 conservatism: float = DEFAULT_CONSERVATISM) -> float:
    """Conservative lower estimate of the distance to the discriminant locus.

    At each sample with roots r1..rn, minimal gap s and radius bound
    R = 1 + max|r|, the local bound is s*(s/(4R))^(n-1); the estimate is the
    grid minimum scaled by the conservatism factor. For degree 1 the
    discriminant locus is empty and the local bound is taken as 1.
    """
    if not 0 < conservatism <= 1:
        raise ValueError("conservatism must lie in (0, 1]")
    n = coeff_map.degree
    best = float("inf")
    for row in coeff_map.values:
        if abs(discriminant_at(row)) == 0.0:
            raise ValueError("discriminant vanishes at a sample")
        if n == 1:
            best = min(best, 1.0)
            continue
        roots = roots_at(row)
        diffs = np.abs(roots[:, None] - roots[None, :])
        np.fill_diagonal(diffs, np.inf)
        s = float(diffs.min())
        radius = 1.0 + float(np.abs(roots).max())
        best = min(best, s * (s / (4.0 * radius)) ** (n - 1))
    return conservatism * best


@dataclass(frozen=True, eq=False)
class ApproximationCertificate:
    """Componentwise and summed sup-norm errors of a rational polynomial fit.

    per_component_error interleaves real and imaginary parts:
    (re_0, im_0, re_1, im_1, ...), 2n entries for a degree-n map.
    """

    degree: int
    eps_hat: float
    per_component_error: tuple[float, ...]
    total_error: float
    homotopy_checked: bool

    @property
    def component_bound(self) -> float:
        return self.eps_hat / (4.0 * self.degree)

    @property
    def is_valid(self) -> bool:
        return (all(e < self.component_bound for e in self.per_component_error)
                and self.total_error < self.eps_hat / 2.0
                and self.homotopy_checked)

    def to_json(self) -> dict:
        return {"degree": self.degree, "eps_hat": self.eps_hat,
                "per_component_error": list(self.per_component_error),
                "total_error": self.total_error,
                "homotopy_checked": self.homotopy_checked,
                "component_bound": self.component_bound,
                "valid": self.is_valid}


_SNAP_LADDER = (1, 2, 3, 4, 5, 6, 8, 10, 12, 16, 24, 32, 48, 64, 100, 256,
                1000, 10 ** 4, 10 ** 5, 10 ** 6)


def _snap_to_rational(x: float, max_denominator: int) -> Fraction:
    """Smallest-denominator fraction reproducing x up to float noise."""
    tol = max(1e-9, 1e-12 * abs(x))
    for cap in _SNAP_LADDER:
        if cap > max_denominator:
            break
        cand = Fraction(x).limit_denominator(cap)
        if abs(float(cand) - x) <= tol:
            return cand
    return Fraction(x).limit_denominator(max_denominator)


def _monomial_basis(degree: int) -> list[tuple[int, int]]:
    return [(p, q) for total in range(degree + 1)
            for p in range(total, -1, -1) for q in (total - p,)]


def _fit_real_component(grid, data: np.ndarray, max_degree: int, bound: float,
                        max_denominator: int):
    """Least squares at increasing degree; the post-rounding exact sup error
    must meet the bound."""
    uf = np.array([float(u) for u, _ in grid])
    vf = np.array([float(v) for _, v in grid])
    best = None
    for degree in range(max_degree + 1):
        basis = _monomial_basis(degree)
        design = np.column_stack([uf ** p * vf ** q for p, q in basis])
        coeffs, *_ = np.linalg.lstsq(design, data, rcond=None)
        terms = {}
        for (p, q), c in zip(basis, coeffs):
            frac = _snap_to_rational(float(c), max_denominator)
            if frac != 0:
                terms[(p, q)] = GaussianRational(frac)
        poly = BivariatePolyQi(terms)
        err = 0.0
        for (u, v), y in zip(grid, data):
            err = max(err, abs(float(poly.eval_exact(u, v).re) - float(y)))
            if err >= bound and degree < max_degree:
                break
        if err < bound:
            return poly, err
        best = err if best is None else min(best, err)
    raise DegreeExhaustedError(
        f"no fit met the bound {bound:.3e} up to degree {max_degree} "
        f"(best sup error {best:.3e})")


def fit_rational_polys(coeff_map: SampledCoeffMap, max_degree: int,
                       eps_hat: float,
                       denominator_bound: int = DEFAULT_DENOMINATOR_BOUND,
                       t_mesh: int = DEFAULT_T_MESH):
    """Fit every coefficient component by a rational bivariate polynomial.

    Real and imaginary parts are fitted separately until the exact
    post-rounding sup error over the grid drops below eps_hat/(4n); the
    certificate bundles the componentwise errors, the summed error, and the
    homotopy discriminant check.
    """
    if eps_hat <= 0:
        raise ValueError("eps_hat must be positive")
    n = coeff_map.degree
    bound = eps_hat / (4.0 * n)
    values = np.array(coeff_map.values, dtype=complex)
    fitted: list[BivariatePolyQi] = []
    per_component: list[float] = []
    for j in range(n):
        re_poly, re_err = _fit_real_component(
            coeff_map.grid, values[:, j].real, max_degree, bound, denominator_bound)
        im_poly, im_err = _fit_real_component(
            coeff_map.grid, values[:, j].imag, max_degree, bound, denominator_bound)
        combined = {}
        for key, c in re_poly.terms.items():
            combined[key] = GaussianRational(c.re, Fraction(0))
        for key, c in im_poly.terms.items():
            prev = combined.get(key, GaussianRational())
            combined[key] = GaussianRational(prev.re, c.re)
        fitted.append(BivariatePolyQi(combined))
        per_component.extend([re_err, im_err])

    total_error = _sup_total_error(coeff_map, fitted)
    homotopy = check_homotopy(coeff_map, fitted, eps_hat, t_mesh)
    cert = ApproximationCertificate(
        degree=n, eps_hat=eps_hat,
        per_component_error=tuple(per_component),
        total_error=total_error, homotopy_checked=homotopy)
    return fitted, cert


def _sup_total_error(coeff_map: SampledCoeffMap,
                     fitted: Sequence[BivariatePolyQi]) -> float:
    worst = 0.0
    for (u, v), row in zip(coeff_map.grid, coeff_map.values):
        total = sum(abs(complex(poly.eval_exact(u, v)) - val)
                    for poly, val in zip(fitted, row))
        worst = max(worst, total)
    return worst


def check_homotopy(coeff_map: SampledCoeffMap,
                   fitted: Sequence[BivariatePolyQi], eps_hat: float,
                   t_mesh: int = DEFAULT_T_MESH) -> bool:
    """Straight-line homotopy check between the sampled and fitted maps.

    True when the summed sup error is below eps_hat/2 and the discriminant
    stays away from zero at every grid point and homotopy time, so the whole
    segment remains among separable polynomials.
    """
    if t_mesh < 2:
        raise ValueError("t_mesh must have at least two points")
    if _sup_total_error(coeff_map, fitted) >= eps_hat / 2.0:
        return False
    times = np.linspace(0.0, 1.0, t_mesh)
    for (u, v), row in zip(coeff_map.grid, coeff_map.values):
        start = np.array(row, dtype=complex)
        end = np.array([complex(p.eval_exact(u, v)) for p in fitted])
        base = abs(discriminant_at(start))
        if base == 0.0:
            return False
        for t in times:
            mid = (1.0 - t) * start + t * end
            if abs(discriminant_at(mid)) <= 1e-9 * base:
                return False
    return True
