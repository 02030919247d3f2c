"""End-to-end pipelines: realize a finite group as the deck group of a
Weierstrass polynomial, and solve semi-topological embedding problems.

Every pipeline run re-verifies its own output: the produced polynomial is
tracked numerically around the generator loops and the resulting deck group
is compared against the request. A run that cannot verify raises instead of
returning silently wrong artifacts.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import embedding as embedding_mod
from .approx import (
    DEFAULT_CONSERVATISM,
    DEFAULT_DENOMINATOR_BOUND,
    DEFAULT_GRID_DENSITY,
    SampledCoeffMap,
    estimate_eps,
    fit_rational_polys,
)
from .braid import (
    BraidWord,
    braid_position,
    lift_permutation,
    roots_to_coeffs,
    tau,
)
from .embedding import EmbeddingInstance
from .freecover import extend_table, restriction_hom, subtable
from .monodromy import (
    DEFAULT_TRACKING,
    MonodromyRep,
    TrackingConfig,
    characteristic_hom,
    deck_action_on_roots,
    irreducibility_check,
    splitting_cover,
)
from .permgroup import (
    GroupHom,
    PermGroup,
    Permutation,
    compose,
    conjugate,
    isomorphic_as_groups,
)
from .synthesis import (
    SynthesisResult,
    SynthesisUnsupported,
    s3_twist_schedule,
    synthesize_abelian,
    synthesize_s3,
)
from .wpoly import (
    BaseSpace,
    GaussianRational,
    WeierstrassPoly,
    default_base_space,
    extend_base_space,
    sample_grid,
)

DEFAULT_ORDER_LIMIT = 24
SCHEMA_VERSION = 1


class VerificationError(RuntimeError):
    """A pipeline finished but its verification verdicts did not all hold."""

    def __init__(self, message: str, report: Optional["PipelineReport"] = None):
        super().__init__(message)
        self.report = report


class IrreducibilityFailureError(RuntimeError):
    """The input polynomial's monodromy is intransitive."""


@dataclass(eq=False)
class PipelineReport:
    command: str
    inputs: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def all_passed(self) -> bool:
        return all(bool(v) for v in self.verdicts.values())

    def to_json(self) -> dict:
        return {"schema_version": self.schema_version, "command": self.command,
                "inputs": self.inputs, "artifacts": self.artifacts,
                "verdicts": dict(self.verdicts), "timings": dict(self.timings)}


class _Stopwatch:
    def __init__(self):
        self.marks: dict = {}
        self._t = time.perf_counter()

    def lap(self, name: str):
        now = time.perf_counter()
        self.marks[name] = round(now - self._t, 6)
        self._t = now


def regular_representation(G: PermGroup) -> tuple[tuple, tuple]:
    """Element list and right-translation image of every generator."""
    elems = G.elements()
    index = {e: i + 1 for i, e in enumerate(elems)}
    images = tuple(
        Permutation(tuple(index[compose(e, g)] for e in elems))
        for g in G.generators)
    return elems, images


def align_regular_labelings(src: Sequence[Permutation],
                            dst: Sequence[Permutation]) -> Optional[Permutation]:
    """Relabeling pi with conjugate(src_i, pi) == dst_i for every i.

    Both tuples must act regularly; the intertwiner is forced by the image of
    one point, so at most n candidates are tried.
    """
    if len(src) != len(dst) or not src:
        return None
    n = src[0].degree
    if any(p.degree != n for p in list(src) + list(dst)):
        return None
    for c0 in range(1, n + 1):
        pi_map = {1: c0}
        frontier = [1]
        ok = True
        for a in frontier:
            if not ok:
                break
            for s, d in zip(src, dst):
                b, target = d(a), s(pi_map[a])
                if b in pi_map:
                    if pi_map[b] != target:
                        ok = False
                        break
                else:
                    pi_map[b] = target
                    frontier.append(b)
        if not ok or len(pi_map) != n:
            continue
        images = tuple(pi_map[a] for a in range(1, n + 1))
        if sorted(images) != list(range(1, n + 1)):
            continue
        pi = Permutation(images)
        if all(conjugate(s, pi) == d for s, d in zip(src, dst)):
            return pi
    return None


def _relabel_rep(rep: MonodromyRep, pi: Permutation) -> MonodromyRep:
    perms = tuple(conjugate(p, pi) for p in rep.perms)
    labels = tuple(rep.root_labels[pi(a) - 1] for a in range(1, rep.degree + 1))
    return MonodromyRep(rep.rank, rep.degree, perms, labels)


def _hole_centers(space: BaseSpace) -> list[GaussianRational]:
    return [GaussianRational(h.center[0], h.center[1]) for h in space.holes]


def _synthesize_validated(elems, gens, centers, space: BaseSpace,
                          validation_density: int = 15) -> SynthesisResult:
    """Exact synthesis with a deterministic fallback schedule of weights or
    twists; each candidate must pass the separability grid check."""
    n = len(elems)
    group = PermGroup(elems[0].degree, tuple(gens), _elements=tuple(elems))
    failures: list[str] = []
    if group.is_abelian():
        for base in (1, 2, 3, 5):
            try:
                synth = synthesize_abelian(elems, gens, centers,
                                           weight_base=Fraction(base))
                WeierstrassPoly(n, synth.coeffs, base=space,
                                validation_density=validation_density)
                return synth
            except (SynthesisUnsupported, ValueError) as exc:
                failures.append(f"weight base {base}: {exc}")
        raise SynthesisUnsupported("; ".join(failures))
    if n == 6 and len(gens) == 2:
        kind = (gens[0].order(), gens[1].order())
        if kind in ((2, 3), (3, 2), (2, 2)):
            for twist in s3_twist_schedule(kind):
                try:
                    synth = synthesize_s3(elems, gens, centers, twist=twist)
                    WeierstrassPoly(n, synth.coeffs, base=space,
                                    validation_density=validation_density)
                    return synth
                except (SynthesisUnsupported, ValueError) as exc:
                    failures.append(f"twist {twist}: {exc}")
            raise SynthesisUnsupported("; ".join(failures))
    raise SynthesisUnsupported(
        f"no exact construction for this group (order {n}, "
        f"{len(gens)} generators)")


def _fallback_coeff_fn(space: BaseSpace, braid_words: Sequence[BraidWord], n: int):
    """Best-effort continuous coefficient map from the braid loops.

    Points inside an annulus around hole i follow the i-th braid motion at a
    parameter given by the angle, tapered to the closed endpoints toward the
    annulus rim; everywhere else the map is the resting configuration. The
    map is pointwise computable but only piecewise smooth, so polynomial
    fitting at the certificate bound is expected to exhaust its degree
    budget; it is kept as the route for groups without an exact synthesis.
    """
    base = roots_to_coeffs(tuple(complex(k) for k in range(1, n + 1)))
    rims = []
    for hole in space.holes:
        r = float(hole.radius)
        rims.append((complex(float(hole.center[0]), float(hole.center[1])),
                     1.5 * r, 1.9 * r))

    def fn(u, v):
        w = complex(float(u), float(v))
        for (center, inner, outer), word in zip(rims, braid_words):
            d = abs(w - center)
            if d >= outer:
                continue
            angle = np.angle((w - center) * 1j)  # 0 at the downward direction
            xi = (angle / (2 * np.pi)) % 1.0
            taper = 1.0 if d <= inner else (outer - d) / (outer - inner)
            if taper <= 0:
                continue
            ell = min(1.0, max(0.0, 0.5 + (xi - 0.5) / taper))
            return roots_to_coeffs(braid_position(word, ell))
        return base

    return fn


def _grid_map_from_exact(coeffs, space: BaseSpace, density: int,
                         provenance: str) -> SampledCoeffMap:
    grid = tuple(sample_grid(space, density))
    values = tuple(
        tuple(complex(c.eval_exact(u, v)) for c in coeffs) for u, v in grid)
    return SampledCoeffMap(grid, values, provenance)


def realize_group(G: PermGroup, space: Optional[BaseSpace] = None, *,
                  tracking: TrackingConfig = DEFAULT_TRACKING,
                  grid_density: int = DEFAULT_GRID_DENSITY,
                  max_degree: int = 8,
                  conservatism: float = DEFAULT_CONSERVATISM,
                  denominator_bound: int = DEFAULT_DENOMINATOR_BOUND,
                  order_limit: int = DEFAULT_ORDER_LIMIT,
                  ) -> tuple[WeierstrassPoly, PipelineReport]:
    """Produce a Weierstrass polynomial whose splitting-cover deck group is
    isomorphic to G, with one base-space hole per given generator.

    The coefficient map realizing the regular representation is synthesized
    exactly where possible and passed through the sampled-approximation step
    so its certificate is part of the report; the tracked monodromy of the
    output polynomial must match the regular generator images exactly.
    """
    watch = _Stopwatch()
    elems = G.elements()
    n = len(elems)
    if n > order_limit:
        raise ValueError(f"group order {n} exceeds the limit {order_limit}")
    m = len(G.generators)
    if space is None:
        space = default_base_space(m)
    if len(space.holes) != m:
        raise ValueError("one hole per generator required")

    elems, reg = regular_representation(G)
    braid_words = tuple(lift_permutation(p) for p in reg)
    for word, p in zip(braid_words, reg):
        if tau(word) != p:
            raise AssertionError("braid lift lost its permutation")
    watch.lap("regular_representation")

    report = PipelineReport(command="realize")
    report.inputs = {"group": G.to_json(), "base_space": space.to_json(),
                     "grid_density": grid_density, "max_degree": max_degree,
                     "conservatism": conservatism}
    report.artifacts["braid_words"] = [w.to_json() for w in braid_words]
    report.artifacts["regular_generators"] = [p.to_json() for p in reg]

    centers = _hole_centers(space)
    synth = None
    try:
        synth = _synthesize_validated(elems, G.generators, centers, space)
        coeff_fn = None
    except SynthesisUnsupported as exc:
        report.artifacts["synthesis"] = f"unavailable: {exc}"
        coeff_fn = _fallback_coeff_fn(space, braid_words, n)
    if synth is not None:
        report.artifacts["synthesis"] = synth.description
    watch.lap("synthesis")

    if synth is not None:
        amap = _grid_map_from_exact(synth.coeffs, space, grid_density,
                                    synth.description)
    else:
        grid = tuple(sample_grid(space, grid_density))
        amap = SampledCoeffMap(
            grid, tuple(tuple(coeff_fn(u, v)) for u, v in grid),
            "braid loops through an annulus retraction")
    eps_hat = estimate_eps(amap, conservatism)
    report.artifacts["eps_hat"] = eps_hat
    watch.lap("sampling")

    fitted, cert = fit_rational_polys(amap, max_degree, eps_hat,
                                      denominator_bound=denominator_bound)
    report.artifacts["certificate"] = cert.to_json()
    if synth is not None:
        report.artifacts["exact_recovery"] = list(fitted) == list(synth.coeffs)
    watch.lap("fit")

    f = WeierstrassPoly(n, fitted, base=space)
    labels = synth.root_labels_at(_basepoint_complex(space)) if synth else None
    rep = characteristic_hom(f, space, tracking, root_labels=labels, refine=True)
    if synth is None or synth.target_perms is None:
        pi = align_regular_labelings(rep.perms, reg)
        if pi is not None:
            rep = _relabel_rep(rep, pi)
    watch.lap("tracking")

    table, deck = splitting_cover(rep)
    iso = isomorphic_as_groups(deck.group, G) if deck.group.order() <= 64 else None
    action_hom, faithful = deck_action_on_roots(rep)
    watch.lap("verification")

    report.artifacts["monodromy"] = rep.to_json()
    report.artifacts["polynomial"] = f.to_json()
    report.artifacts["splitting_cover"] = table.to_json()
    report.artifacts["deck_order"] = deck.group.order()
    if iso is not None:
        report.artifacts["deck_isomorphism_gen_images"] = [
            p.to_json() for p in iso.generator_images()]
    report.verdicts = {
        "certificate_valid": cert.is_valid,
        "monodromy_matches_regular_targets": rep.perms == reg,
        "splitting_fiber_equals_group_order": table.size == n,
        "covering_galois": deck.is_galois(),
        "deck_group_isomorphic_to_input": iso is not None,
        "deck_action_on_roots_faithful": faithful,
        "irreducible": irreducibility_check(rep),
    }
    report.timings = watch.marks
    if not report.all_passed():
        failing = [k for k, v in report.verdicts.items() if not v]
        raise VerificationError(f"realization failed verification: {failing}",
                                report)
    return f, report


def _basepoint_complex(space: BaseSpace) -> complex:
    return complex(float(space.basepoint[0]), float(space.basepoint[1]))


def solve_semitop_embedding(g: WeierstrassPoly, space: BaseSpace,
                            H: PermGroup, phi_images: Sequence[Permutation], *,
                            allow_rank_extension: bool = True,
                            tracking: TrackingConfig = DEFAULT_TRACKING,
                            grid_density: int = DEFAULT_GRID_DENSITY,
                            max_degree: int = 8,
                            conservatism: float = DEFAULT_CONSERVATISM,
                            ) -> tuple[WeierstrassPoly, PipelineReport]:
    """Given an irreducible g and a surjection of H onto its deck group,
    produce a polynomial h whose splitting covering solves the embedding
    problem over g, verified at the coset-table level and by exact
    monodromy match."""
    watch = _Stopwatch()
    rep_g = characteristic_hom(g, space, tracking, refine=True)
    if not irreducibility_check(rep_g):
        raise IrreducibilityFailureError(
            "the base polynomial's monodromy is intransitive")
    f_table, f_deck = splitting_cover(rep_g)
    watch.lap("base_monodromy")

    phi = GroupHom.from_generator_images(H, f_deck.group, tuple(phi_images))
    instance = EmbeddingInstance(space.rank, f_table, H, phi)
    solution = embedding_mod.solve(instance, allow_rank_extension)
    extra = solution.rank_used - space.rank
    watch.lap("embedding_solve")

    space2 = extend_base_space(space, extra)
    realized_group = PermGroup(H.degree, solution.images)
    h, realize_report = realize_group(
        realized_group, space2, tracking=tracking, grid_density=grid_density,
        max_degree=max_degree, conservatism=conservatism)
    rep_h = MonodromyRep.from_json(realize_report.artifacts["monodromy"])
    watch.lap("realize")

    e_table, _ = splitting_cover(rep_h)
    f_ext = extend_table(f_table, extra)
    tower = subtable(e_table, f_ext)
    triangle = False
    if tower is not None:
        res = restriction_hom(tower)
        triangle = all(res(solution.psi(x)) == phi(x) for x in H.elements())

    rep_g2 = characteristic_hom(g, space2, tracking, refine=True,
                                root_labels=rep_g.root_labels)
    base_stable = (rep_g2.perms[:space.rank] == rep_g.perms and
                   all(p.is_identity() for p in rep_g2.perms[space.rank:]))
    watch.lap("tower_verification")

    report = PipelineReport(command="embed")
    report.inputs = {"H": H.to_json(), "phi_gen_images": [p.to_json() for p in phi_images],
                     "base_space": space.to_json(),
                     "allow_rank_extension": allow_rank_extension}
    report.artifacts = {
        "base_monodromy": rep_g.to_json(),
        "embedding_solution": solution.to_json(),
        "rank_used": solution.rank_used,
        "extended_base_space": space2.to_json(),
        "realization": realize_report.to_json(),
        "tower": tower.to_json() if tower is not None else None,
    }
    report.verdicts = {
        "solution_verified": embedding_mod.verify(solution, instance),
        "realized_cover_matches_solver": e_table == solution.E_cover,
        "monodromy_matches_solver_targets":
            rep_h.perms == tuple(solution.E_cover.action),
        "tower_exists": tower is not None,
        "restriction_triangle": triangle,
        "output_irreducible": irreducibility_check(rep_h),
        "base_monodromy_stable_under_extension": base_stable,
    }
    report.timings = dict(watch.marks)
    report.timings.update(
        {f"realize.{k}": v for k, v in realize_report.timings.items()})
    if not report.all_passed():
        failing = [k for k, v in report.verdicts.items() if not v]
        raise VerificationError(f"embedding pipeline failed: {failing}", report)
    return h, report


def run_monodromy(f: WeierstrassPoly, space: BaseSpace,
                  tracking: TrackingConfig = DEFAULT_TRACKING) -> PipelineReport:
    """Track a polynomial's monodromy and report the derived structure."""
    watch = _Stopwatch()
    rep = characteristic_hom(f, space, tracking, refine=True)
    table, deck = splitting_cover(rep)
    hom, faithful = deck_action_on_roots(rep)
    watch.lap("monodromy")
    report = PipelineReport(command="monodromy")
    report.inputs = {"polynomial": f.to_json(), "base_space": space.to_json()}
    report.artifacts = {
        "monodromy": rep.to_json(),
        "irreducible": irreducibility_check(rep),
        "splitting_cover": table.to_json(),
        "deck_order": deck.group.order(),
        "galois": deck.is_galois(),
    }
    report.verdicts = {
        "fiber_size_equals_deck_order": table.size == deck.group.order(),
        "deck_action_on_roots_faithful": faithful,
    }
    report.timings = watch.marks
    return report


def run_verify_tower(h: WeierstrassPoly, g: WeierstrassPoly, space: BaseSpace,
                     H: PermGroup, phi_images: Sequence[Permutation],
                     psi_images: Sequence[Permutation],
                     tracking: TrackingConfig = DEFAULT_TRACKING) -> PipelineReport:
    """Re-derive both splitting coverings over the same base space and check
    that psi and phi close the restriction triangle."""
    watch = _Stopwatch()
    rep_g = characteristic_hom(g, space, tracking, refine=True)
    rep_h = characteristic_hom(h, space, tracking, refine=True)
    g_table, g_deck = splitting_cover(rep_g)
    h_table, h_deck = splitting_cover(rep_h)
    tower = subtable(h_table, g_table)
    watch.lap("monodromy")

    verdicts = {
        "g_irreducible": irreducibility_check(rep_g),
        "e_g_galois": g_deck.is_galois(),
        "e_h_galois": h_deck.is_galois(),
        "tower_exists": tower is not None,
    }
    psi = phi = None
    try:
        phi = GroupHom.from_generator_images(H, g_deck.group, tuple(phi_images))
        psi = GroupHom.from_generator_images(H, h_deck.group, tuple(psi_images))
        verdicts["phi_surjective"] = phi.is_surjective()
        verdicts["psi_bijective"] = psi.is_bijective()
    except ValueError:
        verdicts["phi_surjective"] = False
        verdicts["psi_bijective"] = False
    if tower is not None and psi is not None and phi is not None:
        res = restriction_hom(tower)
        verdicts["restriction_triangle"] = all(
            res(psi(x)) == phi(x) for x in H.elements())
    else:
        verdicts["restriction_triangle"] = False
    watch.lap("verification")

    report = PipelineReport(command="verify-tower")
    report.inputs = {"H": H.to_json(), "base_space": space.to_json()}
    report.artifacts = {
        "monodromy_g": rep_g.to_json(), "monodromy_h": rep_h.to_json(),
        "tower": tower.to_json() if tower is not None else None,
    }
    report.verdicts = verdicts
    report.timings = watch.marks
    return report
