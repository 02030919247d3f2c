"""Solver for the Galois embedding problem over coverings of a wedge of circles.

Given a Galois covering F with deck group D and a surjection phi from a finite
group H onto D, find a Galois covering E over F with deck group H such that
phi factors as the restriction map composed with the labeling isomorphism.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .freecover import (
    CosetTable,
    Tower,
    cayley_table,
    deck_group,
    extend_table,
    subtable,
)
from .permgroup import (
    GroupHom,
    PermGroup,
    Permutation,
    closure,
    compose,
    inverse,
)


class NoSolutionError(RuntimeError):
    """The embedding problem has no solution without extending the base."""


@dataclass(frozen=True, eq=False)
class EmbeddingInstance:
    base_rank: int
    F_cover: CosetTable
    H: PermGroup
    phi: GroupHom

    def validate(self):
        if self.base_rank != self.F_cover.rank:
            raise ValueError("base rank must match the covering rank")
        deck = deck_group(self.F_cover)
        if not deck.is_galois():
            raise ValueError("F must be a Galois covering")
        if self.phi.source is not self.H and \
                self.phi.source.element_set() != self.H.element_set():
            raise ValueError("phi must be defined on H")
        if self.phi.image_elements() != deck.group.element_set():
            raise ValueError("phi must be surjective onto the deck group of F")

    def to_json(self) -> dict:
        return {"base_rank": self.base_rank, "F_cover": self.F_cover.to_json(),
                "H": self.H.to_json(), "phi": self.phi.to_json()}


@dataclass(frozen=True, eq=False)
class EmbeddingSolution:
    E_cover: CosetTable
    tower: Tower
    psi: GroupHom
    rank_used: int
    images: tuple[Permutation, ...]

    def to_json(self) -> dict:
        return {"E_cover": self.E_cover.to_json(), "tower": self.tower.to_json(),
                "psi": self.psi.to_json(), "rank_used": self.rank_used,
                "images": [p.to_json() for p in self.images]}


def canonical_monodromy(F_cover: CosetTable) -> tuple[Permutation, ...]:
    """Deck transformation induced by each free generator of the base.

    Generator xi is sent to the deck transformation moving the basepoint to
    the endpoint of the lift of xi^-1; with left-to-right composition this is
    the homomorphism onto the deck group whose kernel is the covering's
    subgroup.
    """
    deck = deck_group(F_cover)
    if not deck.is_galois():
        raise ValueError("canonical monodromy requires a Galois covering")
    out = []
    for p in F_cover.action:
        target = inverse(p)(1)
        lam = deck.from_basepoint_image(target)
        if lam is None:
            raise ValueError("deck group misses a basepoint image")
        out.append(lam)
    return tuple(out)


def cayley_deck_labeling(images: Sequence[Permutation]) -> GroupHom:
    """Isomorphism from the group generated by ``images`` onto the deck group
    of its regular covering: h acts on cosets by left translation by h^-1."""
    table, elems = cayley_table(images)
    index = {e: i + 1 for i, e in enumerate(elems)}
    source = PermGroup(elems[0].degree, tuple(images), _elements=elems)
    deck = deck_group(table)
    mapping = {
        h: Permutation(tuple(index[compose(inverse(h), e)] for e in elems))
        for h in elems
    }
    return GroupHom(source, deck.group, mapping)


def _greedy_kernel_generators(phi: GroupHom) -> tuple[Permutation, ...]:
    kernel = phi.kernel_elements()
    total = len(kernel)
    gens: list[Permutation] = []
    have = 1
    for k in kernel:
        if k.is_identity():
            continue
        trial = gens + [k]
        size = closure(tuple(trial), degree=k.degree).order()
        if size > have:
            gens.append(k)
            have = size
        if have == total:
            break
    return tuple(gens)


def _first_generating_assignment(fibers, H: PermGroup):
    order = H.order()
    degree = H.degree
    for assignment in itertools.product(*fibers):
        if closure(assignment, degree=degree).order() == order:
            return assignment
    return None


def solve(instance: EmbeddingInstance,
          allow_rank_extension: bool = True) -> EmbeddingSolution:
    """Search preimage assignments of the canonical monodromy under phi.

    Each base generator must be sent to an element of H lying over its
    canonical deck transformation; any assignment whose images generate H
    yields the regular covering of H as a solution. If none generates and
    extension is allowed, fresh generators mapped to kernel generators are
    appended (new holes in the base space).
    """
    instance.validate()
    H, phi, F = instance.H, instance.phi, instance.F_cover
    eta = canonical_monodromy(F)
    elements = H.elements()
    fibers = [tuple(h for h in elements if phi(h) == d) for d in eta]
    if any(not f for f in fibers):
        raise ValueError("phi misses part of the canonical monodromy image")

    assignment = _first_generating_assignment(fibers, H)
    extra = 0
    if assignment is None:
        if not allow_rank_extension:
            raise NoSolutionError(
                "no preimage assignment generates H and rank extension is disabled")
        kernel_gens = _greedy_kernel_generators(phi)
        extra = len(kernel_gens)
        fibers = fibers + [(k,) for k in kernel_gens]
        assignment = _first_generating_assignment(fibers, H)
        if assignment is None:
            raise NoSolutionError("rank extension failed to generate H")

    table, elems = cayley_table(assignment)
    psi_on_gens = cayley_deck_labeling(assignment)
    mapping = {h: psi_on_gens.mapping[h] for h in elements}
    psi = GroupHom(H, psi_on_gens.target, mapping)

    mid = extend_table(F, extra)
    tower = subtable(table, mid)
    if tower is None:
        raise RuntimeError("constructed covering does not factor through F")

    solution = EmbeddingSolution(
        E_cover=table, tower=tower, psi=psi,
        rank_used=instance.base_rank + extra, images=tuple(assignment))
    if not verify(solution, instance):
        raise RuntimeError("constructed solution failed verification")
    return solution


def verify(solution: EmbeddingSolution, instance: EmbeddingInstance) -> bool:
    """Check psi is a labeling isomorphism and phi factors through restriction."""
    from .freecover import restriction_hom

    try:
        psi = solution.psi
        if not psi.is_bijective() or not psi.verify():
            return False
        deck_e = deck_group(solution.E_cover)
        if not deck_e.is_galois():
            return False
        res = restriction_hom(solution.tower)
        phi = instance.phi
        return all(res(psi(h)) == phi(h) for h in instance.H.elements())
    except (ValueError, KeyError):
        return False
