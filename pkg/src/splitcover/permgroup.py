"""Exact arithmetic in finite symmetric groups and their finitely generated subgroups.

Permutations are 1-based and compose left to right: ``compose(p, q)(i) == q(p(i))``.
This matches the order in which loops are concatenated downstream, so monodromy
images multiply in path order.
"""

from __future__ import annotations

import itertools
from math import lcm
from typing import Iterable, Mapping, Optional, Sequence

DEFAULT_CLOSURE_LIMIT = 20160
DEFAULT_ISO_LIMIT = 64


class ClosureLimitError(RuntimeError):
    """Materializing a generated subgroup would exceed the configured cap."""


class Permutation:
    """A bijection of {1..n} stored in one-line notation."""

    __slots__ = ("images", "_hash")

    def __init__(self, images: Sequence[int]):
        images = tuple(images)
        n = len(images)
        if n == 0:
            raise ValueError("permutation degree must be at least 1")
        seen = [False] * (n + 1)
        for v in images:
            if not isinstance(v, int) or not 1 <= v <= n or seen[v]:
                raise ValueError(f"not a bijection of 1..{n}: {images!r}")
            seen[v] = True
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "_hash", hash(images))

    def __setattr__(self, name, value):
        raise AttributeError("Permutation is immutable")

    @classmethod
    def _unsafe(cls, images: tuple) -> "Permutation":
        # internal fast path; caller guarantees images is a bijection tuple
        p = object.__new__(cls)
        object.__setattr__(p, "images", images)
        object.__setattr__(p, "_hash", hash(images))
        return p

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        images = list(range(1, n + 1))
        for cyc in cycles:
            for a, b in zip(cyc, cyc[1:] + type(cyc)([cyc[0]])):
                images[a - 1] = b
        return cls(tuple(images))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        cycs = self.cycles()
        if not cycs:
            return f"Perm(id_{self.degree})"
        return "Perm(" + "".join("(" + " ".join(map(str, c)) + ")" for c in cycs) + ")"

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def is_identity(self) -> bool:
        return all(v == i + 1 for i, v in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its smallest moved point."""
        out, seen = [], set()
        for start in range(1, self.degree + 1):
            if start in seen or self.images[start - 1] == start:
                continue
            cyc, k = [], start
            while k not in seen:
                seen.add(k)
                cyc.append(k)
                k = self.images[k - 1]
            out.append(tuple(cyc))
        return out

    def order(self) -> int:
        return lcm(*(len(c) for c in self.cycles())) if self.cycles() else 1

    def to_json(self) -> list[int]:
        return list(self.images)

    @classmethod
    def from_json(cls, data) -> "Permutation":
        return cls(tuple(int(v) for v in data))


def identity(n: int) -> Permutation:
    return Permutation.identity(n)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Left-to-right product: apply p, then q."""
    if p.degree != q.degree:
        raise ValueError(f"degree mismatch: {p.degree} != {q.degree}")
    qi = q.images
    return Permutation._unsafe(tuple(qi[v - 1] for v in p.images))


def inverse(p: Permutation) -> Permutation:
    inv = [0] * p.degree
    for i, v in enumerate(p.images):
        inv[v - 1] = i + 1
    return Permutation._unsafe(tuple(inv))


def conjugate(p: Permutation, by: Permutation) -> Permutation:
    """Relabeling of p along ``by``: compose(compose(by, p), inverse(by))."""
    return compose(compose(by, p), inverse(by))


class PermGroup:
    """Finitely generated subgroup of a symmetric group.

    The element set is materialized lazily by breadth-first products of the
    generators and cached; enumeration order is deterministic.
    """

    def __init__(self, degree: int, generators: Sequence[Permutation] = (),
                 limit: int = DEFAULT_CLOSURE_LIMIT,
                 _elements: Optional[tuple] = None):
        if degree < 1:
            raise ValueError("degree must be at least 1")
        for g in generators:
            if g.degree != degree:
                raise ValueError(f"generator degree {g.degree} != group degree {degree}")
        self.degree = degree
        self.generators = tuple(generators)
        self.limit = limit
        self._elements = _elements

    def elements(self) -> tuple:
        if self._elements is None:
            self._elements = _bfs_closure(self.degree, self.generators, self.limit)
        return self._elements

    def element_set(self) -> frozenset:
        return frozenset(self.elements())

    def order(self) -> int:
        return len(self.elements())

    def __len__(self) -> int:
        return self.order()

    def __contains__(self, p: Permutation) -> bool:
        return p in self.element_set()

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, generators={list(self.generators)!r})"

    def orbit(self, point: int) -> frozenset:
        seen = {point}
        frontier = [point]
        while frontier:
            x = frontier.pop()
            for g in self.generators:
                y = g(x)
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return frozenset(seen)

    def is_transitive(self) -> bool:
        return len(self.orbit(1)) == self.degree

    def is_regular(self) -> bool:
        return self.is_transitive() and self.order() == self.degree

    def is_abelian(self) -> bool:
        els = self.elements()
        return all(compose(a, b) == compose(b, a)
                   for a, b in itertools.combinations(els, 2))

    def to_json(self) -> dict:
        return {"degree": self.degree, "generators": [g.to_json() for g in self.generators]}

    @classmethod
    def from_json(cls, data: Mapping) -> "PermGroup":
        return cls(int(data["degree"]),
                   tuple(Permutation.from_json(g) for g in data["generators"]))


def _bfs_closure(degree: int, generators: Sequence[Permutation], limit: int) -> tuple:
    e = Permutation.identity(degree)
    elements = [e]
    index = {e}
    for g in elements:
        for h in generators:
            f = compose(g, h)
            if f not in index:
                if len(elements) >= limit:
                    raise ClosureLimitError(
                        f"closure exceeds limit {limit} (degree {degree})")
                index.add(f)
                elements.append(f)
    return tuple(elements)


def closure(generators: Sequence[Permutation], degree: Optional[int] = None,
            limit: int = DEFAULT_CLOSURE_LIMIT) -> PermGroup:
    """Group generated by ``generators``, with its element set materialized."""
    if degree is None:
        if not generators:
            raise ValueError("degree required for an empty generating set")
        degree = generators[0].degree
    g = PermGroup(degree, generators, limit=limit)
    g.elements()
    return g


def centralizer_in_sym(G: PermGroup, brute_force_max_degree: int = 8) -> PermGroup:
    """All permutations of {1..n} commuting with every generator of G.

    Transitive G: candidates are determined by the image of point 1 and are
    extended equivariantly along a spanning tree, so only n candidates are
    tried. Otherwise falls back to enumerating the full symmetric group,
    which is only feasible for small degree.
    """
    n = G.degree
    found = []
    if G.is_transitive():
        order, parent = _spanning_tree(n, G.generators)
        for b in range(1, n + 1):
            s = [0] * (n + 1)
            s[1] = b
            for x in order[1:]:
                prev, g = parent[x]
                s[x] = g(s[prev])
            if sorted(s[1:]) != list(range(1, n + 1)):
                continue
            if all(s[g(x)] == g(s[x]) for g in G.generators for x in range(1, n + 1)):
                found.append(Permutation._unsafe(tuple(s[1:])))
    elif n <= brute_force_max_degree:
        for images in itertools.permutations(range(1, n + 1)):
            s = Permutation._unsafe(images)
            if all(compose(s, g) == compose(g, s) for g in G.generators):
                found.append(s)
    else:
        raise ValueError(
            f"degree {n} too large for brute force and the group is not transitive")
    return PermGroup(n, tuple(found), _elements=tuple(found))


def _spanning_tree(n: int, generators: Sequence[Permutation]):
    order = [1]
    parent: dict = {1: None}
    for x in order:
        for g in generators:
            y = g(x)
            if y not in parent:
                parent[y] = (x, g)
                order.append(y)
    if len(order) != n:
        raise ValueError("action is not transitive")
    return order, parent


class GroupHom:
    """Homomorphism between two finite permutation groups, stored elementwise.

    Construction verifies multiplicativity exhaustively over the source, so a
    GroupHom instance is always an actual homomorphism.
    """

    def __init__(self, source: PermGroup, target: PermGroup,
                 mapping: Mapping[Permutation, Permutation], check: bool = True):
        self.source = source
        self.target = target
        self.mapping = dict(mapping)
        if check:
            self._check()

    def _check(self):
        els = self.source.elements()
        if set(self.mapping) != set(els):
            raise ValueError("mapping does not cover the source group")
        tset = self.target.element_set()
        for v in self.mapping.values():
            if v not in tset:
                raise ValueError(f"image {v!r} is not in the target group")
        for a in els:
            fa = self.mapping[a]
            for b in els:
                if self.mapping[compose(a, b)] != compose(fa, self.mapping[b]):
                    raise ValueError(
                        f"not multiplicative at {a!r}, {b!r}")

    @classmethod
    def from_generator_images(cls, source: PermGroup, target: PermGroup,
                              images: Sequence[Permutation]) -> "GroupHom":
        """Extend generator images to the whole source, or raise ValueError."""
        if len(images) != len(source.generators):
            raise ValueError("one image per source generator required")
        mapping = _close_hom(source, target.degree, zip(source.generators, images))
        if mapping is None:
            raise ValueError("generator images do not extend to a homomorphism")
        return cls(source, target, mapping)

    def __call__(self, p: Permutation) -> Permutation:
        return self.mapping[p]

    def generator_images(self) -> tuple:
        return tuple(self.mapping[g] for g in self.source.generators)

    def image_elements(self) -> frozenset:
        return frozenset(self.mapping.values())

    def is_injective(self) -> bool:
        return len(self.image_elements()) == self.source.order()

    def is_surjective(self) -> bool:
        return self.image_elements() == self.target.element_set()

    def is_bijective(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def kernel_elements(self) -> tuple:
        e = Permutation.identity(self.target.degree)
        return tuple(p for p in self.source.elements() if self.mapping[p] == e)

    def verify(self) -> bool:
        try:
            self._check()
            return True
        except ValueError:
            return False

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "gen_images": [self.mapping[g].to_json() for g in self.source.generators],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "GroupHom":
        source = PermGroup.from_json(data["source"])
        target = PermGroup.from_json(data["target"])
        images = tuple(Permutation.from_json(p) for p in data["gen_images"])
        return cls.from_generator_images(source, target, images)


def _close_hom(source: PermGroup, target_degree: int, gen_pairs) -> Optional[dict]:
    """Close the graph of a candidate homomorphism; None if inconsistent."""
    pairs = list(gen_pairs)
    e_src = Permutation.identity(source.degree)
    mapping = {e_src: Permutation.identity(target_degree)}
    frontier = [e_src]
    for a in frontier:
        fa = mapping[a]
        for g, h in pairs:
            b = compose(a, g)
            fb = compose(fa, h)
            if b in mapping:
                if mapping[b] != fb:
                    return None
            else:
                mapping[b] = fb
                frontier.append(b)
    return mapping


def _reduced_generators(G: PermGroup) -> tuple:
    gens: list[Permutation] = []
    have = {Permutation.identity(G.degree)}
    for g in G.generators:
        if g not in have:
            gens.append(g)
            have = set(_bfs_closure(G.degree, gens, G.order()))
            if len(have) == G.order():
                break
    return tuple(gens)


def isomorphic_as_groups(G: PermGroup, H: PermGroup,
                         limit: int = DEFAULT_ISO_LIMIT) -> Optional[GroupHom]:
    """Search for a group isomorphism G -> H; None if the groups differ.

    Backtracks over generator images filtered by element order, closing the
    graph of each candidate to detect inconsistency early. Degrees of G and H
    may differ; only the abstract group structure is compared.
    """
    if G.order() > limit or H.order() > limit:
        raise ClosureLimitError(f"isomorphism search limited to order {limit}")
    if G.order() != H.order():
        return None
    g_orders = sorted(p.order() for p in G.elements())
    h_orders = sorted(p.order() for p in H.elements())
    if g_orders != h_orders:
        return None
    gens = _reduced_generators(G)
    if not gens:
        e = Permutation.identity(H.degree)
        return GroupHom(G, H, {Permutation.identity(G.degree): e})
    by_order: dict[int, list] = {}
    for p in H.elements():
        by_order.setdefault(p.order(), []).append(p)
    candidates = [by_order.get(g.order(), []) for g in gens]
    src = PermGroup(G.degree, gens, _elements=G.elements())
    for images in itertools.product(*candidates):
        mapping = _close_hom(src, H.degree, zip(gens, images))
        if mapping is None:
            continue
        if len(set(mapping.values())) == H.order():
            full = dict(mapping)
            return GroupHom(G, H, full)
    return None
