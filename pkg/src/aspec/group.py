"""Exhaustively enumerated permutation groups and standard subgroup operations.

Everything here is an exact set computation on fully enumerated element
lists: closure, commutator subgroups, derived and lower central series,
centralizers, normalizers, Sylow subgroups, quotients, exponents, and
p-group structure.  Groups and subgroups are immutable after construction
and safe to share read-only across workers; the canonical element order
(lexicographic on image tuples) makes every construction reproducible.
"""

from __future__ import annotations

import math
import random
import zlib
from collections import deque
from dataclasses import dataclass

from .perm import Permutation
from .report import Verdict

__all__ = [
    "DEFAULT_ELEMENT_CAP",
    "CapExceededError",
    "FiniteGroup",
    "Subgroup",
    "close_generators",
    "subgroup_from_elements",
    "generated_subgroup",
    "intersect_subgroups",
    "commutator",
    "commutator_subgroup",
    "series",
    "derived_term",
    "lower_central_term",
    "is_nilpotent",
    "centralizer",
    "normalizer",
    "sylow",
    "quotient",
    "QuotientMap",
    "exponent_and_orders",
    "p_group_facts",
    "PGroupFacts",
    "nilpotent_product_check",
    "set_product",
    "product_covers",
    "is_prime",
]

DEFAULT_ELEMENT_CAP = 200_000

_IMG = lambda p: p.images  # noqa: E731  (canonical sort key)


class CapExceededError(RuntimeError):
    """An enumeration would exceed the configured element cap."""

    def __init__(self, projected: int, cap: int, what: str = "enumeration"):
        super().__init__(
            f"{what} exceeds the element cap: at least {projected} elements, cap {cap}"
        )
        self.projected = projected
        self.cap = cap


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, int(n**0.5) + 1):
        if n % d == 0:
            return False
    return True


class FiniteGroup:
    """A fully enumerated subgroup of Sym(degree) in canonical element order.

    ``words[g]`` is a factorization of g over ``generators``: a tuple of
    generator indices whose left-to-right product (under ``*``) equals g.
    """

    __slots__ = ("degree", "generators", "elements", "element_set", "words", "_whole")

    def __init__(self, degree, generators, elements, words):
        self.degree = degree
        self.generators = tuple(generators)
        self.elements = tuple(sorted(elements, key=_IMG))
        self.element_set = frozenset(self.elements)
        self.words = words
        self._whole = None

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def identity(self) -> Permutation:
        return Permutation.identity(self.degree)

    @property
    def root(self) -> FiniteGroup:
        return self

    def __contains__(self, perm: Permutation) -> bool:
        return perm in self.element_set

    def __repr__(self) -> str:
        return f"FiniteGroup(degree={self.degree}, order={self.order})"

    def as_subgroup(self) -> Subgroup:
        """The whole group viewed as a subgroup of itself (cached)."""
        if self._whole is None:
            self._whole = Subgroup(self, self.elements, self.generators)
        return self._whole

    def to_record(self) -> dict:
        return {
            "degree": self.degree,
            "generators": [g.cycle_string() for g in self.generators],
        }

    @classmethod
    def from_record(cls, record: dict, cap: int = DEFAULT_ELEMENT_CAP) -> FiniteGroup:
        degree = record["degree"]
        gens = [Permutation.from_cycles(s, degree) for s in record["generators"]]
        return close_generators(degree, gens, cap=cap)


class Subgroup:
    """A subgroup of an ambient FiniteGroup, held as an explicit element set.

    ``generators`` is a witness generating set, not necessarily minimal.
    """

    __slots__ = ("parent", "elements", "element_set", "generators")

    def __init__(self, parent: FiniteGroup, elements, generators):
        self.parent = parent
        self.elements = tuple(sorted(elements, key=_IMG))
        self.element_set = frozenset(self.elements)
        self.generators = tuple(generators)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def degree(self) -> int:
        return self.parent.degree

    @property
    def identity(self) -> Permutation:
        return Permutation.identity(self.parent.degree)

    @property
    def root(self) -> FiniteGroup:
        return self.parent

    def __contains__(self, perm: Permutation) -> bool:
        return perm in self.element_set

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subgroup)
            and self.parent is other.parent
            and self.element_set == other.element_set
        )

    def __hash__(self) -> int:
        return hash((id(self.parent), self.element_set))

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, degree={self.degree})"


class _Closure:
    """Incremental subgroup closure; generators are added one at a time."""

    __slots__ = ("elements", "gens", "_identity")

    def __init__(self, degree: int):
        self._identity = Permutation.identity(degree)
        self.elements: set[Permutation] = {self._identity}
        self.gens: list[Permutation] = []

    def add(self, g: Permutation) -> bool:
        """Extend to the closure of the current set together with g.

        Returns True when g enlarged the subgroup.  The breadth-first sweep
        multiplies the frontier by every generator on both sides, which is
        complete because the existing element set is already a subgroup
        generated by ``gens``.
        """
        elems = self.elements
        if g in elems:
            return False
        self.gens.append(g)
        gens = self.gens
        elems.add(g)
        frontier = [g]
        while frontier:
            nxt = []
            for f in frontier:
                for h in gens:
                    for prod in (f * h, h * f):
                        if prod not in elems:
                            elems.add(prod)
                            nxt.append(prod)
            frontier = nxt
        return True

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, g: Permutation) -> bool:
        return g in self.elements


def close_generators(degree, generators, cap: int | None = DEFAULT_ELEMENT_CAP) -> FiniteGroup:
    """Enumerate the subgroup of Sym(degree) generated by ``generators``.

    Breadth-first closure from the identity, recording a factorization word
    per element.  Raises CapExceededError as soon as the enumeration passes
    ``cap``, reporting the count reached as a lower bound.
    """
    gens = tuple(generators)
    for g in gens:
        if g.degree != degree:
            raise ValueError(
                f"degree mismatch: generator {g.cycle_string()} has degree "
                f"{g.degree}, expected {degree}"
            )
    identity = Permutation.identity(degree)
    words: dict[Permutation, tuple[int, ...]] = {identity: ()}
    frontier = [identity]
    while frontier:
        nxt = []
        for e in frontier:
            w = words[e]
            for gi, g in enumerate(gens):
                prod = e * g
                if prod not in words:
                    words[prod] = w + (gi,)
                    nxt.append(prod)
                    if cap is not None and len(words) > cap:
                        raise CapExceededError(len(words), cap, "group closure")
        frontier = nxt
    return FiniteGroup(degree, gens, words.keys(), words)


def _root_of(group) -> FiniteGroup:
    return group.root


def _common_root(a, b) -> FiniteGroup:
    if a.root is not b.root:
        raise ValueError("subgroups do not share an ambient group")
    return a.root


def subgroup_from_elements(parent: FiniteGroup, elements, generators=None) -> Subgroup:
    """Wrap a closed element set as a Subgroup of ``parent``.

    When no generating set is supplied a greedy one is extracted by scanning
    the elements in canonical order; the scan also verifies closure.
    """
    elems = sorted(elements, key=_IMG)
    if generators is not None:
        return Subgroup(parent, elems, generators)
    if len(elems) == parent.order:
        return parent.as_subgroup()
    closure = _Closure(parent.degree)
    gens = []
    for x in elems:
        if x not in closure:
            closure.add(x)
            gens.append(x)
    if len(closure) != len(elems):
        raise ValueError(
            f"element set of size {len(elems)} is not closed "
            f"(closure has {len(closure)} elements)"
        )
    return Subgroup(parent, elems, gens)


def generated_subgroup(parent: FiniteGroup, gens) -> Subgroup:
    """The subgroup of ``parent`` generated by ``gens``."""
    closure = _Closure(parent.degree)
    added = []
    for g in gens:
        if g not in parent.element_set:
            raise ValueError(f"generator {g.cycle_string()} lies outside the ambient group")
        if closure.add(g):
            added.append(g)
    return Subgroup(parent, closure.elements, added)


def intersect_subgroups(a: Subgroup, b: Subgroup) -> Subgroup:
    root = _common_root(a, b)
    if a.order > b.order:
        a, b = b, a
    elems = [g for g in a.elements if g in b.element_set]
    return subgroup_from_elements(root, elems)


def commutator(x: Permutation, y: Permutation) -> Permutation:
    """The group commutator x^{-1} y^{-1} x y."""
    return x.inverse() * y.inverse() * x * y


def commutator_subgroup(h, k, exhaustive: bool = False) -> Subgroup:
    """The subgroup [H,K] generated by all commutators [x,y], x in H, y in K.

    Default mode computes the normal closure, inside <H,K>, of the
    commutators of generator pairs, which equals [H,K].  ``exhaustive``
    instead closes over all |H|*|K| commutators; it exists to cross-check
    the normal-closure route and is capped at 10^6 pairs.
    """
    root = _common_root(h, k)
    if exhaustive:
        if h.order * k.order > 10**6:
            raise CapExceededError(h.order * k.order, 10**6, "all-pairs commutator set")
        closure = _Closure(root.degree)
        added = []
        for x in h.elements:
            for y in k.elements:
                c = commutator(x, y)
                if closure.add(c):
                    added.append(c)
        return Subgroup(root, closure.elements, added)
    conjugators = tuple(h.generators) + tuple(k.generators)
    closure = _Closure(root.degree)
    added: list[Permutation] = []
    queue: deque[Permutation] = deque()
    for x in h.generators:
        for y in k.generators:
            c = commutator(x, y)
            if closure.add(c):
                added.append(c)
                queue.append(c)
    while queue:
        n = queue.popleft()
        for cg in conjugators:
            t = n.conjugate_by(cg)
            if closure.add(t):
                added.append(t)
                queue.append(t)
    return Subgroup(root, closure.elements, added)


def series(group, kind: str = "derived") -> list[Subgroup]:
    """Derived or lower central series, listed until it stabilizes.

    The first term is the group itself; the last term is the first one that
    would repeat (so nilpotent and soluble groups end at the trivial
    subgroup, and e.g. perfect groups consist of the single term G).
    """
    first = group if isinstance(group, Subgroup) else group.as_subgroup()
    terms = [first]
    while True:
        cur = terms[-1]
        if kind == "derived":
            nxt = commutator_subgroup(cur, cur)
        elif kind == "lower_central":
            nxt = commutator_subgroup(cur, first)
        else:
            raise ValueError(f"unknown series kind {kind!r}")
        if nxt.element_set == cur.element_set:
            return terms
        terms.append(nxt)


def derived_term(group, k: int) -> Subgroup:
    """The k-th derived subgroup, with early stop once the series stabilizes."""
    cur = group if isinstance(group, Subgroup) else group.as_subgroup()
    for _ in range(k):
        nxt = commutator_subgroup(cur, cur)
        if nxt.element_set == cur.element_set:
            return cur
        cur = nxt
    return cur


def lower_central_term(group, k: int) -> Subgroup:
    """The k-th lower central term (k >= 1), with early stop."""
    if k < 1:
        raise ValueError("lower central terms are indexed from 1")
    first = group if isinstance(group, Subgroup) else group.as_subgroup()
    cur = first
    for _ in range(k - 1):
        nxt = commutator_subgroup(cur, first)
        if nxt.element_set == cur.element_set:
            return cur
        cur = nxt
    return cur


def is_nilpotent(group) -> bool:
    return series(group, "lower_central")[-1].order == 1


def centralizer(group, perms) -> Subgroup:
    """Elements of the group commuting with every permutation in ``perms``.

    The permutations need not belong to the group, but must share its degree.
    """
    root = _root_of(group)
    ps = tuple(perms)
    for s in ps:
        if s.degree != root.degree:
            raise ValueError(
                f"degree mismatch: {s.cycle_string()} has degree {s.degree}, "
                f"group degree is {root.degree}"
            )
    elems = [g for g in group.elements if all(g * s == s * g for s in ps)]
    return subgroup_from_elements(root, elems)


def normalizer(group, sub: Subgroup) -> Subgroup:
    """Elements g of the group with g H g^{-1} = H."""
    root = _root_of(group)
    if not sub.element_set <= set(group.elements):
        raise ValueError("normalizer argument is not a subgroup of the group")
    hset = sub.element_set
    gens = sub.generators
    elems = [
        g for g in group.elements if all(h.conjugate_by(g) in hset for h in gens)
    ]
    return subgroup_from_elements(root, elems)


def _p_part(n: int, p: int) -> int:
    pp = 1
    while n % p == 0:
        n //= p
        pp *= p
    return pp


def _is_p_element(g: Permutation, p: int) -> bool:
    o = g.order()
    while o % p == 0:
        o //= p
    return o == 1


def sylow(group, p: int) -> Subgroup:
    """A Sylow p-subgroup, grown by the normalizer climb.

    Starting from the trivial subgroup, repeatedly adjoin the first (in
    canonical order) p-element of the normalizer that lies outside the
    current subgroup, until the full p-part of the order is reached.  The
    canonical order makes the result deterministic.  Returns the trivial
    subgroup when p does not divide the group order.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    root = _root_of(group)
    target = _p_part(group.order, p)
    closure = _Closure(root.degree)
    gens: list[Permutation] = []
    while len(closure) < target:
        if len(closure) == 1:
            candidates = group.elements
        else:
            current = Subgroup(root, closure.elements, gens)
            candidates = normalizer(group, current).elements
        for g in candidates:
            if g not in closure and _is_p_element(g, p):
                closure.add(g)
                gens.append(g)
                break
        else:  # pragma: no cover - impossible for a correct climb
            raise RuntimeError("Sylow climb found no p-element in the normalizer")
    return Subgroup(root, closure.elements, gens)


@dataclass
class QuotientMap:
    """A quotient group together with its element-level projection.

    ``project`` maps every ambient element to its image; ``section`` maps
    each quotient element back to the canonical (least) coset representative.
    """

    group: FiniteGroup
    project: dict
    section: dict

    def image_of(self, sub) -> Subgroup:
        elems = {self.project[g] for g in sub.elements}
        gens = [self.project[g] for g in sub.generators]
        return Subgroup(self.group, elems, _dedupe(gens))


def _dedupe(perms) -> list[Permutation]:
    seen = set()
    out = []
    for p in perms:
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def quotient(group: FiniteGroup, normal: Subgroup) -> QuotientMap:
    """The quotient G/N as a permutation group on its coset list.

    The projection is verified to be a surjective homomorphism with kernel
    exactly N.  Quotients by the trivial subgroup return the group itself
    with the identity projection rather than materializing the regular
    representation.
    """
    if normal.parent is not group:
        raise ValueError("subgroup does not live in the given group")
    for g in group.generators:
        for n in normal.generators:
            if n.conjugate_by(g) not in normal.element_set:
                raise ValueError(
                    f"subgroup is not normal: conjugating {n.cycle_string()} by "
                    f"{g.cycle_string()} leaves it"
                )
    if normal.order == 1:
        ident = {g: g for g in group.elements}
        return QuotientMap(group, ident, dict(ident))

    nset = normal.elements
    coset_index: dict[Permutation, int] = {}
    reps: list[Permutation] = []
    for g in group.elements:  # canonical order: reps are coset minima
        if g in coset_index:
            continue
        idx = len(reps)
        reps.append(g)
        for n in nset:
            coset_index[g * n] = idx
    count = len(reps)

    def project_of(g: Permutation) -> Permutation:
        return Permutation(tuple(coset_index[g * r] for r in reps))

    qgens = [project_of(g) for g in group.generators]
    qgroup = close_generators(count, qgens, cap=None)
    if qgroup.order != count:
        raise RuntimeError("quotient regular action has wrong order")  # pragma: no cover
    project = {g: project_of(g) for g in group.elements}
    section = {project[r]: r for r in reps}

    identity = qgroup.identity
    kernel = {g for g, img in project.items() if img == identity}
    if kernel != normal.element_set:
        raise RuntimeError("quotient projection kernel differs from N")  # pragma: no cover
    for g in group.elements:
        pg = project[g]
        for s in group.generators:
            if project[g * s] != pg * project[s]:  # pragma: no cover
                raise RuntimeError("quotient projection is not a homomorphism")
    return QuotientMap(qgroup, project, section)


def exponent_and_orders(group) -> tuple[int, dict]:
    """The group exponent and the order of every element."""
    orders = {g: g.order() for g in group.elements}
    return math.lcm(*orders.values()) if orders else 1, orders


@dataclass
class PGroupFacts:
    is_p_group: bool
    p: int
    is_powerful: bool | None = None
    frattini: Subgroup | None = None
    agemo: Subgroup | None = None


def p_group_facts(group, p: int) -> PGroupFacts:
    """p-group predicates: powerfulness, Frattini subgroup, first agemo.

    Powerful means [G,G] <= G^p for odd p and [G,G] <= G^4 for p = 2.
    For a p-group the Frattini subgroup equals G^p [G,G].  When the group is
    not a p-group only the flag is reported.
    """
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if _p_part(group.order, p) != group.order:
        return PGroupFacts(False, p)
    root = _root_of(group)
    sub = group if isinstance(group, Subgroup) else group.as_subgroup()
    agemo = subgroup_from_elements(
        root, _power_closure(root, sub, p)
    )
    derived = commutator_subgroup(sub, sub)
    if p == 2:
        fourth = subgroup_from_elements(root, _power_closure(root, sub, 4))
        powerful = derived.element_set <= fourth.element_set
    else:
        powerful = derived.element_set <= agemo.element_set
    frattini = generated_subgroup(root, list(agemo.generators) + list(derived.generators))
    return PGroupFacts(True, p, powerful, frattini, agemo)


def _power_closure(root: FiniteGroup, sub, k: int) -> set[Permutation]:
    closure = _Closure(root.degree)
    for g in sub.elements:
        closure.add(g**k)
    return closure.elements


def set_product(parts, identity: Permutation) -> frozenset:
    """The set product P_1 P_2 ... P_t of element collections, in order."""
    acc = {identity}
    for part in parts:
        acc = {a * b for a in acc for b in part}
    return frozenset(acc)


def product_covers(parts, target, identity: Permutation, label: str) -> Verdict:
    """Check that the ordered set product of ``parts`` equals ``target``.

    The claim is order independent, so one deterministic random reordering
    (seeded from ``label``) is checked as well.
    """
    target_set = target if isinstance(target, frozenset) else frozenset(target)
    part_elems = [tuple(p.elements) if hasattr(p, "elements") else tuple(p) for p in parts]
    orders = [("supplied", part_elems)]
    shuffled = list(part_elems)
    random.Random(zlib.crc32(label.encode())).shuffle(shuffled)
    orders.append(("shuffled", shuffled))
    for name, ordering in orders:
        prod = set_product(ordering, identity)
        if prod != target_set:
            missing = sorted(target_set - prod, key=_IMG)
            extra = sorted(prod - target_set, key=_IMG)
            if missing:
                w = f"{name} product misses {missing[0].cycle_string()}"
            else:
                w = f"{name} product contains stray {extra[0].cycle_string()}"
            return Verdict.fail(w, order=name)
    return Verdict.ok()


def _generates(parts_elements, target, root: FiniteGroup) -> tuple[bool, Permutation | None]:
    """Whether the union of the given element collections generates ``target``.

    Scans candidates in the supplied order with incremental closure and
    stops as soon as the target size is reached.
    """
    closure = _Closure(root.degree)
    tsize = len(target.element_set)
    for part in parts_elements:
        for x in part:
            if x not in closure:
                closure.add(x)
                if len(closure) >= tsize:
                    break
        if len(closure) >= tsize:
            break
    if closure.elements == set(target.element_set):
        return True, None
    missing = sorted(target.element_set - closure.elements, key=_IMG)
    return False, missing[0] if missing else None


def generates(parts, target) -> tuple[bool, Permutation | None]:
    """Public wrapper: do the given subgroups generate ``target``?"""
    root = _root_of(target)
    return _generates([p.elements for p in parts], target, root)


def nilpotent_product_check(group, parts) -> Verdict:
    """Product decomposition of a nilpotent group from generating subgroups.

    Given subgroups whose intersections with every lower central term
    generate that term, the group must equal the ordered set product of the
    subgroups.  Both the hypothesis (for every term) and the product are
    verified; a non-nilpotent group yields a not-applicable verdict.
    """
    root = _root_of(group)
    target = group if isinstance(group, Subgroup) else group.as_subgroup()
    terms = series(target, "lower_central")
    if terms[-1].order != 1:
        return Verdict.not_applicable(
            f"group of order {target.order} is not nilpotent"
        )
    for i, term in enumerate(terms, start=1):
        slices = [
            [x for x in part.elements if x in term.element_set] for part in parts
        ]
        ok, missing = _generates(slices, term, root)
        if not ok:
            return Verdict.fail(
                f"lower central term {i} is not generated by its part "
                f"intersections; missing {missing.cycle_string()}"
            )
    verdict = product_covers(
        parts, target.element_set, root.identity, "nilpotent_product"
    )
    if not verdict.passed:
        return verdict
    return Verdict.ok(part_orders=[p.order for p in parts])
