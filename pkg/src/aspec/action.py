"""Coprime actions of elementary abelian groups on finite permutation groups.

The acting group of order q^r is always materialized abstractly as the
vector space F_q^r with a fixed basis, so its subgroups are subspaces and
enumerating them is linear algebra.  An action is specified either by r
permutations that act by conjugation, or by explicit image maps on the
target's generators; both are validated exhaustively at build time.
Faithfulness is not required: a nontrivial kernel only triggers a warning.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .perm import Permutation
from .report import Verdict
from .group import (
    CapExceededError,
    FiniteGroup,
    Subgroup,
    close_generators,
    is_prime,
    normalizer,
    quotient,
    subgroup_from_elements,
    sylow,
    _generates,
)

__all__ = [
    "ActionValidationError",
    "KernelWarning",
    "VectorSubspace",
    "ElementaryAbelianGroup",
    "CoprimeAction",
    "build_action",
    "fixed_point_generation_check",
    "quotient_centralizer_check",
]

INVARIANT_SYLOW_CONJUGATE_CAP = 100_000


class ActionValidationError(ValueError):
    """An action specification violates one of the structural requirements."""


class KernelWarning(UserWarning):
    """The acting group has a nontrivial kernel on the target."""


# ---------------------------------------------------------------------------
# vectors and subspaces over F_q


def _vec_add(u, v, q):
    return tuple((a + b) % q for a, b in zip(u, v))


def _vec_scale(c, v, q):
    return tuple((c * a) % q for a in v)


def _echelon(vectors, q) -> tuple[tuple[int, ...], ...]:
    """Reduced row echelon basis of the span of ``vectors`` over F_q."""
    rows = [list(v) for v in vectors]
    basis: list[list[int]] = []
    for row in rows:
        for b in basis:
            pivot = next(i for i, x in enumerate(b) if x)
            if row[pivot]:
                c = row[pivot]
                row = [(x - c * y) % q for x, y in zip(row, b)]
        if any(row):
            pivot = next(i for i, x in enumerate(row) if x)
            inv = pow(row[pivot], q - 2, q)
            basis.append([(inv * x) % q for x in row])
    basis.sort(key=lambda b: next(i for i, x in enumerate(b) if x))
    # back-substitute to reduced form
    for i, b in enumerate(basis):
        for j, other in enumerate(basis):
            if i == j:
                continue
            pivot = next(k for k, x in enumerate(b) if x)
            if other[pivot]:
                c = other[pivot]
                basis[j] = [(x - c * y) % q for x, y in zip(other, b)]
    return tuple(tuple(b) for b in basis)


@dataclass(frozen=True)
class VectorSubspace:
    """A subspace of F_q^r, the subgroup model for the acting group."""

    q: int
    r: int
    basis: tuple[tuple[int, ...], ...]
    vectors: frozenset

    @classmethod
    def span(cls, q: int, r: int, vectors) -> VectorSubspace:
        basis = _echelon(vectors, q)
        elems = {(0,) * r}
        for b in basis:
            elems = {
                _vec_add(v, _vec_scale(c, b, q), q) for v in elems for c in range(q)
            }
        return cls(q, r, basis, frozenset(elems))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def order(self) -> int:
        return self.q**self.dim

    @property
    def index(self) -> int:
        return self.q ** (self.r - self.dim)

    def contains(self, v) -> bool:
        return v in self.vectors

    def sort_key(self) -> tuple:
        return (self.dim, tuple(sorted(self.vectors)))

    def label(self) -> str:
        return "<" + ",".join("".join(map(str, b)) for b in self.basis) + ">"


@dataclass(frozen=True)
class ElementaryAbelianGroup:
    """The group (Z/q)^r as the vector space F_q^r."""

    q: int
    r: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise ActionValidationError(f"{self.q} is not prime")
        if self.r < 1:
            raise ActionValidationError("rank must be at least 1")

    @property
    def order(self) -> int:
        return self.q**self.r

    @property
    def zero(self) -> tuple:
        return (0,) * self.r

    def elements(self) -> list[tuple]:
        out = [()]
        for _ in range(self.r):
            out = [v + (c,) for v in out for c in range(self.q)]
        return sorted(out)

    def nontrivial(self) -> list[tuple]:
        return [v for v in self.elements() if any(v)]

    def basis(self) -> list[tuple]:
        return [
            tuple(1 if j == i else 0 for j in range(self.r)) for i in range(self.r)
        ]

    def maximal_subgroups(self) -> tuple[VectorSubspace, ...]:
        """The subgroups of index q: hyperplanes, in canonical order."""
        q, r = self.q, self.r
        normals = []
        for v in self.elements():
            if not any(v):
                continue
            first = next(x for x in v if x)
            if first == 1:  # normalized representative per projective point
                normals.append(v)
        subs = []
        for n in normals:
            vecs = [
                v for v in self.elements() if sum(a * b for a, b in zip(v, n)) % q == 0
            ]
            subs.append(VectorSubspace.span(q, r, vecs))
        subs.sort(key=VectorSubspace.sort_key)
        expected = (q**r - 1) // (q - 1)
        assert len(subs) == expected
        return tuple(subs)

    def all_subspaces(self) -> tuple[VectorSubspace, ...]:
        """Every subspace, found by breadth-first basis extension."""
        zero = VectorSubspace.span(self.q, self.r, [])
        seen = {zero.vectors: zero}
        frontier = [zero]
        while frontier:
            nxt = []
            for space in frontier:
                for v in self.elements():
                    if any(v) and v not in space.vectors:
                        bigger = VectorSubspace.span(
                            self.q, self.r, list(space.basis) + [v]
                        )
                        if bigger.vectors not in seen:
                            seen[bigger.vectors] = bigger
                            nxt.append(bigger)
            frontier = nxt
        return tuple(sorted(seen.values(), key=VectorSubspace.sort_key))


def format_vector(v) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


# ---------------------------------------------------------------------------
# the action itself


class CoprimeAction:
    """A validated action of (Z/q)^r by automorphisms on a coprime group.

    ``auts`` maps every vector of the acting group to a full element-level
    automorphism dictionary of the target.  Instances are immutable after
    validation apart from internal memoization caches.
    """

    def __init__(self, target, acting_group, generator_auts, source, _validate=True):
        self.target: FiniteGroup = target
        self.acting_group: ElementaryAbelianGroup = acting_group
        self.generator_auts: tuple[dict, ...] = tuple(generator_auts)
        self.source = source
        self.q = acting_group.q
        self.r = acting_group.r
        self.auts: dict[tuple, dict] = {}
        self._fixed_cache: dict = {}
        self._sylow_cache: dict = {}
        self._quotient_cache: dict = {}
        self._family_cache: dict = {}
        self._series_cache: dict = {}
        self._build_full_auts()
        if _validate:
            self._validate()
        self.faithful = self._kernel_dimension() == 0
        if _validate and not self.faithful:
            warnings.warn(
                f"action of order {acting_group.order} has a nontrivial kernel",
                KernelWarning,
                stacklevel=3,
            )

    # -- construction ------------------------------------------------------

    def _build_full_auts(self):
        q = self.q
        gens = self.target.generators
        elements = self.target.elements
        # powers of each generator automorphism, as dicts
        power_tables = []
        for aut in self.generator_auts:
            powers = [{g: g for g in elements}, dict(aut)]
            for _ in range(2, q):
                last = powers[-1]
                powers.append({g: aut[last[g]] for g in elements})
            power_tables.append(powers)
        for v in self.acting_group.elements():
            comp = None
            for i, c in enumerate(v):
                if c == 0:
                    continue
                table = power_tables[i][c]
                comp = table if comp is None else {g: table[comp[g]] for g in elements}
            if comp is None:
                comp = {g: g for g in elements}
            self.auts[v] = comp
        del power_tables
        self._gen_list = gens

    def _validate(self):
        q, target = self.q, self.target
        if math.gcd(q, target.order) != 1:
            raise ActionValidationError(
                f"coprimality violated: gcd({q}, |G|={target.order}) != 1"
            )
        gens = target.generators
        for i, aut in enumerate(self.generator_auts):
            if set(aut.keys()) != set(target.elements):
                raise ActionValidationError(
                    f"generator image {i} is not defined on the whole group"
                )
            if len(set(aut.values())) != target.order or not all(
                v in target.element_set for v in aut.values()
            ):
                raise ActionValidationError(
                    f"generator image {i} is not a bijection of the group"
                )
            for g in target.elements:
                for s in gens:
                    if aut[g * s] != aut[g] * aut[s]:
                        raise ActionValidationError(
                            f"generator image {i} is not an automorphism: breaks at "
                            f"x={g.cycle_string()}, y={s.cycle_string()}"
                        )
            # order divides q: q prime, so the q-th power must be the identity
            img = {s: s for s in gens}
            for _ in range(q):
                img = {s: aut[img[s]] for s in gens}
            for s in gens:
                if img[s] != s:
                    raise ActionValidationError(
                        f"generator image {i} order does not divide q={q} "
                        f"(witness {s.cycle_string()})"
                    )
        for i in range(len(self.generator_auts)):
            for j in range(i + 1, len(self.generator_auts)):
                a, b = self.generator_auts[i], self.generator_auts[j]
                for s in gens:
                    if a[b[s]] != b[a[s]]:
                        raise ActionValidationError(
                            f"generator images {i} and {j} do not commute "
                            f"(witness {s.cycle_string()})"
                        )
        # homomorphism across the full multiplication table of the acting group
        vectors = self.acting_group.elements()
        for a in vectors:
            for b in vectors:
                ab = _vec_add(a, b, q)
                fa, fb, fab = self.auts[a], self.auts[b], self.auts[ab]
                for s in gens:
                    if fab[s] != fa[fb[s]]:  # pragma: no cover - internal consistency
                        raise ActionValidationError(
                            f"induced map is not a homomorphism at {a}+{b}"
                        )

    def _kernel_dimension(self) -> int:
        gens = self.target.generators
        kernel = [
            v
            for v in self.acting_group.elements()
            if all(self.auts[v][s] == s for s in gens)
        ]
        return round(math.log(len(kernel), self.q)) if len(kernel) > 1 else 0

    # -- queries -------------------------------------------------------------

    def apply(self, vector, g: Permutation) -> Permutation:
        return self.auts[vector][g]

    def maximal_subgroups(self) -> tuple[VectorSubspace, ...]:
        return self.acting_group.maximal_subgroups()

    def all_subspaces(self) -> tuple[VectorSubspace, ...]:
        return self.acting_group.all_subspaces()

    def subgroups_of_acting_group(self, mode: str = "maximal"):
        if mode == "maximal":
            return self.maximal_subgroups()
        if mode == "all":
            return self.all_subspaces()
        raise ValueError(f"unknown mode {mode!r}")

    def _basis_for(self, selector) -> tuple:
        if isinstance(selector, VectorSubspace):
            return selector.basis
        if isinstance(selector, tuple) and all(isinstance(x, int) for x in selector):
            return _echelon([selector], self.q)
        return _echelon(list(selector), self.q)

    def fixed_points(self, selector, within=None) -> Subgroup:
        """The joint fixed-point subgroup of a vector, subspace, or vector set.

        Fixing a set of acting elements is the same as fixing its span, so
        results are cached by the spanned subspace.
        """
        basis = self._basis_for(selector)
        if within is None:
            cached = self._fixed_cache.get(basis)
            if cached is not None:
                return cached
            scope = self.target.elements
        else:
            scope = within.elements
        auts = [self.auts[b] for b in basis]
        elems = [g for g in scope if all(a[g] == g for a in auts)]
        sub = subgroup_from_elements(self.target, elems)
        if within is None:
            self._fixed_cache[basis] = sub
        return sub

    def is_invariant(self, sub) -> bool:
        """Whether every acting generator maps the subgroup onto itself."""
        eset = sub.element_set if hasattr(sub, "element_set") else frozenset(sub)
        return all(
            all(aut[x] in eset for x in eset) for aut in self.generator_auts
        )

    def invariant_sylow(self, ambient, p: int) -> Subgroup:
        """An invariant Sylow p-subgroup of an invariant ambient subgroup.

        One Sylow subgroup is computed by the normalizer climb and its
        conjugates are enumerated via coset representatives of the
        normalizer, filtering for invariance.  Existence is guaranteed by
        coprimality, so running out of conjugates is an internal error.
        """
        amb = ambient if isinstance(ambient, Subgroup) else ambient.as_subgroup()
        if not self.is_invariant(amb):
            raise ValueError("ambient subgroup is not invariant under the action")
        key = (amb.element_set, p)
        cached = self._sylow_cache.get(key)
        if cached is not None:
            return cached
        base = sylow(amb, p)
        if base.order == 1 or base.order == amb.order:
            self._sylow_cache[key] = base
            return base
        norm = normalizer(amb, base)
        count = amb.order // norm.order
        if count > INVARIANT_SYLOW_CONJUGATE_CAP:
            raise CapExceededError(
                count, INVARIANT_SYLOW_CONJUGATE_CAP, "Sylow conjugate enumeration"
            )
        covered: set[Permutation] = set()
        norm_elements = norm.elements
        for g in amb.elements:
            if g in covered:
                continue
            for n in norm_elements:
                covered.add(g * n)
            conj_elems = frozenset(x.conjugate_by(g) for x in base.element_set)
            if all(
                all(aut[x] in conj_elems for x in conj_elems)
                for aut in self.generator_auts
            ):
                result = subgroup_from_elements(
                    self.target,
                    conj_elems,
                    [x.conjugate_by(g) for x in base.generators],
                )
                self._sylow_cache[key] = result
                return result
        raise RuntimeError(  # pragma: no cover - contradicts coprime Sylow theory
            "no invariant Sylow conjugate found; this indicates an implementation bug"
        )

    def quotient_action(self, normal: Subgroup):
        """The induced action on the quotient by an invariant normal subgroup.

        Returns (action on G/N, quotient map).  Cached per subgroup since
        several checks walk the same series.
        """
        cached = self._quotient_cache.get(normal.element_set)
        if cached is not None:
            return cached
        if not self.is_invariant(normal):
            raise ValueError("normal subgroup is not invariant under the action")
        qmap = quotient(self.target, normal)
        project = qmap.project
        qgens = []
        for aut in self.generator_auts:
            qaut: dict[Permutation, Permutation] = {}
            for g, img in project.items():
                qaut[img] = project[aut[g]]
            qgens.append(qaut)
        induced = CoprimeAction(
            qmap.group, self.acting_group, qgens, ("induced", None), _validate=False
        )
        self._quotient_cache[normal.element_set] = (induced, qmap)
        return induced, qmap


def build_action(target: FiniteGroup, q: int, r: int, *, conjugators=None,
                 generator_images=None) -> CoprimeAction:
    """Validate and build a coprime action of (Z/q)^r on ``target``.

    Exactly one of the two specification modes must be supplied:

    - ``conjugators``: r permutations of the target's degree, each acting by
      conjugation; they must normalize the target.
    - ``generator_images``: r maps, each a list of (source, image) pairs
      covering the target's generators exactly; images are extended to the
      whole group along recorded factorization words and the homomorphism
      property is then verified exhaustively.
    """
    acting = ElementaryAbelianGroup(q, r)
    if (conjugators is None) == (generator_images is None):
        raise ActionValidationError(
            "exactly one of conjugators/generator_images must be given"
        )
    if conjugators is not None:
        conjugators = list(conjugators)
        if len(conjugators) != r:
            raise ActionValidationError(
                f"expected {r} conjugating permutations, got {len(conjugators)}"
            )
        gen_auts = []
        for i, c in enumerate(conjugators):
            if c.degree != target.degree:
                raise ActionValidationError(
                    f"conjugator {i} has degree {c.degree}, target degree is "
                    f"{target.degree}"
                )
            for s in target.generators:
                if s.conjugate_by(c) not in target.element_set:
                    raise ActionValidationError(
                        f"conjugator {i} does not normalize the group "
                        f"(witness {s.cycle_string()})"
                    )
            gen_auts.append({g: g.conjugate_by(c) for g in target.elements})
        source = ("conjugation", tuple(conjugators))
    else:
        maps = list(generator_images)
        if len(maps) != r:
            raise ActionValidationError(
                f"expected {r} generator image maps, got {len(maps)}"
            )
        gen_auts = []
        for i, pairs in enumerate(maps):
            mapping = {src: dst for src, dst in pairs}
            if set(mapping.keys()) != set(target.generators):
                raise ActionValidationError(
                    f"image map {i} must cover the group generators exactly"
                )
            for src, dst in mapping.items():
                if dst not in target.element_set:
                    raise ActionValidationError(
                        f"image map {i} sends {src.cycle_string()} outside the group"
                    )
            aut = {}
            for g in target.elements:
                img = target.identity
                for gi in target.words[g]:
                    img = img * mapping[target.generators[gi]]
                aut[g] = img
            gen_auts.append(aut)
        source = ("images", tuple(tuple(pairs) for pairs in maps))
    return CoprimeAction(target, acting, gen_auts, source)


# ---------------------------------------------------------------------------
# the two coprime-action checks


def fixed_point_generation_check(action: CoprimeAction, sub) -> Verdict:
    """An invariant subgroup is generated by its maximal-subgroup centralizers.

    Checks H = <C_H(A_1), ..., C_H(A_s)> over the maximal subgroups A_i of
    the acting group, and, when H is nilpotent, the ordered set-product
    decomposition H = prod_i C_H(A_i) as well.  Requires rank >= 2.
    """
    if action.r < 2:
        return Verdict.not_applicable("acting group has rank < 2")
    target = sub if isinstance(sub, Subgroup) else sub.as_subgroup()
    if not action.is_invariant(target):
        raise ValueError("subgroup is not invariant under the action")
    parts = [
        action.fixed_points(space, within=target)
        for space in action.maximal_subgroups()
    ]
    ok, missing = _generates([p.elements for p in parts], target, action.target)
    if not ok:
        return Verdict.fail(
            f"centralizers do not generate; missing {missing.cycle_string()}",
            part_orders=[p.order for p in parts],
        )
    values = {"order": target.order, "part_orders": [p.order for p in parts]}
    from .group import is_nilpotent, product_covers

    if is_nilpotent(target):
        verdict = product_covers(
            parts, target.element_set, action.target.identity, "fixed_point_product"
        )
        if not verdict.passed:
            return verdict
        values["nilpotent_product"] = True
    else:
        values["nilpotent_product"] = False
    return Verdict.ok(**values)


def quotient_centralizer_check(action: CoprimeAction, normal: Subgroup) -> Verdict:
    """Fixed points commute with quotients: C_{G/N}(a) = image of C_G(a).

    Verified for the full acting group and for every nontrivial acting
    element, on the induced action on G/N.
    """
    induced, qmap = action.quotient_action(normal)
    selectors = [("A", action.acting_group.basis())]
    selectors += [
        (format_vector(v), [v]) for v in action.acting_group.nontrivial()
    ]
    for label, vectors in selectors:
        lhs = induced.fixed_points(vectors).element_set
        fixed = action.fixed_points(vectors)
        rhs = frozenset(qmap.project[g] for g in fixed.elements)
        if lhs != rhs:
            diff = sorted(lhs.symmetric_difference(rhs), key=lambda p: p.images)
            return Verdict.fail(
                f"equality fails for {label} at coset {diff[0].cycle_string()}",
                index=qmap.group.order,
            )
    return Verdict.ok(index=qmap.group.order)
