"""Permutations of {1..n} with disjoint-cycle notation.

Images are stored 0-based internally; all cycle strings are 1-based.
Instances are immutable and hashable, and the canonical element order used
throughout the package is the lexicographic order of the image tuples.
"""

from __future__ import annotations

import math
import re

__all__ = ["Permutation", "parse_cycles", "format_cycles"]

_CYCLE = re.compile(r"\(\s*((?:\d+[\s,]*)*)\)")


class Permutation:
    """A bijection of {1..n}, stored as a tuple of 0-based images."""

    __slots__ = ("images", "_hash")

    def __init__(self, images: tuple[int, ...]):
        self.images = images
        self._hash = hash(images)

    @classmethod
    def identity(cls, degree: int) -> Permutation:
        return cls(tuple(range(degree)))

    @classmethod
    def from_images(cls, images) -> Permutation:
        """Build from an iterable of 0-based images, validating bijectivity."""
        imgs = tuple(images)
        if sorted(imgs) != list(range(len(imgs))):
            raise ValueError(f"not a permutation of 0..{len(imgs) - 1}: {imgs!r}")
        return cls(imgs)

    @classmethod
    def from_cycles(cls, text: str, degree: int) -> Permutation:
        return parse_cycles(text, degree)

    @property
    def degree(self) -> int:
        return len(self.images)

    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self.images))

    def __mul__(self, other: Permutation) -> Permutation:
        # (p * q)(x) = p(q(x)): the right factor acts first.
        a = self.images
        return Permutation(tuple(a[j] for j in other.images))

    def __pow__(self, k: int) -> Permutation:
        if k < 0:
            return self.inverse() ** (-k)
        result = Permutation.identity(len(self.images))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> Permutation:
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def conjugate_by(self, g: Permutation) -> Permutation:
        """Return g * self * g^{-1} in a single pass."""
        gi = g.images
        out = [0] * len(gi)
        for i, v in enumerate(self.images):
            out[gi[i]] = gi[v]
        return Permutation(tuple(out))

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles())) if self.images else 1

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles as 1-based tuples, each starting at its least point."""
        seen = [False] * len(self.images)
        out = []
        for start in range(len(self.images)):
            if seen[start] or self.images[start] == start:
                continue
            cyc = [start]
            seen[start] = True
            j = self.images[start]
            while j != start:
                seen[j] = True
                cyc.append(j)
                j = self.images[j]
            out.append(tuple(p + 1 for p in cyc))
        return out

    def cycle_string(self) -> str:
        return format_cycles(self)

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: Permutation) -> bool:
        return self.images < other.images

    def __le__(self, other: Permutation) -> bool:
        return self.images <= other.images

    def __repr__(self) -> str:
        return f"Permutation({self.cycle_string()!r}, degree={self.degree})"

    def __str__(self) -> str:
        return self.cycle_string()


def format_cycles(perm: Permutation) -> str:
    """Serialize as a disjoint-cycle string; the identity is "()"."""
    cycles = perm.cycles()
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(p) for p in cyc) + ")" for cyc in cycles)


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse a disjoint-cycle string over points 1..degree.

    Accepts whitespace or commas between points.  "()" denotes the identity.
    Repeated points (even across cycles) are rejected.
    """
    stripped = text.strip()
    if not stripped:
        raise ValueError("empty permutation string (the identity is written '()')")
    rest = _CYCLE.sub("", stripped)
    if rest.strip():
        raise ValueError(f"could not parse permutation {text!r}")
    images = list(range(degree))
    seen: set[int] = set()
    for match in _CYCLE.finditer(stripped):
        body = match.group(1).strip()
        if not body:
            continue
        points = [int(tok) for tok in re.split(r"[\s,]+", body)]
        for p in points:
            if not 1 <= p <= degree:
                raise ValueError(f"point {p} outside 1..{degree} in {text!r}")
            if p in seen:
                raise ValueError(f"point {p} repeated in {text!r}")
            seen.add(p)
        for i, p in enumerate(points):
            images[p - 1] = points[(i + 1) % len(points)] - 1
    return Permutation(tuple(images))
