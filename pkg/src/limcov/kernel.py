"""Exact arithmetic and Cantor-space set algebra.

Every measure, threshold and function value in this package is a
`fractions.Fraction`; there is no floating point anywhere.  Subsets of Cantor
space (infinite binary sequences) are finite unions of cylinders, where the
cylinder of a binary word x is the set of all sequences extending x and has
measure 2^-len(x) under the uniform measure.

Cylinder sets are kept in a canonical prefix-free form: no listed word is a
prefix of another, and sibling words x0, x1 are never both listed (they merge
into x).  Two canonical sets denote the same point set iff their word sets are
equal, so set equality is structural equality.

All values here are immutable after construction and safe to share across
threads; the operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

__all__ = [
    "CylinderSet",
    "EMPTY_WORD_TEXT",
    "InputError",
    "RealInterval",
    "cell_span",
    "format_rational",
    "is_word",
    "parse_rational",
    "word_from_text",
    "word_to_text",
    "words_up_to",
]

ZERO = Fraction(0)
ONE = Fraction(1)

# The root word (whole space) is the empty string in memory and "e" on disk.
EMPTY_WORD_TEXT = "e"


class InputError(ValueError):
    """A precondition on library input is violated."""


def parse_rational(text: str) -> Fraction:
    """Parse ``p/q`` or decimal notation into an exact Fraction."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"not a rational number: {text!r}") from None


def format_rational(value: Fraction) -> str:
    """Render as ``p/q``, or a bare integer when the denominator is 1."""
    return str(value)


def is_word(text: str) -> bool:
    """True for (possibly empty) strings over the alphabet {0, 1}."""
    return all(ch in "01" for ch in text)


def word_to_text(word: str) -> str:
    return word if word else EMPTY_WORD_TEXT


def word_from_text(text: str) -> str:
    if text == EMPTY_WORD_TEXT:
        return ""
    if text and is_word(text):
        return text
    raise InputError(f"not a binary word: {text!r}")


def words_up_to(depth: int) -> list[str]:
    """All binary words of length <= depth in length-lexicographic order."""
    if depth < 0:
        raise InputError("depth must be non-negative")
    out = [""]
    for length in range(1, depth + 1):
        out.extend(format(i, f"0{length}b") for i in range(1 << length))
    return out


def cell_span(word: str, depth: int) -> tuple[int, int]:
    """Start index and number of depth-level cells below ``word``.

    Cells of length ``depth`` are numbered by their value as binary
    integers, so the cylinder of ``word`` occupies a contiguous index range.
    """
    if len(word) > depth:
        raise InputError(f"word {word!r} longer than depth {depth}")
    span = 1 << (depth - len(word))
    base = (int(word, 2) << (depth - len(word))) if word else 0
    return base, span


_ROOT_WORDS = frozenset(("",))


def _canon(words: frozenset[str]) -> frozenset[str]:
    # Prefix-free antichain with maximal merging, computed trie-wise: a word
    # absorbs all its listed extensions, and full sibling subtrees merge.
    if not words:
        return frozenset()
    if "" in words:
        return _ROOT_WORDS
    zeros = _canon(frozenset(w[1:] for w in words if w[0] == "0"))
    ones = _canon(frozenset(w[1:] for w in words if w[0] == "1"))
    if zeros == _ROOT_WORDS and ones == _ROOT_WORDS:
        return _ROOT_WORDS
    merged = {"0" + w for w in zeros}
    merged.update("1" + w for w in ones)
    return frozenset(merged)


class CylinderSet:
    """A finite union of cylinders in canonical prefix-free form."""

    __slots__ = ("words",)

    def __init__(self, words: Iterable[str] = ()):
        collected = frozenset(words)
        for w in collected:
            if not is_word(w):
                raise InputError(f"not a binary word: {w!r}")
        self.words: frozenset[str] = _canon(collected)

    @classmethod
    def empty(cls) -> "CylinderSet":
        return cls()

    @classmethod
    def full(cls) -> "CylinderSet":
        return cls(("",))

    def __bool__(self) -> bool:
        return bool(self.words)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, CylinderSet):
            return self.words == other.words
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.words)

    def __repr__(self) -> str:
        inside = ", ".join(word_to_text(w) for w in sorted(self.words))
        return f"CylinderSet({{{inside}}})"

    @property
    def depth(self) -> int:
        return max((len(w) for w in self.words), default=0)

    def measure(self) -> Fraction:
        """Exact uniform measure: sum of 2^-len(w) over the listed words."""
        return sum((Fraction(1, 1 << len(w)) for w in self.words), ZERO)

    def union(self, other: "CylinderSet") -> "CylinderSet":
        return CylinderSet(self.words | other.words)

    def intersect(self, other: "CylinderSet") -> "CylinderSet":
        # For single cylinders [x] and [y] the intersection is the cylinder
        # of the longer word when one extends the other, empty otherwise;
        # distribute over both antichains.
        out = set()
        for a in self.words:
            for b in other.words:
                if a.startswith(b):
                    out.add(a)
                elif b.startswith(a):
                    out.add(b)
        return CylinderSet(out)

    def subset(self, other: "CylinderSet") -> bool:
        """Point-set inclusion; equivalent to ``self & other == self``."""
        return self.intersect(other) == self

    __or__ = union
    __and__ = intersect
    __le__ = subset

    def cells(self, depth: int) -> frozenset[str]:
        """The length-``depth`` words whose cylinders partition this set."""
        if depth < self.depth:
            raise InputError(f"depth {depth} below set depth {self.depth}")
        out = []
        for w in self.words:
            pad = depth - len(w)
            out.extend(w + format(i, f"0{pad}b") if pad else w for i in range(1 << pad))
        return frozenset(out)


@dataclass(frozen=True)
class RealInterval:
    """An open interval (lo, hi) of the real line with rational endpoints."""

    lo: Fraction
    hi: Fraction

    @property
    def is_empty(self) -> bool:
        return self.hi <= self.lo

    def measure(self) -> Fraction:
        return max(ZERO, self.hi - self.lo)

    def contains(self, x: Fraction) -> bool:
        return self.lo < x < self.hi

    def __repr__(self) -> str:
        return f"({self.lo}, {self.hi})"
