"""Binary token strings stored as run lengths.

Instances such as ``0^s 1 0^k 1`` with ``s`` in the hundreds of thousands show
up all over the constructions, so a string is kept as a tuple of maximal runs.
Externally a ``Bits`` behaves like an immutable sequence of 0/1 ints.
"""

from __future__ import annotations

from itertools import groupby
from typing import Iterable, Iterator, Sequence, Union

BitsLike = Union["Bits", str, Sequence[int]]


class Bits:
    """Immutable binary string.

    ``runs`` holds ``(bit, length)`` pairs; adjacent runs never share a bit
    and no run is empty, so the representation is canonical and can be used
    directly for equality and hashing.
    """

    __slots__ = ("_runs", "_len", "_hash")

    def __init__(self, runs: Iterable[tuple[int, int]] = ()):
        merged: list[list[int]] = []
        for bit, n in runs:
            if bit not in (0, 1):
                raise ValueError(f"not a bit: {bit!r}")
            if n < 0:
                raise ValueError("negative run length")
            if n == 0:
                continue
            if merged and merged[-1][0] == bit:
                merged[-1][1] += n
            else:
                merged.append([bit, n])
        self._runs = tuple((b, n) for b, n in merged)
        self._len = sum(n for _, n in self._runs)
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def of(cls, value: BitsLike) -> "Bits":
        if isinstance(value, Bits):
            return value
        if isinstance(value, str):
            for ch in value:
                if ch not in "01":
                    raise ValueError(f"not a binary string: {value!r}")
            return cls((int(k), len(list(g))) for k, g in groupby(value))
        return cls((int(k), len(list(g))) for k, g in groupby(value))

    @classmethod
    def zeros(cls, n: int) -> "Bits":
        return cls(((0, n),))

    @classmethod
    def ones(cls, n: int) -> "Bits":
        return cls(((1, n),))

    @classmethod
    def pattern(cls, *parts: tuple[int, int]) -> "Bits":
        """``Bits.pattern((0, s), (1, 1), (0, k))`` is ``0^s 1 0^k``."""
        return cls(parts)

    # sequence protocol --------------------------------------------------

    @property
    def runs(self) -> tuple[tuple[int, int], ...]:
        return self._runs

    def __len__(self) -> int:
        return self._len

    def __iter__(self) -> Iterator[int]:
        for bit, n in self._runs:
            for _ in range(n):
                yield bit

    def __getitem__(self, key):
        if isinstance(key, slice):
            start, stop, step = key.indices(self._len)
            if step != 1:
                return Bits.of(list(self)[key])
            return self._slice(start, stop)
        i = key
        if i < 0:
            i += self._len
        if not 0 <= i < self._len:
            raise IndexError("Bits index out of range")
        pos = 0
        for bit, n in self._runs:
            if i < pos + n:
                return bit
            pos += n
        raise AssertionError("unreachable")

    def _slice(self, start: int, stop: int) -> "Bits":
        if stop <= start:
            return EMPTY
        out = []
        pos = 0
        for bit, n in self._runs:
            lo, hi = max(pos, start), min(pos + n, stop)
            if lo < hi:
                out.append((bit, hi - lo))
            pos += n
            if pos >= stop:
                break
        return Bits(out)

    def __add__(self, other: BitsLike) -> "Bits":
        other = Bits.of(other)
        return Bits(self._runs + other._runs)

    def __radd__(self, other: BitsLike) -> "Bits":
        return Bits.of(other) + self

    def __eq__(self, other) -> bool:
        if isinstance(other, Bits):
            return self._runs == other._runs
        if isinstance(other, str):
            try:
                return self == Bits.of(other)
            except ValueError:
                return False
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._runs)
        return self._hash

    def __lt__(self, other: "Bits") -> bool:
        # length first, then lexicographic: the natural order on {0,1}*
        return (self._len, str(self)) < (other._len, str(other))

    def __str__(self) -> str:
        return "".join(str(b) * n for b, n in self._runs)

    def __repr__(self) -> str:
        if self._len <= 40:
            return f"Bits('{self}')"
        return f"Bits<{self.compact()}>"

    def compact(self) -> str:
        """Exponent notation, e.g. ``0^256 1 0^3``; ``∅`` for the empty string."""
        if not self._runs:
            return "∅"
        return " ".join(str(b) if n == 1 else f"{b}^{n}" for b, n in self._runs)

    # helpers used by the constructions ----------------------------------

    def append(self, bit: int) -> "Bits":
        if bit not in (0, 1):
            raise ValueError(f"not a bit: {bit!r}")
        if self._runs and self._runs[-1][0] == bit:
            b = Bits.__new__(Bits)
            b._runs = self._runs[:-1] + ((bit, self._runs[-1][1] + 1),)
            b._len = self._len + 1
            b._hash = None
            return b
        b = Bits.__new__(Bits)
        b._runs = self._runs + ((bit, 1),)
        b._len = self._len + 1
        b._hash = None
        return b

    def last(self, default: int = 0) -> int:
        return self._runs[-1][0] if self._runs else default

    def suffix(self, n: int) -> "Bits":
        if n <= 0:
            return EMPTY
        return self._slice(max(0, self._len - n), self._len)

    def startswith(self, prefix: BitsLike) -> bool:
        prefix = Bits.of(prefix)
        return len(prefix) <= self._len and self._slice(0, len(prefix)) == prefix

    def is_constant(self, bit: int) -> bool:
        """True iff every symbol equals ``bit`` (vacuously true when empty)."""
        return not self._runs or (len(self._runs) == 1 and self._runs[0][0] == bit)

    def find(self, bit: int, start: int = 0) -> int:
        """Index of the first ``bit`` at position >= start, or -1."""
        pos = 0
        for b, n in self._runs:
            if b == bit and pos + n > start:
                return max(pos, start)
            pos += n
        return -1

    def count(self, bit: int) -> int:
        return sum(n for b, n in self._runs if b == bit)


EMPTY = Bits()


def all_strings(length: int) -> list[Bits]:
    """All binary strings of exactly ``length`` in lexicographic order."""
    return [Bits.of(format(i, f"0{length}b")) if length else EMPTY for i in range(2**length)]


def strings_up_to(length: int) -> list[Bits]:
    out: list[Bits] = []
    for n in range(length + 1):
        out.extend(all_strings(n))
    return out
