"""Propositional rules over (instance, label) atoms and their exact probabilities."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from ..tokens import Bits


class Rule:
    """Base of the formula tree. Subclasses are immutable and hashable."""

    def variables(self) -> frozenset[Bits]:
        raise NotImplementedError

    def holds(self, f: Callable[[Bits], int]) -> bool:
        raise NotImplementedError

    def independent_of(self, x) -> bool:
        return Bits.of(x) not in self.variables()

    def __and__(self, other: "Rule") -> "Rule":
        return conj([self, other])

    def __or__(self, other: "Rule") -> "Rule":
        return disj([self, other])


@dataclass(frozen=True)
class Atom(Rule):
    """True for f iff f(x) = y."""

    x: Bits
    y: int

    def variables(self) -> frozenset[Bits]:
        return frozenset((self.x,))

    def holds(self, f) -> bool:
        return f(self.x) == self.y

    def __str__(self) -> str:
        return f"({self.x.compact()},{self.y})"


@dataclass(frozen=True)
class Const(Rule):
    value: bool

    def variables(self) -> frozenset[Bits]:
        return frozenset()

    def holds(self, f) -> bool:
        return self.value

    def __str__(self) -> str:
        return "⊤" if self.value else "⊥"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class And(Rule):
    children: tuple[Rule, ...]

    def variables(self) -> frozenset[Bits]:
        return _vars(self)

    def holds(self, f) -> bool:
        return all(c.holds(f) for c in self.children)

    def __str__(self) -> str:
        return "(" + " ∧ ".join(map(str, self.children)) + ")"


@dataclass(frozen=True)
class Or(Rule):
    children: tuple[Rule, ...]

    def variables(self) -> frozenset[Bits]:
        return _vars(self)

    def holds(self, f) -> bool:
        return any(c.holds(f) for c in self.children)

    def __str__(self) -> str:
        return "(" + " ∨ ".join(map(str, self.children)) + ")"


@lru_cache(maxsize=None)
def _vars(rule: Rule) -> frozenset[Bits]:
    out: frozenset[Bits] = frozenset()
    for c in rule.children:
        out |= c.variables()
    return out


def atom(x, y: int) -> Atom:
    return Atom(Bits.of(x), int(y))


def conj(parts: Iterable[Rule]) -> Rule:
    """Flattened conjunction with constant folding; the empty conjunction is TRUE."""
    out: list[Rule] = []
    for p in parts:
        if p == FALSE:
            return FALSE
        if p == TRUE:
            continue
        out.extend(p.children if isinstance(p, And) else (p,))
    out = list(dict.fromkeys(out))
    if not out:
        return TRUE
    return out[0] if len(out) == 1 else And(tuple(out))


def disj(parts: Iterable[Rule]) -> Rule:
    out: list[Rule] = []
    for p in parts:
        if p == TRUE:
            return TRUE
        if p == FALSE:
            continue
        out.extend(p.children if isinstance(p, Or) else (p,))
    out = list(dict.fromkeys(out))
    if not out:
        return FALSE
    return out[0] if len(out) == 1 else Or(tuple(out))


def condition(rule: Rule, x: Bits, value: int) -> Rule:
    """Substitute f(x) = value and simplify."""
    if isinstance(rule, Atom):
        if rule.x == x:
            return TRUE if rule.y == value else FALSE
        return rule
    if isinstance(rule, Const):
        return rule
    if x not in rule.variables():
        return rule
    kids = [condition(c, x, value) for c in rule.children]
    return conj(kids) if isinstance(rule, And) else disj(kids)


def prefix_path_rule(x, y, t: int) -> Rule:
    """The first t generated bits from x are y_1..y_t."""
    x, y = Bits.of(x), Bits.of(y)
    if not 0 <= t <= len(y):
        raise ValueError("need 0 <= t <= |y|")
    atoms = []
    cur = x
    for s in range(t):
        atoms.append(Atom(cur, y[s]))
        cur = cur.append(y[s])
    return conj(atoms)


def rule_filter(members: Sequence, rule: Rule) -> list:
    return [f for f in members if rule.holds(f)]


def _components(children: Sequence[Rule]) -> list[list[Rule]]:
    """Group children into classes with pairwise disjoint variable sets."""
    groups: list[tuple[set, list[Rule]]] = []
    for c in children:
        vs = set(c.variables())
        hit = [g for g in groups if g[0] & vs]
        merged_vars, merged = vs, [c]
        for g in hit:
            merged_vars |= g[0]
            merged = g[1] + merged
            groups.remove(g)
        groups.append((merged_vars, merged))
    return [g[1] for g in groups]


def exact_probability(rule: Rule, p_one: Callable[[Bits], Fraction]) -> Fraction:
    """Pr[rule holds] when the f(x) are independent with Pr[f(x) = 1] = p_one(x).

    Variable-disjoint sub-formulas are combined by independence; anything else
    is split by Shannon expansion on its most frequent variable.
    """
    memo: dict[Rule, Fraction] = {}

    def prob(r: Rule) -> Fraction:
        if isinstance(r, Const):
            return Fraction(int(r.value))
        if isinstance(r, Atom):
            p = Fraction(p_one(r.x))
            return p if r.y == 1 else 1 - p
        if r in memo:
            return memo[r]
        comps = _components(r.children)
        if len(comps) > 1:
            if isinstance(r, And):
                out = Fraction(1)
                for g in comps:
                    out *= prob(conj(g))
            else:
                miss = Fraction(1)
                for g in comps:
                    miss *= 1 - prob(disj(g))
                out = 1 - miss
        else:
            counts: dict[Bits, int] = {}
            for c in r.children:
                for v in c.variables():
                    counts[v] = counts.get(v, 0) + 1
            x = max(counts, key=lambda v: (counts[v], -len(v)))
            p = Fraction(p_one(x))
            out = Fraction(0)
            if p:
                out += p * prob(condition(r, x, 1))
            if p != 1:
                out += (1 - p) * prob(condition(r, x, 0))
        memo[r] = out
        return out

    return prob(rule)
