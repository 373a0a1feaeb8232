"""Exact combinatorial dimensions of finite classes over finite instance pools.

Version spaces are Python ints used as bitsets over member indices; they are
the memoisation keys of every recursion here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .core import cot, e2e, generation_closure
from .tokens import Bits


class EmptyClassError(ValueError):
    pass


# --------------------------------------------------------------------------
# tables


@dataclass
class FiniteClassTable:
    """Members evaluated over a fixed pool.

    ``rows[i][j]`` is the label member ``i`` gives ``pool[j]``. Labels are bits
    for base/e2e tables and ``Bits`` trajectories of a fixed length for CoT
    tables (``label_arity`` says which).
    """

    pool: list[Bits]
    member_ids: list[str]
    rows: list[tuple]
    label_arity: str = "binary"

    def __post_init__(self):
        self.pool = [Bits.of(x) for x in self.pool]
        self.rows = [tuple(r) for r in self.rows]
        if len(self.member_ids) != len(self.rows):
            raise ValueError("one id per row required")
        if len(set(self.member_ids)) != len(self.member_ids):
            raise ValueError("member ids must be unique")
        for r in self.rows:
            if len(r) != len(self.pool):
                raise ValueError("table is not rectangular")
        self._index = {x: j for j, x in enumerate(self.pool)}
        self._columns: Optional[list[dict]] = None

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.rows)) - 1

    def index_of(self, x) -> int:
        return self._index[Bits.of(x)]

    def label(self, member: int, x) -> object:
        return self.rows[member][self.index_of(x)]

    def columns(self) -> list[dict]:
        """Per pool instance: label -> bitmask of members carrying it."""
        if self._columns is None:
            cols: list[dict] = [dict() for _ in self.pool]
            for i, row in enumerate(self.rows):
                bit = 1 << i
                for j, y in enumerate(row):
                    cols[j][y] = cols[j].get(y, 0) | bit
            self._columns = cols
        return self._columns

    def duplicate_rows(self) -> list[list[str]]:
        """Groups of member ids sharing an identical row (flagged, not an error)."""
        groups: dict[tuple, list[str]] = {}
        for mid, row in zip(self.member_ids, self.rows):
            groups.setdefault(row, []).append(mid)
        return [g for g in groups.values() if len(g) > 1]

    def dedup(self) -> "FiniteClassTable":
        seen: dict[tuple, int] = {}
        ids, rows = [], []
        for mid, row in zip(self.member_ids, self.rows):
            if row not in seen:
                seen[row] = len(rows)
                ids.append(mid)
                rows.append(row)
        return FiniteClassTable(list(self.pool), ids, rows, self.label_arity)

    def restrict(self, mask: int) -> "FiniteClassTable":
        keep = [i for i in range(len(self.rows)) if mask >> i & 1]
        return FiniteClassTable(
            list(self.pool),
            [self.member_ids[i] for i in keep],
            [self.rows[i] for i in keep],
            self.label_arity,
        )

    def consistent(self, mask: int, x, y) -> int:
        """Members of ``mask`` labelling ``x`` with ``y``."""
        return mask & self.columns()[self.index_of(x)].get(y, 0)

    @classmethod
    def from_generators(
        cls, generators: Sequence, pool: Iterable, kind: str = "base", M: int = 1
    ) -> "FiniteClassTable":
        """Evaluate generators on ``pool``.

        ``kind`` is ``"base"`` (g(x)), ``"e2e"`` (final bit after M steps) or
        ``"cot"`` (the full M-bit trajectory).
        """
        pool = [Bits.of(x) for x in pool]
        if kind == "base":
            rows = [tuple(g(x) for x in pool) for g in generators]
            arity = "binary"
        elif kind == "e2e":
            rows = [tuple(e2e(g, x, M) for x in pool) for g in generators]
            arity = "binary"
        elif kind == "cot":
            rows = [tuple(cot(g, x, M) for x in pool) for g in generators]
            arity = f"trajectory:{M}"
        else:
            raise ValueError(f"unknown table kind {kind!r}")
        ids = _unique_ids([getattr(g, "name", repr(g)) for g in generators])
        return cls(pool, ids, rows, arity)


def _unique_ids(names: list[str]) -> list[str]:
    counts: dict[str, int] = {}
    out = []
    for n in names:
        k = counts.get(n, 0)
        counts[n] = k + 1
        out.append(n if k == 0 else f"{n}#{k}")
    return out


def base_table(generators: Sequence, pool: Iterable, M: int) -> FiniteClassTable:
    """Base-class table over every string reached while generating from ``pool``."""
    return FiniteClassTable.from_generators(generators, generation_closure(pool, M), "base")


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def members_of(mask: int) -> list[int]:
    out, i = [], 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


# --------------------------------------------------------------------------
# Littlestone dimension


class LittlestoneSolver:
    """Memoised Littlestone recursion over version subsets of one table.

    Binary tables use the two-label recursion; tables with richer labels use
    the multiclass one (best pair of distinct realised labels).
    """

    def __init__(self, table: FiniteClassTable, multiclass: Optional[bool] = None):
        if len(table) == 0:
            raise EmptyClassError("empty class")
        self.table = table
        self.multiclass = table.label_arity != "binary" if multiclass is None else multiclass
        self.cols = table.columns()
        self.memo: dict[int, int] = {}

    def dim(self, mask: Optional[int] = None) -> int:
        if mask is None:
            mask = self.table.full_mask
        if mask == 0:
            raise EmptyClassError("empty class")
        return self._multi(mask) if self.multiclass else self._binary(mask)

    def _binary(self, mask: int) -> int:
        hit = self.memo.get(mask)
        if hit is not None:
            return hit
        cap = popcount(mask).bit_length() - 1
        best = 0
        for col in self.cols:
            if best >= cap:
                break
            m1 = mask & col.get(1, 0)
            m0 = mask & col.get(0, 0)
            if not m1 or not m0:
                continue
            if popcount(min(m0, m1, key=popcount)).bit_length() <= best:
                continue
            best = max(best, 1 + min(self._binary(m0), self._binary(m1)))
        self.memo[mask] = best
        return best

    def _multi(self, mask: int) -> int:
        hit = self.memo.get(mask)
        if hit is not None:
            return hit
        cap = popcount(mask).bit_length() - 1
        best = 0
        for col in self.cols:
            if best >= cap:
                break
            parts = [m for m in (mask & lm for lm in col.values()) if m]
            if len(parts) < 2:
                continue
            sub = {p: self._multi(p) for p in parts}
            for a, b in itertools.combinations(parts, 2):
                best = max(best, 1 + min(sub[a], sub[b]))
        self.memo[mask] = best
        return best

    def witness_tree(self, mask: Optional[int] = None) -> "LittlestoneTree":
        """A perfect tree of depth ``dim(mask)`` shattered by the subset."""
        if mask is None:
            mask = self.table.full_mask
        nodes: dict[tuple, Bits] = {}
        labels: dict[tuple, tuple] = {}

        def build(m: int, path: tuple, d: int):
            if d == 0:
                return
            for j, col in enumerate(self.cols):
                parts = sorted(((y, m & lm) for y, lm in col.items() if m & lm), key=lambda p: p[0])
                for (ya, a), (yb, b) in itertools.combinations(parts, 2):
                    if min(self.dim(a), self.dim(b)) >= d - 1:
                        nodes[path] = self.table.pool[j]
                        labels[path] = (ya, yb)
                        build(a, path + (0,), d - 1)
                        build(b, path + (1,), d - 1)
                        return
            raise AssertionError("recursion value without witness")

        build(mask, (), self.dim(mask))
        binary = all(lab == (0, 1) for lab in labels.values())
        if not binary:
            return LittlestoneTree(nodes, labels)
        return LittlestoneTree(nodes)


def littlestone_dim(table: FiniteClassTable) -> int:
    """Littlestone dimension of a binary-labelled table."""
    if table.label_arity != "binary":
        raise ValueError("use littlestone_dim_multiclass for trajectory labels")
    return LittlestoneSolver(table, multiclass=False).dim()


def littlestone_dim_multiclass(table: FiniteClassTable) -> int:
    return LittlestoneSolver(table, multiclass=True).dim()


# --------------------------------------------------------------------------
# VC dimension


def vc_dim(table: FiniteClassTable) -> int:
    """Largest shattered pool subset; shattered sets are grown one element at a time."""
    if len(table) == 0:
        raise EmptyClassError("empty class")
    rows = list(set(table.rows))
    n = len(table.pool)
    cap = len(rows).bit_length() - 1
    level = [()]  # shattered sets of the current size
    size = 0
    while size < cap:
        nxt = []
        for s in level:
            for j in range(s[-1] + 1 if s else 0, n):
                cand = s + (j,)
                if len({tuple(r[i] for i in cand) for r in rows}) == 2 ** len(cand):
                    nxt.append(cand)
        if not nxt:
            break
        level, size = nxt, size + 1
    return size


def shattered_sets(table: FiniteClassTable, size: int) -> list[tuple[Bits, ...]]:
    rows = set(table.rows)
    out = []
    for cand in itertools.combinations(range(len(table.pool)), size):
        if len({tuple(r[i] for i in cand) for r in rows}) == 2**size:
            out.append(tuple(table.pool[i] for i in cand))
    return out


# --------------------------------------------------------------------------
# Littlestone trees


@dataclass
class LittlestoneTree:
    """Full binary tree with instance-labelled internal nodes.

    ``nodes`` maps child-index paths (0 = left, 1 = right) of internal nodes to
    instances. ``edge_labels`` optionally maps a path to the labels of its two
    outgoing edges; the default is (0, 1), so for binary trees a branch's child
    indices are its edge labels.
    """

    nodes: Mapping[tuple, Bits]
    edge_labels: Optional[Mapping[tuple, tuple]] = None

    def __post_init__(self):
        self.nodes = {tuple(p): Bits.of(x) for p, x in self.nodes.items()}
        for p in self.nodes:
            if p and p[:-1] not in self.nodes:
                raise ValueError(f"node {p} has no parent")
            if any(c not in (0, 1) for c in p):
                raise ValueError("paths are sequences of child indices 0/1")
        if self.edge_labels is not None:
            self.edge_labels = {tuple(p): tuple(l) for p, l in self.edge_labels.items()}
            for p in self.nodes:
                a, b = self.labels_at(p)
                if a == b:
                    raise ValueError(f"sibling edges at {p} share label {a!r}")

    @classmethod
    def perfect(cls, depth: int, instance: Callable[[tuple], object]) -> "LittlestoneTree":
        nodes = {}
        for n in range(depth):
            for p in itertools.product((0, 1), repeat=n):
                nodes[p] = instance(p)
        return cls(nodes)

    def labels_at(self, path: tuple) -> tuple:
        if self.edge_labels is None:
            return (0, 1)
        return self.edge_labels.get(path, (0, 1))

    @property
    def depth(self) -> int:
        return max((len(p) + 1 for p in self.nodes), default=0)

    @property
    def is_binary(self) -> bool:
        return all(self.labels_at(p) == (0, 1) for p in self.nodes)

    def branches(self) -> list[tuple]:
        """Child-index sequences of all root-to-leaf paths."""
        if not self.nodes:
            return [()]
        out = []
        stack = [()]
        while stack:
            p = stack.pop()
            for c in (0, 1):
                q = p + (c,)
                if q in self.nodes:
                    stack.append(q)
                else:
                    out.append(q)
        return sorted(out)

    def branch_sample(self, branch: tuple) -> list[tuple[Bits, object]]:
        """(instance, edge label) pairs along a branch."""
        return [
            (self.nodes[branch[:i]], self.labels_at(branch[:i])[c]) for i, c in enumerate(branch)
        ]

    def instances(self) -> list[Bits]:
        return list(dict.fromkeys(self.nodes.values()))


def realized_branches(generators: Sequence, tree: LittlestoneTree) -> set[tuple]:
    """Branches agreed with, edge by edge, by at least one generator."""
    if not tree.is_binary:
        raise ValueError("realized_branches expects binary edge labels")
    values: dict[tuple[int, Bits], int] = {}

    def val(i: int, x: Bits) -> int:
        key = (i, x)
        if key not in values:
            values[key] = generators[i](x)
        return values[key]

    out: set[tuple] = set()
    if not generators:
        return out
    stack = [((), list(range(len(generators))))]
    while stack:
        path, alive = stack.pop()
        if path not in tree.nodes:
            out.add(path)
            continue
        x = tree.nodes[path]
        for c in (0, 1):
            keep = [i for i in alive if val(i, x) == c]
            if keep:
                stack.append((path + (c,), keep))
    return out


def tree_is_shattered(table: FiniteClassTable, tree: LittlestoneTree) -> bool:
    """Every branch of ``tree`` realised by a member of ``table``."""
    for b in tree.branches():
        mask = table.full_mask
        for x, y in tree.branch_sample(b):
            mask = table.consistent(mask, x, y)
            if not mask:
                return False
    return True


def ssp_bound(n: int, d: int) -> int:
    """Sauer-Shelah-Perles count: sum of C(n, i) for i <= min(d, n)."""
    if n < 0 or d < 0:
        raise ValueError("n and d must be non-negative")
    return sum(comb(n, i) for i in range(min(d, n) + 1))


def inflate_tree(base: LittlestoneTree, M: int, generators: Optional[Sequence] = None) -> LittlestoneTree:
    """Replace each node of a binary tree by the depth-M generation tree of its instance.

    A node of the inflated tree at path w (|w| = qM + r, r < M) carries the
    saved path v = (w[M-1], w[2M-1], ..., w[qM-1]) of the base tree and the
    instance x_v ∘ w[qM:qM+r]. Leaves whose saved path reaches a base leaf stop.
    If ``generators`` is given, the base tree must be shattered by their e2e-M
    behaviour.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if not base.is_binary:
        raise ValueError("inflate_tree expects binary edge labels")
    if generators is not None:
        table = FiniteClassTable.from_generators(generators, base.instances(), "e2e", M)
        if not tree_is_shattered(table, base):
            raise ValueError("base tree is not shattered by the class's e2e behaviour")
    nodes: dict[tuple, Bits] = {}
    stack: list[tuple[tuple, tuple]] = [((), ())]  # (inflated path, saved base path)
    while stack:
        w, v = stack.pop()
        if v not in base.nodes:
            continue
        x = base.nodes[v]
        for r in range(M):
            for u in itertools.product((0, 1), repeat=r):
                nodes[w + u] = x + Bits.of(u) if u else x
        for u in itertools.product((0, 1), repeat=M):
            stack.append((w + u, v + (u[-1],)))
    return LittlestoneTree(nodes)


# --------------------------------------------------------------------------
# optimal mistake bounds of the two feedback regimes


def optimal_e2e_mistake_bound(generators: Sequence, pool: Iterable, M: int) -> int:
    table = FiniteClassTable.from_generators(generators, pool, "e2e", M).dedup()
    return littlestone_dim(table)


class CotGameValue:
    """Minimax value of the CoT-feedback game over a fixed pool.

    Feedback is the whole trajectory, loss is on its final bit. Instances with
    a single consistent trajectory are skipped: the learner cannot err there
    and the version space does not move.
    """

    def __init__(self, table: FiniteClassTable):
        if table.label_arity == "binary":
            raise ValueError("CoT game needs a trajectory table")
        if len(table) == 0:
            raise EmptyClassError("empty class")
        self.table = table
        self.cols = table.columns()
        self.memo: dict[int, int] = {}

    def value(self, mask: Optional[int] = None) -> int:
        if mask is None:
            mask = self.table.full_mask
        hit = self.memo.get(mask)
        if hit is not None:
            return hit
        best = 0
        for col in self.cols:
            parts = [(y, mask & lm) for y, lm in col.items() if mask & lm]
            if len(parts) < 2:
                continue
            sub = [(y[-1], self.value(m)) for y, m in parts]
            v = min(max(int(last != guess) + val for last, val in sub) for guess in (0, 1))
            best = max(best, v)
        self.memo[mask] = best
        return best

    def best_guess(self, mask: int, x) -> int:
        """Learner bit minimising the adversary's continuation value (ties -> 0)."""
        col = self.cols[self.table.index_of(x)]
        parts = [(y, mask & lm) for y, lm in col.items() if mask & lm]
        if len(parts) == 1:
            return parts[0][0][-1]
        scores = [max(int(y[-1] != g) + self.value(m) for y, m in parts) for g in (0, 1)]
        return 0 if scores[0] <= scores[1] else 1


def optimal_cot_mistake_bound(generators: Sequence, pool: Iterable, M: int) -> int:
    table = FiniteClassTable.from_generators(generators, pool, "cot", M).dedup()
    return CotGameValue(table).value()
