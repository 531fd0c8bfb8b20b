"""Hash-family matrices, plastic towers, separation checks and bounds.

An (N; n, q) hash family is an N x n matrix over Z_q, one row per
function.  From a small integer set R and an R-solution-free set M the
column family ``(y + b*m for b in R)`` over all ``y in Z_q, m in M``
gives a perfect hash family with ``q * |M|`` columns; the failure
certificate for that construction is a rainbow cycle, and both
directions are checkable here at desk scale.
"""

from __future__ import annotations

import io
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .arrays import _floor_pow2


class TowerCollisionError(ValueError):
    """Two adjacent tower levels collided (m too small for this many levels)."""

    def __init__(self, level: int, value: int, message: str):
        super().__init__(message)
        self.level = level
        self.value = value


@dataclass(frozen=True)
class PlasticSet:
    """A sorted set of distinct nonnegative integers with its rank."""

    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        elems = tuple(sorted(int(x) for x in self.elements))
        if len(elems) < 2:
            raise ValueError("need at least two elements")
        if len(set(elems)) != len(elems):
            raise ValueError(f"elements must be distinct: {elems}")
        if elems[0] < 0:
            raise ValueError(f"elements must be nonnegative: {elems}")
        object.__setattr__(self, "elements", elems)

    @property
    def rank(self) -> int:
        return self.elements[-1] - self.elements[0]

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)


def plastic_tower(m: int, t: int, *, log_base: float = 2.0) -> PlasticSet:
    """The t-level tower below m: each level is ``floor(2**sqrt(log b))``
    of the level above, starting from m itself.

    Logs are base 2 unless ``log_base`` overrides the inner logarithm.
    Levels must stay distinct and at least 2; towers bottom out quickly,
    so large level counts need astronomically large m.
    """
    if t < 3:
        raise ValueError(f"need t >= 3, got {t}")
    if m < 2:
        raise ValueError(f"need m >= 2, got {m}")

    def down(x: int) -> int:
        lg = math.log2(x) if log_base == 2.0 else math.log(x) / math.log(log_base)
        return _floor_pow2(math.sqrt(lg))

    values = [down(m)]
    for level in range(t - 1, 0, -1):
        nxt = down(values[-1])
        if nxt < 2:
            raise TowerCollisionError(
                level, nxt, f"tower level b_{level} = {nxt} fell below 2 (m too small for t={t})"
            )
        if nxt >= values[-1]:
            raise TowerCollisionError(
                level,
                nxt,
                f"tower level b_{level} = {nxt} collides with b_{level + 1} = {values[-1]} "
                f"(m too small for t={t})",
            )
        values.append(nxt)
    return PlasticSet(tuple(reversed(values)))


@dataclass(frozen=True)
class SHFType:
    """A separation type: the multiset of part sizes to keep apart."""

    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        ws = tuple(sorted(int(w) for w in self.weights))
        if len(ws) < 2:
            raise ValueError("need at least two parts")
        if ws[0] < 1:
            raise ValueError(f"weights must be positive: {ws}")
        object.__setattr__(self, "weights", ws)

    @property
    def u(self) -> int:
        return sum(self.weights)

    @property
    def t(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class MatrixProvenance:
    r: tuple[int, ...]
    m_set: tuple[int, ...]
    verified_free: bool

    def to_json_dict(self) -> dict:
        return {"r": list(self.r), "m": list(self.m_set), "verified_free": self.verified_free}


@dataclass(frozen=True)
class HashFamilyMatrix:
    """An N x n matrix over Z_q, one row per hash function."""

    q: int
    rows: tuple[tuple[int, ...], ...]
    provenance: MatrixProvenance | None = None

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(v) for v in row) for row in self.rows)
        if rows:
            width = len(rows[0])
            if any(len(row) != width for row in rows):
                raise ValueError("ragged matrix")
            if any(not 0 <= v < self.q for row in rows for v in row):
                raise ValueError(f"cells must lie in [0, {self.q - 1}]")
        object.__setattr__(self, "rows", rows)

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.rows)

    def to_json_dict(self) -> dict:
        return {
            "q": self.q,
            "rows": [list(row) for row in self.rows],
            "provenance": self.provenance.to_json_dict() if self.provenance else None,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "HashFamilyMatrix":
        prov = d.get("provenance")
        provenance = (
            MatrixProvenance(tuple(prov["r"]), tuple(prov["m"]), bool(prov["verified_free"]))
            if prov
            else None
        )
        return cls(q=int(d["q"]), rows=tuple(tuple(r) for r in d["rows"]), provenance=provenance)

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        buf.write(f"# q={self.q} rows={self.n_rows} cols={self.n_cols}\n")
        if self.provenance:
            p = self.provenance
            buf.write(
                f"# r={','.join(map(str, p.r))} m={','.join(map(str, p.m_set))} "
                f"verified_free={str(p.verified_free).lower()}\n"
            )
        for row in self.rows:
            buf.write(",".join(map(str, row)) + "\n")
        return buf.getvalue()


def build_phf(r: Iterable[int], m_set: Iterable[int], q: int, *, verified_free: bool = False) -> HashFamilyMatrix:
    """The t x (q * |M|) matrix with columns ``(y + b*m) mod q``.

    Columns are ordered lexicographically by (m, y), so matrices are
    byte-stable across runs.  ``r`` must lie in [0, q-1] and ``m_set``
    in [0, (q-1) // rank(r)]; when ``m_set`` is solution-free for r the
    result separates every family of t singletons.
    """
    relems = PlasticSet(tuple(r)).elements
    if q < 2:
        raise ValueError(f"need q >= 2, got {q}")
    if relems[-1] > q - 1:
        raise ValueError(f"r must lie in [0, {q - 1}], got max {relems[-1]}")
    rank = relems[-1] - relems[0]
    m_bound = (q - 1) // rank
    m_elems = tuple(sorted(set(int(x) for x in m_set)))
    if m_elems and (m_elems[0] < 0 or m_elems[-1] > m_bound):
        raise ValueError(
            f"m_set must lie in [0, floor((q-1)/rank)] = [0, {m_bound}], "
            f"got range [{m_elems[0]}, {m_elems[-1]}]"
        )
    rows = tuple(
        tuple((y + b * m) % q for m in m_elems for y in range(q))
        for b in relems
    )
    return HashFamilyMatrix(
        q=q,
        rows=rows,
        provenance=MatrixProvenance(relems, m_elems, verified_free),
    )


Witness = tuple[tuple[int, ...], ...]


class EnumerationCapError(Exception):
    """An enumeration (families or search nodes) would exceed its budget."""

    def __init__(self, message: str, needed: int | None = None):
        super().__init__(message)
        self.needed = needed


def _family_count(n: int, weights: Sequence[int]) -> int:
    total = 1
    remaining = n
    for w in weights:
        total *= math.comb(remaining, w)
        remaining -= w
    mult = 1
    for w in set(weights):
        mult *= math.factorial(weights.count(w))
    return total // mult


def _separates(rows: Sequence[Sequence[int]], family: Witness) -> bool:
    for row in rows:
        images = [frozenset(row[c] for c in part) for part in family]
        ok = True
        for i in range(len(images)):
            for j in range(i + 1, len(images)):
                if images[i] & images[j]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def _verify_all_ones_3_np(matrix: HashFamilyMatrix) -> Witness | None:
    a = np.array(matrix.rows, dtype=np.int64)
    n = a.shape[1]
    eq = a[:, :, None] == a[:, None, :]
    for i in range(n - 2):
        # triple (i, j, k) is bad iff in every row two of its columns agree
        bad = (eq[:, i, :, None] | eq[:, i, None, :] | eq).all(axis=0)
        sub = bad[i + 1 :, i + 1 :]
        hits = np.argwhere(np.triu(sub, k=1))
        if hits.size:
            j, k = hits[0]
            return ((i,), (int(j) + i + 1,), (int(k) + i + 1,))
    return None


def _families(n: int, weights: Sequence[int]):
    """Yield pairwise-disjoint index families, one per symmetry class.

    Families of equal weight are kept in increasing order of their
    smallest member, which enumerates each unordered family once.
    """

    def rec(parts: list[tuple[int, ...]], used: frozenset[int], idx: int):
        if idx == len(weights):
            yield tuple(parts)
            return
        w = weights[idx]
        floor_min = -1
        if idx > 0 and weights[idx - 1] == w:
            floor_min = parts[-1][0]
        pool = [c for c in range(n) if c not in used]
        for combo in itertools.combinations(pool, w):
            if combo[0] <= floor_min:
                continue
            parts.append(combo)
            yield from rec(parts, used | set(combo), idx + 1)
            parts.pop()

    yield from rec([], frozenset(), 0)


def verify_shf(
    matrix: HashFamilyMatrix,
    shf_type: SHFType,
    *,
    family_cap: int = 5_000_000,
) -> tuple[bool, Witness | None]:
    """Exhaustively test separation for every family of the given type.

    Returns ``(True, None)`` when every family of pairwise-disjoint
    column sets with the type's sizes is separated by some row, else
    ``(False, family)`` with the first unseparated family in enumeration
    order.  Enumeration quotients the symmetry between equal-size parts.
    """
    n = matrix.n_cols
    u = shf_type.u
    if u > n:
        raise ValueError(f"type needs {u} columns but the matrix has {n}")
    count = _family_count(n, shf_type.weights)
    if count > family_cap:
        raise EnumerationCapError(
            f"would need {count} families, cap is {family_cap}", needed=count
        )
    weights = shf_type.weights
    if weights == (1, 1, 1) and n > 40:
        bad = _verify_all_ones_3_np(matrix)
        return (bad is None), bad
    for family in _families(n, weights):
        if not _separates(matrix.rows, family):
            return False, family
    return True, None


@dataclass(frozen=True)
class RainbowCycle:
    """k columns and k distinct rows with a cyclic agreement pattern.

    ``columns[i]`` and ``columns[(i+1) % k]`` agree in row
    ``rows[(i+1) % k]``.
    """

    columns: tuple[int, ...]
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.columns) != len(self.rows) or len(self.columns) < 2:
            raise ValueError("need equally many columns and rows, at least two each")
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("columns must be distinct")
        if len(set(self.rows)) != len(self.rows):
            raise ValueError("rows must be distinct")

    @property
    def k(self) -> int:
        return len(self.columns)

    def holds_in(self, matrix: HashFamilyMatrix) -> bool:
        k = self.k
        for i in range(k):
            row = matrix.rows[self.rows[(i + 1) % k]]
            if row[self.columns[i]] != row[self.columns[(i + 1) % k]]:
                return False
        return True


def find_rainbow_cycle(
    matrix: HashFamilyMatrix,
    max_k: int,
    *,
    node_cap: int = 2_000_000,
) -> RainbowCycle | None:
    """Depth-first search for the smallest rainbow cycle, or None.

    Cycles are canonicalized to start at their smallest column index;
    the first cycle found in this deterministic order is returned.
    """
    n_rows, n = matrix.n_rows, matrix.n_cols
    if max_k > n_rows:
        raise ValueError(f"max_k = {max_k} exceeds the number of rows {n_rows}")
    if max_k < 2 or n < 2:
        return None
    cols = [matrix.column(j) for j in range(n)]

    def agree_rows(i: int, j: int) -> tuple[int, ...]:
        return tuple(r for r in range(n_rows) if cols[i][r] == cols[j][r])

    budget = node_cap

    def dfs(k: int, path: list[int], rows_used: list[int]) -> RainbowCycle | None:
        nonlocal budget
        budget -= 1
        if budget < 0:
            raise EnumerationCapError(f"cycle search exceeded {node_cap} nodes")
        if len(path) == k:
            for r in agree_rows(path[-1], path[0]):
                if r not in rows_used:
                    return RainbowCycle(tuple(path), (r,) + tuple(rows_used))
            return None
        for cand in range(path[0] + 1, n):
            if cand in path:
                continue
            for r in agree_rows(path[-1], cand):
                if r in rows_used:
                    continue
                path.append(cand)
                rows_used.append(r)
                found = dfs(k, path, rows_used)
                if found is not None:
                    return found
                path.pop()
                rows_used.pop()
        return None

    for k in range(2, max_k + 1):
        for start in range(n):
            found = dfs(k, [start], [])
            if found is not None:
                return found
    return None


def rainbow_cycle_relation(
    matrix: HashFamilyMatrix, cycle: RainbowCycle
) -> tuple[tuple[int, ...], tuple[int, ...], int]:
    """Turn a rainbow cycle on a provenance matrix into an equation solution.

    Returns ``(u_seq, values, total)`` where ``u_seq`` is the sequence
    of the R-members indexed by the cycle rows, ``values`` are the M
    members of the cycle columns, and ``total`` is the integer
    evaluation of the equation of ``u_seq`` at ``values``; the chained
    agreements force ``total`` to vanish mod q, and within the stated
    ranges that lifts to an exact zero.
    """
    if matrix.provenance is None:
        raise ValueError("relation extraction needs a provenance matrix")
    r = matrix.provenance.r
    m_set = matrix.provenance.m_set
    q = matrix.q
    k = cycle.k
    values = tuple(m_set[cycle.columns[i] // q] for i in range(k))
    u_seq = tuple(r[cycle.rows[i % k]] for i in range(1, k + 1))
    total = sum(
        (r[cycle.rows[(i + 1) % k]] - r[cycle.rows[i]]) * values[i] for i in range(k)
    )
    if total % q != 0:
        raise ValueError("cycle does not belong to this matrix")
    return u_seq, values, total


def bound_upper(n_rows: int, q: int, shf_type: SHFType) -> int:
    """General universe-size upper bound gamma * q**ceil(N / (u-1))."""
    u = shf_type.u
    if u < 2:
        raise ValueError(f"need u >= 2, got {u}")
    if n_rows < 1 or q < 1:
        raise ValueError("need N >= 1 and q >= 1")
    w1, w2 = shf_type.weights[0], shf_type.weights[1]
    gamma = w1 * w2 + u - w1 - w2
    return gamma * q ** (-(-n_rows // (u - 1)))


def bound_lower_lll(n_rows: int, q: int, u: int) -> float:
    """Probabilistic lower bound (1/2**u) * (q / C(u,2)) ** (N/(u-1))."""
    if u < 2:
        raise ValueError(f"need u >= 2, got {u}")
    if n_rows < 1 or q < 1:
        raise ValueError("need N >= 1 and q >= 1")
    return (q / math.comb(u, 2)) ** (n_rows / (u - 1)) / 2 ** u
