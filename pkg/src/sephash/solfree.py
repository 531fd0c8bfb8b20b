"""Construction and verification of solution-free integer sets.

A set is solution-free for an equation when no assignment of its values
to the coefficient slots satisfies the equation, except assignments
giving every slot the same value.  This module provides exhaustive and
meet-in-the-middle searches for solutions, greedy and exact-maximum set
construction, a sphere-shell base construction for monotonic equations,
the digit-expansion lift that transports a set that is free for an
ancestor into one free for the original equation, and the composed
per-equation pipeline.
"""

from __future__ import annotations

import heapq
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .arrays import (
    BipartiteArray,
    ancestor,
    build_ancestor_string,
    smaller_maximum,
)

DEFAULT_ARITY_CAP = 6
DEFAULT_CHECK_CAP = 10 ** 9
DEFAULT_EXACT_CAP = 64
DEFAULT_WORK_CAP = 20_000_000

# plain nested loop below this many assignments; value tables above
_LOOP_LIMIT = 200_000
# numpy value tables refuse beyond this many entries per side
_TABLE_LIMIT = 50_000_000
# pure-python value tables (arbitrary precision) refuse beyond this
_DICT_LIMIT = 2_000_000
# side sums must stay below this for the int64 fast path
_INT64_SAFE = 2 ** 62


class CapExceededError(Exception):
    """A search or enumeration would exceed its configured budget."""

    def __init__(self, message: str, needed: int | None = None):
        super().__init__(message)
        self.needed = needed


@dataclass(frozen=True)
class SolutionWitness:
    """A nontrivial assignment satisfying an equation.

    ``assignment`` pairs each signed coefficient with the value placed
    in its slot, positive-side slots first.  ``lhs_value`` and
    ``rhs_value`` are the equal side evaluations.
    """

    assignment: tuple[tuple[int, int], ...]
    lhs_value: int
    rhs_value: int

    @property
    def values(self) -> tuple[int, ...]:
        return tuple(v for _, v in self.assignment)

    def to_json_dict(self) -> dict:
        return {
            "assignment": [[c, v] for c, v in self.assignment],
            "lhs_value": self.lhs_value,
            "rhs_value": self.rhs_value,
        }


@dataclass(frozen=True)
class SolutionFreeCert:
    """A finite set together with the equations it was checked against.

    ``verified`` is true when the set is certified solution-free for
    every listed equation, either by machine search or by construction;
    ``method`` names the route ("exhaustive", "meet-in-middle",
    "greedy", "exact", "behrend", "link", "pipeline") and ``notes``
    record fallbacks and verification status.
    """

    set_m: tuple[int, ...]
    equations: tuple[BipartiteArray, ...]
    method: str
    verified: bool
    witness: SolutionWitness | None = None
    notes: tuple[str, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "set": list(self.set_m),
            "equations": [eq.to_json_dict() for eq in self.equations],
            "method": self.method,
            "verified": self.verified,
            "witness": self.witness.to_json_dict() if self.witness else None,
            "notes": list(self.notes),
        }

    def set_text(self) -> str:
        return "".join(f"{x}\n" for x in self.set_m)


def _witness(a: BipartiteArray, lhs_vals: Sequence[int], rhs_vals: Sequence[int]) -> SolutionWitness:
    assignment = tuple(zip(a.pos, lhs_vals)) + tuple(zip((-c for c in a.neg), rhs_vals))
    lhs = sum(c * v for c, v in zip(a.pos, lhs_vals))
    rhs = sum(c * v for c, v in zip(a.neg, rhs_vals))
    return SolutionWitness(assignment=assignment, lhs_value=lhs, rhs_value=rhs)


def _find_solution_loop(a: BipartiteArray, values: Sequence[int]) -> SolutionWitness | None:
    s = len(a.pos)
    k = a.length
    for assign in itertools.product(values, repeat=k):
        first = assign[0]
        if all(v == first for v in assign):
            continue
        lhs = sum(c * v for c, v in zip(a.pos, assign))
        rhs = sum(c * v for c, v in zip(a.neg, assign[s:]))
        if lhs == rhs:
            return _witness(a, assign[:s], assign[s:])
    return None


def _trivial_value(v: int, sp: int, sn: int, value_set: frozenset[int]) -> int | None:
    """The constant c with all-c assignments evaluating to v on both sides, if any."""
    if v % sp:
        return None
    c = v // sp
    if c in value_set and sn * c == v:
        return c
    return None


def _all_equal_index(position: int, n: int, slots: int) -> int:
    # lex index of the assignment placing values[position] in every slot
    return position * ((n ** slots - 1) // (n - 1))


def _side_sums_np(coeffs: Sequence[int], vals: np.ndarray) -> np.ndarray:
    slots = len(coeffs)
    acc = np.zeros((1,) * slots, dtype=np.int64)
    for i, c in enumerate(coeffs):
        shape = [1] * slots
        shape[i] = vals.size
        acc = acc + c * vals.reshape(shape)
    return acc.reshape(-1)


def _find_solution_table_np(a: BipartiteArray, values: Sequence[int]) -> SolutionWitness | None:
    vals = np.asarray(values, dtype=np.int64)
    n = vals.size
    s, r = a.shape
    sp, sn = sum(a.pos), sum(a.neg)
    value_set = frozenset(values)
    lhs = _side_sums_np(a.pos, vals)
    rhs = _side_sums_np(a.neg, vals)
    ul, il, cl = np.unique(lhs, return_index=True, return_counts=True)
    ur, ir, cr = np.unique(rhs, return_index=True, return_counts=True)
    common, ci_l, ci_r = np.intersect1d(ul, ur, assume_unique=True, return_indices=True)
    if common.size == 0:
        return None

    def decode(idx: int, coeffs: tuple[int, ...]) -> tuple[int, ...]:
        digits = np.unravel_index(idx, (n,) * len(coeffs))
        return tuple(int(vals[d]) for d in digits)

    heap: list[tuple[int, int, int, int, int, int]] = []
    tick = 0
    for j in range(common.size):
        v = int(common[j])
        count_l, count_r = int(cl[ci_l[j]]), int(cr[ci_r[j]])
        fl, fr = int(il[ci_l[j]]), int(ir[ci_r[j]])
        c = _trivial_value(v, sp, sn, value_set)
        if c is not None and count_l * count_r <= 1:
            continue
        heapq.heappush(heap, (fl, tick, v, fr, count_l, count_r))
        tick += 1
    while heap:
        fl, _, v, fr, count_l, count_r = heapq.heappop(heap)
        c = _trivial_value(v, sp, sn, value_set)
        if c is not None:
            pos_c = values.index(c)
            if fl == _all_equal_index(pos_c, n, s) and fr == _all_equal_index(pos_c, n, r):
                # first pair is the trivial one; take the next assignment on one side
                if count_r >= 2:
                    fr = int(np.flatnonzero(rhs == v)[1])
                else:
                    fl2 = int(np.flatnonzero(lhs == v)[1])
                    heapq.heappush(heap, (fl2, tick, v, fr, 1, count_r))
                    tick += 1
                    continue
        return _witness(a, decode(fl, a.pos), decode(fr, a.neg))
    return None


def _side_sums_dict(coeffs: Sequence[int], values: Sequence[int]) -> dict[int, list]:
    # value -> [count, first assignment, second assignment or None]
    out: dict[int, list] = {}
    for assign in itertools.product(values, repeat=len(coeffs)):
        v = sum(c * x for c, x in zip(coeffs, assign))
        entry = out.get(v)
        if entry is None:
            out[v] = [1, assign, None]
        else:
            entry[0] += 1
            if entry[2] is None:
                entry[2] = assign
    return out


def _find_solution_table_dict(a: BipartiteArray, values: Sequence[int]) -> SolutionWitness | None:
    sp, sn = sum(a.pos), sum(a.neg)
    value_set = frozenset(values)
    left = _side_sums_dict(a.pos, values)
    right = _side_sums_dict(a.neg, values)
    best: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    for v, (count_l, first_l, second_l) in left.items():
        entry = right.get(v)
        if entry is None:
            continue
        count_r, first_r, second_r = entry
        c = _trivial_value(v, sp, sn, value_set)
        pick_l, pick_r = first_l, first_r
        if c is not None:
            allc_l = all(x == c for x in first_l)
            allc_r = all(x == c for x in first_r)
            if allc_l and allc_r:
                if count_l * count_r <= 1:
                    continue
                if count_r >= 2:
                    pick_r = second_r
                else:
                    pick_l = second_l
        cand = (pick_l, pick_r)
        if best is None or cand < best:
            best = cand
    if best is None:
        return None
    return _witness(a, best[0], best[1])


def _uses_tables(a: BipartiteArray, n_values: int) -> bool:
    return a.length > 4 or n_values ** a.length > _LOOP_LIMIT


def find_solution(
    a: BipartiteArray,
    m_set: Iterable[int],
    *,
    arity_cap: int = DEFAULT_ARITY_CAP,
    check_cap: int = DEFAULT_CHECK_CAP,
) -> SolutionWitness | None:
    """Search ``m_set`` for a nontrivial solution of ``a``.

    The search is exhaustive; equations longer than four slots (or sets
    too large for the plain nested loop) go through per-side value
    tables (meet in the middle).  The returned witness is the
    lexicographically least satisfying assignment in slot order,
    independent of the strategy.
    """
    values = sorted(set(int(x) for x in m_set))
    if len(values) <= 1:
        return None
    k = a.length
    if k > arity_cap:
        raise CapExceededError(f"equation has {k} slots, arity cap is {arity_cap}", needed=k)
    n = len(values)
    if not _uses_tables(a, n):
        return _find_solution_loop(a, values)
    s, r = a.shape
    cost = n ** s + n ** r
    if cost > check_cap:
        raise CapExceededError(
            f"search would need about {cost} elementary checks, cap is {check_cap}",
            needed=cost,
        )
    bound = max(abs(values[0]), abs(values[-1])) * max(sum(a.pos), sum(a.neg))
    if bound < _INT64_SAFE:
        if max(n ** s, n ** r) > _TABLE_LIMIT:
            raise CapExceededError(
                f"value table would need {max(n ** s, n ** r)} entries", needed=cost
            )
        return _find_solution_table_np(a, values)
    if max(n ** s, n ** r) > _DICT_LIMIT:
        raise CapExceededError(
            f"arbitrary-precision value table would need {max(n ** s, n ** r)} entries",
            needed=cost,
        )
    return _find_solution_table_dict(a, values)


def verify_solution_free(
    m_set: Iterable[int],
    equations: Sequence[BipartiteArray],
    *,
    arity_cap: int = DEFAULT_ARITY_CAP,
    check_cap: int = DEFAULT_CHECK_CAP,
) -> SolutionFreeCert:
    """Check every equation; the first witness found breaks verification."""
    values = tuple(sorted(set(int(x) for x in m_set)))
    method = "exhaustive"
    for eq in equations:
        if _uses_tables(eq, len(values)):
            method = "meet-in-middle"
        w = find_solution(eq, values, arity_cap=arity_cap, check_cap=check_cap)
        if w is not None:
            return SolutionFreeCert(
                set_m=values,
                equations=tuple(equations),
                method=method,
                verified=False,
                witness=w,
            )
    return SolutionFreeCert(
        set_m=values, equations=tuple(equations), method=method, verified=True
    )


class _EquationTables:
    """Per-side value counters over a growing set, with undo.

    Supports the incremental question: does adding x create a
    nontrivial solution that uses x at least once?
    """

    def __init__(self, eq: BipartiteArray):
        self.eq = eq
        self.sp = sum(eq.pos)
        self.sn = sum(eq.neg)
        self.left: Counter[int] = Counter()
        self.right: Counter[int] = Counter()
        self.members: list[int] = []
        self.stack: list[tuple[int, Counter, Counter]] = []
        self.ops = 0
        # mask -> (sum of coefficients placed on x, remaining coefficients)
        self.masks = {}
        for side, coeffs in (("pos", eq.pos), ("neg", eq.neg)):
            slots = len(coeffs)
            self.masks[side] = [
                (
                    sum(coeffs[i] for i in range(slots) if mask >> i & 1),
                    tuple(coeffs[i] for i in range(slots) if not mask >> i & 1),
                )
                for mask in range(1, 1 << slots)
            ]

    def _delta(self, side: str, x: int) -> Counter:
        out: Counter[int] = Counter()
        members = self.members
        for csum, free in self.masks[side]:
            base = x * csum
            if not free:
                out[base] += 1
                self.ops += 1
                continue
            self.ops += len(members) ** len(free)
            for combo in itertools.product(members, repeat=len(free)):
                out[base + sum(c * v for c, v in zip(free, combo))] += 1
        return out

    def probe(self, x: int) -> tuple[bool, Counter, Counter]:
        dl = self._delta("pos", x)
        dr = self._delta("neg", x)
        for v in set(dl) | set(dr):
            ol, om = self.left[v], self.right[v]
            new_pairs = (ol + dl[v]) * (om + dr[v]) - ol * om
            trivial = 1 if (self.sp * x == v and self.sn * x == v) else 0
            if new_pairs > trivial:
                return True, dl, dr
        return False, dl, dr

    def push(self, x: int, dl: Counter, dr: Counter) -> None:
        self.left.update(dl)
        self.right.update(dr)
        self.members.append(x)
        self.stack.append((x, dl, dr))

    def pop(self) -> None:
        x, dl, dr = self.stack.pop()
        self.members.pop()
        self.left.subtract(dl)
        self.right.subtract(dr)


def _check_arities(equations: Sequence[BipartiteArray], arity_cap: int) -> None:
    for eq in equations:
        if eq.length > arity_cap:
            raise CapExceededError(
                f"equation has {eq.length} slots, arity cap is {arity_cap}",
                needed=eq.length,
            )


def greedy_solution_free(
    m: int,
    equations: Sequence[BipartiteArray],
    *,
    arity_cap: int = DEFAULT_ARITY_CAP,
    check_cap: int = DEFAULT_CHECK_CAP,
) -> SolutionFreeCert:
    """Scan 1..m, keeping x whenever no equation gains a solution using x.

    The incremental check only enumerates assignments that place x in at
    least one slot, so the output is verified by construction.
    """
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    _check_arities(equations, arity_cap)
    tables = [_EquationTables(eq) for eq in equations]
    kept: list[int] = []
    for x in range(1, m + 1):
        probes = []
        blocked = False
        for t in tables:
            hit, dl, dr = t.probe(x)
            if hit:
                blocked = True
                break
            probes.append((t, dl, dr))
        if sum(t.ops for t in tables) > check_cap:
            raise CapExceededError(
                f"greedy scan exceeded {check_cap} elementary checks at x={x}"
            )
        if blocked:
            continue
        kept.append(x)
        for t, dl, dr in probes:
            t.push(x, dl, dr)
    return SolutionFreeCert(
        set_m=tuple(kept),
        equations=tuple(equations),
        method="greedy",
        verified=True,
    )


def max_solution_free_exact(
    m: int,
    equations: Sequence[BipartiteArray],
    *,
    m_cap: int = DEFAULT_EXACT_CAP,
    arity_cap: int = DEFAULT_ARITY_CAP,
    check_cap: int = DEFAULT_CHECK_CAP,
) -> SolutionFreeCert:
    """Branch-and-bound maximum solution-free subset of [1, m].

    Explores include-before-exclude in increasing order with the greedy
    result as the initial bound and only strict improvements recorded,
    which makes the answer the lexicographically smallest maximum set.
    """
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    if m > m_cap:
        raise CapExceededError(f"exact search capped at m <= {m_cap}, got {m}", needed=m)
    _check_arities(equations, arity_cap)
    best = list(greedy_solution_free(m, equations, arity_cap=arity_cap).set_m)
    tables = [_EquationTables(eq) for eq in equations]
    chosen: list[int] = []

    def dfs(x: int) -> None:
        nonlocal best
        if x > m:
            if len(chosen) > len(best):
                best = chosen.copy()
            return
        if len(chosen) + (m - x + 1) <= len(best):
            return
        probes = []
        blocked = False
        for t in tables:
            hit, dl, dr = t.probe(x)
            if hit:
                blocked = True
                break
            probes.append((t, dl, dr))
        if sum(t.ops for t in tables) > check_cap:
            raise CapExceededError(
                f"exact search exceeded {check_cap} elementary checks at x={x}"
            )
        if not blocked:
            for t, dl, dr in probes:
                t.push(x, dl, dr)
            chosen.append(x)
            dfs(x + 1)
            chosen.pop()
            for t in tables:
                t.pop()
        dfs(x + 1)

    dfs(1)
    return SolutionFreeCert(
        set_m=tuple(best),
        equations=tuple(equations),
        method="exact",
        verified=True,
    )


def _singleton_sigma(a: BipartiteArray) -> int:
    if not a.is_monotonic:
        raise ValueError(f"expected a monotonic array, got type {a.shape}")
    if not a.is_invariant:
        raise ValueError(
            "singleton side must equal the sum of the other side "
            f"(sums {sum(a.pos)} != {sum(a.neg)})"
        )
    return a.pos[0] if len(a.pos) == 1 else a.neg[0]


def _machine_check(
    a: BipartiteArray | Sequence[BipartiteArray],
    m_set: Sequence[int],
    notes: list[str],
    label: str,
    arity_cap: int,
    check_cap: int,
) -> None:
    eqs = [a] if isinstance(a, BipartiteArray) else list(a)
    try:
        cert = verify_solution_free(m_set, eqs, arity_cap=arity_cap, check_cap=check_cap)
    except CapExceededError as exc:
        notes.append(f"{label}: above verification cap ({exc}); certified by construction")
        return
    if not cert.verified:
        raise RuntimeError(
            f"{label}: construction produced a set with a solution: "
            f"{cert.witness.to_json_dict() if cert.witness else '?'}"
        )
    notes.append(f"{label}: machine-verified")


def behrend_base(
    a: BipartiteArray,
    m: int,
    *,
    arity_cap: int = DEFAULT_ARITY_CAP,
    check_cap: int = DEFAULT_CHECK_CAP,
    enum_cap: int = 4_000_000,
    greedy_fallback_cap: int = 20_000,
) -> SolutionFreeCert:
    """Sphere-shell base set in [1, m] for a monotonic invariant equation.

    Writes integers in base ``d = max(2*sigma, ceil(2**sqrt(log2 m)))``
    with digits at most ``(d-1) // sigma`` so that evaluating either
    side of the equation is carry-free digit by digit, then keeps the
    squared-norm shell holding the most digit vectors (ties to the
    smallest shell).  Strict convexity of the norm makes the decoded set
    solution-free.  When the base exceeds m the construction degenerates
    and a greedy scan is used instead, recorded in the notes.
    """
    sigma = _singleton_sigma(a)
    if sigma < 2:
        raise ValueError(f"need side sum sigma >= 2, got {sigma}")
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    notes: list[str] = []
    d = max(2 * sigma, math.ceil(2 ** math.sqrt(math.log2(m))) if m >= 2 else 2)
    n_digits = 0
    while d ** (n_digits + 1) <= m:
        n_digits += 1
    if n_digits == 0:
        if m > greedy_fallback_cap:
            raise CapExceededError(
                f"degenerate base (d={d} > m={m}) and m too large for the greedy fallback"
            )
        cert = greedy_solution_free(m, [a], arity_cap=arity_cap, check_cap=check_cap)
        return SolutionFreeCert(
            set_m=cert.set_m,
            equations=cert.equations,
            method="greedy",
            verified=True,
            notes=(f"degenerate base d={d} exceeds m={m}; greedy fallback",),
        )
    digit_bound = (d - 1) // sigma
    total = (digit_bound + 1) ** n_digits
    if total > enum_cap:
        raise CapExceededError(
            f"shell enumeration would need {total} vectors, cap is {enum_cap}",
            needed=total,
        )
    shell_counts: Counter[int] = Counter()
    for vec in itertools.product(range(digit_bound + 1), repeat=n_digits):
        shell_counts[sum(x * x for x in vec)] += 1
    best_shell = max(shell_counts, key=lambda rho: (shell_counts[rho], -rho))
    powers = [d ** i for i in range(n_digits)]
    out = sorted(
        sum(x * p for x, p in zip(vec, powers))
        for vec in itertools.product(range(digit_bound + 1), repeat=n_digits)
        if sum(x * x for x in vec) == best_shell
    )
    if out and out[0] == 0:
        out = out[1:]
    if not out:
        if m > greedy_fallback_cap:
            raise CapExceededError(f"empty shell output and m={m} too large for greedy fallback")
        cert = greedy_solution_free(m, [a], arity_cap=arity_cap, check_cap=check_cap)
        return SolutionFreeCert(
            set_m=cert.set_m,
            equations=cert.equations,
            method="greedy",
            verified=True,
            notes=("best shell held only the zero vector; greedy fallback",),
        )
    notes.append(
        f"base d={d}, digit bound {digit_bound}, {n_digits} digits, "
        f"shell {best_shell} with {len(out)} vectors"
    )
    _machine_check(a, out, notes, "base set", arity_cap, check_cap)
    return SolutionFreeCert(
        set_m=tuple(out),
        equations=(a,),
        method="behrend",
        verified=True,
        notes=tuple(notes),
    )


def link_construct(
    b_set: Iterable[int],
    a: BipartiteArray,
    theta: int,
    which: int,
    digit_count: int,
    *,
    arity_cap: int = DEFAULT_ARITY_CAP,
    check_cap: int = DEFAULT_CHECK_CAP,
    enum_cap: int = 4_000_000,
) -> SolutionFreeCert:
    """Lift a set free for an ancestor of ``a`` to a set free for ``a``.

    With ``beta`` the smaller side maximum of ``a``, the output consists
    of the integers with exactly ``digit_count`` digits drawn from
    ``b_set - 1`` in base ``beta + theta`` (first ancestor kind) or
    ``beta - theta`` (second kind).  ``b_set`` must lie in
    ``[1, beta // sigma]`` where ``sigma`` is the common side sum of the
    ancestor; the digit bound keeps both side evaluations below the
    base, so a digitwise reading of any solution of ``a`` would yield a
    solution of the ancestor.
    """
    anc = ancestor(a, theta, which)
    beta = smaller_maximum(a)
    base = beta + theta if which == 1 else beta - theta
    if base < 2:
        raise ValueError(f"digit base {base} is too small")
    sigma = sum(anc.pos)
    b_max = beta // sigma
    b = sorted(set(int(x) for x in b_set))
    if digit_count < 1:
        raise ValueError(f"need digit_count >= 1, got {digit_count}")
    if b and (b[0] < 1 or b[-1] > b_max):
        raise ValueError(f"b_set must lie in [1, {b_max}], got range [{b[0]}, {b[-1]}]")
    if b_max >= 1 and (b_max - 1) * sigma >= base:
        raise ValueError(
            f"carry-free condition fails: ({b_max}-1)*{sigma} >= base {base}"
        )
    notes = [f"ancestor kind {which}, theta {theta}, base {base}, sigma {sigma}, digits {digit_count}"]
    if b:
        try:
            anc_cert = verify_solution_free(b, [anc], arity_cap=arity_cap, check_cap=check_cap)
            if not anc_cert.verified:
                raise ValueError(
                    "b_set is not solution-free for the ancestor: witness "
                    f"{anc_cert.witness.to_json_dict() if anc_cert.witness else '?'}"
                )
            notes.append("ancestor freeness machine-verified")
        except CapExceededError as exc:
            notes.append(f"ancestor freeness unverified (cap: {exc})")
    count = len(b) ** digit_count
    if count > enum_cap:
        raise CapExceededError(
            f"digit enumeration would need {count} strings, cap is {enum_cap}",
            needed=count,
        )
    powers = [base ** i for i in range(digit_count)]
    digits = [x - 1 for x in b]
    out = sorted(
        sum(x * p for x, p in zip(vec, powers))
        for vec in itertools.product(digits, repeat=digit_count)
    )
    if out and out[0] == 0:
        out = out[1:]
    expected = len(b) ** digit_count - (1 if 1 in b else 0)
    assert len(out) == expected, "digit strings must decode injectively"
    notes.append(f"{len(out)} values in [1, {base ** digit_count - 1}]")
    _machine_check(a, out, notes, "lifted set", arity_cap, check_cap)
    return SolutionFreeCert(
        set_m=tuple(out),
        equations=(a,),
        method="link",
        verified=True,
        notes=tuple(notes),
    )


def pipeline_single_equation(
    u: Sequence[int],
    a_param: float,
    m: int,
    *,
    arity_cap: int = DEFAULT_ARITY_CAP,
    check_cap: int = DEFAULT_CHECK_CAP,
    enum_cap: int = 4_000_000,
    greedy_fallback_cap: int = 20_000,
) -> SolutionFreeCert:
    """Solution-free set in [1, m] for the equation of the sequence ``u``.

    Builds the ancestor string of ``u``, constructs a base set for the
    final monotonic array at its recorded location, then lifts it back
    through the links, choosing at each level the largest digit count
    whose range fits the level's location.  A level whose location is
    smaller than its digit base falls back to a greedy scan there, and
    the fallback is recorded in the notes.
    """
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    string = build_ancestor_string(u, a_param)
    eq0 = string.arrays[0]
    if string.tau == 0:
        cert = behrend_base(
            eq0,
            m,
            arity_cap=arity_cap,
            check_cap=check_cap,
            enum_cap=enum_cap,
            greedy_fallback_cap=greedy_fallback_cap,
        )
        return SolutionFreeCert(
            set_m=cert.set_m,
            equations=cert.equations,
            method=cert.method,
            verified=cert.verified,
            witness=cert.witness,
            notes=("monotonic sequence; direct base construction",) + cert.notes,
        )
    locations = (m,) + string.locations
    notes: list[str] = [
        f"string of length {string.tau + 1}, locations {list(locations)}"
    ]
    level = string.tau
    current = behrend_base(
        string.arrays[level],
        locations[level],
        arity_cap=arity_cap,
        check_cap=check_cap,
        enum_cap=enum_cap,
        greedy_fallback_cap=greedy_fallback_cap,
    )
    notes.extend(f"level {level}: {note}" for note in current.notes)
    notes.append(f"level {level}: {current.method} set of size {len(current.set_m)}")
    for i in range(string.tau, 0, -1):
        target = locations[i - 1]
        theta = string.thetas[i - 1]
        kind = 1 if string.choices[i - 1] == 0 else 2
        beta = smaller_maximum(string.arrays[i - 1])
        base = beta + theta if kind == 1 else beta - theta
        if base > target:
            if target > greedy_fallback_cap:
                raise CapExceededError(
                    f"level {i - 1}: location {target} below base {base} "
                    "and too large for the greedy fallback"
                )
            current = greedy_solution_free(
                target, [string.arrays[i - 1]], arity_cap=arity_cap, check_cap=check_cap
            )
            notes.append(
                f"level {i - 1}: location {target} below base {base}; greedy fallback "
                f"(size {len(current.set_m)})"
            )
            continue
        ell = 1
        while base ** (ell + 1) <= target:
            ell += 1
        current = link_construct(
            current.set_m,
            string.arrays[i - 1],
            theta,
            kind,
            ell,
            arity_cap=arity_cap,
            check_cap=check_cap,
            enum_cap=enum_cap,
        )
        notes.extend(f"level {i - 1}: {note}" for note in current.notes)
    assert all(1 <= x <= m for x in current.set_m)
    verified = current.verified
    witness = None
    try:
        final = verify_solution_free(
            current.set_m, [eq0], arity_cap=arity_cap, check_cap=check_cap
        )
        if final.verified:
            notes.append("end verification: machine-verified against the input equation")
        else:
            verified = False
            witness = final.witness
            notes.append("end verification FAILED")
    except CapExceededError as exc:
        notes.append(f"end verification above cap ({exc}); certified by construction")
    return SolutionFreeCert(
        set_m=current.set_m,
        equations=(eq0,),
        method="pipeline",
        verified=verified,
        witness=witness,
        notes=tuple(notes),
    )
