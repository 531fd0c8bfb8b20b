"""Bipartite arrays of invariant linear equations and ancestor strings.

An invariant equation with positive coefficient multisets ``pos`` (left
side) and ``neg`` (right side) is stored as a :class:`BipartiteArray`.
Non-monotonic arrays admit two kinds of ancestors, obtained by deleting
the two side maxima and re-inserting their gap shifted by a small
parameter theta.  Chaining ancestor steps along the deletion character
of the originating permutation sequence yields an
:class:`AncestorString` whose last array is monotonic.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .sequences import SeqAnalysis, analyze, check_perm_seq


@dataclass(frozen=True)
class BipartiteArray:
    """A pair of positive-integer multisets encoding ``sum(pos terms) = sum(neg terms)``.

    The equation reads ``pos[0]*x_1 + ... + pos[s-1]*x_s =
    neg[0]*x_{s+1} + ... + neg[r-1]*x_{s+r}``.  Both sides are stored
    sorted ascending; the array is *invariant* when the two side sums
    coincide and *monotonic* when one side is a singleton.
    """

    pos: tuple[int, ...]
    neg: tuple[int, ...]

    def __post_init__(self) -> None:
        pos = tuple(sorted(int(x) for x in self.pos))
        neg = tuple(sorted(int(x) for x in self.neg))
        if not pos or not neg:
            raise ValueError("both sides of a bipartite array must be nonempty")
        if pos[0] < 1 or neg[0] < 1:
            raise ValueError(f"all coefficients must be strictly positive: {pos} ; {neg}")
        object.__setattr__(self, "pos", pos)
        object.__setattr__(self, "neg", neg)

    @property
    def shape(self) -> tuple[int, int]:
        """The (s, r) type: count of positive and of negative coefficients."""
        return len(self.pos), len(self.neg)

    @property
    def length(self) -> int:
        return len(self.pos) + len(self.neg)

    @property
    def is_invariant(self) -> bool:
        return sum(self.pos) == sum(self.neg)

    @property
    def is_monotonic(self) -> bool:
        return len(self.pos) == 1 or len(self.neg) == 1

    @property
    def alpha(self) -> int:
        return self.pos[-1]

    @property
    def alpha_prime(self) -> int:
        return self.neg[-1]

    def elements(self) -> tuple[int, ...]:
        return self.pos + self.neg

    def to_json_dict(self) -> dict:
        return {"pos": list(self.pos), "neg": list(self.neg)}

    @classmethod
    def from_json_dict(cls, d: dict) -> "BipartiteArray":
        return cls(tuple(d["pos"]), tuple(d["neg"]))


def array_from_sequence(u: Sequence[int]) -> BipartiteArray:
    """The invariant equation of a cyclic permutation sequence.

    Slot ``i`` carries the coefficient ``u_i - u_{i-1}`` with cyclic
    wraparound, so the coefficients telescope to zero and the result is
    invariant.  Rotating ``u`` yields the identical array.
    """
    u = check_perm_seq(u, 3)
    k = len(u)
    pos, neg = [], []
    for i in range(k):
        c = u[i] - u[i - 1]
        (pos if c > 0 else neg).append(abs(c))
    return BipartiteArray(tuple(pos), tuple(neg))


@dataclass(frozen=True)
class ArrayDiagnostics:
    """Structural measurements of a bipartite array.

    ``delta`` is the minimum over all coefficients and all pairwise
    coefficient gaps (taken over distinct multiset members, so a
    repeated value forces ``delta = 0``).  ``z_set`` is the coefficient
    multiset plus the gap ``|alpha - alpha_prime|`` with one copy each
    of the two side maxima removed.
    """

    alpha: int
    alpha_prime: int
    gap: int
    delta: int
    z_set: tuple[int, ...]
    mutually_unequal: bool


def diagnostics(a: BipartiteArray) -> ArrayDiagnostics:
    elems = a.elements()
    alpha, alpha_prime = a.alpha, a.alpha_prime
    gap = abs(alpha - alpha_prime)
    pair_gaps = [
        abs(elems[i] - elems[j])
        for i in range(len(elems))
        for j in range(i + 1, len(elems))
    ]
    delta = min(list(elems) + pair_gaps)
    z = Counter(elems)
    z[gap] += 1
    z[alpha] -= 1
    z[alpha_prime] -= 1
    z_set = tuple(sorted(z.elements()))
    return ArrayDiagnostics(
        alpha=alpha,
        alpha_prime=alpha_prime,
        gap=gap,
        delta=delta,
        z_set=z_set,
        mutually_unequal=len(set(elems)) == len(elems),
    )


def ancestor(a: BipartiteArray, theta: int, which: int) -> BipartiteArray:
    """One of the two ancestor surgeries of an invariant array by ``theta``.

    Both side maxima are removed; the first kind re-inserts
    ``|alpha - alpha_prime| - theta`` together with ``theta`` on the
    side of the larger maximum, the second kind re-inserts
    ``|alpha - alpha_prime| + theta`` there and ``theta`` on the other
    side.  Either output is invariant and its (s, r) type differs from
    the input's by at most one in each component.
    """
    if which not in (1, 2):
        raise ValueError(f"ancestor kind must be 1 or 2, got {which}")
    if theta < 1:
        raise ValueError(f"theta must be a positive integer, got {theta}")
    if not a.is_invariant:
        raise ValueError(f"ancestor requires an invariant array, got sums {sum(a.pos)} != {sum(a.neg)}")
    alpha, alpha_prime = a.alpha, a.alpha_prime
    if alpha == alpha_prime:
        raise ValueError(f"side maxima coincide (alpha = alpha' = {alpha}); ancestors undefined")
    gap = abs(alpha_prime - alpha)
    pos = list(a.pos[:-1])
    neg = list(a.neg[:-1])
    if which == 1:
        new_main = gap - theta
    else:
        new_main = gap + theta
    if new_main < 1:
        raise ValueError(
            f"ancestor element {('|alpha-alpha`|-theta')} = {gap} - {theta} is not positive"
        )
    if alpha_prime > alpha:
        # larger maximum on the negative side
        if which == 1:
            neg += [new_main, theta]
        else:
            pos.append(theta)
            neg.append(new_main)
    else:
        if which == 1:
            pos += [new_main, theta]
        else:
            pos.append(new_main)
            neg.append(theta)
    out = BipartiteArray(tuple(pos), tuple(neg))
    assert out.is_invariant
    return out


def _floor_pow2(exponent: float) -> int:
    """floor(2**exponent) for a nonnegative float exponent.

    Beyond the double range the result is assembled from a shifted
    mantissa; the final +-1 is then not guaranteed.
    """
    if exponent < 1020:
        return int(2.0 ** exponent)
    shift = int(exponent) - 52
    return int(2.0 ** (exponent - shift)) << shift


def theta_schedule(min_u: int, a: float, steps: int) -> tuple[int, ...]:
    """The shrinking theta sequence seeded from the smallest sequence entry.

    ``theta_1 = floor(2 ** (log2(min_u) ** a))`` and each later value
    applies the same map to its predecessor.  Values never drop below 2
    for ``min_u >= 2`` and ``0 < a < 1``; the floor of the first map is
    evaluated in double precision (see :func:`_floor_pow2`).
    """
    if min_u < 2:
        raise ValueError(f"schedule seed must be >= 2, got {min_u}")
    if not 0.0 < a < 1.0:
        raise ValueError(f"shrink exponent must lie in (0, 1), got {a}")
    if steps < 1:
        raise ValueError(f"need at least one step, got {steps}")
    out: list[int] = []
    x = min_u
    for j in range(steps):
        x = _floor_pow2(math.log2(x) ** a)
        if x < 2:
            raise ValueError(f"schedule value fell below 2 at step {j + 1}")
        out.append(x)
    return tuple(out)


class AncestorStepError(ValueError):
    """An ancestor surgery failed during string construction.

    ``step`` is the 1-based index of the failing step; these inputs are
    numerically too small for the construction's shrinking thetas.
    """

    def __init__(self, step: int, message: str):
        super().__init__(f"ancestor step {step}: {message}")
        self.step = step


@dataclass(frozen=True)
class AncestorString:
    """A chain of arrays, each an ancestor of the one before it.

    ``choices[i]`` is the character bit of step ``i+1``: bit 0 selects
    the first ancestor kind, bit 1 the second.  ``locations[i]`` is
    ``floor(alpha_i / sigma_{i+1})`` where ``alpha_i`` is the smaller
    side maximum of ``arrays[i]`` and ``sigma_{i+1}`` the common side
    sum of ``arrays[i+1]``; it is the working range for the solution
    free set of ``arrays[i+1]`` when lifting back to ``arrays[i]``.
    """

    arrays: tuple[BipartiteArray, ...]
    thetas: tuple[int, ...]
    choices: tuple[int, ...]
    locations: tuple[int, ...]
    analysis: SeqAnalysis | None = field(default=None, compare=False)

    @property
    def tau(self) -> int:
        return len(self.thetas)

    @property
    def final(self) -> BipartiteArray:
        return self.arrays[-1]

    def to_json_dict(self) -> dict:
        return {
            "arrays": [arr.to_json_dict() for arr in self.arrays],
            "thetas": list(self.thetas),
            "choices": list(self.choices),
            "locations": list(self.locations),
        }


def smaller_maximum(a: BipartiteArray) -> int:
    """The smaller of the two side maxima."""
    return min(a.alpha, a.alpha_prime)


def build_ancestor_string(u: Sequence[int], a: float) -> AncestorString:
    """Reduce the equation of ``u`` to a monotonic one through ancestors.

    Step ``i`` applies the first ancestor kind when the deletion
    character bit is 0 and the second kind otherwise, with theta taken
    from :func:`theta_schedule`.  For a monotonic input the string is
    the single array.  When every step succeeds the final array is
    monotonic of type ``(k-1, 1)`` if the terminal direction is
    increasing and ``(1, k-1)`` if decreasing, and all thetas appear
    among its coefficients.

    Raises :class:`AncestorStepError` with the failing step index when a
    surgery would produce a nonpositive coefficient.
    """
    u = check_perm_seq(u, 3)
    info = analyze(u)
    first = array_from_sequence(u)
    if info.tau == 0:
        return AncestorString((first,), (), (), (), analysis=info)
    thetas = theta_schedule(min(u), a, info.tau)
    chain = [first]
    for i in range(1, info.tau + 1):
        kind = 1 if info.chi[i - 1] == 0 else 2
        try:
            chain.append(ancestor(chain[-1], thetas[i - 1], kind))
        except ValueError as exc:
            raise AncestorStepError(i, str(exc)) from exc
    locations = tuple(
        smaller_maximum(chain[i - 1]) // sum(chain[i].pos)
        for i in range(1, info.tau + 1)
    )
    return AncestorString(
        arrays=tuple(chain),
        thetas=thetas,
        choices=info.chi,
        locations=locations,
        analysis=info,
    )


@dataclass(frozen=True)
class PlasticParams:
    """Shape parameters for plastic-set and feasibility diagnostics."""

    a: float
    b: float
    t: int

    def __post_init__(self) -> None:
        if self.t < 3:
            raise ValueError(f"need t >= 3, got {self.t}")
        if not (0.0 < self.b <= self.a ** self.t < 1.0):
            raise ValueError(
                f"parameters must satisfy 0 < b <= a^t < 1, got a={self.a}, b={self.b}, t={self.t}"
            )
