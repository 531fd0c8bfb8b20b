"""Cyclic permutation sequences and their max-deletion analysis.

A permutation sequence is a tuple of pairwise distinct nonnegative
integers, treated as a cyclic word.  Repeatedly deleting the maximum
entry drives any sequence of length >= 3 to a cyclically monotonic one;
the number of steps needed (terminating number tau), the direction of
the terminal sequence (epsilon) and the per-step deletion character
(chi) steer the ancestor-string construction in :mod:`sephash.arrays`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


def check_perm_seq(entries: Sequence[int], min_len: int = 2) -> tuple[int, ...]:
    """Validate a permutation sequence and return it as a tuple of ints."""
    u = tuple(int(x) for x in entries)
    if len(u) < min_len:
        raise ValueError(f"permutation sequence needs length >= {min_len}, got {u!r}")
    if any(x < 0 for x in u):
        raise ValueError(f"entries must be nonnegative: {u!r}")
    if len(set(u)) != len(u):
        raise ValueError(f"entries must be pairwise distinct: {u!r}")
    return u


def is_monotonic(u: Sequence[int]) -> tuple[bool, bool]:
    """Return ``(increasing, decreasing)`` flags for the cyclic sequence.

    ``increasing`` is true iff some rotation of ``u`` is strictly
    increasing, equivalently iff ``u`` has exactly one cyclic descent;
    ``decreasing`` is the analogue with exactly one cyclic ascent.  For
    length 2 both flags are true; for length >= 3 at most one is.
    """
    u = check_perm_seq(u, 2)
    k = len(u)
    descents = sum(1 for i in range(k) if u[i] > u[(i + 1) % k])
    return descents == 1, descents == k - 1


def delete_max(u: Sequence[int]) -> tuple[int, ...]:
    """Remove the unique maximum entry, keeping the order of the rest."""
    u = check_perm_seq(u, 2)
    m = max(u)
    return tuple(x for x in u if x != m)


@dataclass(frozen=True)
class SeqAnalysis:
    """Deletion analysis of a permutation sequence.

    ``deletions[j]`` is the sequence after ``j`` max-deletions,
    ``tau = len(deletions) - 1`` is the terminating number,
    ``epsilon`` is 1 iff the terminal sequence is cyclically increasing,
    and ``chi`` holds one bit per deletion step.
    """

    tau: int
    epsilon: int
    chi: tuple[int, ...]
    deletions: tuple[tuple[int, ...], ...]

    def to_json_dict(self) -> dict:
        return {
            "tau": self.tau,
            "epsilon": self.epsilon,
            "chi": list(self.chi),
            "deletions": [list(d) for d in self.deletions],
        }


def analyze(u: Sequence[int]) -> SeqAnalysis:
    """Run the max-deletion chain on ``u`` and report tau, epsilon, chi.

    The step-``j`` character bit compares the cyclic neighbors of the
    maximum of ``deletions[j-1]``: it equals ``1 - epsilon`` when the
    predecessor is smaller than the successor and ``epsilon`` otherwise.
    """
    u = check_perm_seq(u, 3)
    chain = [u]
    while not any(is_monotonic(chain[-1])):
        chain.append(delete_max(chain[-1]))
    tau = len(chain) - 1
    increasing, _ = is_monotonic(chain[-1])
    epsilon = 1 if increasing else 0
    chi = []
    for j in range(1, tau + 1):
        seq = chain[j - 1]
        n = len(seq)
        p = seq.index(max(seq))
        before, after = seq[(p - 1) % n], seq[(p + 1) % n]
        chi.append((1 + epsilon) % 2 if before < after else epsilon)
    return SeqAnalysis(tau=tau, epsilon=epsilon, chi=tuple(chi), deletions=tuple(chain))


def enumerate_sequences(r: Iterable[int], k: int) -> list[tuple[int, ...]]:
    """All k-permutation sequences of ``r``, one per cyclic rotation class.

    The canonical representative starts at the maximum entry, so the
    result has ``|r|! / ((|r|-k)! * k)`` sequences, listed in a fixed
    deterministic order.
    """
    elems = sorted(r)
    if len(set(elems)) != len(elems):
        raise ValueError(f"ground set has repeated entries: {elems!r}")
    if any(x < 0 for x in elems):
        raise ValueError(f"ground set entries must be nonnegative: {elems!r}")
    if k < 3:
        raise ValueError(f"need k >= 3, got {k}")
    if k > len(elems):
        raise ValueError(f"k={k} exceeds ground set size {len(elems)}")
    out: list[tuple[int, ...]] = []
    for combo in itertools.combinations(elems, k):
        head = combo[-1]
        for rest in itertools.permutations(combo[:-1]):
            out.append((head,) + rest)
    return out


def rotations(u: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Yield all cyclic rotations of ``u``."""
    u = tuple(u)
    for i in range(len(u)):
        yield u[i:] + u[:i]
