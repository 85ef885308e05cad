"""Finite-horizon subsets of the naturals: exact densities and recurrence-family probes.

A :class:`FiniteNatSet` knows its membership exactly on ``[0, horizon]`` and
nothing beyond, so everything here is a statement "at horizon": densities are
exact rationals computed on that window, and family memberships (syndetic,
difference-set, finite-sums) are witness searches over the window, never
decisions about an infinite set.

Density conventions, with ``card`` counting elements of ``A`` in the stated
interval and all ratios exact :class:`fractions.Fraction` values:

* prefix density at ``N``:   ``card(A, [0, N]) / (N + 1)``
* lower/upper running value: inf/sup of the prefix density over
  ``n in [floor(N/10), N]`` (the burn-in discards tiny prefixes)
* upper Banach at window ``N``: ``max_m card(A, [m, m+N]) / (N + 1)`` over all
  windows contained in ``[0, horizon]``, with the smallest maximizing ``m``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import EmptySetError, HorizonExceededError

__all__ = [
    "FiniteNatSet",
    "DensityEstimate",
    "BanachWindow",
    "DensitySummary",
    "lower_density",
    "upper_density",
    "upper_banach_density",
    "syndetic_gap",
    "delta_witness_search",
    "ip_witness_search",
    "dual_hit_test",
    "density_summary",
]


@dataclass(frozen=True)
class FiniteNatSet:
    """A subset of ``{0, 1, ..., horizon}`` with sorted, duplicate-free elements."""

    elements: tuple[int, ...]
    horizon: int

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError(f"horizon must be >= 0, got {self.horizon}")
        prev = -1
        for e in self.elements:
            if e <= prev:
                raise ValueError("elements must be strictly increasing")
            prev = e
        if self.elements:
            if self.elements[0] < 0:
                raise ValueError("elements must be naturals")
            if self.elements[-1] > self.horizon:
                raise ValueError(
                    f"element {self.elements[-1]} exceeds horizon {self.horizon}"
                )

    @classmethod
    def from_iterable(cls, elements: Iterable[int], horizon: int) -> "FiniteNatSet":
        return cls(tuple(sorted(set(int(e) for e in elements))), horizon)

    @classmethod
    def from_runs(cls, runs: Sequence[Sequence[int]], horizon: int) -> "FiniteNatSet":
        """Build from inclusive runs ``[[a, b], ...]``; runs may overlap."""
        elems = set()
        for a, b in runs:
            if b < a:
                raise ValueError(f"run [{a}, {b}] is empty")
            elems.update(range(int(a), int(b) + 1))
        return cls.from_iterable(elems, horizon)

    @classmethod
    def full(cls, horizon: int) -> "FiniteNatSet":
        return cls(tuple(range(horizon + 1)), horizon)

    @classmethod
    def empty(cls, horizon: int) -> "FiniteNatSet":
        return cls((), horizon)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, n):
        return n in self.as_set()

    def as_set(self) -> frozenset:
        cached = self.__dict__.get("_as_set")
        if cached is None:
            cached = frozenset(self.elements)
            self.__dict__["_as_set"] = cached
        return cached

    def indicator(self, upto: int | None = None) -> np.ndarray:
        """0/1 array of length ``upto + 1`` (default: horizon + 1)."""
        n = self.horizon if upto is None else upto
        ind = np.zeros(n + 1, dtype=np.int64)
        if self.elements:
            arr = np.asarray(self.elements)
            ind[arr[arr <= n]] = 1
        return ind

    def to_json_dict(self) -> dict:
        return {"horizon": self.horizon, "elements": list(self.elements)}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "FiniteNatSet":
        """Accepts either ``{"horizon", "elements"}`` or run-length ``{"horizon", "runs"}``."""
        horizon = int(obj["horizon"])
        if "elements" in obj:
            return cls.from_iterable(obj["elements"], horizon)
        if "runs" in obj:
            return cls.from_runs(obj["runs"], horizon)
        raise ValueError("expected 'elements' or 'runs' key")


class DensityEstimate(NamedTuple):
    """Prefix density at ``N`` plus the running extremum over the burn-in range."""

    value: Fraction
    running: Fraction


class BanachWindow(NamedTuple):
    """Best sliding-window ratio and the smallest offset attaining it."""

    ratio: Fraction
    start: int


@dataclass(frozen=True)
class DensitySummary:
    lower_at_horizon: Fraction
    upper_at_horizon: Fraction
    banach_upper: dict[int, BanachWindow]
    prefix_profile: tuple[tuple[int, Fraction], ...]


def _check_prefix(A: FiniteNatSet, N: int) -> np.ndarray:
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    if N > A.horizon:
        raise HorizonExceededError(f"N={N} exceeds horizon {A.horizon}")
    return np.cumsum(A.indicator(N))


def lower_density(A: FiniteNatSet, N: int) -> DensityEstimate:
    """Prefix density at ``N`` and the running infimum over ``[floor(N/10), N]``.

    The running infimum is the finite-horizon stand-in for the lower density
    liminf. Index location uses floats (safe: distinct prefix ratios differ by
    at least ``1/(N+1)^2``, far above roundoff), the returned value is exact.
    """
    counts = _check_prefix(A, N)
    burn = N // 10
    denoms = np.arange(burn + 1, N + 2, dtype=np.float64)
    ratios = counts[burn:] / denoms
    k = int(np.argmin(ratios))
    n = burn + k
    return DensityEstimate(
        value=Fraction(int(counts[N]), N + 1),
        running=Fraction(int(counts[n]), n + 1),
    )


def upper_density(A: FiniteNatSet, N: int) -> DensityEstimate:
    """Prefix density at ``N`` and the running supremum over ``[floor(N/10), N]``."""
    counts = _check_prefix(A, N)
    burn = N // 10
    denoms = np.arange(burn + 1, N + 2, dtype=np.float64)
    ratios = counts[burn:] / denoms
    k = int(np.argmax(ratios))
    n = burn + k
    return DensityEstimate(
        value=Fraction(int(counts[N]), N + 1),
        running=Fraction(int(counts[n]), n + 1),
    )


def upper_banach_density(A: FiniteNatSet, window_len: int) -> BanachWindow:
    """Best density over all windows ``[m, m + window_len]`` inside the horizon.

    Single cumulative pass, O(horizon). Ties resolve to the smallest ``m``.
    """
    N = window_len
    if N < 0:
        raise ValueError(f"window_len must be >= 0, got {N}")
    if N > A.horizon:
        raise HorizonExceededError(
            f"window_len={N} exceeds horizon {A.horizon}"
        )
    ind = A.indicator()
    prefix = np.concatenate([[0], np.cumsum(ind)])
    # window count for offset m is prefix[m + N + 1] - prefix[m]
    counts = prefix[N + 1 :] - prefix[: A.horizon - N + 1]
    m_star = int(np.argmax(counts))
    return BanachWindow(ratio=Fraction(int(counts[m_star]), N + 1), start=m_star)


def syndetic_gap(A: FiniteNatSet) -> int:
    """Largest gap, counting the lead-in from 0 and the tail out to the horizon.

    ``A`` is syndetic at horizon with bound ``m`` iff the returned gap is
    ``<= m + 1``: every length-``m+1`` window inside the horizon then meets ``A``.
    """
    if not A.elements:
        raise EmptySetError("syndetic gap of the empty set is undefined")
    arr = np.asarray(A.elements)
    gaps = np.diff(arr)
    g = int(gaps.max()) if gaps.size else 0
    return max(g, int(arr[0]), A.horizon - int(arr[-1]))


def delta_witness_search(
    A: FiniteNatSet, size: int, bound: int
) -> tuple[int, ...] | None:
    """Search for ``B`` of the given size in ``[0, bound]`` with all positive
    pairwise differences inside ``A``.

    Depth-first over ascending candidates, so the greedy witness is found first
    and backtracking kicks in only when the greedy path dies. ``None`` means no
    witness exists within the bound, not that no difference set lands in ``A``.
    """
    if size < 2:
        raise ValueError(f"size must be >= 2, got {size}")
    if bound > A.horizon:
        raise HorizonExceededError(f"bound={bound} exceeds horizon {A.horizon}")
    members = A.as_set()

    def extend(chosen: list[int], start: int) -> tuple[int, ...] | None:
        if len(chosen) == size:
            return tuple(chosen)
        for c in range(start, bound + 1):
            if all((c - b) in members for b in chosen):
                chosen.append(c)
                found = extend(chosen, c + 1)
                if found is not None:
                    return found
                chosen.pop()
        return None

    return extend([], 0)


class IPWitness(NamedTuple):
    generators: tuple[int, ...]
    finite_sums: tuple[int, ...]


def ip_witness_search(A: FiniteNatSet, size: int, bound: int) -> IPWitness | None:
    """Search for generators ``x_1 < ... < x_k`` whose nonempty finite sums all
    lie in ``A``.

    Candidates are positive and sum-dominated (each new generator exceeds the
    sum of those already chosen), so the ``2^k - 1`` finite sums are pairwise
    distinct; greedy-first depth-first search with backtracking. The finite-sums
    set is returned for audit. ``None`` means no such witness within the bound.
    """
    if size < 1:
        raise ValueError(f"size must be >= 1, got {size}")
    members = A.as_set()

    def extend(chosen: list[int], sums: list[int]) -> IPWitness | None:
        if len(chosen) == size:
            return IPWitness(tuple(chosen), tuple(sorted(sums)))
        total = sum(chosen)
        for c in range(total + 1, bound + 1):
            if total + c > A.horizon:
                break
            new_sums = [c] + [c + s for s in sums]
            if all(s in members for s in new_sums):
                chosen.append(c)
                found = extend(chosen, sums + new_sums)
                if found is not None:
                    return found
                chosen.pop()
        return None

    return extend([], [])


def dual_hit_test(A: FiniteNatSet, members: Sequence[FiniteNatSet]) -> bool:
    """True iff ``A`` meets every set in ``members`` (a dual-family surrogate)."""
    if not members:
        raise ValueError("members must be nonempty")
    a = A.as_set()
    return all(a & B.as_set() for B in members)


def density_summary(
    A: FiniteNatSet,
    window_lengths: Sequence[int] = (),
    profile_points: int = 32,
) -> DensitySummary:
    """Assemble the standard density readout of a set at its own horizon."""
    H = A.horizon
    lo = lower_density(A, H)
    hi = upper_density(A, H)
    banach = {int(N): upper_banach_density(A, int(N)) for N in window_lengths}
    if H == 0:
        ns = [0]
    else:
        ns = sorted(set(np.geomspace(1, H, num=min(profile_points, H)).astype(int)))
    counts = np.cumsum(A.indicator())
    profile = tuple((int(n), Fraction(int(counts[n]), int(n) + 1)) for n in ns)
    return DensitySummary(
        lower_at_horizon=lo.running,
        upper_at_horizon=hi.running,
        banach_upper=banach,
        prefix_profile=profile,
    )
