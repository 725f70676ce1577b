"""Construction of the prime-grouped measurement plan.

A plan pairs a short list of small "fine" primes p_1..p_m (with p_0 = 1
implicit) against a longer list of "coarse" primes q_1..q_K.  Sampling a
signal modulo every product p_l * q_j yields residue bins in which any
small set of frequencies is isolated often enough for majority voting,
and the residues recombine to full frequencies by the CRT.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .number_theory import generate_primes


@dataclass(frozen=True)
class PrimePlan:
    """Immutable measurement design for signal length n and sparsity k."""

    n: int
    k: int
    p_primes: tuple[int, ...]
    q_primes: tuple[int, ...]

    @property
    def m(self) -> int:
        """Number of fine primes (levels 1..m; level 0 uses no fine prime)."""
        return len(self.p_primes)

    @property
    def K(self) -> int:
        """Number of coarse residue groups."""
        return len(self.q_primes)

    @property
    def p_product(self) -> int:
        product = 1
        for p in self.p_primes:
            product *= p
        return product

    @property
    def total_measurements(self) -> int:
        """sum over j of sum over l in [0, m] of p_l * q_j."""
        return (1 + sum(self.p_primes)) * sum(self.q_primes)

    def p(self, l: int) -> int:
        """Fine prime at level l, with level 0 meaning no refinement."""
        return 1 if l == 0 else self.p_primes[l - 1]

    def q(self, j: int) -> int:
        """Coarse prime for group j (1-based)."""
        return self.q_primes[j - 1]

    def modulus(self, l: int, j: int) -> int:
        return self.p(l) * self.q(j)

    def pairs(self) -> Iterator[tuple[int, int]]:
        """All (j, l) measurement pairs, j in [1, K], l in [0, m]."""
        for j in range(1, self.K + 1):
            for l in range(self.m + 1):
                yield j, l

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "m": self.m,
            "K": self.K,
            "p_primes": list(self.p_primes),
            "q_primes": list(self.q_primes),
            "total_measurements": self.total_measurements,
        }


@dataclass(frozen=True)
class SubsetAddress:
    """Identifies one residue class: level l, group j, residue h mod p_l*q_j."""

    l: int
    j: int
    h: int


def plan_parameters(n: int, k: int) -> PrimePlan:
    """Build the measurement plan for signal length n and separation sparsity k.

    The fine primes are the shortest prefix 2, 3, 5, ... whose product
    reaches n/k; the coarse primes are the first K = 3*k*floor(log_k n) + 1
    primes at or above max(p_m, k).  Together q_1 * p_1 * ... * p_m >= n,
    so residues pin down any in-window frequency uniquely.
    """
    if n < 4:
        raise ValueError(f"signal length must be at least 4, got {n}")
    if k < 2:
        raise ValueError(f"separation sparsity must be at least 2, got {k}")
    if k >= n:
        raise ValueError(
            f"separation sparsity {k} must be smaller than signal length {n}"
        )

    # Smallest m with p_1 * ... * p_m >= n / k, compared in exact integer
    # arithmetic (product * k >= n) to dodge float boundary errors.
    pool = generate_primes(16, 2)
    p_primes: list[int] = []
    product = 1
    while product * k < n:
        if len(p_primes) == len(pool):
            pool = generate_primes(2 * len(pool), 2)
        nxt = pool[len(p_primes)]
        p_primes.append(nxt)
        product *= nxt

    # floor(log_k n) via integer powers; float log is off-by-one prone
    # when n is an exact power of k.
    exponent = 0
    power = k
    while power <= n:
        exponent += 1
        power *= k

    groups = 3 * k * exponent + 1
    q_primes = generate_primes(groups, max(p_primes[-1], k))
    return PrimePlan(n=n, k=k, p_primes=tuple(p_primes), q_primes=tuple(q_primes))


def subset_membership(addr: SubsetAddress, plan: PrimePlan, value: int) -> bool:
    """True iff `value` falls in the residue class named by `addr`.

    Negative values are reduced into [0, modulus) first, so signed
    frequencies test correctly.
    """
    if not 0 <= addr.l <= plan.m:
        raise ValueError(f"level {addr.l} out of range [0, {plan.m}]")
    if not 1 <= addr.j <= plan.K:
        raise ValueError(f"group {addr.j} out of range [1, {plan.K}]")
    modulus = plan.modulus(addr.l, addr.j)
    if not 0 <= addr.h < modulus:
        raise ValueError(f"residue {addr.h} out of range for modulus {modulus}")
    return value % modulus == addr.h


def verify_k_majority(plan: PrimePlan, elements: Iterable[int]) -> dict[int, int]:
    """Count, per element, the coarse groups where it is isolated from the rest.

    For a healthy plan every count exceeds 2K/3 whenever the set has at
    most `plan.k` elements; a smaller count indicates a plan-construction
    bug and should be treated as such by the caller.
    """
    xs = sorted(set(int(x) for x in elements))
    if len(xs) > plan.k:
        raise ValueError(f"set of {len(xs)} elements exceeds plan sparsity {plan.k}")
    counts: dict[int, int] = {}
    for x in xs:
        others = [y for y in xs if y != x]
        counts[x] = sum(
            1
            for q in plan.q_primes
            if all((x - y) % q != 0 for y in others)
        )
    return counts


def verify_lift_uniqueness(plan: PrimePlan, elements: Iterable[int], j: int) -> bool:
    """Exhaustively check the residue-lift property for coarse group j.

    Whenever some x is alone in its class mod q_j, then at every level l
    exactly one refinement offset b in [0, p_l) keeps x alone in the class
    h + b*q_j mod p_l*q_j, no other set element appears at any offset, and
    that offset reveals x mod p_l.  Returns False on any violation.
    """
    xs = sorted(set(int(x) for x in elements))
    if not 1 <= j <= plan.K:
        raise ValueError(f"group {j} out of range [1, {plan.K}]")
    q = plan.q(j)
    for x in xs:
        if any((x - y) % q == 0 for y in xs if y != x):
            continue  # not isolated in this group
        h = x % q
        for l in range(1, plan.m + 1):
            p = plan.p(l)
            modulus = p * q
            sole_hits = []
            for b in range(p):
                klass = (h + b * q) % modulus
                members = {y for y in xs if y % modulus == klass}
                if members == {x}:
                    sole_hits.append(b)
                elif members:
                    return False  # another element leaked into the lane
            if len(sole_hits) != 1:
                return False
            b = sole_hits[0]
            if (h + b * q) % p != x % p:
                return False
    return True
