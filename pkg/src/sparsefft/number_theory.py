"""Prime generation and Chinese-remainder reconstruction.

All arithmetic is done with Python's arbitrary-precision integers; modulus
products routinely exceed 64 bits for long signals and silent overflow
would corrupt frequency identification invisibly.
"""

from __future__ import annotations

from dataclasses import dataclass


def extended_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, s, t) with g = gcd(a, b) and s*a + t*b = g."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r != 0:
        quotient = old_r // r
        old_r, r = r, old_r - quotient * r
        old_s, s = s, old_s - quotient * s
        old_t, t = t, old_t - quotient * t
    return old_r, old_s, old_t


@dataclass
class ResidueSystem:
    """A remainder tuple (x mod m_1, ..., x mod m_k) awaiting recombination.

    Moduli must be pairwise coprime for the combined solution to be unique;
    that is checked during combination rather than here, since a violation
    indicates a bug in whoever designed the moduli.
    """

    residues: tuple[int, ...]
    moduli: tuple[int, ...]

    def __post_init__(self) -> None:
        self.residues = tuple(int(r) for r in self.residues)
        self.moduli = tuple(int(m) for m in self.moduli)
        if len(self.residues) != len(self.moduli):
            raise ValueError("residues and moduli must have the same length")
        if not self.moduli:
            raise ValueError("at least one congruence is required")
        for r, m in zip(self.residues, self.moduli):
            if m < 1:
                raise ValueError(f"modulus must be >= 1, got {m}")
            if not 0 <= r < m:
                raise ValueError(f"residue {r} out of range for modulus {m}")


def crt_combine(rs: ResidueSystem) -> int:
    """Solve the congruence system by iterative pairwise combination.

    Returns the unique x in [0, prod(moduli)) with x = residues[i] mod
    moduli[i] for every i.  Raises ValueError if the moduli are not
    pairwise coprime.
    """
    x = rs.residues[0] % rs.moduli[0]
    modulus = rs.moduli[0]
    for r, m in zip(rs.residues[1:], rs.moduli[1:]):
        g, s, _ = extended_gcd(modulus, m)
        if g != 1:
            raise ValueError(
                f"moduli not pairwise coprime: gcd({modulus}, {m}) = {g}"
            )
        # x + modulus*t = r (mod m)  =>  t = (r - x) * modulus^-1 (mod m)
        t = ((r - x) * s) % m
        x += modulus * t
        modulus *= m
    return x


def generate_primes(count: int, lower_bound: int = 2) -> list[int]:
    """Return the first `count` primes >= lower_bound, ascending.

    The sieve is grown geometrically until enough primes are found, so the
    result is always gap-free.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    lo = max(2, int(lower_bound))
    limit = max(2 * lo, 64)
    while True:
        composite = bytearray(limit + 1)
        primes: list[int] = []
        for i in range(2, limit + 1):
            if composite[i]:
                continue
            if i >= lo:
                primes.append(i)
                if len(primes) == count:
                    return primes
            for j in range(i * i, limit + 1, i):
                composite[j] = 1
        limit *= 2
