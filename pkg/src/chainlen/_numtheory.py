"""Integer number theory helpers: primality, primitive roots, square roots.

Everything here is exact and deterministic; no probabilistic answers are
returned (the Miller-Rabin witness set below is deterministic for all
64-bit inputs).
"""

from __future__ import annotations

# Deterministic Miller-Rabin witnesses for n < 3.3 * 10^24 (covers u64).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization; adequate for p-1 of desk-scale primes."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def smallest_primitive_root(p: int) -> int:
    """Smallest generator of F_p^x; fixed per field for reproducible classes."""
    if p == 2:
        return 1
    fac = factorize(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in fac):
            return g
    raise ValueError(f"no primitive root found for {p}")


def two_adic_valuation(n: int) -> int:
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    return v


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) in {-1, 0, 1} via Euler's criterion; p odd prime."""
    a %= p
    if a == 0:
        return 0
    t = pow(a, (p - 1) // 2, p)
    return 1 if t == 1 else -1


def sqrt_mod_p(a: int, p: int) -> int:
    """Square root of a mod an odd prime p via Tonelli-Shanks.

    Returns the smaller of the two roots.  Raises ValueError when a is a
    non-residue; callers translate into NotASquare at the field layer.
    """
    a %= p
    if a == 0:
        return 0
    if legendre(a, p) != 1:
        raise ValueError(f"{a} is not a quadratic residue mod {p}")
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
        return min(r, p - r)
    # write p-1 = q * 2^s with q odd
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, tt = 0, t
        while tt != 1:
            tt = tt * tt % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    assert r * r % p == a
    return min(r, p - r)


def dlog_two_part(x: int, k: int, p: int, g: int) -> int:
    """Index j in Z/2^k with x = g^j modulo 2^k-th powers in F_p^x.

    Requires 2^k | p-1.  2^k is tiny here (symbol degrees), so a direct scan
    of the order-2^k subgroup is both simplest and obviously correct.
    """
    t = (p - 1) >> k
    target = pow(x % p, t, p)
    h = pow(g, t, p)
    cur = 1
    for j in range(1 << k):
        if cur == target:
            return j
        cur = cur * h % p
    raise ValueError(f"{x} not in <g> mod {p}")  # unreachable for x in F_p^x
