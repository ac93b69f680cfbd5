"""Modular arithmetic and complete exponential sums: Dirichlet characters to
prime moduli, Gauss sums, Ramanujan sums, Kloosterman sums, and the
three-case twisted character sum over z of

    conj(chi)(r1 + z) * chi(r2 + alpha / (m + gamma / z)).

Characters are realized through a discrete-log table against the least
primitive root, which is all the prime-modulus setting needs.  Complex sums
are accumulated with exactly rounded compensated summation, so equality
claims hold to 1e-10 regardless of iteration order.  Character tables are
immutable after construction.
"""
from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np

from .errors import DegenerateInputError, ParameterError

__all__ = [
    "sieve",
    "is_prime",
    "primitive_root",
    "DirichletCharacter",
    "all_characters",
    "ramanujan_sum",
    "ramanujan_sum_numeric",
    "gauss_sum",
    "kloosterman",
    "kloosterman_matrix",
    "twisted_pair_sum_bruteforce",
    "twisted_pair_sum_closed",
]

_CHARACTER_MODULUS_CAP = 10 ** 6


def sieve(n: int) -> list[int]:
    """Primes up to n inclusive."""
    if n < 2:
        return []
    flags = bytearray([1]) * (n + 1)
    flags[0] = flags[1] = 0
    for p in range(2, int(math.isqrt(n)) + 1):
        if flags[p]:
            start = p * p
            flags[start::p] = bytearray(len(range(start, n + 1, p)))
    return [i for i, f in enumerate(flags) if f]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def primitive_root(q: int) -> int:
    """Least primitive root modulo a prime q."""
    if not is_prime(q):
        raise ParameterError(f"{q} is not prime")
    if q == 2:
        return 1
    phi = q - 1
    fac = []
    m = phi
    d = 2
    while d * d <= m:
        if m % d == 0:
            fac.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        fac.append(m)
    for g in range(2, q):
        if all(pow(g, phi // f, q) != 1 for f in fac):
            return g
    raise ParameterError(f"no primitive root found for {q}")  # unreachable


class DirichletCharacter:
    """Character of index k modulo a prime q, with respect to the least
    primitive root g: chi(g^e) = e(k e / (q-1)); chi(n) = 0 when q | n.

    Index 0 is the principal character; the character's order is
    (q-1)/gcd(k, q-1), and it is quadratic exactly when k = (q-1)/2.
    """

    __slots__ = ("q", "index", "_values", "_dlog")

    def __init__(self, q: int, index: int):
        if not is_prime(q) or q < 3:
            raise ParameterError(f"character modulus must be an odd prime, got {q}")
        if q > _CHARACTER_MODULUS_CAP:
            raise ParameterError(
                f"character modulus capped at {_CHARACTER_MODULUS_CAP}")
        self.q = q
        self.index = index % (q - 1)
        self._dlog = _dlog_table(q)
        roots = np.exp(2j * np.pi * (np.arange(q - 1) * self.index % (q - 1))
                       / (q - 1))
        vals = np.zeros(q, dtype=complex)
        vals[1:] = roots[self._dlog[1:]]
        self._values = vals
        self._values.setflags(write=False)

    def __call__(self, n):
        if isinstance(n, (int, np.integer)):
            return complex(self._values[int(n) % self.q])
        idx = np.asarray(n) % self.q
        return self._values[idx]

    @property
    def order(self) -> int:
        return (self.q - 1) // math.gcd(self.index, self.q - 1)

    @property
    def is_principal(self) -> bool:
        return self.index == 0

    @property
    def is_quadratic(self) -> bool:
        return self.q > 2 and self.index == (self.q - 1) // 2

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(self.q, (-self.index) % (self.q - 1))

    def parity(self) -> int:
        """chi(-1), always +1 or -1."""
        return 1 if self.index % 2 == 0 else -1

    def __repr__(self):
        return f"DirichletCharacter(q={self.q}, index={self.index})"


@lru_cache(maxsize=64)
def _dlog_table(q: int) -> np.ndarray:
    g = primitive_root(q)
    table = np.zeros(q, dtype=np.int64)
    acc = 1
    for e in range(q - 1):
        table[acc] = e
        acc = acc * g % q
    table.setflags(write=False)
    return table


def all_characters(q: int, nonprincipal: bool = False):
    """All characters mod prime q, ordered by index."""
    start = 1 if nonprincipal else 0
    return [DirichletCharacter(q, k) for k in range(start, q - 1)]


def ramanujan_sum(q: int, a: int) -> int:
    """Ramanujan sum to a prime modulus: q-1 if q | a, else -1."""
    if not is_prime(q):
        raise ParameterError(f"{q} is not prime; use ramanujan_sum_numeric")
    return q - 1 if a % q == 0 else -1


def ramanujan_sum_numeric(c: int, a: int) -> complex:
    """Brute-force Ramanujan sum sum_{(z,c)=1} e(a z / c) for any modulus."""
    if c < 1:
        raise ParameterError("modulus must be >= 1")
    re = []
    im = []
    for z in range(1, c + 1):
        if math.gcd(z, c) == 1:
            w = cmath.exp(2j * cmath.pi * ((a * z) % c) / c)
            re.append(w.real)
            im.append(w.imag)
    return complex(math.fsum(re), math.fsum(im))


def gauss_sum(chi: DirichletCharacter) -> complex:
    """sum_{b mod q} chi(b) e(b/q); modulus sqrt(q) for nonprincipal chi."""
    if chi.is_principal:
        raise DegenerateInputError(
            "Gauss sum of the principal character is degenerate")
    q = chi.q
    terms = chi(np.arange(q)) * np.exp(2j * np.pi * np.arange(q) / q)
    return complex(math.fsum(terms.real.tolist()), math.fsum(terms.imag.tolist()))


def _unit_inverses(c: int) -> tuple[np.ndarray, np.ndarray]:
    units = np.array([x for x in range(1, c + 1) if math.gcd(x, c) == 1],
                     dtype=np.int64)
    inv = np.array([pow(int(x), -1, c) for x in units], dtype=np.int64)
    return units, inv


def kloosterman(a: int, b: int, c: int) -> float:
    """S(a, b; c) = sum over units x mod c of e((a x + b x^{-1})/c); real."""
    if c < 1:
        raise ParameterError("modulus must be >= 1")
    units, inv = _unit_inverses(c)
    ph = 2.0 * np.pi * ((a * units + b * inv) % c) / c
    vals = np.exp(1j * ph)
    re = math.fsum(vals.real.tolist())
    im = math.fsum(vals.imag.tolist())
    if abs(im) > 1e-9 * (1.0 + abs(re)):
        raise ParameterError(f"Kloosterman sum came out non-real: {re}+{im}j")
    return re


def kloosterman_matrix(c: int) -> np.ndarray:
    """Matrix [S(a, b; c)] for a, b = 0..c-1, via one complex matmul."""
    units, inv = _unit_inverses(c)
    a = np.arange(c)
    left = np.exp(2j * np.pi * (a[:, None] * units[None, :] % c) / c)
    right = np.exp(2j * np.pi * (inv[:, None] * a[None, :] % c) / c)
    return (left @ right).real


def _twist_preconditions(chi: DirichletCharacter, r1: int, r2: int,
                         alpha: int, gamma: int):
    q = chi.q
    if q <= 3:
        raise ParameterError("twisted pair sum requires prime q > 3")
    if chi.is_principal:
        raise DegenerateInputError("twisted pair sum needs a nonprincipal character")
    if math.gcd(alpha * gamma, q) != 1:
        raise ParameterError("requires gcd(alpha*gamma, q) = 1")
    return q


def twisted_pair_sum_bruteforce(chi: DirichletCharacter, r1: int, r2: int,
                                alpha: int, gamma: int, m: int) -> complex:
    """Direct summation of

        sum_{z in F_q^*, (m + gamma/z, q) = 1}
            conj(chi)(r1 + z) * chi(r2 + alpha * (m + gamma/z)^{-1}).
    """
    q = _twist_preconditions(chi, r1, r2, alpha, gamma)
    re = []
    im = []
    for z in range(1, q):
        zbar = pow(z, -1, q)
        w = (m + gamma * zbar) % q
        if w == 0:
            continue
        t = (chi((r1 + z) % q).conjugate()
             * chi((r2 + alpha * pow(w, -1, q)) % q))
        re.append(t.real)
        im.append(t.imag)
    return complex(math.fsum(re), math.fsum(im))


def twisted_pair_sum_closed(chi: DirichletCharacter, r1: int, r2: int,
                            alpha: int, gamma: int, m: int):
    """Closed form of the twisted pair sum where one exists, else None.

    Requires gcd(r1 r2, q) = 1.  Cases:

    * q | m:  chi(alpha/gamma) R_q(r2 - r1 alpha/gamma) - chi(r2/r1);
    * q !| m with r1 = gamma/m and r2 = -alpha/m in F_q (double root):
      -chi(m r2 / gamma) for non-quadratic chi, and chi(gamma r2 / m)(q - 2)
      for quadratic chi (every surviving term contributes chi(-alpha gamma),
      and there are q - 2 of them);
    * otherwise only the square-root cancellation bound holds, and None is
      returned rather than an approximation.
    """
    q = _twist_preconditions(chi, r1, r2, alpha, gamma)
    if math.gcd(r1 * r2, q) != 1:
        raise ParameterError("closed form requires gcd(r1*r2, q) = 1")
    if m % q == 0:
        ag = alpha * pow(gamma, -1, q) % q
        return (chi(ag) * ramanujan_sum(q, (r2 - r1 * ag) % q)
                - chi(r2 * pow(r1, -1, q) % q))
    mbar = pow(m % q, -1, q)
    if (r1 - mbar * gamma) % q == 0 and (r2 + mbar * alpha) % q == 0:
        if chi.is_quadratic:
            return chi(mbar * r2 * gamma % q) * (q - 2)
        return -chi(m * r2 * pow(gamma, -1, q) % q)
    return None
