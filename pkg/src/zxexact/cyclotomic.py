"""Exact arithmetic in cyclotomic fields Q(zeta_M).

Scalars are rational-coefficient combinations of powers of a primitive M-th
root of unity ``z``, with M always divisible by 8 so that
sqrt(2) = z^(M/8) + z^(7M/8) is available as a field element.

Internally a value is a sparse exponent -> coefficient map modulo X^M - 1
together with a power-of-two denominator shift: value = 2^(-shift) * sum.
Interpreter scalars therefore stay in pure integer arithmetic (the only
denominators the standard interpretation produces are powers of sqrt(2));
arbitrary rational coefficients are still accepted and simply ride along as
``Fraction`` values.  The canonical form (coefficients over the power basis
1, z, ..., z^(phi(M)-1), reduced modulo the cyclotomic polynomial Phi_M) is
computed lazily, so equality is syntactic on canonical forms while products
of sparse values stay cheap.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Optional, Sequence, Union

Rational = Union[int, Fraction]


class ModulusError(ValueError):
    """Raised when a modulus is unsupported or incompatible with a lift."""


# ---------------------------------------------------------------------------
# integer polynomial helpers (dense, low-to-high coefficient lists)
# ---------------------------------------------------------------------------

def _poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def _poly_divmod(num: Sequence[int], den: Sequence[int]) -> tuple[list[int], list[int]]:
    """Divide integer polynomials; ``den`` must be monic."""
    assert den[-1] == 1, "divisor must be monic"
    rem = list(num)
    deg_d = len(den) - 1
    quot = [0] * max(1, len(num) - deg_d)
    for k in range(len(rem) - 1 - deg_d, -1, -1):
        c = rem[k + deg_d]
        if c == 0:
            continue
        quot[k] = c
        for j, dj in enumerate(den):
            rem[k + j] -= c * dj
    while len(rem) > 1 and rem[-1] == 0:
        rem.pop()
    return quot, rem


def divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def euler_phi(n: int) -> int:
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


@lru_cache(maxsize=None)
def cyclotomic_polynomial(M: int) -> tuple[int, ...]:
    """Integer coefficients (low to high) of Phi_M, by exact division of
    X^M - 1 by the product of Phi_d over proper divisors d of M."""
    if M < 1:
        raise ModulusError(f"modulus must be positive, got {M}")
    if M == 1:
        return (-1, 1)
    num = [0] * (M + 1)
    num[0], num[M] = -1, 1
    den = [1]
    for d in divisors(M):
        if d < M:
            den = _poly_mul(den, list(cyclotomic_polynomial(d)))
    quot, rem = _poly_divmod(num, den)
    assert rem == [0], "X^M - 1 not divisible by product of lower Phi_d"
    while len(quot) > 1 and quot[-1] == 0:
        quot.pop()
    return tuple(quot)


@lru_cache(maxsize=None)
def _reduction_rows(M: int) -> tuple[tuple[int, ...], ...]:
    """Row k-phi(M) is x^k reduced mod Phi_M, for k in [phi(M), M)."""
    phi = euler_phi(M)
    top = list(cyclotomic_polynomial(M))
    rows: list[tuple[int, ...]] = []
    cur = [-c for c in top[:phi]]
    rows.append(tuple(cur))
    for _ in range(phi + 1, M):
        nxt = [0] + cur[:-1]
        overflow = cur[-1]
        if overflow:
            for i in range(phi):
                nxt[i] -= overflow * top[i]
        cur = nxt
        rows.append(tuple(cur))
    return tuple(rows)


def _check_modulus(M: int) -> None:
    if M % 8 != 0:
        raise ModulusError(f"modulus must be divisible by 8, got {M}")


class CycloScalar:
    """An element of Q(zeta_M) with M divisible by 8."""

    __slots__ = ("modulus", "_terms", "_shift", "_canon")

    def __init__(self, modulus: int, terms: Optional[dict] = None, shift: int = 0):
        _check_modulus(modulus)
        self.modulus = modulus
        self._shift = shift
        self._canon: Optional[tuple[Fraction, ...]] = None
        clean: dict[int, Rational] = {}
        if terms:
            for e, c in terms.items():
                if c:
                    ee = e % modulus
                    cur = clean.get(ee, 0)
                    clean[ee] = cur + c
            clean = {e: c for e, c in clean.items() if c}
        self._terms = clean

    @classmethod
    def _raw(cls, modulus: int, terms: dict, shift: int) -> "CycloScalar":
        """Internal constructor: terms already reduced mod M and zero-free."""
        out = object.__new__(cls)
        out.modulus = modulus
        out._terms = terms
        out._shift = shift
        out._canon = None
        return out

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(M: int) -> "CycloScalar":
        _check_modulus(M)
        return CycloScalar._raw(M, {}, 0)

    @staticmethod
    def one(M: int) -> "CycloScalar":
        _check_modulus(M)
        return CycloScalar._raw(M, {0: 1}, 0)

    @staticmethod
    def from_rational(value: Rational, M: int) -> "CycloScalar":
        return CycloScalar(M, {0: Fraction(value) if not isinstance(value, int) else value})

    @staticmethod
    def zeta_power(M: int, exponent: int) -> "CycloScalar":
        _check_modulus(M)
        return CycloScalar._raw(M, {exponent % M: 1}, 0)

    # -- ring operations ---------------------------------------------------

    def _lifted_pair(self, other: "CycloScalar") -> tuple["CycloScalar", "CycloScalar"]:
        if self.modulus == other.modulus:
            return self, other
        M = self.modulus * other.modulus // gcd(self.modulus, other.modulus)
        return lift_modulus(self, M), lift_modulus(other, M)

    def __add__(self, other: "CycloScalar") -> "CycloScalar":
        a, b = self._lifted_pair(other)
        sa, sb = a._shift, b._shift
        if sa == sb:
            shift = sa
            terms = dict(a._terms)
            for e, c in b._terms.items():
                cur = terms.get(e, 0)
                cur = cur + c
                if cur:
                    terms[e] = cur
                else:
                    del terms[e]
        elif sa > sb:
            shift = sa
            mult = 1 << (sa - sb)
            terms = dict(a._terms)
            for e, c in b._terms.items():
                cur = terms.get(e, 0) + c * mult
                if cur:
                    terms[e] = cur
                else:
                    del terms[e]
        else:
            shift = sb
            mult = 1 << (sb - sa)
            terms = {e: c * mult for e, c in a._terms.items()}
            for e, c in b._terms.items():
                cur = terms.get(e, 0) + c
                if cur:
                    terms[e] = cur
                else:
                    del terms[e]
        return CycloScalar._raw(a.modulus, terms, shift)

    def __sub__(self, other: "CycloScalar") -> "CycloScalar":
        return self + (-other)

    def __neg__(self) -> "CycloScalar":
        return CycloScalar._raw(self.modulus, {e: -c for e, c in self._terms.items()}, self._shift)

    def __mul__(self, other: "CycloScalar") -> "CycloScalar":
        a, b = self._lifted_pair(other)
        M = a.modulus
        terms: dict[int, Rational] = {}
        for e1, c1 in a._terms.items():
            for e2, c2 in b._terms.items():
                e = e1 + e2
                if e >= M:
                    e -= M
                cur = terms.get(e, 0)
                cur = cur + c1 * c2
                if cur:
                    terms[e] = cur
                else:
                    del terms[e]
        return CycloScalar._raw(M, terms, a._shift + b._shift)

    def __bool__(self) -> bool:
        # empty term map is definitely zero; a non-empty one may still cancel,
        # callers use this only as a fast skip
        return bool(self._terms)

    def scale(self, factor: Rational) -> "CycloScalar":
        f = Fraction(factor)
        if not f:
            return CycloScalar.zero(self.modulus)
        shift = self._shift
        den = f.denominator
        while den % 2 == 0:
            den //= 2
            shift += 1
        mult: Rational = f.numerator if den == 1 else Fraction(f.numerator, den)
        return CycloScalar._raw(self.modulus, {e: c * mult for e, c in self._terms.items()}, shift)

    def is_zero(self) -> bool:
        if not self._terms:
            return True
        return all(c == 0 for c in self.canonical())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CycloScalar):
            return NotImplemented
        a, b = self._lifted_pair(other)
        if a._terms == b._terms and a._shift == b._shift:
            return True
        return (a - b).is_zero()

    def __hash__(self) -> int:
        return hash((self.modulus, self.canonical()))

    # -- canonical form ----------------------------------------------------

    def canonical(self) -> tuple[Fraction, ...]:
        """Coefficients over the power basis 1, z, ..., z^(phi(M)-1)."""
        if self._canon is None:
            phi = euler_phi(self.modulus)
            dense: list[Rational] = [0] * phi
            rows = None
            for e, c in self._terms.items():
                if e < phi:
                    dense[e] += c
                else:
                    if rows is None:
                        rows = _reduction_rows(self.modulus)
                    row = rows[e - phi]
                    for i, r in enumerate(row):
                        if r:
                            dense[i] += c * r
            den = 1 << self._shift
            self._canon = tuple(Fraction(c, den) if not isinstance(c, Fraction) else c / den
                                for c in dense)
        return self._canon

    def to_complex(self) -> complex:
        M = self.modulus
        acc = complex(0)
        for e, c in self._terms.items():
            acc += complex(c) * cmath.exp(2j * cmath.pi * e / M)
        return acc / (1 << self._shift)

    def __str__(self) -> str:
        coeffs = self.canonical()
        parts = []
        for i, c in enumerate(coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*z")
            else:
                parts.append(f"{c}*z^{i}")
        body = " + ".join(parts) if parts else "0"
        return f"({body} | M={self.modulus})"

    def __repr__(self) -> str:
        return f"CycloScalar{self}"


def lift_modulus(a: CycloScalar, M2: int) -> CycloScalar:
    """Re-express ``a`` in Q(zeta_M2); requires modulus(a) | M2."""
    if M2 == a.modulus:
        return a
    if M2 % a.modulus != 0:
        raise ModulusError(f"cannot lift modulus {a.modulus} to {M2}")
    k = M2 // a.modulus
    return CycloScalar._raw(M2, {e * k: c for e, c in a._terms.items()}, a._shift)


def root_of_unity(num: int, den: int, M: int) -> CycloScalar:
    """The element zeta_M^(num*M/(2*den)) representing exp(i*pi*num/den)."""
    if den <= 0:
        raise ValueError("denominator must be positive")
    _check_modulus(M)
    if M % (2 * den) != 0:
        raise ModulusError(f"modulus {M} not divisible by 2*{den}")
    return CycloScalar.zeta_power(M, num * (M // (2 * den)))


def sqrt_two(M: int) -> CycloScalar:
    """sqrt(2) as zeta_M^(M/8) + zeta_M^(7M/8); squares exactly to 2."""
    _check_modulus(M)
    return CycloScalar._raw(M, {M // 8: 1, 7 * M // 8: 1}, 0)


# ---------------------------------------------------------------------------
# subfield membership
# ---------------------------------------------------------------------------

def _solve_exact(matrix: list[list[int]], rhs: list[int]) -> Optional[list[Fraction]]:
    """Solve A x = b over the rationals by fraction-free (Bareiss) elimination.

    Returns None if the system is inconsistent.  The matrix may have more rows
    than columns; a rank-deficient but consistent system yields one solution
    with free variables set to zero.
    """
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    width = n + 1
    prev_pivot = 1
    pivot_cols: list[int] = []
    row = 0
    for col in range(n):
        pivot = None
        for r in range(row, m):
            if a[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        a[row], a[pivot] = a[pivot], a[row]
        p = a[row][col]
        for r in range(row + 1, m):
            factor = a[r][col]
            for c in range(width):
                a[r][c] = (a[r][c] * p - factor * a[row][c]) // prev_pivot
        prev_pivot = p
        pivot_cols.append(col)
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if a[r][n] != 0:
            return None
    sol = [Fraction(0)] * n
    for r in range(len(pivot_cols) - 1, -1, -1):
        col = pivot_cols[r]
        acc = Fraction(a[r][n])
        for c in range(col + 1, n):
            acc -= Fraction(a[r][c]) * sol[c]
        sol[col] = acc / a[r][col]
    return sol


def membership_solve(target: CycloScalar, generator_order: int) -> Optional[list[Fraction]]:
    """Decide whether ``target`` lies in the subfield Q(zeta_K) of its field.

    K = ``generator_order`` must divide the target's modulus.  Returns the
    rational coordinates of the target over the power basis {zeta_K^j} when it
    is a member, and None otherwise.
    """
    M = target.modulus
    K = generator_order
    if K < 1 or M % K != 0:
        raise ModulusError(f"subfield order {K} does not divide modulus {M}")
    phi_k = euler_phi(K)
    basis = [CycloScalar.zeta_power(M, j * (M // K)).canonical() for j in range(phi_k)]
    t = target.canonical()
    dim = len(t)
    den = 1
    for vec in basis + [t]:
        for c in vec:
            den = den * c.denominator // gcd(den, c.denominator)
    matrix = [[int(basis[j][i] * den) for j in range(phi_k)] for i in range(dim)]
    rhs = [int(t[i] * den) for i in range(dim)]
    return _solve_exact(matrix, rhs)


def field_arithmetic(a: CycloScalar, b: CycloScalar, op: str):
    """Dispatch add | mul | neg | eq (neg ignores ``b``)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "neg":
        return -a
    if op == "eq":
        return a == b
    raise ValueError(f"unknown field operation {op!r}")
