"""Exact invariants of quadratic fields.

Fundamental discriminants, Kronecker symbols, splitting of primes, class
numbers by reduced-form enumeration (imaginary fields) and by form-cycle
counting (real fields), and torsion orders of the CM fields assembled from
them.  Everything is integer arithmetic; no floats, no L-functions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt, lcm

__all__ = [
    "QuadraticField",
    "BiquadraticCM",
    "ReducedForm",
    "factorize",
    "is_prime",
    "is_squarefree",
    "squarefree_kernel",
    "fundamental_discriminant",
    "is_fundamental_discriminant",
    "kronecker_symbol",
    "splitting_type",
    "reduced_forms_imaginary",
    "class_number_imaginary",
    "reduced_indefinite_forms",
    "form_cycle_count",
    "sqrt_cf_period",
    "fundamental_unit_norm",
    "class_number_real",
    "roots_of_unity_order",
]


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| by trial division (inputs here are small)."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factor 0")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    q = 5
    while q * q <= n:
        for p in (q, q + 2):
            while n % p == 0:
                out[p] = out.get(p, 0) + 1
                n //= p
        q += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == {n: 1}


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for e in factorize(n).values())


def squarefree_kernel(n: int) -> int:
    """The squarefree part of n (product of primes with odd exponent), signed."""
    if n == 0:
        raise ValueError("0 has no squarefree kernel")
    k = 1
    for p, e in factorize(n).items():
        if e % 2:
            k *= p
    return k if n > 0 else -k


def fundamental_discriminant(m: int) -> int:
    """Discriminant of Q(sqrt(m)) for a squarefree radicand m."""
    if m in (0, 1):
        raise ValueError(f"degenerate radicand {m}")
    if not is_squarefree(m):
        raise ValueError(f"radicand {m} is not squarefree")
    return m if m % 4 == 1 else 4 * m


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        m = D // 4
        return is_squarefree(m) and m % 4 in (2, 3)
    return False


def discriminant_radicand(D: int) -> int:
    """Inverse of fundamental_discriminant."""
    if not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    return D if D % 4 == 1 else D // 4


def kronecker_symbol(D: int, p: int) -> int:
    """Kronecker symbol (D/p) for a fundamental discriminant D and prime p.

    0 iff p ramifies, +1 iff p splits, -1 iff p is inert in Q(sqrt(D)).
    """
    if not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a fundamental discriminant")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if D % p == 0:
        return 0
    if p == 2:
        # D is odd here, hence 1 mod 4; split iff 1 mod 8
        return 1 if D % 8 == 1 else -1
    r = pow(D % p, (p - 1) // 2, p)
    return 1 if r == 1 else -1


@dataclass(frozen=True)
class QuadraticField:
    """Q(sqrt(m)) for a squarefree radicand m != 0, 1."""

    m: int

    def __post_init__(self) -> None:
        if self.m in (0, 1):
            raise ValueError(f"degenerate radicand {self.m}")
        if not is_squarefree(self.m):
            raise ValueError(f"radicand {self.m} is not squarefree")

    @property
    def discriminant(self) -> int:
        return fundamental_discriminant(self.m)

    # alias used throughout
    @property
    def D(self) -> int:
        return self.discriminant

    @property
    def is_imaginary(self) -> bool:
        return self.m < 0

    @property
    def is_real(self) -> bool:
        return self.m > 0


def splitting_type(field: QuadraticField, p: int) -> str:
    """One of 'split', 'inert', 'ramified'."""
    s = kronecker_symbol(field.D, p)
    return {1: "split", -1: "inert", 0: "ramified"}[s]


# ---------------------------------------------------------------------------
# Imaginary quadratic class numbers by reduced-form enumeration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReducedForm:
    """Integral binary quadratic form a x^2 + b xy + c y^2."""

    a: int
    b: int
    c: int

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c


def reduced_forms_imaginary(D: int, order: str = "ab") -> list[ReducedForm]:
    """All reduced forms of discriminant D < 0.

    Reduction: |b| <= a <= c with b >= 0 when |b| = a or a = c.  The two
    enumeration orders walk the same set along different loops and serve as
    mutual consistency oracles.
    """
    if D >= 0 or not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a negative fundamental discriminant")
    n = -D
    forms: list[ReducedForm] = []
    if order == "ab":
        a = 1
        while 3 * a * a <= n:
            for b in range(-a, a + 1):
                if (b - D) % 2:
                    continue
                num = b * b - D
                if num % (4 * a):
                    continue
                c = num // (4 * a)
                if c < a:
                    continue
                if b < 0 and (-b == a or a == c):
                    continue
                forms.append(ReducedForm(a, b, c))
            a += 1
    elif order == "ba":
        bmax = isqrt(n // 3)
        for b in range(-bmax, bmax + 1):
            if (b - D) % 2:
                continue
            m4 = b * b - D
            if m4 % 4:
                continue
            M = m4 // 4
            for a in range(max(1, abs(b)), isqrt(M) + 1):
                if M % a:
                    continue
                c = M // a  # c >= a since a <= sqrt(M)
                if abs(b) > a:
                    continue
                if b < 0 and (-b == a or a == c):
                    continue
                forms.append(ReducedForm(a, b, c))
    else:
        raise ValueError(f"unknown enumeration order {order!r}")
    return forms


@lru_cache(maxsize=None)
def class_number_imaginary(D: int, order: str = "ab") -> int:
    """h(Q(sqrt(D))) for fundamental D < 0, as the count of reduced forms."""
    return len(reduced_forms_imaginary(D, order))


# ---------------------------------------------------------------------------
# Real quadratic class numbers by cycles of reduced indefinite forms
# ---------------------------------------------------------------------------


def _is_reduced_indefinite(a: int, b: int, c: int, D: int) -> bool:
    # reduced <=> |sqrt(D) - 2|a|| < b < sqrt(D); exact in integers since
    # fundamental D > 0 is never a square
    if b <= 0 or b * b >= D:
        return False
    t = 2 * abs(a)
    return (t - b) * (t - b) < D and D < (t + b) * (t + b)


def reduced_indefinite_forms(D: int) -> set[tuple[int, int, int]]:
    if D <= 0 or not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a positive fundamental discriminant")
    forms: set[tuple[int, int, int]] = set()
    s = isqrt(D)
    for b in range(1, s + 1):
        if (b - D) % 2:
            continue
        m4 = b * b - D
        if m4 % 4:
            continue
        n = -m4 // 4  # = |ac|, ac < 0
        for a in range(1, isqrt(n) + 1):
            if n % a:
                continue
            for aa in (a, n // a):
                if _is_reduced_indefinite(aa, b, -(n // aa), D):
                    forms.add((aa, b, -(n // aa)))
                    forms.add((-aa, b, n // aa))
    return forms


def _rho(form: tuple[int, int, int], D: int) -> tuple[int, int, int]:
    # reduction step: next form in the cycle of (a, b, c)
    _, b, c = form
    s = isqrt(D)
    r = s - ((s + b) % (2 * abs(c)))
    return (c, r, (r * r - D) // (4 * c))


@lru_cache(maxsize=None)
def form_cycle_count(D: int) -> int:
    """Number of cycles of reduced indefinite forms = narrow class number."""
    forms = reduced_indefinite_forms(D)
    seen: set[tuple[int, int, int]] = set()
    cycles = 0
    for start in sorted(forms):
        if start in seen:
            continue
        cycles += 1
        f = start
        while True:
            seen.add(f)
            f = _rho(f, D)
            assert f in forms, f"reduction left the reduced set at {f} (D={D})"
            if f == start:
                break
    return cycles


def sqrt_cf_period(m: int) -> int:
    """Period length of the continued fraction of sqrt(m), m > 1 not a square."""
    a0 = isqrt(m)
    if a0 * a0 == m:
        raise ValueError(f"{m} is a perfect square")
    P, Q, a = 0, 1, a0
    k = 0
    while True:
        P = a * Q - P
        Q = (m - P * P) // Q
        k += 1
        if Q == 1:
            return k
        a = (a0 + P) // Q


def fundamental_unit_norm(m: int) -> int:
    """Norm of the fundamental unit of Q(sqrt(m)), m > 1 squarefree.

    -1 iff the continued fraction of sqrt(m) has odd period (negative Pell
    solvable; for m = 1 mod 4 a half-integral unit of norm -1 forces an
    integral one via its cube).
    """
    return -1 if sqrt_cf_period(m) % 2 else 1


@lru_cache(maxsize=None)
def class_number_real(D: int) -> int:
    """h(Q(sqrt(D))) for fundamental D > 0 via form cycles.

    The cycle count is the narrow class number; it is halved exactly when
    the fundamental unit has norm +1.
    """
    narrow = form_cycle_count(D)
    m = discriminant_radicand(D)
    if fundamental_unit_norm(m) == -1:
        return narrow
    assert narrow % 2 == 0, f"narrow class number odd with N(eps)=+1 at D={D}"
    return narrow // 2


# ---------------------------------------------------------------------------
# Biquadratic CM fields and roots of unity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BiquadraticCM:
    """The biquadratic CM field Q(sqrt(d), sqrt(-j)), d > 1, j > 0 squarefree.

    Its three quadratic subfields are the real F = Q(sqrt(d)) and the two
    imaginary E = Q(sqrt(-j)), E' = Q(sqrt(e')) with e' the squarefree
    kernel of -d*j.
    """

    d: int
    j: int

    def __post_init__(self) -> None:
        if self.d < 2 or not is_squarefree(self.d):
            raise ValueError(f"real radicand {self.d} not squarefree >= 2")
        if self.j < 1 or not is_squarefree(self.j):
            raise ValueError(f"imaginary radicand {self.j} not squarefree >= 1")
        assert -self.j != self.e_prime, "the two imaginary subfields coincide"

    @property
    def e_prime(self) -> int:
        return squarefree_kernel(-self.d * self.j)

    @property
    def F(self) -> QuadraticField:
        return QuadraticField(self.d)

    @property
    def E(self) -> QuadraticField:
        return QuadraticField(-self.j)

    @property
    def E_prime(self) -> QuadraticField:
        return QuadraticField(self.e_prime)

    @property
    def subfield_radicands(self) -> frozenset[int]:
        return frozenset((self.d, -self.j, self.e_prime))

    @property
    def is_zeta8(self) -> bool:
        # Q(sqrt(2), sqrt(-1)) = Q(sqrt(2), sqrt(-2)), the 8th cyclotomic field
        return self.subfield_radicands == frozenset((2, -1, -2))

    @property
    def is_zeta12(self) -> bool:
        return frozenset((-1, -3)) <= self.subfield_radicands


def _imaginary_torsion(D: int) -> int:
    if D == -4:
        return 4
    if D == -3:
        return 6
    return 2


def roots_of_unity_order(component: QuadraticField | BiquadraticCM) -> int:
    """Order of the group of roots of unity of a CM component.

    The lcm of the two imaginary subfields' torsion orders undercounts
    exactly for the 8th and 12th cyclotomic fields, which are matched by
    their subfield sets.
    """
    if isinstance(component, QuadraticField):
        if not component.is_imaginary:
            raise ValueError("component must be a CM (imaginary) field")
        return _imaginary_torsion(component.D)
    if component.is_zeta8:
        return 8
    if component.is_zeta12:
        return 12
    return lcm(
        _imaginary_torsion(component.E.D), _imaginary_torsion(component.E_prime.D)
    )
