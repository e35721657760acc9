"""Dense univariate polynomials with exact integer coefficients."""

from __future__ import annotations

from itertools import zip_longest


class IntPolynomial:
    """Coefficient ``coeffs[i]`` multiplies ``z**i``.

    Stored canonically without trailing zeros; the zero polynomial has no
    coefficients.  Instances are immutable and hashable.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs=()):
        c = [int(a) for a in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self._c = tuple(c)

    @classmethod
    def monomial(cls, degree: int, coeff: int = 1) -> "IntPolynomial":
        if degree < 0:
            raise ValueError("monomial degree must be >= 0")
        return cls([0] * degree + [coeff])

    @classmethod
    def one(cls) -> "IntPolynomial":
        return cls([1])

    @property
    def coeffs(self) -> tuple:
        return self._c

    @property
    def degree(self) -> int:
        """-1 for the zero polynomial."""
        return len(self._c) - 1

    def __getitem__(self, i: int) -> int:
        """Coefficient of ``z**i``; zero outside the stored range."""
        return self._c[i] if 0 <= i < len(self._c) else 0

    def __bool__(self):
        return bool(self._c)

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPolynomial([other])
        return isinstance(other, IntPolynomial) and self._c == other._c

    def __hash__(self):
        return hash(self._c)

    def __repr__(self):
        return f"IntPolynomial({list(self._c)})"

    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return IntPolynomial(a + b for a, b in zip_longest(self._c, other._c, fillvalue=0))

    __radd__ = __add__

    def __neg__(self):
        return IntPolynomial(-a for a in self._c)

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self.mul_trunc(other, None)

    __rmul__ = __mul__

    def mul_trunc(self, other: "IntPolynomial", max_degree: int | None) -> "IntPolynomial":
        """Product with all terms above ``max_degree`` dropped."""
        a, b = self._c, other._c
        if not a or not b:
            return IntPolynomial()
        top = len(a) + len(b) - 2
        if max_degree is not None:
            top = min(top, max_degree)
        out = [0] * (top + 1)
        for i, ai in enumerate(a):
            if ai == 0 or i > top:
                continue
            for j in range(min(len(b), top - i + 1)):
                out[i + j] += ai * b[j]
        return IntPolynomial(out)

    def pow_trunc(self, k: int, max_degree: int | None = None) -> "IntPolynomial":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result, base = IntPolynomial.one(), self
        while k:
            if k & 1:
                result = result.mul_trunc(base, max_degree)
            k >>= 1
            if k:
                base = base.mul_trunc(base, max_degree)
        return result

    def __pow__(self, k: int):
        return self.pow_trunc(k)

    def truncate(self, max_degree: int) -> "IntPolynomial":
        return IntPolynomial(self._c[: max_degree + 1])

    def shift(self, n: int) -> "IntPolynomial":
        """Multiply by ``z**n`` (n >= 0)."""
        if n < 0:
            raise ValueError("use laurent_shift for negative shifts")
        return IntPolynomial([0] * n + list(self._c)) if self._c else self

    def laurent_shift(self, n: int) -> tuple["IntPolynomial", "IntPolynomial"]:
        """Split ``z**n * self`` (n may be negative) into (polynomial part, principal part).

        The principal part holds the coefficients that would land on negative
        degrees, indexed so that entry ``i`` belongs to degree ``-(i+1)``.
        """
        if n >= 0:
            return self.shift(n), IntPolynomial()
        cut = -n
        head = self._c[:cut]
        return IntPolynomial(self._c[cut:]), IntPolynomial(reversed(head))

    def divmod(self, divisor: "IntPolynomial") -> tuple["IntPolynomial", "IntPolynomial"]:
        """Long division; the divisor must have leading coefficient +-1."""
        d = divisor._c
        if not d:
            raise ZeroDivisionError("polynomial division by zero")
        lead = d[-1]
        if lead not in (1, -1):
            raise ValueError("integer long division needs a unit leading coefficient")
        rem = list(self._c)
        if len(rem) < len(d):
            return IntPolynomial(), self
        quo = [0] * (len(rem) - len(d) + 1)
        for i in range(len(quo) - 1, -1, -1):
            q = rem[i + len(d) - 1] * lead
            quo[i] = q
            if q:
                for j, dj in enumerate(d):
                    rem[i + j] -= q * dj
        return IntPolynomial(quo), IntPolynomial(rem)

    def exact_div(self, divisor: "IntPolynomial") -> "IntPolynomial":
        q, r = self.divmod(divisor)
        if r:
            raise ArithmeticError(f"{divisor!r} does not divide {self!r}")
        return q

    def __call__(self, z):
        acc = 0
        for a in reversed(self._c):
            acc = acc * z + a
        return acc


def _lift(x) -> IntPolynomial:
    if isinstance(x, IntPolynomial):
        return x
    if isinstance(x, int):
        return IntPolynomial([x])
    return NotImplemented


def one_minus_zpow(n: int) -> IntPolynomial:
    """``1 - z**n``; the zero polynomial when n = 0."""
    return IntPolynomial.one() - IntPolynomial.monomial(n)
