"""
Dense univariate polynomials over Fraction or float.

A polynomial is a list of coefficients in ascending order:
[c0, c1, c2] is c0 + c1*x + c2*x**2. Trailing zeros are stripped by
normalize(), so the zero polynomial is [].
"""

from fractions import Fraction
from typing import List, Sequence, Union

Scalar = Union[Fraction, float, int]


def normalize(p: Sequence[Scalar]) -> List[Scalar]:
    n = len(p)
    while n and not p[n - 1]:
        n -= 1
    return list(p[:n])


def plus(a: Sequence[Scalar], b: Sequence[Scalar]) -> List[Scalar]:
    if len(a) < len(b):
        a, b = b, a
    res = list(a)
    for i, coeff in enumerate(b):
        res[i] = res[i] + coeff
    return normalize(res)


def minus(a: Sequence[Scalar], b: Sequence[Scalar]) -> List[Scalar]:
    return plus(a, [-c for c in b])


def scale(a: Sequence[Scalar], k: Scalar) -> List[Scalar]:
    return normalize([c * k for c in a])


def monomial(power: int, coeff: Scalar) -> List[Scalar]:
    """coeff * x**power"""
    return normalize([0] * power + [coeff])


def times_linear(a: Sequence[Scalar], root: Scalar) -> List[Scalar]:
    """a(x) * (x - root)"""
    if not a:
        return []
    res = [0] * (len(a) + 1)
    for i, coeff in enumerate(a):
        res[i + 1] = res[i + 1] + coeff
        res[i] = res[i] - coeff * root
    return normalize(res)


def from_roots(roots: Sequence[Scalar], one: Scalar = 1) -> List[Scalar]:
    """Monic polynomial with the given roots."""
    res: List[Scalar] = [one]
    for root in roots:
        res = times_linear(res, root)
    return res


def evaluate(a: Sequence[Scalar], x: Scalar) -> Scalar:
    """Horner evaluation. The zero polynomial evaluates to 0."""
    acc = 0 * x
    for coeff in reversed(a):
        acc = acc * x + coeff
    return acc


def coefficient(a: Sequence[Scalar], power: int) -> Scalar:
    return a[power] if power < len(a) else 0
