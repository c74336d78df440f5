"""The sign convention ledger. Every module takes its signs from here.

Degrees
    A basis element of degree ``k`` has parity ``k % 2``. The fibre generator
    ``xi_k`` dual to ``e_k`` has degree ``-deg(e_k)``; the coordinate derivation
    ``d/d xi_k`` has degree ``deg(e_k)``; base coordinates have degree 0.

Koszul rule
    Transposing homogeneous ``a`` and ``b`` costs ``(-1)^(|a||b|)``.

Dualization
    ``Q(xi_k) = sum_I lambda^k_I xi^I`` where ``I`` runs over sorted multisets of
    input labels and ``xi^I`` is the product in sorted order. No extra sign.

Supertrace
    ``str(E) = sum_m (-1)^(|d_m|) c_m`` where ``c_m`` is the left coefficient of
    ``d_m`` in ``E(d_m)``. This is the choice for which ``Q(str E) = str([L_Q, E])``.

Dual of a map
    For ``f`` of degree ``s`` and ``phi`` in the dual of degree ``k``,
    ``f^v(phi) = (-1)^(s k) phi o f``.

Dual differential
    ``d^v(phi) = -(-1)^(|phi|) phi o d``.

Tensor duals
    ``(A (x) B)^v = B^v (x) A^v`` with the nested pairing
    ``<b^v (x) a^v, a (x) b> = <a^v, a><b^v, b>``.

Mapping cone
    ``cone(f)^t = C^(t+1) + D^t`` with ``d(c, y) = (-d_C c, f c + d_D y)``.

Hochschild total differential
    ``d_H + (-1)^p [[Q, -]]`` on arity ``p``; ``d_H`` and ``[[Q, -]]`` commute.
"""

from __future__ import annotations

import typing as t


def parity(degree: int) -> int:
    return degree % 2


def koszul(a: int, b: int) -> int:
    """The sign ``(-1)^(a b)`` for transposing elements of degrees ``a`` and ``b``."""
    return -1 if (a * b) % 2 else 1


def power(exponent: int) -> int:
    """``(-1)^exponent``."""
    return -1 if exponent % 2 else 1


def permutation_sign(degrees: t.Sequence[int], order: t.Sequence[int]) -> int:
    """Koszul sign of reordering elements of the given degrees into ``order``, so
    that ``x_{order[0]} ... x_{order[n-1]} = sign * x_0 ... x_{n-1}`` in a graded
    commutative algebra.

    :param degrees: Degree of each element in its original position.
    :param order: The new order, a permutation of ``range(len(degrees))``.
    """
    odd = 0

    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            a, b = order[i], order[j]

            if a > b and degrees[a] % 2 and degrees[b] % 2:
                odd += 1

    return power(odd)


def sign_of_permutation(order: t.Sequence[int]) -> int:
    """Plain sign of a permutation, ignoring degrees."""
    inversions = sum(
        1
        for i in range(len(order))
        for j in range(i + 1, len(order))
        if order[i] > order[j]
    )
    return power(inversions)


def swap_sign(a: int, b: int) -> int:
    """Sign of the symmetry ``x (x) y -> y (x) x`` for degrees ``a`` and ``b``."""
    return koszul(a, b)


def map_dual_sign(map_degree: int, dual_degree: int) -> int:
    """Sign in ``f^v(phi) = sign * phi o f``."""
    return koszul(map_degree, dual_degree)


def dual_differential_sign(dual_degree: int) -> int:
    """Sign in ``d^v(phi) = sign * phi o d``."""
    return -power(dual_degree)


def supertrace_sign(degree: int) -> int:
    return power(degree)
