"""Explicit solutions of the ternary quadratic equations behind the criteria.

Three constructions live here: generators for the split primes of a real
quadratic field (solutions of x^2 - p*y^2 - q*z^2 = 0 with parity side
conditions), the two-block splitting d = a*b validated by Hilbert symbols,
and the normalized solution of p*x^2 - a*y^2 - b*z^2 = 0 whose leading
sign, against the Pell unit, decides total reality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator

from .arith import SquarefreeD, factor_squarefree, jacobi
from .errors import (
    HeightExceeded,
    LocalObstruction,
    NoDecomposition,
    NormalizationFailed,
    NotSplit,
    PreconditionViolated,
)
from .quadfield import SPLIT, KpElement, PellUnit, splitting
from .redei import ordered_factors, rank_and_kernel, split_residue_matrix
from .symbols import INFINITY, hilbert

MODE_DECOMPOSITION = "decomposition"  # p*x^2 - a*y^2 - b*z^2 = 0
MODE_SPLIT = "split"  # x^2 - p*y^2 - a*z^2 = 0 (b unused)

_EXPANSION_ROUNDS = 15
_SEARCH_BUDGET = 10**7


@dataclass(frozen=True)
class TernarySolution:
    """One integral solution of a ternary quadratic equation.

    The coefficients are carried along so the defining identity can be
    rechecked at any time; it is enforced on construction.
    """

    x: int
    y: int
    z: int
    p: int
    a: int
    b: int
    mode: str = MODE_DECOMPOSITION
    normalized: bool = False

    def __post_init__(self):
        if self.residual() != 0:
            raise PreconditionViolated(f"not a solution: {self}")
        if self.normalized and math.gcd(math.gcd(self.x, self.y), self.z) != 1:
            raise PreconditionViolated(f"normalized solution must be primitive: {self}")

    def residual(self) -> int:
        if self.mode == MODE_SPLIT:
            return self.x**2 - self.p * self.y**2 - self.a * self.z**2
        return self.p * self.x**2 - self.a * self.y**2 - self.b * self.z**2


@dataclass(frozen=True)
class Decomposition:
    """A two-block splitting d = a*b picked from the kernel of the split matrix.

    ``factors`` is the split-first ordered factor list of d and ``exponents``
    the 0/1 vector over it with a = prod(q^e).
    """

    a: int
    b: int
    factors: tuple[int, ...]
    exponents: tuple[int, ...]

    def __post_init__(self):
        prod = 1
        for q, e in zip(self.factors, self.exponents):
            prod *= q**e
        if prod != self.a:
            raise PreconditionViolated("exponent vector does not match a")


def _solution_batch(
    A: int, B: int, C: int, x_lo: int, x_hi: int, budget: int
) -> tuple[list[tuple[int, int, int]], int]:
    """Primitive nonnegative solutions of A*x^2 = B*y^2 + C*z^2 with
    x_lo < x <= x_hi, sorted by (x, z, y), plus the number of steps spent.

    The inner loop runs over the variable with the larger coefficient, so
    the cost is about (x_hi^2 / 2) * sqrt(A / max(B, C)) steps; the batch
    stops early (dropping the tail of the x range) once ``budget`` is gone.
    """
    out: list[tuple[int, int, int]] = []
    spent = 0
    solve_for_y = B <= C  # iterate the larger-coefficient variable
    W = C if solve_for_y else B
    S = B if solve_for_y else C
    for x in range(x_lo + 1, x_hi + 1):
        target = A * x * x
        w_hi = math.isqrt(target // W)
        spent += w_hi + 1
        if spent > budget:
            raise HeightExceeded(
                f"search budget exhausted near x = {x} for ({A}, {-B}, {-C})"
            )
        found = []
        for w in range(w_hi + 1):
            rem = target - W * w * w
            if rem % S:
                continue
            s2 = rem // S
            s = math.isqrt(s2)
            if s * s != s2:
                continue
            y, z = (s, w) if solve_for_y else (w, s)
            if math.gcd(math.gcd(x, y), z) == 1:
                found.append((x, y, z))
        found.sort(key=lambda sol: (sol[2], sol[1]))
        out.extend(found)
    return out, spent


def _check_local_solvability(c1: int, c2: int, c3: int) -> None:
    u = -c1 * c2
    v = -c1 * c3
    odd: set[int] = set()
    for c in (c1, c2, c3):
        core = _squarefree_kernel(abs(c))
        if core > 1:
            odd.update(q for q in factor_squarefree(core).factors if q % 2)
    # odd places first: a failure comes in pairs by the product formula,
    # and the odd member is the one a descent argument names
    for r in sorted(odd) + [2]:
        if hilbert(u, v, r) != 1:
            raise LocalObstruction(r)


def _squarefree_kernel(n: int) -> int:
    # strip square factors so factor_squarefree accepts the value
    out = 1
    q = 2
    while q * q <= n:
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            if e % 2:
                out *= q
        q += 1
    return out * n


def _solutions(c1: int, c2: int, c3: int) -> Iterator[tuple[int, int, int]]:
    """All primitive solutions of c1*x^2 + c2*y^2 + c3*z^2 = 0 with
    x, y, z >= 0, in (x, z, y)-lexicographic order, by expanding box search.

    The first box is the Holzer bound |x| <= sqrt(c2*c3), which contains a
    solution whenever one exists and the coefficients are squarefree and
    pairwise coprime; later doublings cover filtered callers and the one
    non-squarefree coefficient case used here (a dyadic coefficient 8).
    """
    if 0 in (c1, c2, c3):
        raise PreconditionViolated("coefficients must be nonzero")
    if c1 < 0:
        c1, c2, c3 = -c1, -c2, -c3
    if c2 > 0 or c3 > 0:
        if c2 > 0 and c3 > 0:
            raise LocalObstruction(INFINITY)
        raise PreconditionViolated("expected the sign pattern (+, -, -)")
    _check_local_solvability(c1, c2, c3)
    A, B, C = c1, -c2, -c3
    cap = math.isqrt(B * C)
    lo = 0
    budget = _SEARCH_BUDGET
    for _ in range(_EXPANSION_ROUNDS):
        batch, spent = _solution_batch(A, B, C, lo, cap, budget)
        budget -= spent
        yield from batch
        lo, cap = cap, cap * 2
    raise HeightExceeded(
        f"no acceptable solution of {c1}*x^2 + {c2}*y^2 + {c3}*z^2 = 0 "
        f"with x <= {lo}"
    )


def solve_legendre(c1: int, c2: int, c3: int) -> tuple[int, int, int]:
    """Smallest primitive solution of c1*x^2 + c2*y^2 + c3*z^2 = 0.

    Smallest means lexicographic in (|x|, |z|, |y|); the returned triple is
    nonnegative.  Local solvability is checked first via Hilbert symbols,
    and a failing place is reported in the LocalObstruction it raises.
    """
    for sol in _solutions(c1, c2, c3):
        return sol
    raise HeightExceeded("empty solution stream")  # pragma: no cover


def split_generator(p: int, q: int, avoid: tuple[int, ...] = ()) -> tuple[TernarySolution, KpElement]:
    """Element of Q(sqrt(p)) of norm q * square, from a split rational prime q.

    Solves x^2 - p*y^2 - c*z^2 = 0 (c = q, or 8 when q = 2), picks the first
    solution in canonical order whose residue symbols at every prime in
    ``avoid`` are nonzero, and applies the parity side conditions: exactly
    one of y, z even, and the sign of x fixed so x minus the even one is
    1 mod 4.  The returned element is (x + y*sqrt(p))/2 when z is even,
    else x + y*sqrt(p).
    """
    if splitting(q, p) != SPLIT:
        raise NotSplit(f"{q} does not split in Q(sqrt({p}))")
    coeff = 8 if q == 2 else q
    for x, y, z in _solutions(1, -p, -coeff):
        if (y - z) % 2 == 0:
            # both odd can occur only for q = 2; both even never, by parity
            continue
        # element norm is c*z^2 up to a square of 2, so the symbol at an odd
        # r dies iff r | z; at r = 2 the halved element keeps an odd norm
        # exactly when z is not 0 mod 4
        if any(z % 4 == 0 if r == 2 else z % r == 0 for r in avoid):
            continue
        even = y if y % 2 == 0 else z
        if (x - even) % 4 != 1:
            x = -x
        sol = TernarySolution(x, y, z, p, coeff, 0, mode=MODE_SPLIT, normalized=True)
        _assert_split_conditions(sol)
        return sol, KpElement(x, y, p, halved=z % 2 == 0)
    raise HeightExceeded("solution stream exhausted")  # pragma: no cover


def _assert_split_conditions(sol: TernarySolution) -> None:
    x, y, z, p, c = sol.x, sol.y, sol.z, sol.p, sol.a
    terms = (x * x, p * y * y, c * z * z)
    for i in range(3):
        if math.gcd(terms[i], terms[(i + 1) % 3]) != 1:
            raise NormalizationFailed(f"terms of {sol} are not pairwise coprime")
    if y < 0 or z < 0 or x % 2 == 0 or (y - z) % 2 == 0:
        raise NormalizationFailed(f"parity conditions fail for {sol}")
    even = y if y % 2 == 0 else z
    if (x - even) % 4 != 1:
        raise NormalizationFailed(f"sign condition fails for {sol}")


def find_decomposition(d: int | SquarefreeD, p: int) -> Decomposition:
    """Split d into coprime halves a*b, both non-residues mod p, with
    p*x^2 - a*y^2 - b*z^2 = 0 solvable.

    The exponent vector of a runs over the kernel of the split residue
    matrix; candidates are tried in ascending bitmask order (bit i is the
    i-th factor in split-first order) and validated by Hilbert symbols at
    every relevant place.  For even d only even a qualifies.  Requires
    exactly two nonsplit factors.
    """
    sd = d if isinstance(d, SquarefreeD) else factor_squarefree(d)
    split, inert = ordered_factors(sd, p)
    ordered = split + inert
    t = sd.t
    if len(split) != t - 2:
        raise PreconditionViolated(
            f"need exactly two nonsplit factors, got {t - len(split)}"
        )
    _, kernel_basis = rank_and_kernel(split_residue_matrix(sd, p))
    masks = sorted(
        {
            _combine(kernel_basis, pick)
            for pick in range(1 << len(kernel_basis))
        }
    )
    full = (1 << t) - 1
    two_bit = 1 << ordered.index(2) if sd.d % 2 == 0 else 0
    places: list[int | str] = [INFINITY, 2, p] + [q for q in sd.factors if q % 2]
    for mask in masks:
        if mask in (0, full):
            continue
        if two_bit and not mask & two_bit:
            continue
        a = 1
        for i in range(t):
            if mask >> i & 1:
                a *= ordered[i]
        b = sd.d // a
        if jacobi(a, p) != -1 or jacobi(b, p) != -1:
            continue
        if all(hilbert(a * p, b * p, r) == 1 for r in places):
            exps = tuple(mask >> i & 1 for i in range(t))
            return Decomposition(a, b, ordered, exps)
    raise NoDecomposition(f"no validated splitting of {sd.d} for p = {p}")


def _combine(basis: list[int], pick: int) -> int:
    mask = 0
    for i, vec in enumerate(basis):
        if pick >> i & 1:
            mask ^= vec
    return mask


def normalize_solution(sol: TernarySolution) -> TernarySolution:
    """Canonical representative of a solution of p*x^2 = a*y^2 + b*z^2.

    Output shape: gcd(x, y, z) = 1, x and z odd, y even, y and z
    nonnegative, and x signed so that x - y = 1 mod 4.  For odd d the
    odd-z case is repaired by a linear substitution first.  Idempotent.
    """
    if sol.mode != MODE_DECOMPOSITION:
        raise PreconditionViolated("normalization applies to the decomposition mode")
    p, a, b = sol.p, sol.a, sol.b
    x, y, z = sol.x, sol.y, sol.z
    g = math.gcd(math.gcd(x, y), z)
    x, y, z = x // g, y // g, z // g
    if x % 2 == 0:
        raise NormalizationFailed(f"x stays even in {sol}")
    if z % 2 == 0:
        if a % 2 == 0 or b % 2 == 0:
            raise NormalizationFailed(f"even z cannot happen for even d: {sol}")
        # substitution sending (odd, odd, even) to (odd, even, odd)
        x, y, z = (
            (a + b) // 2 * x,
            (a - b) // 2 * y + b * z,
            (a - b) // 2 * z - a * y,
        )
        g = math.gcd(math.gcd(x, y), z)
        x, y, z = x // g, y // g, z // g
    if x % 2 == 0 or y % 2 or z % 2 == 0:
        raise NormalizationFailed(f"parity pattern broken for {sol}")
    y, z = abs(y), abs(z)
    if (x - y) % 4 != 1:
        x = -x
    out = replace(sol, x=x, y=y, z=z, normalized=True)
    _assert_residue_table(out)
    return out


def _assert_residue_table(sol: TernarySolution) -> None:
    bp = sol.b * sol.p
    if sol.a % 2 == 0:
        if bp % 8 != 1:
            raise NormalizationFailed(f"b*p = {bp} is not 1 mod 8 with a even")
        return
    want = (1, 0) if bp % 8 == 1 else (3, 2)
    got = (sol.x % 4, sol.y % 4)
    if got != want:
        raise NormalizationFailed(f"residues {got} instead of {want} for {sol}")


def totally_real(sol: TernarySolution, unit: PellUnit) -> bool:
    """Positivity of all four conjugates of the attached quadratic radicand.

    The radicand is (x*sqrt(p) + y*sqrt(a)) times the Pell unit; its
    conjugates share one sign, which this reads off as x*v > 0.
    """
    if not sol.normalized or sol.mode != MODE_DECOMPOSITION:
        raise PreconditionViolated("need a normalized decomposition-mode solution")
    if unit.p != sol.p:
        raise PreconditionViolated("unit belongs to a different field")
    return sol.x * unit.v > 0
