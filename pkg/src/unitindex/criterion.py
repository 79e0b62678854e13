"""Per-prime evaluation: family membership, the unit-group index by two
independent routes, and the predicted 2-part structure of the class group.

The direct route works in rational arithmetic: fourth-power residue
conditions at the split factors of d, plus a three-factor symbol product
over a two-block splitting d = a*b when exactly two factors are inert.
The governing route re-derives the same verdict from quadratic symbols of
primary Gaussian primes against a primary prime over p.  The two must
agree on every evaluated prime; evaluate() records a disagreement as an
alarm instead of picking a side.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .arith import SquarefreeD, factor_squarefree, is_prime
from .construction import (
    MODE_DECOMPOSITION,
    Decomposition,
    TernarySolution,
    find_decomposition,
    normalize_solution,
    solve_legendre,
    split_generator,
    totally_real,
)
from .errors import (
    HeightExceeded,
    LocalObstruction,
    OutOfScopeM,
    PreconditionViolated,
    TheoryViolation,
)
from .gaussian import GaussInt, quad_symbol, split_primary
from .quadfield import pell_negative_unit
from .redei import (
    extended_residue_matrix,
    ordered_factors,
    rank_and_kernel,
    redei_rank4,
)
from .symbols import fpr, fpr_product, quartic_cross_product


@dataclass(frozen=True)
class PrimeVerdict:
    """Everything decided about one prime p relative to a fixed d.

    ``m`` counts the factors of d that split in Q(sqrt(p)); it is None when
    the prime is rejected before the count makes sense.  ``in_P`` is the
    membership flag and ``reason`` a short annotation (why rejected, or why
    a member carries no index).  The two index fields hold the direct and
    governing verdicts; ``structure`` is the predicted
    (rk2, rk4, rk8, h_plus) of the narrow class group for members with
    m <= t-1.  ``alarms`` collects anything that contradicts the theory.
    """

    p: int
    m: int | None
    in_P: bool
    reason: str = ""
    e_totally_real: bool | None = None
    q_direct: int | None = None
    q_governing: int | None = None
    structure: tuple[int, int, int, int] | None = None
    decomposition: Decomposition | None = None
    alarms: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "alarms", tuple(self.alarms))
        for q in (self.q_direct, self.q_governing):
            if q not in (None, 1, 2):
                raise PreconditionViolated(f"index must be 1 or 2, got {q!r}")
        if not self.in_P and not (
            self.q_direct is None and self.q_governing is None and self.structure is None
        ):
            raise PreconditionViolated("a rejected prime cannot carry index or structure data")


@dataclass(frozen=True)
class StructurePrediction:
    """Predicted invariants of the narrow class group of Q(sqrt(p), sqrt(d)).

    ``h`` is the wide class number when the index is decided, None when only
    the two candidates in ``q_range`` are known.
    """

    rk2: int
    rk4: int
    rk8: int
    h_plus: int
    h: int | None
    q_range: tuple[int, ...]


@dataclass(frozen=True)
class RankCheck:
    """Outcome of the generalized symbol-matrix rank computation.

    ``kernel_rank4`` is kernel dimension minus one of the reduced matrix;
    it must equal ``predicted_rank4`` = t - m - 1 whenever the rational
    split-condition matrix has full rank m.
    """

    kernel_rank4: int
    predicted_rank4: int
    rational_full_rank: bool


def _as_sd(d: int | SquarefreeD) -> SquarefreeD:
    return d if isinstance(d, SquarefreeD) else factor_squarefree(d)


def _composite(sd: SquarefreeD, p: int) -> SquarefreeD:
    """d*p with the factor list merged, skipping a refactorization."""
    factors = tuple(sorted(sd.factors + (p,)))
    return SquarefreeD(sd.d * p, factors)


def classify(d: int | SquarefreeD, p: int) -> PrimeVerdict:
    """Membership verdict and split count, nothing index-valued yet.

    A member satisfies p not dividing d, p = 1 (mod 4), and vanishing
    4-rank of the composite discriminant d*p.  Members with every factor
    split (m = t) are flagged in ``reason`` and never evaluated further.
    """
    sd = _as_sd(d)
    if not is_prime(p):
        raise PreconditionViolated(f"{p} is not prime")
    if sd.d % p == 0:
        return PrimeVerdict(p=p, m=None, in_P=False, reason="p divides d")
    if p % 4 != 1:
        return PrimeVerdict(p=p, m=None, in_P=False, reason="p = 3 (mod 4)")
    split, _ = ordered_factors(sd, p)
    m = len(split)
    r4 = redei_rank4(_composite(sd, p))
    if r4 != 0:
        return PrimeVerdict(p=p, m=m, in_P=False, reason=f"composite 4-rank is {r4}")
    if m == sd.t:
        return PrimeVerdict(p=p, m=m, in_P=True, reason="every factor splits; out of family")
    structure = (sd.t + m - 1, sd.t - m - 1, 0, 1 << (2 * sd.t - 2))
    return PrimeVerdict(p=p, m=m, in_P=True, structure=structure)


def e_totally_real(d: int | SquarefreeD, p: int) -> bool:
    """Whether the elementary 2-extension attached to (d, p) is totally real.

    True exactly when fpr(p, q) * fpr(q, p) = +1 for every split factor q.
    The dyadic factor runs through the same product; 2 splits only for
    p = 1 (mod 8), which is what fpr(p, 2) needs.
    """
    sd = _as_sd(d)
    if p % 4 != 1 or sd.d % p == 0:
        raise PreconditionViolated(f"{p} is not a candidate prime for d = {sd.d}")
    split, _ = ordered_factors(sd, p)
    return all(fpr(p, q) * fpr(q, p) == 1 for q in split)


def _factor_blocks(dec: Decomposition) -> tuple[tuple[int, ...], tuple[int, ...]]:
    a_factors = tuple(q for q, e in zip(dec.factors, dec.exponents) if e)
    b_factors = tuple(q for q, e in zip(dec.factors, dec.exponents) if not e)
    return a_factors, b_factors


def _direct_index(
    sd: SquarefreeD, p: int, m: int, e_real: bool, dec: Decomposition | None
) -> tuple[int, Decomposition | None]:
    if m == sd.t - 1:
        return (2 if e_real else 1), None
    if dec is None:
        dec = find_decomposition(sd, p)
    a_factors, b_factors = _factor_blocks(dec)
    sign = (
        fpr(sd.d, p)
        * fpr_product(dec.a * p, b_factors)
        * fpr_product(dec.b * p, a_factors)
    )
    return (2 if e_real and sign == -1 else 1), dec


def _governing_index(
    sd: SquarefreeD, p: int, split: tuple[int, ...], flip: bool, dec: Decomposition | None
) -> tuple[int, Decomposition | None]:
    pi = split_primary(p, flip=flip)
    e_real = all(quad_symbol(split_primary(q, flip=flip), pi) == 1 for q in split)
    if len(split) == sd.t - 1:
        return (2 if e_real else 1), None
    if dec is None:
        dec = find_decomposition(sd, p)
    product = GaussInt(1, 0)
    for q in sd.factors:
        product = product * split_primary(q, flip=flip)
    cross = quartic_cross_product(dec.a, dec.b, conjugate=flip)
    deeper_real = quad_symbol(product, pi) == -cross
    return (2 if e_real and deeper_real else 1), dec


def _candidate_split(sd: SquarefreeD, p: int) -> tuple[int, ...]:
    """Split factors of d, after the cheap candidate checks on p."""
    if not is_prime(p):
        raise PreconditionViolated(f"{p} is not prime")
    if sd.d % p == 0 or p % 4 != 1:
        raise PreconditionViolated(f"{p} is not a candidate prime for d = {sd.d}")
    split, _ = ordered_factors(sd, p)
    return split


def _require_scope(sd: SquarefreeD, m: int) -> None:
    if m not in (sd.t - 1, sd.t - 2):
        raise OutOfScopeM(f"m = {m} with t = {sd.t}: the index is only decided for m in {{t-1, t-2}}")


def _require_member(sd: SquarefreeD, p: int) -> None:
    r4 = redei_rank4(_composite(sd, p))
    if r4 != 0:
        raise PreconditionViolated(
            f"p = {p} is not in the family for d = {sd.d}: composite 4-rank is {r4}"
        )


def unit_index(d: int | SquarefreeD, p: int) -> int:
    """The unit-group index in {1, 2}, by the rational-symbol route.

    For m = t-1 the index is 2 exactly when the elementary extension is
    totally real.  For m = t-2 it additionally needs the three-factor
    product fpr(d, p) * fpr(a*p, b) * fpr(b*p, a) to be -1, with d = a*b
    the decomposition picked by find_decomposition and composite moduli
    expanded over their prime factors.
    """
    sd = _as_sd(d)
    split = _candidate_split(sd, p)
    _require_scope(sd, len(split))
    _require_member(sd, p)
    e_real = e_totally_real(sd, p)
    index, _ = _direct_index(sd, p, len(split), e_real, None)
    return index


def unit_index_via_governing(d: int | SquarefreeD, p: int, flip: bool = False) -> int:
    """The same index, decided by splitting conditions over Z[i].

    Total reality of the elementary extension becomes quad_symbol(rho, pi)
    = +1 for the primary prime rho over each split factor; the deeper layer
    for m = t-2 compares quad_symbol(rho_1 ... rho_t, pi) against minus the
    mutual quartic sign of the decomposition.  ``flip`` switches every
    primary choice to its conjugate at once; the verdict must not move.
    """
    sd = _as_sd(d)
    split = _candidate_split(sd, p)
    _require_scope(sd, len(split))
    _require_member(sd, p)
    index, _ = _governing_index(sd, p, split, flip, None)
    return index


def predicted_structure(d: int | SquarefreeD, p: int) -> StructurePrediction:
    """Predicted 2-part invariants of the narrow class group for a member prime.

    Always (rk2, rk4, rk8, h_plus) = (t+m-1, t-m-1, 0, 2^(2t-2)); the wide
    class number 2^(2t-3) times the index is filled in when m is within
    scope, otherwise both index candidates are reported.
    """
    sd = _as_sd(d)
    if sd.t < 2:
        raise PreconditionViolated("structure formulas need at least two factors in d")
    m = len(_candidate_split(sd, p))
    if m == sd.t:
        raise OutOfScopeM("every factor splits; no structure is asserted")
    _require_member(sd, p)
    if m in (sd.t - 1, sd.t - 2):
        q = unit_index(sd, p)
        h, q_range = q << (2 * sd.t - 3), (q,)
    else:
        h, q_range = None, (1, 2)
    return StructurePrediction(
        rk2=sd.t + m - 1,
        rk4=sd.t - m - 1,
        rk8=0,
        h_plus=1 << (2 * sd.t - 2),
        h=h,
        q_range=q_range,
    )


def _construction_real(sd: SquarefreeD, p: int, dec: Decomposition) -> bool:
    """Total reality of the quadratic-form generator, the expensive way."""
    x, y, z = solve_legendre(p, -dec.a, -dec.b)
    solution = TernarySolution(x, y, z, p, dec.a, dec.b, mode=MODE_DECOMPOSITION)
    return totally_real(normalize_solution(solution), pell_negative_unit(p))


def evaluate(d: int | SquarefreeD, p: int, construction_check: bool = False) -> PrimeVerdict:
    """Full verdict for one prime: membership, both index routes, structure.

    Route failures never raise out of here; they land in ``alarms`` so a
    long scan reports them instead of dying.  ``construction_check`` also
    solves the ternary equation for m = t-2 and compares the sign of the
    resulting generator with the symbol verdict.
    """
    sd = _as_sd(d)
    verdict = classify(sd, p)
    if verdict.m is None:
        return verdict
    # E-reality is a property of (d, p) alone; record it even when the
    # 4-rank filter rejects p, so density denominators are the full m-cell
    e_real = e_totally_real(sd, p)
    verdict = replace(verdict, e_totally_real=e_real)
    if not verdict.in_P:
        return verdict
    m = verdict.m
    alarms: list[str] = []
    if m not in (sd.t - 1, sd.t - 2):
        if m != sd.t and not verdict.reason:
            verdict = replace(verdict, reason="index not asserted for m <= t-3")
        return verdict

    dec: Decomposition | None = None
    q_direct: int | None = None
    q_governing: int | None = None
    try:
        q_direct, dec = _direct_index(sd, p, m, e_real, None)
    except TheoryViolation as exc:
        alarms.append(f"direct route: {exc}")
    except PreconditionViolated as exc:
        alarms.append(f"direct route precondition: {exc}")
    split, _ = ordered_factors(sd, p)
    try:
        q_governing, dec = _governing_index(sd, p, split, False, dec)
    except TheoryViolation as exc:
        alarms.append(f"governing route: {exc}")
    except PreconditionViolated as exc:
        if sd.d % 2 == 0 and p % 8 == 5:
            # the dyadic block makes b = p = 5 (mod 8), outside the domain
            # of the even-case cross product; documented, not alarming
            verdict = replace(verdict, reason="governing route undefined: b = 5 (mod 8)")
        else:
            alarms.append(f"governing route precondition: {exc}")
    if q_direct is not None and q_governing is not None and q_direct != q_governing:
        alarms.append(f"routes disagree: direct {q_direct}, governing {q_governing}")

    if construction_check and m == sd.t - 2 and dec is not None and q_direct is not None:
        try:
            beta_real = _construction_real(sd, p, dec)
            if (q_direct == 2) != (e_real and beta_real):
                alarms.append(
                    f"construction check: generator sign {beta_real} with E real {e_real} "
                    f"contradicts index {q_direct}"
                )
        except LocalObstruction as exc:
            alarms.append(f"construction check: local obstruction at {exc.place}")
        except HeightExceeded as exc:
            alarms.append(f"construction check: {exc}")
        except TheoryViolation as exc:
            alarms.append(f"construction check: {exc}")

    return replace(
        verdict,
        q_direct=q_direct,
        q_governing=q_governing,
        decomposition=dec,
        alarms=tuple(alarms),
    )


def generalized_rank_check(d: int | SquarefreeD, p: int, flip_root: bool = False) -> RankCheck:
    """Recompute the composite field's 4-rank from split-generator symbols.

    Builds one ternary generator per split factor (with norm coprime to the
    other factors), assembles the extended symbol matrix, and reports its
    kernel dimension minus one next to the predicted t - m - 1.  Refuses a
    split dyadic factor, where the symbol rows are not defined.
    """
    sd = _as_sd(d)
    split, _ = ordered_factors(sd, p)
    alphas = []
    for q in split:
        others = tuple(x for x in sd.factors if x != q)
        _, alpha = split_generator(p, q, avoid=others)
        alphas.append(alpha)
    matrices = extended_residue_matrix(sd, p, alphas, flip_root=flip_root)
    rational_rank, _ = rank_and_kernel(matrices.rational)
    return RankCheck(
        kernel_rank4=matrices.kernel_dim - 1,
        predicted_rank4=sd.t - len(split) - 1,
        rational_full_rank=rational_rank == len(split),
    )
