"""Continued fractions with exact floor arithmetic.

An alpha in (0, 1] is held as partial quotients [0; a_1, a_2, ...], either a
finite list (rational) or a list plus an extender callback (irrational).
floor(j * alpha) is computed exactly by bracketing alpha between consecutive
convergents, so Beatty symbols never touch floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence

from .errors import InvalidArgument, NeedsMoreTerms, ResourceLimit


class ContinuedFraction:
    def __init__(
        self,
        quotients: Sequence[int],
        extend: Optional[Callable[[int], int]] = None,
    ):
        qs = [int(a) for a in quotients]
        if extend is None and not qs:
            raise InvalidArgument("need at least one partial quotient")
        for a in qs:
            if a < 1:
                raise InvalidArgument("partial quotients must be >= 1")
        self._quotients: List[int] = qs
        self._extend = extend
        # p, q indexed with an offset of 1: slot 0 is k = -1.
        self._p: List[int] = [1, 0]
        self._q: List[int] = [0, 1]
        self._floor_hint = 1

    # -- quotients and convergents -----------------------------------------

    @property
    def is_rational(self) -> bool:
        return self._extend is None

    def known_terms(self) -> int:
        return len(self._quotients)

    def quotient(self, k: int) -> int:
        """Partial quotient a_k, 1-indexed. Extends lazily if possible."""
        if k < 1:
            raise InvalidArgument("quotient index starts at 1")
        while len(self._quotients) < k:
            if self._extend is None:
                raise NeedsMoreTerms(
                    f"continued fraction has only {len(self._quotients)} terms"
                )
            a = int(self._extend(len(self._quotients) + 1))
            if a < 1:
                raise InvalidArgument("extender produced a quotient < 1")
            self._quotients.append(a)
        return self._quotients[k - 1]

    def convergent(self, k: int) -> tuple:
        """(p_k, q_k) with p_0/q_0 = 0/1 and the usual recurrence."""
        if k < -1:
            raise InvalidArgument("convergent index starts at -1")
        while len(self._p) < k + 2:
            i = len(self._p) - 1  # about to produce convergent index i
            a = self.quotient(i)
            self._p.append(a * self._p[-1] + self._p[-2])
            self._q.append(a * self._q[-1] + self._q[-2])
        return self._p[k + 1], self._q[k + 1]

    def convergents(self, upto: int) -> list:
        return [self.convergent(k) for k in range(upto + 1)]

    def value(self) -> Fraction:
        if not self.is_rational:
            raise InvalidArgument("irrational continued fraction has no exact value")
        p, q = self.convergent(len(self._quotients))
        return Fraction(p, q)

    def value_bounds(self, k: int) -> tuple:
        """Fractions (lo, hi) with lo < alpha < hi (strict for irrationals)."""
        if self.is_rational and k + 1 > len(self._quotients):
            v = self.value()
            return v, v
        p1, q1 = self.convergent(k)
        p2, q2 = self.convergent(k + 1)
        f1, f2 = Fraction(p1, q1), Fraction(p2, q2)
        return (f1, f2) if f1 < f2 else (f2, f1)

    def value_float(self) -> float:
        if self.is_rational:
            return float(self.value())
        k = 2
        while True:
            lo, hi = self.value_bounds(k)
            if float(lo) == float(hi):
                return float(lo)
            k += 1

    # -- exact floors and Beatty symbols ------------------------------------

    def floor_multiple(self, j: int) -> int:
        """floor(j * alpha), exact for any integer j."""
        j = int(j)
        if j == 0:
            return 0
        if self.is_rational:
            p, q = self.convergent(len(self._quotients))
            return (j * p) // q
        k = self._floor_hint
        while True:
            (plo, qlo), (phi, qhi) = self._bounds_pq(k)
            flo = (j * plo) // qlo
            fhi = (j * phi) // qhi
            if flo == fhi:
                self._floor_hint = k
                return flo
            k += 1

    def _bounds_pq(self, k: int) -> tuple:
        p1, q1 = self.convergent(k)
        p2, q2 = self.convergent(k + 1)
        if p1 * q2 < p2 * q1:
            return (p1, q1), (p2, q2)
        return (p2, q2), (p1, q1)

    def beatty_symbol(self, k: int) -> int:
        """b_k = floor((k+1) alpha) - floor(k alpha), a 0/1 symbol."""
        return self.floor_multiple(k + 1) - self.floor_multiple(k)

    def beatty_word(self, start: int, count: int) -> list:
        """Symbols b_start .. b_{start+count-1} with one exact floor per step."""
        if count < 0:
            raise InvalidArgument("count must be >= 0")
        out = []
        prev = self.floor_multiple(start)
        for k in range(start, start + count):
            cur = self.floor_multiple(k + 1)
            out.append(cur - prev)
            prev = cur
        return out

    # -- constructors --------------------------------------------------------

    @staticmethod
    def golden() -> "ContinuedFraction":
        """alpha = (sqrt(5) - 1) / 2 = [0; 1, 1, 1, ...]."""
        return ContinuedFraction([1], extend=lambda k: 1)

    @staticmethod
    def from_fraction(value: Fraction) -> "ContinuedFraction":
        value = Fraction(value)
        if not (0 < value <= 1):
            raise InvalidArgument("alpha must lie in (0, 1]")
        qs = []
        num, den = value.denominator, value.numerator  # expand 1/value
        while den:
            qs.append(num // den)
            num, den = den, num % den
        return ContinuedFraction(qs)

    @staticmethod
    def from_decimal(text) -> "ContinuedFraction":
        """Decimal input, truncated to a rational with denominator <= 1e12."""
        frac = Fraction(str(text)).limit_denominator(10**12)
        return ContinuedFraction.from_fraction(frac)

    @staticmethod
    def parse(spec) -> "ContinuedFraction":
        """Accepts 'golden', 'cf:a1,a2,...', a decimal string, or a number."""
        if isinstance(spec, ContinuedFraction):
            return spec
        if isinstance(spec, Fraction):
            return ContinuedFraction.from_fraction(spec)
        if isinstance(spec, str):
            s = spec.strip()
            if s == "golden":
                return ContinuedFraction.golden()
            if s.startswith("cf:"):
                parts = [t for t in s[3:].split(",") if t.strip()]
                if not parts:
                    raise InvalidArgument("cf: spec needs at least one quotient")
                return ContinuedFraction([int(t) for t in parts])
            return ContinuedFraction.from_decimal(s)
        if isinstance(spec, (int, float)):
            return ContinuedFraction.from_decimal(spec)
        raise InvalidArgument(f"cannot interpret alpha spec {spec!r}")


# ---------------------------------------------------------------------------
# Word-level recurrence via the quotient formula


def recurrence_formula(cf: ContinuedFraction, length: int) -> int:
    """Recurrence value for sliding blocks of the given length.

    Uses the largest k with q_k <= length < q_{k+1} and returns q_k + q_{k+1}.
    Needs an irrational alpha; a finite quotient list raises needs-more-terms
    because the bracket search would exhaust it.
    """
    if length < 1:
        raise InvalidArgument("block length must be >= 1")
    if cf.is_rational:
        raise NeedsMoreTerms(
            "finite continued fraction: the recurrence formula needs an "
            "irrational alpha, supply more quotients or an extender"
        )
    k = 0
    while True:
        _, q_next = cf.convergent(k + 1)
        if q_next > length:
            break
        k += 1
    _, q_k = cf.convergent(k)
    _, q_k1 = cf.convergent(k + 1)
    return q_k + q_k1


@dataclass
class BoundedQuotientReport:
    examined_terms: int
    max_quotient: int
    bounded: bool
    caveat: str


def is_badly_approximable(cf: ContinuedFraction, terms: int, bound: Optional[int] = None) -> BoundedQuotientReport:
    """Proxy check: are the first `terms` partial quotients bounded?

    A finite prefix can never certify the full property, so the report says
    so. With an explicit bound the verdict is max quotient <= bound.
    """
    if terms < 1:
        raise InvalidArgument("need at least one term")
    mx = 0
    for k in range(1, terms + 1):
        try:
            mx = max(mx, cf.quotient(k))
        except NeedsMoreTerms:
            terms = k - 1
            break
    verdict = True if bound is None else mx <= bound
    return BoundedQuotientReport(
        examined_terms=terms,
        max_quotient=mx,
        bounded=verdict,
        caveat=f"verdict covers only the first {terms} partial quotients",
    )


@dataclass
class GrowthConstruction:
    cf: ContinuedFraction
    quotients: list
    table: list  # rows (k, q_k, q_k + q_{k+1}, g(q_k))


def construct_alpha_for_growth(
    g: Callable[[int], float], terms: int, max_bits: int = 4_000_000
) -> GrowthConstruction:
    """Build alpha whose word recurrence beats g along the denominators q_k.

    Picks a_{k+1} = max(1, ceil(g(q_k))), which forces
    q_k + q_{k+1} > g(q_k) at every step. Denominators can explode for fast
    g; max_bits caps their bit length and raises resource-limit beyond it.
    """
    if terms < 1:
        raise InvalidArgument("need at least one term")
    quotients = []
    p_prev, q_prev = 1, 0  # k = -1
    p_cur, q_cur = 0, 1  # k = 0
    for _ in range(terms):
        if q_cur.bit_length() > max_bits:
            raise ResourceLimit(
                f"denominator exceeded {max_bits} bits after {len(quotients)} terms"
            )
        try:
            val = g(q_cur)
        except OverflowError as exc:
            raise ResourceLimit(
                f"growth target overflows a float at denominator bit length "
                f"{q_cur.bit_length()}"
            ) from exc
        if isinstance(val, float) and not math.isfinite(val):
            raise ResourceLimit("growth target overflowed to a non-finite value")
        a = max(1, int(math.ceil(val)))
        quotients.append(a)
        p_cur, p_prev = a * p_cur + p_prev, p_cur
        q_cur, q_prev = a * q_cur + q_prev, q_cur
        if q_cur.bit_length() > max_bits:
            raise ResourceLimit(
                f"denominator exceeded {max_bits} bits after {len(quotients)} terms"
            )
    cf = ContinuedFraction(quotients)
    table = []
    for k in range(len(quotients)):
        _, qk = cf.convergent(k)
        _, qk1 = cf.convergent(k + 1)
        target = g(qk)
        if qk + qk1 <= target:
            raise AssertionError("construction failed to beat the growth target")
        table.append((k, qk, qk + qk1, target))
    return GrowthConstruction(cf=cf, quotients=quotients, table=table)
