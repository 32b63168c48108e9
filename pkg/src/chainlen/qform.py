"""Diagonal quadratic forms: invariants, isometry, representation, I^2/I^3.

A diagonal form <a_1,...,a_n> is classified over both supported fields by
dimension, discriminant (product of slots mod squares) and, over Q_p, the
Hasse invariant (product of pairwise degree-2 tame symbols).  Isometry is
decided by comparing these invariants, which is complete here; no
Gram-matrix search is needed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import _numtheory as nt
from .errors import NotASquare, NotRepresented, PrecisionExhausted
from .fields import Element, Fp, FpElement, PowerClass, Qp, QpElement


def _check_slots(slots) -> tuple:
    slots = tuple(slots)
    if not slots:
        raise ValueError("a diagonal form needs at least one slot")
    for x in slots:
        if x.is_zero:
            raise ValueError("form slots must be nonzero")
    return slots


@dataclass(frozen=True)
class DiagonalForm:
    """Ordered nonzero slots of a diagonal quadratic form."""

    slots: tuple

    def __post_init__(self):
        object.__setattr__(self, "slots", _check_slots(self.slots))

    @property
    def dim(self) -> int:
        return len(self.slots)


@dataclass(frozen=True)
class WittInvariants:
    """Complete classifying data over the two supported fields."""

    dim: int
    disc: PowerClass
    hasse: int  # +1 or -1; identically +1 over F_p

    def __eq__(self, other) -> bool:
        return (self.dim == other.dim and self.disc == other.disc
                and self.hasse == other.hasse)


def _hilbert2(a: Element, b: Element) -> int:
    """Degree-2 tame Hilbert symbol over Q_p (p odd) as a sign.

    (a,b) = legendre of the residue of (-1)^(v(a)v(b)) a^v(b) b^(-v(a)).
    """
    p = a.field.p
    ra, rb = a.residue(), b.residue()
    t = pow(ra, b.v % (p - 1), p) * pow(pow(rb, -1, p), a.v % (p - 1), p) % p
    if (a.v * b.v) % 2:
        t = (-t) % p
    return nt.legendre(t, p)


def invariants(form) -> WittInvariants:
    """dim, disc and hasse of a form (DiagonalForm or a slot sequence)."""
    slots = form.slots if isinstance(form, DiagonalForm) else _check_slots(form)
    disc = slots[0].power_class(1)
    for x in slots[1:]:
        disc = disc + x.power_class(1)
    hasse = 1
    if isinstance(slots[0], QpElement):
        for i in range(len(slots)):
            for j in range(i + 1, len(slots)):
                hasse *= _hilbert2(slots[i], slots[j])
    return WittInvariants(len(slots), disc, hasse)


def is_isometric(f, g) -> bool:
    return invariants(f) == invariants(g)


def in_I2(form) -> bool:
    inv = invariants(form)
    return inv.dim % 2 == 0 and inv.disc.is_trivial


def in_I3(form) -> bool:
    return in_I2(form) and invariants(form).hasse == 1


# ---------------------------------------------------------------------------
# Representation solving: x with a_1 x_1^2 + ... + a_n x_n^2 = b.
# ---------------------------------------------------------------------------

_RANDOM_TRIES = 256


def _eval(slots, xs):
    """Sum of a_i x_i^2, skipping zero coordinates."""
    acc = None
    for a, x in zip(slots, xs):
        if x.is_zero:
            continue
        term = a * x.square()
        acc = term if acc is None else acc + term
    return slots[0].field.zero() if acc is None else acc


def _is_exact_zero(c: Element, val: int) -> bool:
    field = c.field
    target = field.el(val % field.p) if isinstance(field, Fp) else field.el(val)
    return c == target


def _binary_hyperbolic(a1: Element, a2: Element, b: Element):
    """Explicit point of a1 x^2 + a2 y^2 = b when -a2/a1 is a square d^2:
    x^2 + e y^2 = c splits as (x - dy)(x + dy) = c with the factors 1 and c.
    Returns None when the form is anisotropic."""
    field = a1.field
    e = a2 / a1
    c = b / a1
    neg_e = -e
    if not neg_e.is_square():
        return None
    d = neg_e.sqrt()
    one = field.one()
    half = (one + one).inv()
    # c = -1 or c = 1 zero out one coordinate; test before the sums, which
    # would see full cancellation over Q_p
    if _is_exact_zero(c, -1):
        return field.zero(), (c - one) * half / d
    if _is_exact_zero(c, 1):
        return (one + c) * half, field.zero()
    return (one + c) * half, (c - one) * half / d


def _ceil_div(a: int, b: int) -> int:
    return -((-a) // b)


def _qp_random_coordinate(field: Qp, target_v: int, slot_v: int,
                          rng: random.Random) -> QpElement:
    """x = p^t * unit with a_i x^2 landing near the target valuation.

    The window starts two below the target so collisions (and the
    cancellations that flip valuation parity) occur across draws.
    """
    t = _ceil_div(target_v - 2 - slot_v, 2) + rng.randrange(4)
    while True:
        u = rng.randrange(1, field.p ** field.precision)
        if u % field.p:
            return QpElement(field, t, u, field.precision)


def _qp_search(slots, b: Element, rng: random.Random, tries: int):
    """Randomized representation over Q_p with adaptive valuations.

    Each attempt solves for one coordinate after drawing the others so that
    their terms straddle b's valuation; dominant terms, collisions and
    cancellations all occur, so every representable case is reached with
    probability bounded away from zero per draw.
    """
    field = slots[0].field
    n = len(slots)
    for trial in range(tries):
        s = trial % n if trial < 2 * n else rng.randrange(n)
        xs = [field.zero()] * n
        for i in range(n):
            if i == s:
                continue
            if n > 2 and rng.random() < 0.25:
                continue  # sparse attempts cover sub-forms
            xs[i] = _qp_random_coordinate(field, b.v, slots[i].v, rng)
        try:
            rest = _eval(slots, xs)
            r = b / slots[s] if rest.is_zero else (b - rest) / slots[s]
        except PrecisionExhausted:
            continue
        if r.is_square():
            xs[s] = r.sqrt()
            return tuple(xs)
    return None


def _binary_solve(a1: Element, a2: Element, b: Element, rng: random.Random):
    """Solve a1 x^2 + a2 y^2 = b, or raise NotRepresented.

    The hyperbolic case splits explicitly.  Otherwise b/a1 must be a norm
    from F(sqrt(-a2/a1)); over Q_p that is decided exactly by the degree-2
    symbol before any search runs, and over F_p norms of the quadratic
    extension cover every nonzero element, so the search always terminates.
    """
    field = a1.field
    point = _binary_hyperbolic(a1, a2, b)
    if point is not None:
        return point
    e = a2 / a1
    c = b / a1
    if c.is_square():
        return (c.sqrt(), field.zero())
    if isinstance(field, Qp):
        if _hilbert2(-e, c) != 1:
            raise NotRepresented("binary form does not represent the target")
        point = _qp_search((a1, a2), b, rng, _RANDOM_TRIES)
        if point is None:
            raise NotRepresented("binary representation search exhausted")
        return point
    for _ in range(_RANDOM_TRIES):
        y = field.random_element(rng)
        r = c - e * y.square()
        if not r.is_zero and r.is_square():
            return (r.sqrt(), y)
    for yr in range(1, field.p):  # exhaustive fallback, spec'd for n <= 2
        y = field.el(yr)
        r = c - e * y.square()
        if not r.is_zero and r.is_square():
            return (r.sqrt(), y)
    raise NotRepresented("binary form does not represent the target")


def represent(form, b: Element, rng: random.Random | None = None):
    """Coordinates x (not all zero, zeros allowed) with sum a_i x_i^2 = b.

    Strategy: (1) a slot already equal to b times a square gives a
    one-coordinate solution; (2) binary and unary cases get explicit/norm
    treatment; (3) larger forms are solved by fixing random coordinates and
    finishing with a square root, which succeeds quickly because every form
    of dimension >= 3 over F_p, and >= 4 over Q_p, is universal.
    """
    slots = form.slots if isinstance(form, DiagonalForm) else _check_slots(form)
    if b.is_zero:
        raise ValueError("target must be nonzero")
    field = slots[0].field
    rng = rng or random.Random(0)
    n = len(slots)

    for i, a in enumerate(slots):
        if a == b:  # exact hit costs no move at all in chain construction
            xs = [field.zero()] * n
            xs[i] = field.one()
            return tuple(xs)
    for i, a in enumerate(slots):
        ratio = b / a
        if ratio.is_square():
            xs = [field.zero()] * n
            xs[i] = ratio.sqrt()
            return tuple(xs)

    if n == 1:
        raise NotRepresented("b/a_1 is not a square")
    if n == 2:
        x, y = _binary_solve(slots[0], slots[1], b, rng)
        return (x, y)

    if isinstance(field, Qp):
        point = _qp_search(slots, b, rng, _RANDOM_TRIES)
        if point is None:
            raise NotRepresented("randomized representation search exhausted")
        return point

    for _ in range(4 * field.p):
        xs = [field.zero()]
        xs.extend(field.random_element(rng) for _ in range(n - 1))
        rest = _eval(slots, xs)
        r = (b - rest) / slots[0] if not rest.is_zero else b / slots[0]
        if r.is_zero:
            return tuple(xs)
        if r.is_square():
            xs[0] = r.sqrt()
            return tuple(xs)
    raise NotRepresented("randomized representation search exhausted")
