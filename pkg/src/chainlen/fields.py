"""Exact arithmetic in F_p and Q_p for odd p with p = 1 (mod 2^(m+1)).

Two concrete fields back the whole toolkit:

* ``Fp``: residues mod an odd prime.  Arithmetic is exact; the Brauer group
  is trivial, so this field exercises the chain machinery only.
* ``Qp``: p-adic numbers at a fixed working precision.  An element is a
  valuation plus a unit known to ``prec`` digits; every operation tracks how
  many digits of the result are actually known.  Additive cancellation eats
  digits, and an operation whose result would retain fewer than one known
  digit raises PrecisionExhausted instead of guessing.

Zero is representable in both fields but only transiently (sums, solution
vectors); public form/vertex slots reject it.  In Q_p a "zero" produced by
a sum is indistinguishable from a deep cancellation, so sums never return
zero: they raise PrecisionExhausted and the caller retries the whole
computation at doubled precision.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import _numtheory as nt
from .errors import DivisionByZero, NotASquare, PrecisionExhausted

DEFAULT_PRECISION = 64
MAX_PRECISION = 1024


@dataclass(frozen=True)
class FieldConfig:
    """Parameters shared by a matched (F_p, Q_p) pair.

    p must be an odd prime with p = 1 (mod 2^(m+1)), so the fields contain a
    primitive 2^(m+1)-th root of unity; for m >= 1 this forces -1 to be a
    square.  m = 0 admits any odd prime and supports chain-only work.
    """

    p: int
    m: int
    precision: int = DEFAULT_PRECISION
    seed: int = 0

    def __post_init__(self) -> None:
        if not nt.is_prime(self.p) or self.p == 2:
            raise ValueError(f"p={self.p} must be an odd prime")
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        if (self.p - 1) % (1 << (self.m + 1)) != 0:
            raise ValueError(f"p={self.p} is not 1 mod 2^{self.m + 1}")
        if not 2 <= self.precision <= MAX_PRECISION:
            raise ValueError(f"precision must be in [2, {MAX_PRECISION}]")
        if self.m >= 1:
            # -1 must be a square and g^((p-1)/2^(m+1)) a primitive
            # 2^(m+1)-th root of unity; both follow from the congruence,
            # but we check them once here rather than trust the arithmetic.
            g = nt.smallest_primitive_root(self.p)
            assert nt.legendre(-1, self.p) == 1
            zeta = pow(g, (self.p - 1) >> (self.m + 1), self.p)
            assert pow(zeta, 1 << self.m, self.p) == self.p - 1

    def fp(self) -> "Fp":
        return Fp(self.p)

    def qp(self) -> "Qp":
        return Qp(self.p, self.precision)

    def field(self, kind: str) -> "Fp | Qp":
        if kind == "Fp":
            return self.fp()
        if kind == "Qp":
            return self.qp()
        raise ValueError(f"unknown field kind {kind!r}")

    def rng(self) -> random.Random:
        return random.Random(self.seed)

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "precision": self.precision,
                "seed": self.seed}

    @classmethod
    def from_json(cls, obj: dict) -> "FieldConfig":
        return cls(p=int(obj["p"]), m=int(obj["m"]),
                   precision=int(obj.get("precision", DEFAULT_PRECISION)),
                   seed=int(obj.get("seed", 0)))


@dataclass(frozen=True)
class PowerClass:
    """Class of an element modulo 2^k-th powers.

    ``components`` is (index,) over F_p and (valuation mod 2^k, unit index)
    over Q_p.  Classes of a product add componentwise in Z/2^k.
    """

    deg_log2: int
    components: tuple[int, ...]

    def __add__(self, other: "PowerClass") -> "PowerClass":
        if self.deg_log2 != other.deg_log2 or len(self.components) != len(other.components):
            raise ValueError("mismatched power classes")
        mod = 1 << self.deg_log2
        return PowerClass(self.deg_log2,
                          tuple((a + b) % mod for a, b in zip(self.components, other.components)))

    @property
    def is_trivial(self) -> bool:
        return all(c == 0 for c in self.components)


class FpElement:
    """Residue in F_p.  Zero is constructible but is rejected by inv/div."""

    __slots__ = ("field", "r")

    def __init__(self, field: "Fp", r: int):
        self.field = field
        self.r = r % field.p

    @classmethod
    def _raw(cls, field: "Fp", r: int) -> "FpElement":
        el = object.__new__(cls)
        el.field = field
        el.r = r
        return el

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other: "FpElement") -> "FpElement":
        return FpElement._raw(self.field, (self.r + other.r) % self.field.p)

    def __sub__(self, other: "FpElement") -> "FpElement":
        return FpElement._raw(self.field, (self.r - other.r) % self.field.p)

    def __mul__(self, other: "FpElement") -> "FpElement":
        return FpElement._raw(self.field, self.r * other.r % self.field.p)

    def __neg__(self) -> "FpElement":
        return FpElement._raw(self.field, -self.r % self.field.p)

    def inv(self) -> "FpElement":
        if self.r == 0:
            raise DivisionByZero("inverse of zero in F_p")
        return FpElement._raw(self.field, pow(self.r, -1, self.field.p))

    def __truediv__(self, other: "FpElement") -> "FpElement":
        return self * other.inv()

    def square(self) -> "FpElement":
        return self * self

    # -- predicates and classes -------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.r == 0

    @property
    def is_one(self) -> bool:
        return self.r == 1

    def is_square(self) -> bool:
        if self.r == 0:
            raise DivisionByZero("square class of zero")
        return nt.legendre(self.r, self.field.p) == 1

    def sqrt(self) -> "FpElement":
        if self.r == 0:
            raise DivisionByZero("sqrt of zero")
        try:
            return FpElement(self.field, nt.sqrt_mod_p(self.r, self.field.p))
        except ValueError:
            raise NotASquare(f"{self.r} is not a square mod {self.field.p}") from None

    def power_class(self, k: int) -> PowerClass:
        if self.r == 0:
            raise DivisionByZero("power class of zero")
        if (self.field.p - 1) % (1 << k) != 0:
            raise ValueError(f"2^{k} does not divide p-1")
        return PowerClass(k, (nt.dlog_two_part(self.r, k, self.field.p, self.field.g),))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FpElement):
            return NotImplemented
        return self.field.p == other.field.p and self.r == other.r

    def __hash__(self) -> int:
        return hash((self.field.p, self.r))

    def __repr__(self) -> str:
        return f"FpElement({self.r} mod {self.field.p})"

    def to_json(self) -> dict:
        return {"res": self.r}


class QpElement:
    """p-adic number p^v * u with the unit u known to ``prec`` digits.

    ``unit == 0`` marks the exact zero, which only ever arises from literal
    construction (it is never the output of a sum).
    """

    __slots__ = ("field", "v", "unit", "prec")

    def __init__(self, field: "Qp", v: int, unit: int, prec: int):
        self.field = field
        if unit == 0:
            self.v, self.unit, self.prec = 0, 0, field.precision
            return
        if prec < 1:
            raise PrecisionExhausted("unit known to fewer than one digit")
        prec = min(prec, field.precision)
        unit %= field.mod(prec)
        if unit % field.p == 0:
            raise ValueError("unit part must be coprime to p")
        self.v, self.unit, self.prec = v, unit, prec

    @classmethod
    def _raw(cls, field: "Qp", v: int, unit: int, prec: int) -> "QpElement":
        """Internal constructor for already-reduced, provably-unit values."""
        el = object.__new__(cls)
        el.field = field
        el.v = v
        el.unit = unit
        el.prec = prec
        return el

    # -- arithmetic -------------------------------------------------------

    def __mul__(self, other: "QpElement") -> "QpElement":
        if self.unit == 0 or other.unit == 0:
            return self.field.zero()
        field = self.field
        k = self.prec if self.prec <= other.prec else other.prec
        mod = field.top if k == field.precision else field.mod(k)
        return QpElement._raw(field, self.v + other.v,
                              self.unit * other.unit % mod, k)

    def inv(self) -> "QpElement":
        if self.unit == 0:
            raise DivisionByZero("inverse of zero in Q_p")
        return QpElement._raw(self.field, -self.v,
                              pow(self.unit, -1, self.field.mod(self.prec)),
                              self.prec)

    def __truediv__(self, other: "QpElement") -> "QpElement":
        return self * other.inv()

    def __neg__(self) -> "QpElement":
        if self.unit == 0:
            return self
        return QpElement._raw(self.field, self.v,
                              self.field.mod(self.prec) - self.unit, self.prec)

    def __add__(self, other: "QpElement") -> "QpElement":
        if self.unit == 0:
            return other
        if other.unit == 0:
            return self
        p = self.field.p
        vmin = min(self.v, other.v)
        # absolute precision of each operand caps the digits of the sum
        known = min(self.v + self.prec, other.v + other.prec) - vmin
        if known < 1:
            raise PrecisionExhausted("operands share no known digits")
        mod = self.field.mod(known)
        w = (self.unit * p ** (self.v - vmin) + other.unit * p ** (other.v - vmin)) % mod
        if w == 0:
            raise PrecisionExhausted(
                f"cancellation beyond {known} known digits in a sum")
        loss = 0
        while w % p == 0:
            w //= p
            loss += 1
        return QpElement._raw(self.field, vmin + loss, w, known - loss)

    def __sub__(self, other: "QpElement") -> "QpElement":
        return self + (-other)

    def square(self) -> "QpElement":
        return self * self

    # -- predicates and classes -------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.unit == 0

    @property
    def is_one(self) -> bool:
        return self.unit != 0 and self.v == 0 and self.unit == 1

    def residue(self) -> int:
        """Unit residue in F_p^x; needs at least one known digit (invariant)."""
        if self.unit == 0:
            raise DivisionByZero("residue of zero")
        return self.unit % self.field.p

    def is_square(self) -> bool:
        if self.unit == 0:
            raise DivisionByZero("square class of zero")
        return self.v % 2 == 0 and nt.legendre(self.residue(), self.field.p) == 1

    def sqrt(self) -> "QpElement":
        """Square root by Tonelli-Shanks mod p plus a verified Hensel lift."""
        if self.unit == 0:
            raise DivisionByZero("sqrt of zero")
        if self.v % 2 != 0:
            raise NotASquare("odd valuation")
        p = self.field.p
        try:
            r = nt.sqrt_mod_p(self.residue(), p)
        except ValueError:
            raise NotASquare("unit residue is a non-residue mod p") from None
        k = 1
        while k < self.prec:
            k = min(2 * k, self.prec)
            mod = self.field.mod(k)
            r = (r + self.unit * pow(r, -1, mod)) * pow(2, -1, mod) % mod
        top = self.field.mod(self.prec)
        if r * r % top != self.unit:
            raise NotASquare("Hensel lift failed verification")  # unreachable
        r = min(r, top - r)
        return QpElement._raw(self.field, self.v // 2, r, self.prec)

    def power_class(self, k: int) -> PowerClass:
        if self.unit == 0:
            raise DivisionByZero("power class of zero")
        if (self.field.p - 1) % (1 << k) != 0:
            raise ValueError(f"2^{k} does not divide p-1")
        unit_idx = nt.dlog_two_part(self.residue(), k, self.field.p, self.field.g)
        return PowerClass(k, (self.v % (1 << k), unit_idx))

    def __eq__(self, other: object) -> bool:
        """Equality to the joint known precision."""
        if not isinstance(other, QpElement):
            return NotImplemented
        if self.field.p != other.field.p:
            return False
        if self.unit == 0 or other.unit == 0:
            return self.unit == other.unit
        if self.v != other.v:
            return False
        k = min(self.prec, other.prec)
        return (self.unit - other.unit) % self.field.p ** k == 0

    __hash__ = None  # equality depends on known precision; not hashable

    def __repr__(self) -> str:
        if self.unit == 0:
            return "QpElement(0)"
        return f"QpElement({self.field.p}^{self.v} * {self.unit} [{self.prec} digits])"

    def to_json(self) -> dict:
        return {"val": self.v, "unit": str(self.unit), "prec": self.prec}


class Fp:
    """The prime field F_p with its fixed smallest primitive root."""

    kind = "Fp"

    def __init__(self, p: int):
        self.p = p
        self.g = nt.smallest_primitive_root(p)

    def el(self, r: int) -> FpElement:
        return FpElement(self, r)

    def one(self) -> FpElement:
        return FpElement(self, 1)

    def zero(self) -> FpElement:
        return FpElement(self, 0)

    def random_element(self, rng: random.Random, kind: str = "any") -> FpElement:
        """Uniform nonzero residue; ``kind`` is accepted for API symmetry."""
        if kind not in ("any", "unit"):
            raise ValueError(f"unknown kind {kind!r}")
        return FpElement(self, rng.randrange(1, self.p))

    def element_from_json(self, obj: dict) -> FpElement:
        return FpElement(self, int(obj["res"]))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Fp) and other.p == self.p

    def __hash__(self) -> int:
        return hash(("Fp", self.p))

    def __repr__(self) -> str:
        return f"Fp({self.p})"


class Qp:
    """The p-adic field Q_p at a fixed working precision (digits of the unit)."""

    kind = "Qp"

    def __init__(self, p: int, precision: int = DEFAULT_PRECISION):
        if not 2 <= precision <= MAX_PRECISION:
            raise ValueError(f"precision must be in [2, {MAX_PRECISION}]")
        self.p = p
        self.precision = precision
        self.g = nt.smallest_primitive_root(p)
        self.top = p ** precision
        self._mods: dict[int, int] = {precision: self.top}

    def mod(self, k: int) -> int:
        """p^k, cached; moduli are hit on every element operation."""
        m = self._mods.get(k)
        if m is None:
            m = self.p ** k
            self._mods[k] = m
        return m

    def with_precision(self, precision: int) -> "Qp":
        return Qp(self.p, precision)

    def el(self, n: int) -> QpElement:
        """Embed an exact integer at full working precision."""
        if n == 0:
            return self.zero()
        v = 0
        while n % self.p == 0:
            n //= self.p
            v += 1
        return QpElement(self, v, n, self.precision)

    def unit(self, u: int, v: int = 0, prec: int | None = None) -> QpElement:
        return QpElement(self, v, u, self.precision if prec is None else prec)

    def one(self) -> QpElement:
        return QpElement(self, 0, 1, self.precision)

    def zero(self) -> QpElement:
        return QpElement(self, 0, 0, self.precision)

    def random_element(self, rng: random.Random, kind: str = "any") -> QpElement:
        """Valuation uniform in [-2, 2] (``any``) or 0 (``unit``); unit digits uniform."""
        if kind == "unit":
            v = 0
        elif kind == "any":
            v = rng.randrange(-2, 3)
        else:
            raise ValueError(f"unknown kind {kind!r}")
        top = self.mod(self.precision)
        while True:
            u = rng.randrange(1, top)
            if u % self.p:
                return QpElement(self, v, u, self.precision)

    def element_from_json(self, obj: dict) -> QpElement:
        return QpElement(self, int(obj["val"]), int(str(obj["unit"])), int(obj["prec"]))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Qp) and other.p == self.p and other.precision == self.precision

    def __hash__(self) -> int:
        return hash(("Qp", self.p, self.precision))

    def __repr__(self) -> str:
        return f"Qp({self.p}, precision={self.precision})"


Field = Fp | Qp
Element = FpElement | QpElement


def product(elements, one):
    """Product of a sequence of elements, starting from the field's one."""
    acc = one
    for x in elements:
        acc = acc * x
    return acc


def batch_inv(elements: list) -> list:
    """All inverses at the cost of one inversion (Montgomery's trick)."""
    n = len(elements)
    if n == 0:
        return []
    prefix = [elements[0]]
    for x in elements[1:]:
        prefix.append(prefix[-1] * x)
    inv_total = prefix[-1].inv()
    out = [None] * n
    for i in range(n - 1, 0, -1):
        out[i] = inv_total * prefix[i - 1]
        inv_total = inv_total * elements[i]
    out[0] = inv_total
    return out


def retry_with_precision(config: FieldConfig, build_and_run, kind: str = "Qp"):
    """Run ``build_and_run(field)`` retrying at doubled precision.

    The callback must rebuild its own inputs from exact data at the precision
    of the field it is handed; rerunning with the same truncated elements
    would just fail again.  Doubling is capped at MAX_PRECISION, after which
    the PrecisionExhausted propagates.
    """
    precision = config.precision
    while True:
        field = Qp(config.p, precision) if kind == "Qp" else config.fp()
        try:
            return build_and_run(field), precision
        except PrecisionExhausted:
            if kind != "Qp" or precision >= MAX_PRECISION:
                raise
            precision = min(2 * precision, MAX_PRECISION)
