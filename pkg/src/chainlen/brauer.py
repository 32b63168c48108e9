"""Symbol-length machinery: pair maps, tame symbols, per-edge symbols.

A 2n-tuple (a_1,...,a_2n) names the tensor product of n cyclic algebras
(a_1,a_2) x ... x (a_2n-1,a_2n) of degree 2^m.  The pair maps phi/psi
translate between such tuples and (2n+2)-tuples with square total product;
moving the (2n+2)-tuple one graph step changes the associated Brauer class
by a single symbol of degree 2^(m-1), which ``step_symbol`` constructs
explicitly.

Over Q_p every class is measured by its local invariant in (1/2^k)Z/Z,
computed through the tame norm-residue symbol (p odd): the class of
(-1)^(v(a)v(b)) a^v(b) b^(-v(a)) modulo 2^k-th powers of the residue field.
Over F_p the Brauer group is trivial and every symbol has invariant zero.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _numtheory as nt
from .errors import DegenerateTrace, InvalidEdge, NotASquare
from .fields import Element, FpElement, batch_inv


@dataclass(frozen=True)
class BrauerClass:
    """Element num/2^k of (1/2^k)Z/Z; the local invariant of a class."""

    num: int
    deg_log2: int

    def __post_init__(self):
        object.__setattr__(self, "num", self.num % (1 << self.deg_log2))

    def normalized(self) -> "BrauerClass":
        num, k = self.num, self.deg_log2
        while k > 0 and num % 2 == 0:
            num //= 2
            k -= 1
        return BrauerClass(num, k)

    def __add__(self, other: "BrauerClass") -> "BrauerClass":
        k = max(self.deg_log2, other.deg_log2)
        return BrauerClass(
            (self.num << (k - self.deg_log2)) + (other.num << (k - other.deg_log2)), k)

    def __neg__(self) -> "BrauerClass":
        return BrauerClass(-self.num, self.deg_log2)

    def __sub__(self, other: "BrauerClass") -> "BrauerClass":
        return self + (-other)

    def scale(self, factor: int) -> "BrauerClass":
        """Invariant of the factor-fold tensor power."""
        return BrauerClass(self.num * factor, self.deg_log2)

    @property
    def is_zero(self) -> bool:
        return self.num == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, BrauerClass):
            return NotImplemented
        a, b = self.normalized(), other.normalized()
        return a.num == b.num and a.deg_log2 == b.deg_log2

    def __hash__(self) -> int:
        n = self.normalized()
        return hash((n.num, n.deg_log2))

    def to_json(self) -> dict:
        return {"num": self.num, "deg_log2": self.deg_log2}

    @classmethod
    def from_json(cls, obj: dict) -> "BrauerClass":
        return cls(int(obj["num"]), int(obj["deg_log2"]))


@dataclass(frozen=True)
class SymbolExpr:
    """Formal cyclic-algebra symbol (a, b) of degree 2^deg_log2."""

    a: Element
    b: Element
    deg_log2: int

    def __post_init__(self):
        if self.a.is_zero or self.b.is_zero:
            raise ValueError("symbol slots must be nonzero")

    def invariant(self) -> BrauerClass:
        return tame_symbol(self.a, self.b, self.deg_log2)

    def inverse(self) -> "SymbolExpr":
        """Symbol of the opposite algebra: invert the second slot."""
        return SymbolExpr(self.a, self.b.inv(), self.deg_log2)

    def to_json(self) -> dict:
        return {"a": self.a.to_json(), "b": self.b.to_json(),
                "deg_log2": self.deg_log2}


def tame_symbol(a: Element, b: Element, k: int) -> BrauerClass:
    """Local invariant of the degree-2^k symbol (a, b); needs 2^k | p-1.

    Bilinear in each slot and antisymmetric; trivial whenever both slots are
    units over Q_p, and identically trivial over F_p.
    """
    if a.is_zero or b.is_zero:
        raise ValueError("tame symbol of zero")
    p = a.field.p
    if (p - 1) % (1 << k) != 0:
        raise ValueError(f"2^{k} does not divide p-1")
    if isinstance(a, FpElement):
        return BrauerClass(0, k)
    va, vb = a.v, b.v
    t = pow(a.residue(), vb % (p - 1), p) * pow(pow(b.residue(), -1, p), va % (p - 1), p) % p
    if (va * vb) % 2:
        t = (-t) % p
    return BrauerClass(nt.dlog_two_part(t, k, p, a.field.g), k)


# ---------------------------------------------------------------------------
# Pair maps between 2n-tuples and (2n+2)-tuples
# ---------------------------------------------------------------------------


def validate_a_tuple(a) -> tuple:
    a = tuple(a)
    if len(a) % 2 or not a:
        raise ValueError("pair tuple must have positive even length")
    if any(x.is_zero for x in a):
        raise ValueError("pair tuple entries must be nonzero")
    return a


def validate_b_tuple(b, check_product: bool = True) -> tuple:
    b = tuple(b)
    if len(b) % 2 or len(b) < 4:
        raise ValueError("square-product tuple needs even length >= 4")
    if any(x.is_zero for x in b):
        raise ValueError("square-product tuple entries must be nonzero")
    if check_product:
        prod = b[0]
        for x in b[1:]:
            prod = prod * x
        if not prod.is_square():
            raise ValueError("total product is not a square")
    return b


def phi(a) -> tuple:
    """(a_1,...,a_2n) -> (b_1,...,b_2n+2) with b_1 = 1, b_2n+2 = prod a_j and
    b_2i = a_2i-1 / (b_1...b_2i-1), b_2i+1 = a_2i / (b_1...b_2i-1).

    The prefix products P_i = b_1...b_2i-1 satisfy P_i+1 = (a_2i-1 a_2i)/P_i,
    so one batched inversion of the pair products covers the whole map.
    """
    a = validate_a_tuple(a)
    field = a[0].field
    n = len(a) // 2
    pair_prods = [a[2 * i] * a[2 * i + 1] for i in range(n)]
    pair_invs = batch_inv(pair_prods)
    one = field.one()
    b = [one]
    prefix, prefix_inv = one, one
    for i in range(n):
        b.append(a[2 * i] * prefix_inv)
        b.append(a[2 * i + 1] * prefix_inv)
        prefix, prefix_inv = pair_prods[i] * prefix_inv, pair_invs[i] * prefix
    total = pair_prods[0]
    for c in pair_prods[1:]:
        total = total * c
    b.append(total)
    return tuple(b)


def psi(b) -> tuple:
    """(b_1,...,b_2n+2) -> (a_1,...,a_2n) with a_2i-1 = b_2i * b_1...b_2i-1
    and a_2i = b_2i+1 * b_1...b_2i-1; inverse to phi on its image."""
    b = validate_b_tuple(b, check_product=False)
    a = []
    prefix = b[0]
    for i in range(1, len(b) - 1, 2):
        a.append(b[i] * prefix)
        a.append(b[i + 1] * prefix)
        prefix = prefix * b[i] * b[i + 1]
    return tuple(a)


def cm_class(a, m: int) -> BrauerClass:
    """Invariant of (a_1,a_2)_{2^m} x ... x (a_2n-1,a_2n)_{2^m}."""
    a = validate_a_tuple(a)
    total = BrauerClass(0, m)
    for i in range(0, len(a), 2):
        total = total + tame_symbol(a[i], a[i + 1], m)
    return total


def clifford_class(b) -> BrauerClass:
    """Invariant of the Clifford algebra of <b_1,...,b_2n+2> for b with
    square total product: (b1b2, b1b3)_2 x (b1b2b3b4, b1b2b3b5)_2 x ..."""
    b = validate_b_tuple(b)
    total = BrauerClass(0, 1)
    prefix = b[0]
    for i in range(1, len(b) - 1, 2):
        total = total + tame_symbol(prefix * b[i], prefix * b[i + 1], 1)
        prefix = prefix * b[i] * b[i + 1]
    return total


# ---------------------------------------------------------------------------
# Per-edge symbol extraction
# ---------------------------------------------------------------------------


def _slot_multiplicity(s: int, t: int) -> int:
    """Multiplicity of b_t in a_s (both 1-based): a_s with odd s contains
    b_1..b_s and b_s+1; with even s it contains b_1..b_s-1 and b_s+1."""
    if s % 2 == 1:
        return 1 if t <= s + 1 else 0
    return 1 if (t <= s + 1 and t != s) else 0


def _exponent_product(a, exps) -> Element:
    """prod over pairs of a_2i^p_i * a_2i-1^(-q_i) for exps = [(p_i, q_i)]."""
    field = a[0].field
    acc = field.one()
    for i, (pi, qi) in enumerate(exps):
        for _ in range(pi):
            acc = acc * a[2 * i + 1]
        for _ in range(qi):
            acc = acc / a[2 * i]
    return acc


def step_symbol(v, w, move, m: int) -> SymbolExpr:
    """Degree-2^(m-1) symbol whose class is cm(psi(w), m) - cm(psi(v), m).

    Needs 2^(m+1) | p-1 so that -1 is a 2^m-th power and the split parts
    (x, -1) and (1+r, r) drop out.  A full move at slot k (1-based) scales
    a_s by alpha^(2 mu_s(k)) and yields (alpha, W); a dashed move at (k, l)
    scales a_s by tau^(mu_s(k)+mu_s(l)) and yields (tau, delta) where
    W = (b_l/b_k)^eps * delta^2 for eps in {0, 1}.
    """
    from .chain import DashedMove, FullMove, apply_move  # local: avoid cycle

    v = validate_b_tuple(v)
    field = v[0].field
    if m < 1 or (field.p - 1) % (1 << (m + 1)) != 0:
        raise ValueError("step symbols need 2^(m+1) | p-1 with m >= 1")
    if apply_move(v, move) != tuple(w):
        raise InvalidEdge("w is not the image of v under the move")
    a = psi(v)
    n = len(a) // 2
    if isinstance(move, FullMove):
        k = move.i + 1
        exps = [(_slot_multiplicity(2 * i + 1, k), _slot_multiplicity(2 * i + 2, k))
                for i in range(n)]
        return SymbolExpr(move.c, _exponent_product(a, exps), m - 1)
    k, l = move.i + 1, move.j + 1
    exps = [(_slot_multiplicity(2 * i + 1, k) + _slot_multiplicity(2 * i + 1, l),
             _slot_multiplicity(2 * i + 2, k) + _slot_multiplicity(2 * i + 2, l))
            for i in range(n)]
    big = _exponent_product(a, exps)
    rho = v[move.j] / v[move.i]
    tau = field.one() + rho
    if big.is_square():
        delta = big.sqrt()
    else:
        reduced = big / rho
        try:
            delta = reduced.sqrt()
        except NotASquare:
            raise InvalidEdge(
                "square extraction failed; dashed-case analysis defect") from None
    return SymbolExpr(tau, delta, m - 1)


def embed_at(cls: BrauerClass, m: int) -> BrauerClass:
    """Rewrite an invariant at denominator 2^m (m >= its degree)."""
    if m < cls.deg_log2:
        raise ValueError("cannot shrink the denominator")
    return BrauerClass(cls.num << (m - cls.deg_log2), m)


# ---------------------------------------------------------------------------
# Pfister 12-tuple and its one-symbol class
# ---------------------------------------------------------------------------


def pfister_tuple(a, b, c, d, e, f) -> tuple:
    """<a,b,ab,c,d,cd> x <e,f> flattened to the 12 slots
    (ae,be,bf,abe,abf,ce,cf,de,df,cde,cdf,af); total product is a square."""
    for x in (a, b, c, d, e, f):
        if x.is_zero:
            raise ValueError("presentation entries must be nonzero")
    ab, cd = a * b, c * d
    out = (a * e, b * e, b * f, ab * e, ab * f, c * e, c * f,
           d * e, d * f, cd * e, cd * f, a * f)
    return validate_b_tuple(out)


def pflem_symbol(a, b, c, d, e, f, m: int) -> SymbolExpr:
    """(a^6 b^8 c^3 d^2 e^10 f^5, f/e) of degree 2^(m-1): one symbol carrying
    the whole class of the pfister_tuple's pair decomposition."""
    def power(x, k):
        acc = x
        for _ in range(k - 1):
            acc = acc * x
        return acc

    first = (power(a, 6) * power(b, 8) * power(c, 3) * power(d, 2)
             * power(e, 10) * power(f, 5))
    return SymbolExpr(first, f / e, m - 1)


# ---------------------------------------------------------------------------
# Quadratic extension elements and the 14-dimensional construction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadExtElement:
    """x + y*sqrt(d) in F[sqrt(d)] for a fixed non-square d."""

    x: Element
    y: Element
    d: Element

    def __post_init__(self):
        if self.d.is_square():
            raise ValueError("d must be a non-square")

    def __mul__(self, other: "QuadExtElement") -> "QuadExtElement":
        return QuadExtElement(self.x * other.x + self.d * self.y * other.y,
                              self.x * other.y + self.y * other.x, self.d)

    def trace(self) -> Element:
        return self.x + self.x

    def norm(self) -> Element:
        return self.x.square() - self.d * self.y.square()


def quadext(u: QuadExtElement, op: str) -> Element:
    if op == "trace":
        return u.trace()
    if op == "norm":
        return u.norm()
    raise ValueError(f"unknown op {op!r}")


def rost14_tuple(u: QuadExtElement, v: QuadExtElement, w: QuadExtElement) -> tuple:
    """The 14-slot trace/norm tuple
    (T(u), N(u)/T(u), T(v), N(v)/T(v), T(uv), 1/(T(uv)N(uv)),
     T(w), T(w)N(w), T(uw), T(uw)N(uw), T(vw), T(vw)N(vw), T(uvw), T(uvw)N(uvw)).

    The first six slots multiply to N(u)N(v)/N(uv) = 1 and the total product
    is the square N(u)^2 N(v)^2 N(w)^4.  Any vanishing trace is rejected so
    the caller can redraw its inputs.
    """
    if not (u.d == v.d == w.d):
        raise ValueError("extension elements must share d")
    uv, uw, vw = u * v, u * w, v * w
    uvw = uv * w
    slots = []
    for z, shape in ((u, "inv"), (v, "inv"), (uv, "invinv"),
                     (w, "mul"), (uw, "mul"), (vw, "mul"), (uvw, "mul")):
        t, nrm = z.trace(), z.norm()
        if t.is_zero:
            raise DegenerateTrace("a trace in the 14-slot construction vanished")
        if shape == "inv":
            slots += [t, nrm / t]
        elif shape == "invinv":
            slots += [t, (t * nrm).inv()]
        else:
            slots += [t, t * nrm]
    return validate_b_tuple(slots)
