"""Moves on vertices of F^{x n}, swap gadgets, and certified chain search.

Vertices are tuples of nonzero field elements.  Two move types exist:

* full:   one slot is multiplied by a square c^2;
* dashed: slots i < j are both multiplied by (1 + a_j/a_i), valid only when
  a_i + a_j is nonzero.

Both preserve the isometry class of the underlying diagonal form, so a chain
is a certificate that its endpoints carry isometric forms.  ``connect``
builds such a certificate constructively with certified step bounds:
at most n(n+1)/2 + 3(n-1) full and n(n-1)/2 + 2(n-1) dashed moves,
n^2 + 5n - 5 steps in total.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass

from . import qform
from .errors import (ChainNotFound, InvalidDashed, NotIsometric,
                     NotRepresented, PrecisionExhausted)
from .fields import Element, Fp, FpElement, Qp


@dataclass(frozen=True)
class FullMove:
    """Multiply slot i by c^2."""

    i: int
    c: Element

    def __post_init__(self):
        if self.c.is_zero:
            raise ValueError("full move scalar must be nonzero")

    def to_json(self) -> dict:
        return {"t": "full", "i": self.i, "c": self.c.to_json()}


@dataclass(frozen=True)
class DashedMove:
    """Scale slots i < j by (1 + a_j/a_i)."""

    i: int
    j: int

    def __post_init__(self):
        if not 0 <= self.i < self.j:
            raise ValueError("dashed move needs indices i < j")

    def to_json(self) -> dict:
        return {"t": "dashed", "i": self.i, "j": self.j}


Move = FullMove | DashedMove


@dataclass(frozen=True)
class Chain:
    """A start vertex plus a replayable move list with certified counts."""

    start: tuple
    moves: tuple
    full_count: int
    dashed_count: int
    precision_used: int = 0

    def __post_init__(self):
        fulls = sum(1 for m in self.moves if isinstance(m, FullMove))
        if fulls != self.full_count or len(self.moves) - fulls != self.dashed_count:
            raise ValueError("counts do not match the move list")

    def __len__(self) -> int:
        return len(self.moves)

    @classmethod
    def build(cls, start, moves, precision_used: int = 0) -> "Chain":
        moves = tuple(moves)
        fulls = sum(1 for m in moves if isinstance(m, FullMove))
        return cls(tuple(start), moves, fulls, len(moves) - fulls, precision_used)

    def to_json(self) -> dict:
        return {
            "start": [x.to_json() for x in self.start],
            "moves": [m.to_json() for m in self.moves],
            "counts": {"full": self.full_count, "dashed": self.dashed_count},
            "precision_used": self.precision_used,
        }


def validate_vertex(slots) -> tuple:
    slots = tuple(slots)
    if not slots:
        raise ValueError("empty vertex")
    for x in slots:
        if x.is_zero:
            raise ValueError("vertex entries must be nonzero")
    return slots


def apply_move(vertex, move: Move):
    """One graph step; raises InvalidDashed when a_i + a_j = 0."""
    out = list(vertex)
    if isinstance(move, FullMove):
        out[move.i] = move.c.square() * out[move.i]
        return tuple(out)
    ai, aj = out[move.i], out[move.j]
    s = ai + aj  # PrecisionExhausted propagates: cannot rule out a_i+a_j = 0
    if s.is_zero:
        raise InvalidDashed(f"slots {move.i},{move.j} sum to zero")
    out[move.i] = s
    out[move.j] = aj * s / ai
    return tuple(out)


def replay(chain: Chain, check_isometry: bool = False):
    """Replay a chain from its start; optionally check invariants per step."""
    cur = validate_vertex(chain.start)
    inv0 = qform.invariants(cur) if check_isometry else None
    for mv in chain.moves:
        cur = apply_move(cur, mv)
        if check_isometry and qform.invariants(cur) != inv0:
            raise NotIsometric("move broke the isometry class")
    return cur


# ---------------------------------------------------------------------------
# Swap gadget
# ---------------------------------------------------------------------------


def _swap_moves(a: Element, b: Element, i: int, j: int) -> list:
    """Moves exchanging slots i < j holding values (a, b).

    Square ratio: two full steps.  Otherwise the 5-step gadget
    dashed/full/dashed/full/full; its first dashed move needs a + b != 0,
    which can only fail when -1 is a non-square (ratio -1 would otherwise be
    square), and that case is routed through a parameter search for an
    equally short full/dashed/full/dashed/full pattern.
    """
    if a == b:
        return []
    ratio = a / b
    if ratio.is_square():
        x = ratio.sqrt()
        return [FullMove(i, x.inv()), FullMove(j, x)]
    s = a + b  # PrecisionExhausted propagates (deep cancellation)
    if not s.is_zero:
        c = b / s
        return [DashedMove(i, j), FullMove(j, a / b), DashedMove(i, j),
                FullMove(j, c), FullMove(i, c)]
    return _swap_negated_moves(a, b, i, j)


def _swap_negated_moves(a: Element, b: Element, i: int, j: int) -> list:
    """5-step swap of (a, b) with b = -a*w, w a square (so -1 is not).

    Pattern full(j,u) dashed full(i,s) dashed full(j) works whenever squares
    u, s satisfy (1 - wu)(s - wu) = -w; scanning u over the square classes
    finds a solution for every odd p > 3.  With U = wu the second dashed
    move leaves slot i at exactly b, and slot j at a*w*U/s, fixed by the
    final full move with scalar sqrt(s/(w^2 u)).
    """
    field = a.field
    w = -(b / a)
    g2 = field.el(field.g) if isinstance(field, Fp) else field.el(field.g)
    g2 = g2.square()
    u = field.one()
    one = field.one()
    for _ in range((field.p - 1) // 2 - 1):
        u = u * g2
        wu = w * u
        try:
            den = wu - one
            if den.is_zero:
                continue
            s = wu + w / den
        except PrecisionExhausted:
            continue
        if s.is_zero or not s.is_square():
            continue
        u_sqrt = u.sqrt()
        s_sqrt = s.sqrt()
        fix = s_sqrt / (w * u_sqrt)
        return [FullMove(j, u_sqrt), DashedMove(i, j), FullMove(i, s_sqrt),
                DashedMove(i, j), FullMove(j, fix)]
    raise InvalidDashed(
        f"no 5-step swap exists for a negated pair over F_{field.p}")


def swap_chain(v, i: int, j: int) -> Chain:
    """Chain exchanging slots i and j: at most 5 steps, 3 full, 2 dashed."""
    v = validate_vertex(v)
    if i == j:
        return Chain.build(v, [])
    if i > j:
        i, j = j, i
    return Chain.build(v, _swap_moves(v[i], v[j], i, j))


def permutation_chain(v, sigma) -> Chain:
    """Chain from v to (v[sigma[0]], ..., v[sigma[n-1]]).

    Realized as at most n-1 swap gadgets: at most 5(n-1) steps of which
    3(n-1) full and 2(n-1) dashed.
    """
    v = validate_vertex(v)
    n = len(v)
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(n)):
        raise ValueError("sigma is not a permutation")
    moves: list = []
    cur = list(v)
    location = list(range(n))  # current position of each original slot
    orig_at = list(range(n))   # original slot index held at each position
    for t in range(n):
        src = location[sigma[t]]
        if src == t:
            continue
        for mv in _swap_moves(cur[t], cur[src], t, src):
            moves.append(mv)
            cur = list(apply_move(cur, mv))
        a, b = orig_at[t], orig_at[src]
        orig_at[t], orig_at[src] = b, a
        location[a], location[b] = src, t
    return Chain.build(v, moves)


# ---------------------------------------------------------------------------
# Theorem-grade chain construction
# ---------------------------------------------------------------------------


def subsequence_extract(terms) -> list[int]:
    """Indices of a subsequence with the same nonzero total and no vanishing
    prefix sum.

    Left-to-right: zero terms are skipped; whenever the running sum hits
    zero the whole partial sum collected so far is erased.  The total being
    nonzero guarantees a nonempty result.
    """
    kept: list[int] = []
    acc = None
    for idx, t in enumerate(terms):
        if t.is_zero:
            continue
        kept.append(idx)
        acc = t if acc is None else acc + t
        if acc.is_zero:
            kept.clear()
            acc = None
    if acc is None or acc.is_zero:
        raise ValueError("total sum of terms must be nonzero")
    assert kept, "nonzero total cannot leave an empty selection"
    return kept


def chainq_bounds(n: int) -> tuple[int, int]:
    """(max full, max dashed) for connecting two isometric n-vertices."""
    return (n + 1) * n // 2 + 3 * (n - 1), n * (n - 1) // 2 + 2 * (n - 1)


def chainq2_bounds(n: int, k: int) -> tuple[int, int]:
    """(max full, max dashed) for fixing the first k of n slots."""
    return k * (2 * n - k + 1) // 2 + 3 * k, k * (2 * n - k - 1) // 2 + 2 * k


def _fill_target(cur: list, free: list[int], target: Element, rng) -> tuple[list, int]:
    """Make some free slot equal to ``target``; returns (moves, locked position).

    represent() on the free sub-form, then the extract/scale/merge pattern:
    one full move per kept coordinate and one dashed merge per extra kept
    coordinate, accumulating the representation into the lowest kept slot.
    """
    sub = [cur[i] for i in free]
    xs = qform.represent(sub, target, rng)
    terms = [a * x.square() if not x.is_zero else a.field.zero()
             for a, x in zip(sub, xs)]
    kept_local = subsequence_extract(terms)
    kept = [free[k] for k in kept_local]
    moves: list = []
    for k_local, pos in zip(kept_local, kept):
        x = xs[k_local]
        if not x.is_one:
            mv = FullMove(pos, x)
            moves.append(mv)
            cur[pos] = x.square() * cur[pos]
    head = kept[0]
    for pos in kept[1:]:
        mv = DashedMove(head, pos)
        moves.append(mv)
        s = cur[head] + cur[pos]
        if s.is_zero:
            raise InvalidDashed("vanishing prefix slipped through extraction")
        cur[pos] = cur[pos] * s / cur[head]
        cur[head] = s
    return moves, head


def _order_targets(cur: list, moves: list, placed: dict[int, int], upto: int):
    """Swap each placed target value into its final position 0..upto-1.

    At step t every target < t already sits at its position, so the source
    position is never below t and each target costs at most one swap gadget.
    """
    pos_of_target = dict(placed)
    target_at = {pos: t for t, pos in placed.items()}
    for t in range(upto):
        src = pos_of_target[t]
        if src == t:
            continue
        for mv in _swap_moves(cur[t], cur[src], t, src):
            moves.append(mv)
            new = apply_move(cur, mv)
            cur[:] = new
        other = target_at.pop(t, None)
        pos_of_target[t] = t
        target_at[t] = t
        if other is not None and other != t:
            pos_of_target[other] = src
            target_at[src] = other
        else:
            target_at.pop(src, None)


def connect(v, w, rng: random.Random | None = None) -> Chain:
    """Chain from v to w for isometric underlying forms, exact endpoint.

    Targets are filled from the last slot of w downward; each fill locks one
    position, and a final permutation phase (at most n-1 swap gadgets) puts
    the locked values into w's order.  Certified bounds: chainq_bounds(n).
    """
    v = validate_vertex(v)
    w = validate_vertex(w)
    if len(v) != len(w):
        raise NotIsometric("dimension mismatch")
    if not qform.is_isometric(v, w):
        raise NotIsometric("endpoints carry non-isometric forms")
    rng = rng or random.Random(0)
    n = len(v)
    moves: list = []
    cur = list(v)
    free = list(range(n))
    placed: dict[int, int] = {}
    for t in range(n - 1, -1, -1):
        try:
            fill_moves, pos = _fill_target(cur, free, w[t], rng)
        except NotRepresented as exc:
            raise NotRepresented(f"target slot {t}: {exc}") from exc
        moves.extend(fill_moves)
        placed[t] = pos
        free.remove(pos)
    _order_targets(cur, moves, placed, n)
    chain = Chain.build(v, moves, getattr(v[0].field, "precision", 0))
    max_full, max_dashed = chainq_bounds(n)
    assert chain.full_count <= max_full and chain.dashed_count <= max_dashed
    assert all(got == want for got, want in zip(cur, w))
    return chain


def connect_partial(v, targets, rng: random.Random | None = None):
    """Chain on v making its first k slots equal to ``targets``.

    Returns (chain, completed vertex).  Fills targets in order, then at most
    k swaps move them into positions 0..k-1; bounds chainq2_bounds(n, k).
    """
    v = validate_vertex(v)
    targets = tuple(targets)
    k = len(targets)
    n = len(v)
    if k == 0:
        return Chain.build(v, []), v
    if k >= n:
        raise ValueError("k must be smaller than the vertex length")
    rng = rng or random.Random(0)
    moves: list = []
    cur = list(v)
    free = list(range(n))
    placed: dict[int, int] = {}
    for t, b in enumerate(targets):
        fill_moves, pos = _fill_target(cur, free, b, rng)
        moves.extend(fill_moves)
        placed[t] = pos
        free.remove(pos)
    _order_targets(cur, moves, placed, k)
    chain = Chain.build(v, moves, getattr(v[0].field, "precision", 0))
    max_full, max_dashed = chainq2_bounds(n, k)
    assert chain.full_count <= max_full and chain.dashed_count <= max_dashed
    final = tuple(cur)
    assert all(got == want for got, want in zip(final[:k], targets))
    return chain, final


# ---------------------------------------------------------------------------
# BFS oracle on tiny instances
# ---------------------------------------------------------------------------


def bfs_min_chain(v, w, max_depth: int = 5) -> Chain:
    """Shortest chain between small F_p vertices by exhaustive search.

    Restricted to p <= 13, n <= 3, depth <= 6 where the graph is small
    enough to enumerate; used as an oracle for the swap-gadget bound.
    """
    v = validate_vertex(v)
    w = validate_vertex(w)
    field = v[0].field
    if not isinstance(field, Fp) or field.p > 13 or len(v) > 3 or max_depth > 6:
        raise ValueError("BFS oracle is restricted to tiny F_p instances")
    p = field.p
    n = len(v)
    squares = sorted({x * x % p for x in range(1, p)} - {1})
    start = tuple(x.r for x in v)
    goal = tuple(x.r for x in w)
    if start == goal:
        return Chain.build(v, [])
    parent: dict[tuple, tuple] = {start: None}
    depth = {start: 0}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if depth[cur] >= max_depth:
            continue
        neighbors = []
        for i in range(n):
            for s in squares:
                nxt = cur[:i] + (cur[i] * s % p,) + cur[i + 1:]
                neighbors.append((nxt, ("f", i, s)))
        for i in range(n):
            for j in range(i + 1, n):
                if (cur[i] + cur[j]) % p == 0:
                    continue
                t = (cur[i] + cur[j]) * pow(cur[i], -1, p) % p
                nxt = list(cur)
                nxt[i] = cur[i] * t % p
                nxt[j] = cur[j] * t % p
                neighbors.append((tuple(nxt), ("d", i, j)))
        for nxt, mv in neighbors:
            if nxt in parent:
                continue
            parent[nxt] = (cur, mv)
            depth[nxt] = depth[cur] + 1
            if nxt == goal:
                steps = []
                node = nxt
                while parent[node] is not None:
                    prev, mv = parent[node]
                    steps.append(mv)
                    node = prev
                moves = []
                for kind, i, x in reversed(steps):
                    if kind == "f":
                        from ._numtheory import sqrt_mod_p
                        moves.append(FullMove(i, field.el(sqrt_mod_p(x, p))))
                    else:
                        moves.append(DashedMove(i, x))
                return Chain.build(v, moves)
            queue.append(nxt)
    raise ChainNotFound(f"no chain within depth {max_depth}")


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------


def random_vertex(field, n: int, rng: random.Random) -> tuple:
    return tuple(field.random_element(rng) for _ in range(n))


def random_isometric_pair(field, n: int, rng: random.Random) -> tuple:
    """(v, w) with isometric underlying forms, sampled independently.

    w's last slot is forced into the square class matching v's discriminant;
    over Q_p the Hasse invariant is then matched by rejection.
    """
    v = random_vertex(field, n, rng)
    inv_v = qform.invariants(v)
    while True:
        w = list(random_vertex(field, n, rng))
        ratio = v[0]
        for x in v[1:]:
            ratio = ratio * x
        for x in w[:-1]:
            ratio = ratio / x
        w[-1] = ratio * field.random_element(rng).square()
        w = tuple(w)
        if qform.invariants(w) == inv_v:
            return v, w


def random_valid_move(vertex, rng: random.Random) -> Move:
    n = len(vertex)
    field = vertex[0].field
    for _ in range(64):
        if rng.random() < 0.5 or n < 2:
            return FullMove(rng.randrange(n), field.random_element(rng))
        i = rng.randrange(n - 1)
        j = rng.randrange(i + 1, n)
        try:
            s = vertex[i] + vertex[j]
        except PrecisionExhausted:
            continue
        if not s.is_zero:
            return DashedMove(i, j)
    return FullMove(rng.randrange(n), field.random_element(rng))


def scramble(vertex, steps: int, rng: random.Random) -> tuple:
    """Apply ``steps`` random valid moves; returns the scrambled vertex."""
    cur = validate_vertex(vertex)
    for _ in range(steps):
        cur = apply_move(cur, random_valid_move(cur, rng))
    return cur
