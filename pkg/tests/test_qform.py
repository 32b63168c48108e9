import random

import pytest

from chainlen import chain, qform
from chainlen.errors import NotRepresented
from chainlen.fields import Fp, Qp


def legendre(a, p):
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def hilbert17_oracle(x, y):
    """Classical tame Hilbert symbol over Q_17 via the Legendre formula:
    (p^a u, p^b w) = (-1/p)^(ab) (u/p)^b (w/p)^a for units u, w."""
    p = 17
    a, u = x.v, x.residue()
    b, w = y.v, y.residue()
    return (legendre(-1, p) ** (a * b)) * (legendre(u, p) ** b) * (legendre(w, p) ** a)


def eval_form(slots, xs):
    total = None
    for a, x in zip(slots, xs):
        if x.is_zero:
            continue
        term = a * x.square()
        total = term if total is None else total + term
    return total


class TestInvariants:
    def test_all_ones(self, f17, q17):
        for field in (f17, q17):
            inv = qform.invariants([field.el(1)] * 5)
            assert inv.dim == 5 and inv.disc.is_trivial and inv.hasse == 1

    def test_hasse_17_3(self, q17):
        form = [q17.el(17), q17.el(3)]
        assert qform.invariants(form).hasse == -1
        assert hilbert17_oracle(*form) == -1

    def test_hasse_matches_oracle_pairwise(self, q17, rng):
        for _ in range(200):
            slots = [q17.random_element(rng) for _ in range(4)]
            want = 1
            for i in range(4):
                for j in range(i + 1, 4):
                    want *= hilbert17_oracle(slots[i], slots[j])
            assert qform.invariants(slots).hasse == want

    def test_square_scaling_invariant(self, f17, q17, rng):
        for field in (f17, q17):
            for _ in range(100):
                slots = [field.random_element(rng) for _ in range(4)]
                inv0 = qform.invariants(slots)
                c = field.random_element(rng)
                i = rng.randrange(4)
                slots[i] = c.square() * slots[i]
                assert qform.invariants(slots) == inv0

    def test_invariants_constant_along_moves(self, f17, q17, rng):
        for field in (f17, q17):
            for _ in range(500):
                n = 2 + rng.randrange(5)
                v = chain.random_vertex(field, n, rng)
                inv0 = qform.invariants(v)
                w = chain.apply_move(v, chain.random_valid_move(v, rng))
                assert qform.invariants(w) == inv0

    def test_rejects_zero_slots(self, f17):
        with pytest.raises(ValueError):
            qform.invariants([f17.el(0), f17.el(1)])


class TestIsometry:
    def test_reflexive(self, q17, rng):
        f = [q17.random_element(rng) for _ in range(3)]
        assert qform.is_isometric(f, f)

    def test_f17_disc_separates(self, f17):
        assert not qform.is_isometric([f17.el(1), f17.el(1)],
                                      [f17.el(1), f17.el(3)])

    def test_one_move_neighbors_isometric(self, f17, q17, rng):
        for field in (f17, q17):
            for _ in range(50):
                v = chain.random_vertex(field, 4, rng)
                w = chain.apply_move(v, chain.random_valid_move(v, rng))
                assert qform.is_isometric(v, w)

    def test_equivalence_on_matched_triples(self, f17, rng):
        for _ in range(100):
            v, w = chain.random_isometric_pair(f17, 5, rng)
            u = chain.random_vertex(f17, 5, rng)
            assert qform.is_isometric(v, w) and qform.is_isometric(w, v)
            if qform.is_isometric(w, u):
                assert qform.is_isometric(v, u)


class TestRepresent:
    def test_slot_hit(self, f17):
        slots = [f17.el(7), f17.el(2), f17.el(5)]
        xs = qform.represent(slots, f17.el(7))
        assert xs[0].is_one and xs[1].is_zero and xs[2].is_zero

    def test_f17_binary_vs_scan_oracle(self, f17, rng):
        # x^2 + y^2 = 3 over F_17: confirm a solution exists by full scan
        scan = [(x, y) for x in range(17) for y in range(17)
                if (x * x + y * y) % 17 == 3]
        assert scan
        xs = qform.represent([f17.el(1), f17.el(1)], f17.el(3), rng)
        assert eval_form([f17.el(1), f17.el(1)], xs) == f17.el(3)

    def test_fp_plug_back(self, f17, rng):
        for _ in range(300):
            n = 1 + rng.randrange(5)
            slots = [f17.random_element(rng) for _ in range(n)]
            b = f17.random_element(rng)
            try:
                xs = qform.represent(slots, b, rng)
            except NotRepresented:
                assert n == 1
                continue
            assert eval_form(slots, xs) == b
            assert not all(x.is_zero for x in xs)

    def test_qp_universal_dim4(self, q17, rng):
        for _ in range(200):
            slots = [q17.random_element(rng) for _ in range(4)]
            b = q17.random_element(rng)
            xs = qform.represent(slots, b, rng)
            assert eval_form(slots, xs) == b

    def test_qp_extreme_valuations(self, rng):
        qp = Qp(17, 12)
        for _ in range(100):
            n = 4 + rng.randrange(3)
            slots = [qp.el(17 ** rng.randrange(0, 5)) * qp.random_element(rng)
                     for _ in range(n)]
            b = qp.el(17 ** rng.randrange(0, 4)) * qp.random_element(rng)
            xs = qform.represent(slots, b, rng)
            assert eval_form(slots, xs) == b

    def test_qp_binary_honest_rejection(self, q17, rng):
        # <1, 17> does not represent targets with (17, t) = -1
        slots = [q17.el(1), q17.el(17)]
        hits = misses = 0
        for _ in range(100):
            b = q17.random_element(rng)
            try:
                xs = qform.represent(slots, b, rng)
                assert eval_form(slots, xs) == b
                hits += 1
            except NotRepresented:
                misses += 1
        assert hits and misses

    def test_rejects_zero_target(self, f17):
        with pytest.raises(ValueError):
            qform.represent([f17.el(1)], f17.el(0))


class TestIdealMembership:
    def test_ones_in_I2(self, f17, q17):
        for field in (f17, q17):
            assert qform.in_I2([field.el(1), field.el(1)])
            assert not qform.in_I2([field.el(1)])

    def test_f17_1_3_not_in_I2(self, f17):
        assert not qform.in_I2([f17.el(1), f17.el(3)])

    def test_phi_images_in_I2(self, f17, q17, rng):
        from chainlen import brauer
        for field in (f17, q17):
            for _ in range(100):
                n = 1 + rng.randrange(4)
                v = tuple(field.random_element(rng) for _ in range(2 * n))
                assert qform.in_I2(brauer.phi(v))

    def test_in_I3_requires_trivial_hasse(self, q17):
        assert qform.in_I3([q17.el(1)] * 4)
        f = [q17.el(17), q17.el(3), q17.el(51), q17.el(1)]
        if qform.in_I2(f):
            assert qform.in_I3(f) == (qform.invariants(f).hasse == 1)


def test_diagonal_form_type(f17):
    form = qform.DiagonalForm((f17.el(1), f17.el(2)))
    assert form.dim == 2
    with pytest.raises(ValueError):
        qform.DiagonalForm((f17.el(0),))
