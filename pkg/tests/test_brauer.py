import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainlen import brauer, chain, qform
from chainlen.brauer import BrauerClass, QuadExtElement, SymbolExpr
from chainlen.errors import DegenerateTrace, InvalidEdge
from chainlen.fields import Fp, Qp


def legendre(a, p):
    return 1 if pow(a % p, (p - 1) // 2, p) == 1 else -1


def random_b_tuple(field, n, rng):
    b = [field.random_element(rng) for _ in range(2 * n + 1)]
    prod = b[0]
    for x in b[1:]:
        prod = prod * x
    b.append(prod.inv() * field.random_element(rng).square())
    return tuple(b)


class TestBrauerClass:
    def test_normalization(self):
        assert BrauerClass(2, 2) == BrauerClass(1, 1)
        assert BrauerClass(4, 3) == BrauerClass(1, 1)
        assert BrauerClass(0, 3) == BrauerClass(0, 0)
        assert BrauerClass(1, 2) != BrauerClass(1, 1)

    def test_group_law(self):
        a = BrauerClass(3, 3)
        assert a + (-a) == BrauerClass(0, 3)
        assert a.scale(8).is_zero
        assert (a + a) == a.scale(2)

    def test_json(self):
        a = BrauerClass(5, 3)
        assert BrauerClass.from_json(a.to_json()) == a


class TestTameSymbol:
    def test_units_are_trivial(self, q17, rng):
        for _ in range(100):
            a = q17.random_element(rng, kind="unit")
            b = q17.random_element(rng, kind="unit")
            assert brauer.tame_symbol(a, b, 3).is_zero

    def test_17_3_is_nontrivial(self, q17):
        assert brauer.tame_symbol(q17.el(17), q17.el(3), 1) == BrauerClass(1, 1)
        assert pow(3, 8, 17) == 16  # Euler: 3 is a non-residue mod 17

    def test_17_17_is_trivial(self, q17):
        # reduces to the class of -1, a residue mod 17
        assert brauer.tame_symbol(q17.el(17), q17.el(17), 1).is_zero
        assert legendre(-1, 17) == 1

    def test_classical_oracle_degree2(self, q17, rng):
        """(p^a u, p^b w)_2 = (-1/p)^(ab) (u/p)^b (w/p)^a, independently."""
        for _ in range(300):
            x, y = q17.random_element(rng), q17.random_element(rng)
            want = (legendre(-1, 17) ** (x.v * y.v)
                    * legendre(x.residue(), 17) ** y.v
                    * legendre(y.residue(), 17) ** x.v)
            got = brauer.tame_symbol(x, y, 1)
            assert (want == 1) == got.is_zero

    def test_bilinear(self, q17, rng):
        for k in (1, 2, 3):
            for _ in range(100):
                a, a2, b = (q17.random_element(rng) for _ in range(3))
                assert (brauer.tame_symbol(a * a2, b, k)
                        == brauer.tame_symbol(a, b, k) + brauer.tame_symbol(a2, b, k))

    def test_antisymmetric(self, q17, rng):
        for _ in range(100):
            a, b = q17.random_element(rng), q17.random_element(rng)
            assert brauer.tame_symbol(a, b, 3) == -brauer.tame_symbol(b, a, 3)

    def test_steinberg(self, q17, rng):
        from chainlen.errors import PrecisionExhausted
        for _ in range(200):
            a = q17.random_element(rng)
            assert brauer.tame_symbol(a, -a, 3).is_zero
            try:
                one_minus = q17.one() - a
            except PrecisionExhausted:
                continue
            assert brauer.tame_symbol(a, one_minus, 3).is_zero

    def test_fp_identically_zero(self, f17, rng):
        for _ in range(50):
            a, b = f17.random_element(rng), f17.random_element(rng)
            assert brauer.tame_symbol(a, b, 3).is_zero


class TestPairMaps:
    def test_phi_n1(self, q17, rng):
        a1, a2 = q17.random_element(rng), q17.random_element(rng)
        b = brauer.phi((a1, a2))
        assert b[0].is_one and b[1] == a1 and b[2] == a2 and b[3] == a1 * a2

    def test_phi_of_ones(self, f17):
        ones = tuple(f17.el(1) for _ in range(6))
        assert all(x.is_one for x in brauer.phi(ones))

    def test_phi_lands_in_B(self, f17, q17, rng):
        for field in (f17, q17):
            for _ in range(300):
                n = 1 + rng.randrange(5)
                v = tuple(field.random_element(rng) for _ in range(2 * n))
                brauer.validate_b_tuple(brauer.phi(v))  # checks square product

    def test_psi_with_leading_one(self, q17, rng):
        b2, b3, b4 = (q17.random_element(rng) for _ in range(3))
        a = brauer.psi((q17.one(), b2, b3, b4))
        assert a == (b2, b3)

    def test_psi_of_ones(self, q17):
        ones = tuple(q17.el(1) for _ in range(8))
        assert all(x.is_one for x in brauer.psi(ones))

    def test_round_trip_bulk(self, f17, q17, rng):
        for field in (f17, q17):
            for _ in range(500):
                n = 1 + rng.randrange(7)
                v = tuple(field.random_element(rng) for _ in range(2 * n))
                assert brauer.psi(brauer.phi(v)) == v


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 16), min_size=2, max_size=10).filter(lambda l: len(l) % 2 == 0))
def test_psi_phi_identity_hypothesis(residues):
    f17 = Fp(17)
    v = tuple(f17.el(r) for r in residues)
    assert brauer.psi(brauer.phi(v)) == v


class TestCmAndClifford:
    def test_one_slot_pairs_contribute_nothing(self, q17, rng):
        for _ in range(50):
            b = q17.random_element(rng)
            assert brauer.cm_class((q17.one(), b), 3).is_zero

    def test_scaling_law(self, q17, rng):
        """inv_{m-k}(C_{m-k}(w)) = 2^k * inv_m(C_m(w)) in Q/Z for k < m."""
        for _ in range(200):
            n = 1 + rng.randrange(3)
            w = tuple(q17.random_element(rng) for _ in range(2 * n))
            for m in (2, 3):
                for k in range(1, m):
                    assert (brauer.cm_class(w, m - k)
                            == brauer.cm_class(w, m).scale(1 << k))

    def test_clifford_equals_cm1_of_psi(self, q17, rng):
        for _ in range(300):
            b = random_b_tuple(q17, 1 + rng.randrange(4), rng)
            assert brauer.clifford_class(b) == brauer.cm_class(brauer.psi(b), 1)

    def test_clifford_matches_hasse_oracle(self, q17, rng):
        """Independent oracle: with -1 a square the Clifford class of an
        even form with square discriminant is its Hasse invariant."""
        for _ in range(300):
            b = random_b_tuple(q17, 1 + rng.randrange(4), rng)
            hasse = qform.invariants(b).hasse
            assert brauer.clifford_class(b).is_zero == (hasse == 1)

    def test_all_ones_trivial(self, q17):
        assert brauer.clifford_class(tuple(q17.el(1) for _ in range(8))).is_zero

    def test_hyperbolic_split(self, q17, rng):
        # <x, -x, y, -y>: hyperbolic, so the Clifford algebra splits
        x, y = q17.random_element(rng), q17.random_element(rng)
        b = (x, -x, y, -y)
        assert brauer.clifford_class(b).is_zero


class TestStepSymbol:
    CASES = ("full-k1", "full-k2+", "dashed-oo", "dashed-oe", "dashed-eo",
             "dashed-ee", "dashed-last")

    def _move_for_case(self, case, n, field, rng):
        if case == "full-k1":
            return chain.FullMove(0, field.random_element(rng))
        if case == "full-k2+":
            return chain.FullMove(rng.randrange(1, 2 * n + 2),
                                  field.random_element(rng))
        if case == "dashed-last":
            return chain.DashedMove(rng.randrange(0, 2 * n + 1), 2 * n + 1)
        parity = {"dashed-oo": (0, 0), "dashed-oe": (0, 1),
                  "dashed-eo": (1, 0), "dashed-ee": (1, 1)}[case]
        while True:
            i = rng.randrange(0, 2 * n + 1)
            j = rng.randrange(0, 2 * n + 1)
            if i < j and (i % 2, j % 2) == parity:
                return chain.DashedMove(i, j)

    @pytest.mark.parametrize("case", CASES)
    def test_class_difference_oracle(self, case, q17, rng):
        m = 3
        for _ in range(60):
            n = 2 + rng.randrange(3)
            v = random_b_tuple(q17, n, rng)
            mv = self._move_for_case(case, n, q17, rng)
            w = chain.apply_move(v, mv)
            sym = brauer.step_symbol(v, w, mv, m)
            assert sym.deg_log2 == m - 1
            want = (brauer.cm_class(brauer.psi(w), m)
                    - brauer.cm_class(brauer.psi(v), m))
            assert brauer.embed_at(sym.invariant(), m) == want

    def test_full_k1_second_slot_is_alternating_product(self, q17, rng):
        n = 3
        v = random_b_tuple(q17, n, rng)
        a = brauer.psi(v)
        c = q17.random_element(rng)
        mv = chain.FullMove(0, c)
        w = chain.apply_move(v, mv)
        sym = brauer.step_symbol(v, w, mv, 2)
        expect = a[1] / a[0] * a[3] / a[2] * a[5] / a[4]
        assert sym.a == c and sym.b == expect

    def test_full_at_last_slot_is_split(self, q17, rng):
        # b_2n+2 appears in no psi entry: the symbol carries no class
        n = 2
        v = random_b_tuple(q17, n, rng)
        mv = chain.FullMove(2 * n + 1, q17.random_element(rng))
        w = chain.apply_move(v, mv)
        sym = brauer.step_symbol(v, w, mv, 3)
        assert sym.invariant().is_zero

    def test_wrong_edge_rejected(self, q17, rng):
        v = random_b_tuple(q17, 2, rng)
        mv = chain.FullMove(0, q17.random_element(rng))
        with pytest.raises(InvalidEdge):
            brauer.step_symbol(v, v, mv, 3)

    def test_inverse_negates(self, q17, rng):
        v = random_b_tuple(q17, 2, rng)
        mv = self._move_for_case("dashed-oo", 2, q17, rng)
        w = chain.apply_move(v, mv)
        sym = brauer.step_symbol(v, w, mv, 3)
        assert sym.inverse().invariant() == -sym.invariant()


class TestPfister:
    def test_all_ones(self, q17):
        ones = tuple(q17.el(1) for _ in range(6))
        assert all(x.is_one for x in brauer.pfister_tuple(*ones))

    def test_square_product(self, q17, rng):
        for _ in range(300):
            vals = tuple(q17.random_element(rng) for _ in range(6))
            brauer.validate_b_tuple(brauer.pfister_tuple(*vals))

    def test_in_I3(self, q17, rng):
        for _ in range(100):
            vals = tuple(q17.random_element(rng) for _ in range(6))
            assert qform.in_I3(brauer.pfister_tuple(*vals))

    def test_order_matches_tensor_expansion(self, q17, rng):
        a, b, c, d, e, f = (q17.random_element(rng) for _ in range(6))
        t = brauer.pfister_tuple(a, b, c, d, e, f)
        assert t[0] == a * e and t[2] == b * f and t[11] == a * f


class TestPflem:
    def test_identity_against_cm_oracle(self, q17, rng):
        for _ in range(150):
            vals = tuple(q17.random_element(rng) for _ in range(6))
            sym = brauer.pflem_symbol(*vals, 3)
            want = brauer.cm_class(brauer.psi(brauer.pfister_tuple(*vals)), 3)
            assert brauer.embed_at(sym.invariant(), 3) == want

    def test_all_ones_trivial(self, q17):
        ones = tuple(q17.el(1) for _ in range(6))
        sym = brauer.pflem_symbol(*ones, 3)
        assert sym.a.is_one and sym.b.is_one and sym.invariant().is_zero

    def test_e_equals_f_trivial(self, q17, rng):
        a, b, c, d, e = (q17.random_element(rng) for _ in range(5))
        sym = brauer.pflem_symbol(a, b, c, d, e, e, 3)
        assert sym.b.is_one and sym.invariant().is_zero
        tup = brauer.pfister_tuple(a, b, c, d, e, e)
        assert brauer.cm_class(brauer.psi(tup), 3).is_zero


class TestQuadExt:
    def test_unit_element(self, q17):
        d = q17.el(17)  # odd valuation: never a square
        u = QuadExtElement(q17.el(1), q17.zero(), d)
        assert u.trace() == q17.el(2) and u.norm().is_one

    def test_rejects_square_d(self, q17):
        with pytest.raises(ValueError):
            QuadExtElement(q17.el(1), q17.el(1), q17.el(4))

    def test_norm_multiplicative(self, q17, rng):
        from chainlen.pipeline import random_quadext
        for _ in range(200):
            u = random_quadext(q17, rng)
            v = random_quadext(q17, rng, u.d)
            assert (u * v).norm() == u.norm() * v.norm()

    def test_conjugate_has_same_trace_and_norm(self, q17, rng):
        from chainlen.pipeline import random_quadext
        u = random_quadext(q17, rng)
        conj = QuadExtElement(u.x, -u.y, u.d)
        assert conj.trace() == u.trace() and conj.norm() == u.norm()

    def test_quadext_op_surface(self, q17):
        d = q17.el(17)
        u = QuadExtElement(q17.el(3), q17.el(2), d)
        assert brauer.quadext(u, "trace") == q17.el(6)
        assert brauer.quadext(u, "norm") == q17.el(9) - d * q17.el(4)


class TestRost14:
    def test_unit_inputs(self, q17):
        d = q17.el(17)
        one = QuadExtElement(q17.el(1), q17.zero(), d)
        t = brauer.rost14_tuple(one, one, one)
        half = q17.el(2).inv()
        assert tuple(t[:6]) == (q17.el(2), half, q17.el(2), half, q17.el(2), half)

    def test_first_six_product_is_one(self, q17, rng):
        from chainlen.pipeline import random_quadext
        done = 0
        while done < 200:
            u = random_quadext(q17, rng)
            v = random_quadext(q17, rng, u.d)
            w = random_quadext(q17, rng, u.d)
            try:
                t = brauer.rost14_tuple(u, v, w)
            except DegenerateTrace:
                continue
            prod = t[0]
            for x in t[1:6]:
                prod = prod * x
            assert prod.is_one
            done += 1

    def test_total_product_square_and_psi5_is_one(self, q17, rng):
        from chainlen.pipeline import random_quadext
        done = 0
        while done < 100:
            u = random_quadext(q17, rng)
            v = random_quadext(q17, rng, u.d)
            w = random_quadext(q17, rng, u.d)
            try:
                t = brauer.rost14_tuple(u, v, w)
            except DegenerateTrace:
                continue
            brauer.validate_b_tuple(t)
            assert brauer.psi(t)[4].is_one
            done += 1

    def test_degenerate_trace_raises(self, q17):
        d = q17.el(17)
        # x = 0 makes the trace vanish
        u = QuadExtElement(q17.zero(), q17.el(1), d)
        v = QuadExtElement(q17.el(1), q17.zero(), d)
        with pytest.raises(DegenerateTrace):
            brauer.rost14_tuple(u, v, v)

    def test_mismatched_d_rejected(self, q17):
        u = QuadExtElement(q17.el(1), q17.el(1), q17.el(17))
        v = QuadExtElement(q17.el(1), q17.el(1), q17.el(3 * 17))
        with pytest.raises(ValueError):
            brauer.rost14_tuple(u, u, v)
