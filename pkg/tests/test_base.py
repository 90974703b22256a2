import random

import pytest

from htlab import (
    KElem,
    frobenius,
    make_base_config,
    ok_arith,
    ok_invert,
    ok_valuation,
    teichmuller,
)
from htlab.errors import NotAUnit, NotEisenstein, NotPrime

from oracles import teich_fixpoint


class TestConfig:
    def test_unramified_constants(self, cfg_u5):
        assert cfg_u5.e == 1
        assert cfg_u5.pi == cfg_u5.ok_from_int(5)
        assert cfg_u5.Ep == cfg_u5.ok_one()
        assert cfg_u5.beta == cfg_u5.ok_from_int(5)

    def test_ramified_constants(self, cfg_r2):
        # E = u^2 - 2: E'(pi) = 2 pi, beta = 2 pi^2 = 4
        assert cfg_r2.e == 2
        assert cfg_r2.Ep == cfg_r2.ok_from_coeffs([0, 2])
        assert cfg_r2.beta == cfg_r2.ok_from_int(4)

    def test_not_eisenstein_unit_constant(self):
        with pytest.raises(NotEisenstein):
            make_base_config(5, [-3, 0])

    def test_not_eisenstein_p_squared(self):
        with pytest.raises(NotEisenstein):
            make_base_config(5, [25, 0])

    def test_not_prime(self):
        with pytest.raises(NotPrime):
            make_base_config(6, [-6])

    def test_json_roundtrip(self, cfg_r2):
        blob = cfg_r2.to_json()
        assert blob["p"] == "2"
        assert blob["E_coeffs"] == ["-2", "0"]
        back = type(cfg_r2).from_json(blob)
        assert back.p == 2 and back.e == 2 and back.N == 8
        assert back.cutoffs == cfg_r2.cutoffs


class TestOkArith:
    def test_pi_squared_unramified(self, cfg_u5):
        pi = cfg_u5.pi
        assert ok_arith(pi, pi, "mul") == cfg_u5.ok_from_int(25)

    def test_pi_squared_ramified(self, cfg_r2):
        pi = cfg_r2.pi
        assert ok_arith(pi, pi, "mul") == cfg_r2.ok_from_int(2)

    def test_valuation_six_ramified(self, cfg_r2):
        # 6 = 2 * 3 with 3 a unit and v(2) = e = 2
        assert ok_valuation(cfg_r2.ok_from_int(6)) == 2

    def test_valuation_multiplicative(self, cfg_r2):
        rng = random.Random(7)
        for _ in range(50):
            x = cfg_r2.ok_from_coeffs([rng.randrange(40), rng.randrange(40)])
            y = cfg_r2.ok_from_coeffs([rng.randrange(40), rng.randrange(40)])
            vx, vy = x.val(), y.val()
            if vx is None or vy is None or vx + vy >= cfg_r2.e * cfg_r2.N:
                continue
            assert (x * y).val() == vx + vy

    def test_ring_axioms_random(self, cfg_r2):
        rng = random.Random(11)
        for _ in range(40):
            x, y, z = (
                cfg_r2.ok_from_coeffs([rng.randrange(256), rng.randrange(256)])
                for _ in range(3)
            )
            assert (x + y) * z == x * z + y * z
            assert (x * y) * z == x * (y * z)
            assert x * y == y * x

    def test_invert_unit(self, cfg_r2):
        x = cfg_r2.ok_from_coeffs([3, 5])
        assert x * ok_invert(x) == cfg_r2.ok_one()

    def test_invert_nonunit_raises(self, cfg_r2):
        with pytest.raises(NotAUnit):
            ok_invert(cfg_r2.pi)

    def test_precision_propagation(self, cfg_u5):
        x = cfg_u5.ok_from_int(7, prec=4)
        y = cfg_u5.ok_from_int(3, prec=8)
        assert (x * y).prec == 4
        assert (x + y).prec == 4


class TestKElem:
    def test_shift_normalization(self, cfg_u5):
        x = KElem(cfg_u5.ok_from_int(25), 1)  # 25/5 = 5
        assert x.shift == 0
        assert x.num == cfg_u5.ok_from_int(5)

    def test_div_int(self, cfg_u5):
        x = cfg_u5.k_from_int(7)
        y = x.div_int(35)
        assert y.shift == 1
        assert (y * cfg_u5.k_from_int(35)) == cfg_u5.k_from_int(7)

    def test_pi_inverse(self, cfg_r2):
        piv = cfg_r2.pi_inv()
        assert piv * cfg_r2.k_pi() == cfg_r2.k_one()
        assert piv.val_pi() == -1

    def test_general_inverse(self, cfg_r2):
        # pi * 3: valuation 1
        x = KElem(cfg_r2.pi * cfg_r2.ok_from_int(3), 0)
        xi = x.inv()
        assert x * xi == cfg_r2.k_one()
        assert xi.val_pi() == -1

    def test_inverse_with_shift(self, cfg_u5):
        x = cfg_u5.k_from_int(3).div_int(5)  # 3/5
        xi = x.inv()
        assert x * xi == cfg_u5.k_one()
        assert xi.val_pi() == 1

    def test_abs_precision_drops_with_shift(self, cfg_u5):
        x = cfg_u5.k_from_int(3).div_int(25)
        assert x.abs_prec == cfg_u5.N - 2

    def test_beta_inv(self, cfg_r2):
        assert cfg_r2.beta_inv() * cfg_r2.k_beta() == cfg_r2.k_one()

    def test_div_pi_exact_matches_peel(self, cfg_r2):
        pi = cfg_r2.k_pi()
        piv = cfg_r2.pi_inv()
        unit = cfg_r2.k_from_int(3) + pi.smul(5)
        for v in (1, 2, 3, 6, 8):
            x = unit
            for _ in range(v):
                x = x * pi
            slow = x
            for _ in range(v):
                slow = slow * piv
            fast = x.div_pi_exact(v)
            assert (fast - unit).is_zero()
            assert (fast - slow).is_zero()
            assert fast.abs_prec >= slow.abs_prec

    def test_div_pi_exact_precision_gain(self, cfg_r2):
        # dividing by pi^8 = 2^4 B^4 costs four digits, not eight
        pi = cfg_r2.k_pi()
        x = cfg_r2.k_from_int(3)
        for _ in range(8):
            x = x * pi
        assert x.div_pi_exact(8).abs_prec == cfg_r2.N - 4
        slow = x
        piv = cfg_r2.pi_inv()
        for _ in range(8):
            slow = slow * piv
        assert slow.abs_prec == cfg_r2.N - 8

    def test_div_pi_exact_unramified(self, cfg_u5):
        x = cfg_u5.k_from_int(75)
        y = x.div_pi_exact(2)
        assert y == cfg_u5.k_from_int(3)
        assert x.div_pi_exact(0) is x

    def test_neg_b_inv(self, cfg_r2):
        # pi^2 * (-B)^{-1} = 2 when E = u^2 - 2
        prod = KElem(cfg_r2.pi * cfg_r2.pi * cfg_r2.neg_b_inv(), 0)
        assert prod == cfg_r2.k_from_int(2)


class TestTeichmuller:
    def test_spot_values(self, cfg_u5):
        t = teichmuller(cfg_u5, 2, prec=2)
        assert t.w == 7  # 2^5 = 32 = 7 mod 25, 7^5 = 7 mod 25
        cfg3 = make_base_config(3, [-3], precision=8)
        t3 = teichmuller(cfg3, 2, prec=2)
        assert t3.w == 8  # -1 is its own lift

    def test_zero_one(self, cfg_u5):
        assert teichmuller(cfg_u5, 0).w == 0
        assert teichmuller(cfg_u5, 1).w == 1

    def test_matches_iteration_oracle(self):
        rng = random.Random(3)
        for p in (2, 3, 5):
            cfg = make_base_config(p, [-p], precision=8)
            for _ in range(10):
                a = rng.randrange(p)
                assert teichmuller(cfg, a).w == teich_fixpoint(p, a, 8)

    def test_fixed_by_q_power(self, cfg_f2):
        w = cfg_f2.w
        for a in [(1, 1), (2, 0), (0, 1), (2, 2)]:
            t = teichmuller(cfg_f2, a)
            assert t.pow(cfg_f2.w.q) == t


class TestFrobenius:
    def test_identity_for_f1(self, cfg_u5):
        x = teichmuller(cfg_u5, 3)
        assert frobenius(x, 1) == x

    def test_ring_homomorphism(self, cfg_f2):
        rng = random.Random(5)
        W = cfg_f2.w
        from htlab import WittElem

        for _ in range(25):
            x = WittElem(cfg_f2, (rng.randrange(6561), rng.randrange(6561)))
            y = WittElem(cfg_f2, (rng.randrange(6561), rng.randrange(6561)))
            assert frobenius(x + y) == frobenius(x) + frobenius(y)
            assert frobenius(x * y) == frobenius(x) * frobenius(y)

    def test_frobenius_lift_law(self, cfg_f2):
        # phi(x) = x^p mod p on 200 samples
        rng = random.Random(9)
        from htlab import WittElem

        p = cfg_f2.p
        for _ in range(200):
            x = WittElem(cfg_f2, (rng.randrange(6561), rng.randrange(6561)))
            d = frobenius(x) - x.pow(p)
            v = d.val()
            assert v is None or v >= 1

    def test_order_f(self, cfg_f2):
        from htlab import WittElem

        x = WittElem(cfg_f2, (17, 29))
        assert frobenius(frobenius(x)) == x
        assert frobenius(x, -1) == frobenius(x, cfg_f2.f - 1)

    def test_teichmuller_equivariance(self, cfg_f2):
        # phi([a]) = [a^p]
        W = cfg_f2.w
        a = (2, 1)
        t = teichmuller(cfg_f2, a)
        ap = W.pow(W.red(a, 3), cfg_f2.p, 3)
        assert frobenius(t) == teichmuller(cfg_f2, ap)

    def test_fixes_zp(self, cfg_f2):
        x = cfg_f2.w.from_int(42, 3**8)
        from htlab import WittElem

        w = WittElem(cfg_f2, x)
        assert frobenius(w) == w
