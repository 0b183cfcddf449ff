"""Refinement forms, residual checks, and the explicit psd criterion."""

import math
import random

import pytest

from conftest import random_law
from mominq.errors import ArityMismatch, NegativeWeight, OrderViolation
from mominq.forms import (
    CHECKS,
    PROVED_CHECK_IDS,
    FormParams,
    check_inequality,
    lemma3_criterion,
    mu,
    phi,
    psi_form,
    residual_and_scale,
    sigma,
    tau,
    theta,
    tolerance,
    w_form,
    xi,
)
from mominq.laws import lambda_, make_law

LN2 = math.log(2.0)
LN15 = math.log(1.5)
LAM0 = LN15 - 0.5 * LN2
LAM1 = LN2 - 1.5 * LN15
LAM2 = 0.125


def sample_check_params(rng, check_id, lo=-6.0, hi=6.0):
    arity = CHECKS[check_id].arity
    if check_id == "theoremb":
        vals = sorted(rng.uniform(lo, hi) for _ in range(3))
        while len(set(vals)) < 3:
            vals = sorted(rng.uniform(lo, hi) for _ in range(3))
        return tuple(vals)
    if check_id == "theorem2":
        return (rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)) + tuple(
            rng.uniform(lo, hi) for _ in range(4))
    return tuple(rng.uniform(lo, hi) for _ in range(arity))


class TestNamedForms:
    def test_tau_hand_value(self, half_half_law):
        assert tau(half_half_law, 0.0, 2.0) == pytest.approx(
            LAM0 - 2.0 * LAM1 + LAM2, rel=1e-12)

    def test_tau_trivia(self, half_half_law, one_atom_law):
        assert tau(half_half_law, 3.0, 3.0) == 0.0
        assert tau(one_atom_law, -1.0, 4.0) == 0.0

    def test_mu_reduces_to_tau(self, half_half_law):
        assert mu(half_half_law, 2.0, 0.0) == tau(half_half_law, 0.0, 2.0)
        assert mu(half_half_law, 0.0, 1.7) == 0.0

    def test_w_hand_value(self, half_half_law):
        # lam_0 + 2 lam_1 + lam_2 at p = q = 1
        want = LAM0 + 2.0 * LAM1 + LAM2
        assert w_form(half_half_law, 1.0, 1.0, 0.0, 2.0) == pytest.approx(
            want, rel=1e-12)
        assert w_form(half_half_law, 1.0, 0.0, 3.0, 2.0) == pytest.approx(
            lambda_(half_half_law, 3.0), rel=1e-13)
        assert w_form(half_half_law, 0.0, 0.0, 3.0, 2.0) == 0.0

    def test_w_rejects_negative_weights(self, half_half_law):
        with pytest.raises(NegativeWeight):
            w_form(half_half_law, -1.0, 1.0, 0.0, 2.0)

    def test_xi_trivia(self, half_half_law, one_atom_law):
        assert xi(half_half_law, 2.5, 2.5) == 0.0
        assert xi(one_atom_law, -3.0, 5.0) == 0.0

    def test_phi_diagonal_cancels(self):
        rng = random.Random(31)
        for _ in range(200):
            law = random_law(rng)
            s, t = rng.uniform(-6, 6), rng.uniform(-6, 6)
            assert phi(law, s, t, s, t) == 0.0

    def test_phi_sharp_example_float(self):
        law = make_law([(2.0, 0.5), (1.0, 0.5)])
        assert phi(law, 2.0, 4.0, 2.0, 6.0) == pytest.approx(
            7.0 / 283115520.0, rel=1e-9)

    def test_sigma_is_shifted_xi(self, half_half_law):
        assert sigma(half_half_law, 2.0, 2.0) == xi(half_half_law, 2.0, 4.0)
        assert sigma(half_half_law, 0.0, 3.3) == 0.0

    def test_theta_trivia(self, half_half_law):
        assert theta(half_half_law, 1.0, 2.0, 2.0) == 0.0
        assert theta(half_half_law, 0.0, 1.0, 3.0) == 0.0

    def test_theta_equals_phi_on_shifted_arguments(self):
        rng = random.Random(32)
        for _ in range(200):
            law = random_law(rng)
            a = rng.uniform(-3, 3)
            x, y = rng.uniform(-4, 4), rng.uniform(-4, 4)
            th = theta(law, a, x, y)
            ph = phi(law, x, x + a, y, y + a)
            scale = abs(th) + abs(ph) + 1e-300
            assert abs(th - ph) <= 1e-10 * scale + 1e-13 * _theta_scale(law, a, x, y)


def _theta_scale(law, a, x, y):
    _, scale = residual_and_scale("corollary2", law, (a, x, y), "double")
    return scale


class TestPsi:
    def test_zero_coefficients(self, half_half_law):
        assert psi_form(half_half_law, 0.0, 0.0, 1.0, 2.0, 1.0, 2.0, 3.0, 4.0) == 0.0

    def test_one_atom_always_zero(self, one_atom_law):
        rng = random.Random(33)
        for _ in range(50):
            args = [rng.uniform(-3, 3) for _ in range(8)]
            assert psi_form(one_atom_law, *args) == 0.0

    def test_alternating_signs_give_theorem1_residual(self):
        rng = random.Random(34)
        for _ in range(100):
            law = random_law(rng)
            r, s, u, v = (rng.uniform(-5, 5) for _ in range(4))
            lhs = psi_form(law, 1.0, -1.0, 1.0, -1.0, r, s, u, v)
            rhs, scale = residual_and_scale("theorem1", law, (r, s, u, v), "double")
            assert abs(lhs - rhs) <= 1e-12 * scale + 1e-300

    def test_zero_one_slice_matches_quadratic(self):
        rng = random.Random(35)
        for _ in range(100):
            law = random_law(rng)
            s, u, v = (rng.uniform(-5, 5) for _ in range(3))
            c, d = rng.uniform(-3, 3), rng.uniform(-3, 3)
            lam = lambda o: lambda_(law, o)
            got = psi_form(law, 0.0, 1.0, c, d, s, s, u, v)
            want = (
                xi(law, s, u) * c * c
                + 2.0 * (lam(s) * lam((u + v) / 2)
                         - lam((s + u) / 2) * lam((s + v) / 2)) * c * d
                + xi(law, s, v) * d * d
            )
            _, scale = residual_and_scale(
                "theorem1", law, (s, s, u, v), "double")
            assert abs(got - want) <= 1e-12 * max(scale, abs(got) + abs(want)) + 1e-300

    def test_psi_nonnegative_random(self):
        rng = random.Random(36)
        for _ in range(500):
            law = random_law(rng)
            a, b, c, d = (rng.uniform(-3, 3) for _ in range(4))
            r, s, u, v = (rng.uniform(-6, 6) for _ in range(4))
            val = psi_form(law, a, b, c, d, r, s, u, v)
            ref = psi_form(law, abs(a), abs(b), abs(c), abs(d), r, s, u, v)
            assert val >= -1e-10 * (abs(ref) + 1.0)


class TestCheckInequality:
    def test_jensen_one_atom(self, one_atom_law):
        rep = check_inequality("jensen", one_atom_law, (5.0,))
        assert rep.passed and rep.residual == 0.0

    def test_theorem1_symmetric_collapse(self, half_half_law):
        rep = check_inequality("theorem1", half_half_law, (1.2, 3.4, 1.2, 3.4))
        assert rep.passed
        assert rep.residual == 0.0

    def test_theoremb_hand_residual(self, half_half_law):
        rep = check_inequality("theoremb", half_half_law, (0.0, 1.0, 2.0))
        want = math.log(LAM0) + math.log(LAM2) - 2.0 * math.log(LAM1)
        assert rep.passed
        assert rep.residual == pytest.approx(want, rel=1e-10)
        assert rep.residual == pytest.approx(0.0198964, rel=1e-4)

    def test_theoremb_requires_order(self, half_half_law):
        with pytest.raises(OrderViolation):
            check_inequality("theoremb", half_half_law, (2.0, 1.0, 3.0))

    def test_theoremb_degenerate_short_circuit(self, one_atom_law):
        rep = check_inequality("theoremb", one_atom_law, (0.5, 1.5, 2.5))
        assert rep.passed and rep.residual == 0.0

    def test_arity_mismatch(self, half_half_law):
        with pytest.raises(ArityMismatch):
            check_inequality("jensen", half_half_law, (1.0, 2.0))

    def test_theorem2_negative_weight(self, half_half_law):
        with pytest.raises(NegativeWeight):
            check_inequality("theorem2", half_half_law,
                             (-0.5, 1.0, 0.0, 1.0, 2.0, 3.0))

    def test_form_params_wrapper(self, half_half_law):
        rep = check_inequality("jensen", half_half_law, FormParams.of(2.0))
        assert rep.params == (2.0,)

    def test_conjecture1_reduces_to_theorem4(self):
        rng = random.Random(37)
        for _ in range(100):
            law = random_law(rng)
            r, s, v = (rng.uniform(-5, 5) for _ in range(3))
            c1, c1_scale = residual_and_scale(
                "conjecture1", law, (r, s, r, v, r, v, s, v), "double")
            t4, t4_scale = residual_and_scale("theorem4", law, (r, s, v), "double")
            assert abs(c1 - t4) <= 1e-10 * max(c1_scale, t4_scale, 1e-300)

    def test_conjecture1_reduces_to_theorem5(self):
        rng = random.Random(38)
        for _ in range(100):
            law = random_law(rng)
            r, s, u, v = (rng.uniform(-5, 5) for _ in range(4))
            c1, c1_scale = residual_and_scale(
                "conjecture1", law, (r, s, s, u, r, s, s, v), "double")
            t5, t5_scale = residual_and_scale(
                "theorem5", law, (r, s, u, v), "double")
            assert abs(c1 - t5) <= 1e-10 * max(c1_scale, t5_scale, 1e-300)

    @pytest.mark.parametrize("check_id", PROVED_CHECK_IDS)
    def test_proved_checks_pass_on_random_draws(self, check_id):
        rng = random.Random(hash(check_id) & 0xFFFF)
        for _ in range(1000):
            law = random_law(rng)
            params = sample_check_params(rng, check_id)
            rep = check_inequality(check_id, law, params)
            assert rep.passed, (check_id, law.atoms, params, rep)

    def test_escalation_engages_near_boundary(self):
        # the sharp two-point example sits ~6e-10 of scale above zero, inside
        # the 1e3 x tolerance escalation window
        law = make_law([(2.0, 0.5), (1.0, 0.5)])
        rep = check_inequality("theorem3", law, (2.0, 4.0, 2.0, 6.0))
        assert rep.escalated and rep.passed
        assert rep.residual == pytest.approx(7.0 / 283115520.0, rel=1e-12)

    def test_forced_dd_precision(self, half_half_law):
        rep = check_inequality("logconvex", half_half_law, (2.0, 4.0),
                               precision="dd")
        assert rep.escalated
        rep2 = check_inequality("logconvex", half_half_law, (2.0, 4.0),
                                precision="double")
        assert rep.residual == pytest.approx(rep2.residual, rel=1e-12)

    def test_theorem2_proof_chain(self):
        # w(s,t)w(u,v) >= [p^2 lam_a + pq(lam_b + lam_c) + q^2 lam_d]^2
        #              >= w((s+u)/2,(t+v)/2)^2
        rng = random.Random(39)
        for _ in range(200):
            law = random_law(rng)
            p, q = rng.uniform(0, 2), rng.uniform(0, 2)
            s, t, u, v = (rng.uniform(-5, 5) for _ in range(4))
            lam = lambda o: lambda_(law, o)
            w1 = w_form(law, p, q, s, t)
            w2 = w_form(law, p, q, u, v)
            middle = (p * p * lam((s + u) / 2)
                      + p * q * (lam((s + v) / 2) + lam((t + u) / 2))
                      + q * q * lam((t + v) / 2))
            wm = w_form(law, p, q, (s + u) / 2, (t + v) / 2)
            _, scale = residual_and_scale(
                "theorem2", law, (p, q, s, t, u, v), "double")
            tol = 1e-12 * scale + 1e-300
            assert w1 * w2 >= middle * middle - tol
            assert middle * middle >= wm * wm - tol

    def test_theorem4_matches_psd_criterion_decomposition(self):
        # the proof's coefficient matrix: D recovers the two-orders-equal
        # case of the third-order form, alpha*D*E recovers the residual
        rng = random.Random(40)
        for _ in range(200):
            law = random_law(rng)
            r, s, v = (rng.uniform(-4, 4) for _ in range(3))
            lam = lambda o: lambda_(law, o)
            alpha = xi(law, r, v)
            beta = xi(law, r, s)
            gamma = -(xi(law, r, (s + v) / 2) - xi(law, (r + s) / 2, (r + v) / 2))
            delta = xi(law, v, (r + s) / 2) - xi(law, (v + s) / 2, (r + v) / 2)
            eps = xi(law, s, (r + v) / 2) - xi(law, (r + s) / 2, (s + v) / 2)
            eta = xi(law, s, v)
            verdict = lemma3_criterion(alpha, beta, gamma, delta, eps, eta)
            ph = phi(law, r, v, r, s)
            _, scale4 = residual_and_scale("theorem4", law, (r, s, v), "double")
            _, scale_l2 = residual_and_scale(
                "lemma2", law, (r, v, s), "double")
            assert abs(verdict.D - ph) <= 1e-10 * max(scale_l2, 1e-300)
            if alpha > 0 and verdict.D > 1e-6 * scale_l2:
                res4, _ = residual_and_scale("theorem4", law, (r, s, v), "double")
                assert alpha * verdict.D * verdict.E == pytest.approx(
                    res4, abs=1e-10 * scale4 + 1e-300)


def brute_force_min(alpha, beta, gamma, delta, eps, eta,
                    half_width=50.0, n=101):
    """Grid plus analytic stationary point minimization of the quadratic."""
    def f(a, c):
        return (alpha * a * a + beta * c * c + 2 * gamma * a * c
                + 2 * delta * a + 2 * eps * c + eta)

    best = math.inf
    for i in range(n):
        a = -half_width + 2 * half_width * i / (n - 1)
        for j in range(n):
            c = -half_width + 2 * half_width * j / (n - 1)
            best = min(best, f(a, c))
    det = alpha * beta - gamma * gamma
    if det != 0.0:
        a0 = (-delta * beta + eps * gamma) / det
        c0 = (-eps * alpha + delta * gamma) / det
        best = min(best, f(a0, c0))
    return best


class TestLemma3:
    @pytest.mark.parametrize("coeffs,D,E,psd", [
        ((1, 1, 0, 0, 0, 0), 1.0, 0.0, True),
        ((1, 1, 2, 0, 0, 0), -3.0, None, False),
        ((1, 1, 0, 1, 1, 2), 1.0, 0.0, True),
    ])
    def test_examples(self, coeffs, D, E, psd):
        got = lemma3_criterion(*coeffs)
        assert got.D == pytest.approx(D)
        if E is None:
            assert got.E is None
        else:
            assert got.E == pytest.approx(E, abs=1e-14)
        assert got.psd is psd

    def test_degenerate_alpha_zero(self):
        assert lemma3_criterion(0, 1, 0, 0, 0, 1).psd is True
        assert lemma3_criterion(0, 1, 0, 0, 2, 1).psd is False  # eps^2 > beta*eta
        assert lemma3_criterion(0, 1, 1, 0, 0, 1).psd is False  # gamma != 0
        assert lemma3_criterion(0, 1, 0, 1, 0, 1).psd is False  # delta != 0
        assert lemma3_criterion(0, 0, 0, 0, 0, -1).psd is False  # eta < 0
        assert lemma3_criterion(0, 0, 0, 0, 0, 0).psd is True

    def test_alpha_negative(self):
        v = lemma3_criterion(-1, 1, 0, 0, 0, 1)
        assert v.psd is False and v.E is None

    def test_rank_one_quadratic_part(self):
        # alpha > 0, D = 0: psd iff the linear part aligns and the completed
        # square stays above zero
        assert lemma3_criterion(1, 1, 1, 0, 0, 0).psd is True
        assert lemma3_criterion(1, 1, 1, 1, 0, 0).psd is False
        assert lemma3_criterion(1, 1, 1, 1, 1, 1).psd is True
        assert lemma3_criterion(1, 1, 1, 1, 1, 0.5).psd is False

    def test_matches_brute_force_on_random_tuples(self):
        rng = random.Random(41)
        for _ in range(300):
            coeffs = [rng.uniform(-2.0, 2.0) for _ in range(6)]
            verdict = lemma3_criterion(*coeffs)
            m = brute_force_min(*coeffs)
            eta = coeffs[5]
            assert (m >= -1e-9 * (abs(eta) + 1.0)) == verdict.psd, (coeffs, m, verdict)
