import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nesreg import effective_dimension as ed
from nesreg import kinematics as kin
from nesreg.errors import DomainError

EP = ed.DEFAULT_CONSTANTS.planck_energy_gev


def brute_q(matrix):
    """Independent chain: numeric eigenvalues, trace normalization, explicit entropy loop."""
    ev = np.linalg.eigvalsh(matrix)
    p = ev / ev.sum()
    h = 0.0
    for v in p:
        if v > 0:
            h -= v * math.log(v)
    return math.exp(h)


class TestNormalizedEigenvalues:
    def test_orthogonal(self):
        assert ed.normalized_eigenvalues(kin.metric_from_rho(0.0)) == (0.25,) * 4

    def test_example(self):
        w = ed.normalized_eigenvalues(kin.metric_from_rho(0.6))
        np.testing.assert_allclose(w, [4 / 9, 1 / 9, 2 / 9, 2 / 9], atol=1e-15)

    def test_degenerate_limit(self):
        w = ed.normalized_eigenvalues(kin.metric_from_lambda(1e-12))
        assert w[0] == pytest.approx(1.0, abs=1e-11)
        assert max(w[1:]) < 1e-11

    @given(rho=st.floats(0.0, 1 - 1e-9))
    def test_sum_and_numeric_agreement(self, rho):
        g = kin.metric_from_rho(rho)
        w = np.array(ed.normalized_eigenvalues(g))
        assert math.fsum(w) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(w, ed.numeric_normalized_eigenvalues(g), atol=1e-10)

    def test_two_dimensional(self):
        w = ed.normalized_eigenvalues(kin.metric_from_rho(0.6, dim=2))
        np.testing.assert_allclose(w, [0.8, 0.2], atol=1e-15)

    def test_weights_validated(self):
        with pytest.raises(DomainError):
            ed.SpectrumWeights([0.5, 0.6])
        with pytest.raises(DomainError):
            ed.SpectrumWeights([1.2, -0.2])


class TestEffectiveDim:
    def test_reference_values(self):
        assert ed.effective_dim([0.25] * 4) == pytest.approx(4.0, abs=1e-12)
        assert ed.effective_dim([1, 0, 0, 0]) == 1.0
        # exp of the entropy, evaluated at 40 digits with mpmath
        assert ed.effective_dim([4 / 9, 1 / 9, 2 / 9, 2 / 9]) == pytest.approx(3.571652366928449, abs=1e-13)
        assert ed.effective_dim([4 / 9, 1 / 9, 2 / 9, 2 / 9]) == pytest.approx(3.5716, abs=1e-4)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_uniform_counts_states(self, n):
        assert ed.effective_dim([1 / n] * n) == pytest.approx(n, abs=1e-12)

    @given(w=st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4).filter(lambda v: sum(v) > 1e-3))
    def test_bounds(self, w):
        p = np.array(w) / sum(w)
        q = ed.effective_dim(p)
        assert 1.0 - 1e-12 <= q <= 4.0 + 1e-12


class TestQOfEnergy:
    def test_at_rest(self):
        assert ed.q_of_energy(ed.EnergyState(1.0, 1.0)) == pytest.approx(4.0, abs=1e-12)

    def test_lambda_half_against_brute_chain(self):
        state = ed.EnergyState(1.0, math.sqrt(1.5))
        rho = math.sqrt(0.75)
        brute = brute_q(np.array([[2, 2 * rho, 0, 0], [2 * rho, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))
        assert ed.q_of_energy(state) == pytest.approx(brute, rel=1e-12)
        # frozen from a 40-digit evaluation
        assert ed.q_of_energy(state) == pytest.approx(2.805027864875023, abs=1e-13)

    def test_ultrarelativistic(self):
        assert ed.q_of_energy(ed.EnergyState(1.0, 1e6)) < 1.01

    def test_state_validation(self):
        with pytest.raises(DomainError):
            ed.EnergyState(1.0, 0.5)
        with pytest.raises(DomainError):
            ed.EnergyState(0.0, 1.0)

    def test_monotone_in_rho(self):
        qs = [ed.q_of_rho(r) for r in np.linspace(0.0, 1 - 1e-9, 1000)]
        assert qs[0] == pytest.approx(4.0, abs=1e-12)
        assert np.all(np.diff(qs) <= 0.0)
        assert min(qs) >= 1.0

    @given(rho=st.floats(0.0, 0.999))
    def test_matches_brute_chain(self, rho):
        g = kin.metric_from_rho(rho)
        assert ed.q_of_rho(rho) == pytest.approx(brute_q(g.matrix), rel=1e-10)


class TestJump:
    @pytest.mark.parametrize("ratio, q", [(0.5, 4), (1.0, 1), (2.0, 1), (1e-17, 4)])
    def test_profile(self, ratio, q):
        assert ed.q_jump(ratio * EP) == q

    def test_custom_constants(self):
        c = ed.PhysicalConstants(planck_energy_gev=10.0)
        assert ed.q_jump(9.99, c) == 4 and ed.q_jump(10.0, c) == 1


class TestMultinomial:
    def test_single_state(self):
        assert ed.multinomial_entropy_oracle([1000]) == 1.0

    def test_two_equal_states(self):
        assert ed.multinomial_entropy_oracle([5000, 5000]) == pytest.approx(2.0, rel=0.01)
        assert ed.multinomial_entropy_oracle([5000, 5000]) == pytest.approx(1.999034036039005, rel=1e-12)

    def test_equal_states_approach_count(self):
        vals = [ed.multinomial_entropy_oracle([m] * 4) for m in (10, 100, 1000, 100_000)]
        assert np.all(np.diff(vals) > 0)
        assert vals[-1] == pytest.approx(4.0, rel=1e-4)

    def test_against_math_lgamma(self):
        occ = [3, 7, 11, 2]
        m = sum(occ)
        log_omega = math.lgamma(m + 1) - sum(math.lgamma(k + 1) for k in occ)
        assert ed.multinomial_entropy_oracle(occ) == pytest.approx(math.exp(log_omega / m), rel=1e-13)

    @given(p=st.lists(st.floats(0.05, 1.0), min_size=2, max_size=6))
    def test_converges_to_shannon(self, p):
        p = np.array(p) / sum(p)
        occ = np.maximum(1, np.round(p * 1e4))
        assert ed.multinomial_entropy_oracle(occ) == pytest.approx(ed.effective_dim(occ / occ.sum()), rel=0.01)

    def test_rejects_bad_occupations(self):
        for bad in ([], [0, 3], [1.5, 2]):
            with pytest.raises(DomainError):
                ed.multinomial_entropy_oracle(bad)


class TestFigures:
    def test_figure2_reference_rows(self):
        rows = ed.figure2_data(200, 5.0)
        assert ("left", 0.0, 0.0, 1.0) in rows
        left = {r[1]: r for r in rows if r[0] == "left"}
        right = {r[1]: r for r in rows if r[0] == "right"}
        assert left[1 / 3][2:] == pytest.approx((0.6, 0.8), abs=1e-15)
        assert right[3.0][2:] == pytest.approx((0.6, 0.8), abs=1e-15)

    def test_figure2_shapes(self):
        rows = ed.figure2_data(300, 10.0)
        for panel, sign in (("left", 1), ("right", -1)):
            rho = np.array([r[2] for r in rows if r[0] == panel])
            lam = np.array([r[3] for r in rows if r[0] == panel])
            assert np.all(sign * np.diff(rho) > 0)
            assert np.all(sign * np.diff(lam) < 0)

    def test_figure2_validation(self):
        with pytest.raises(DomainError):
            ed.figure2_data(1, 5.0)
        with pytest.raises(DomainError):
            ed.figure2_data(10, 0.5)

    def test_figure3_light_mass(self):
        rows = ed.figure3_data([190.0], n_points=13, ratio_range=(1e-10, 1e2))
        first = rows[0]
        assert first[1] == pytest.approx(1e-10)
        assert first[2] < 1.01

    def test_figure3_at_rest_energy(self):
        for m in (1.0, 190.0, EP):
            rows = ed.figure3_data([m], n_points=2, ratio_range=(m / EP, 10 * m / EP))
            assert rows[0][2] == pytest.approx(4.0, abs=1e-12)

    def test_figure3_planck_particle(self):
        rows = ed.figure3_data([EP], n_points=13, ratio_range=(1e-10, 1e2))
        by_ratio = {round(math.log10(r[1])): r for r in rows}
        assert by_ratio[-3][2] > 3.9 and by_ratio[-3][3] == 1
        assert by_ratio[2][2] < 1.2
        # just above the rest energy the dimension is in transit
        q2 = ed.figure3_data([EP], n_points=2, ratio_range=(2.0, 3.0))[0][2]
        assert 1.0 < q2 < 4.0
