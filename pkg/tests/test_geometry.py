"""Curvature, quantum metric, effective potential, and force decomposition."""

import numpy as np
import pytest

from synthflux.errors import ZeroOverlapError
from synthflux.field import FieldParams, b_components, b_magnitude, sample_B
from synthflux.geometry import (
    effective_potential,
    electric_field,
    force_components,
    force_grid,
    four_point_phase,
    metric_g11_top,
    plaquette_curvature,
    quantum_metric_g11,
)
from synthflux.spin import HermitianField, band_eigensystem_grid, dressed_state_spin1


def fd_triple_product(params, t, x, h=1e-6):
    """Finite-difference oracle for B.(dxB x dtB)/|B|^3."""
    b = b_components(params, t, x)
    bt = (b_components(params, t + h, x) - b_components(params, t - h, x)) / (2 * h)
    bx = (b_components(params, t, x + h) - b_components(params, t, x - h)) / (2 * h)
    mag = np.linalg.norm(b)
    return float(np.dot(b, np.cross(bx, bt))) / mag**3


class TestElectricField:
    def test_vanishes_at_origin(self, defaults):
        assert electric_field(defaults, 0.0, 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_against_finite_difference_oracle(self, defaults, rng):
        for _ in range(30):
            t, x = rng.uniform(0, 6, size=2)
            if sample_B(defaults, t, x).magnitude < 0.3:
                continue
            expected = fd_triple_product(defaults, t, x)
            got = float(electric_field(defaults, t, x))
            assert got == pytest.approx(expected, abs=2e-8, rel=1e-6)

    def test_quarter_cell_value(self, defaults):
        t = defaults.period / 4.0
        x = defaults.wavelength / 4.0
        expected = fd_triple_product(defaults, t, x)
        assert float(electric_field(defaults, t, x)) == pytest.approx(expected, rel=1e-7)

    def test_periodicity(self, defaults, rng):
        t, x = rng.uniform(0, 5, size=2)
        base = float(electric_field(defaults, t, x))
        shifted = float(
            electric_field(defaults, t + 2 * defaults.period, x - 3 * defaults.wavelength)
        )
        assert shifted == pytest.approx(base, abs=1e-12)

    def test_broadcasts(self, defaults):
        t = np.linspace(0.1, 5.0, 7)[:, None]
        x = np.linspace(0.1, 5.0, 5)[None, :]
        e = electric_field(defaults, t, x)
        assert e.shape == (7, 5)
        assert float(e[2, 3]) == pytest.approx(
            float(electric_field(defaults, float(t[2, 0]), float(x[0, 3]))), abs=1e-14
        )


class TestFourPointPhase:
    def test_identical_states_give_zero(self, rng):
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        v /= np.linalg.norm(v)
        assert four_point_phase([v, v, v, v]) == pytest.approx(0.0, abs=1e-15)

    def test_orthogonal_link_raises(self):
        e0 = np.array([1.0, 0.0, 0.0], dtype=complex)
        e1 = np.array([0.0, 1.0, 0.0], dtype=complex)
        with pytest.raises(ZeroOverlapError):
            four_point_phase([e0, e1, e0, e0])

    def test_gauge_invariance(self, defaults, rng):
        field = HermitianField.spin1(defaults)
        ts = [0.3, 0.3, 0.5, 0.5]
        xs = [0.2, 0.7, 0.7, 0.2]
        states = []
        for t, x in zip(ts, xs):
            _, vecs = band_eigensystem_grid(field.rep, b_components(defaults, t, x))
            states.append(vecs[:, 0])
        base = four_point_phase(states)
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=4))
        regauged = four_point_phase([p * s for p, s in zip(phases, states)])
        assert regauged == pytest.approx(base, abs=1e-12)


class TestPlaquetteCurvature:
    def test_constant_field_zero_phase(self):
        params = FieldParams(alpha=0.0, nu=0.0, gamma=0.7)
        field = HermitianField.spin1(params)
        corners = [(0.0, 0.0), (0.1, 0.0), (0.1, 0.2), (0.0, 0.2)]
        assert plaquette_curvature(field, 1.0, corners) == pytest.approx(0.0, abs=1e-14)

    def test_converges_to_curvature_times_area(self, defaults):
        field = HermitianField.spin1(defaults)
        t0, x0 = 1.3, 0.9
        errors = []
        for h in (0.2, 0.1, 0.05):
            corners = [(t0, x0), (t0 + h, x0), (t0 + h, x0 + h), (t0, x0 + h)]
            phase = plaquette_curvature(field, 1.0, corners)
            center = float(electric_field(defaults, t0 + h / 2, x0 + h / 2))
            errors.append(abs(phase - center * h * h))
        order = np.log2(errors[0] / errors[2]) / 2.0
        assert order >= 0.9

    def test_lower_band_opposite_sign(self, defaults):
        field = HermitianField.spin1(defaults)
        h = 0.05
        corners = [(1.3, 0.9), (1.3 + h, 0.9), (1.3 + h, 0.9 + h), (1.3, 0.9 + h)]
        top = plaquette_curvature(field, 1.0, corners)
        bottom = plaquette_curvature(field, -1.0, corners)
        assert bottom == pytest.approx(-top, abs=1e-12)
        assert abs(top) > 1e-6

    def test_grid_consistency_with_analytic_curvature(self, defaults):
        """Phases/area track the plaquette mean of E; error halves twice per doubling."""
        from synthflux.spin import spin_generators
        from synthflux.topology import _plaquette_phases

        rep = spin_generators(2)
        gauss = 1.0 / (2.0 * np.sqrt(3.0))
        errors = {}
        for n in (128, 256):
            t = np.arange(n) * defaults.period / n
            x = np.arange(n) * defaults.wavelength / n
            _, states = band_eigensystem_grid(
                rep, b_components(defaults, t[:, None], x[None, :])
            )
            phases = _plaquette_phases(states[..., :, 0], wrap_rows=True)
            area = defaults.cell_area / (n * n)
            ht, hx = defaults.period / n, defaults.wavelength / n
            mean_e = np.zeros((n, n))
            for st in (-gauss, gauss):
                for sx in (-gauss, gauss):
                    mean_e += electric_field(
                        defaults, t[:, None] + (0.5 + st) * ht, x[None, :] + (0.5 + sx) * hx
                    )
            mean_e /= 4.0
            errors[n] = np.max(np.abs(phases / area - mean_e)) / np.max(np.abs(mean_e))
        assert errors[256] <= 1e-3
        assert np.log2(errors[128] / errors[256]) >= 1.9


class TestQuantumMetric:
    def test_zero_transverse_drive_gives_flat_metric(self):
        params = FieldParams(alpha=0.0, nu=0.5, gamma=0.8)
        assert metric_g11_top(params, 0.3, 0.7) == pytest.approx(0.0, abs=1e-15)

    def test_closed_form_equals_perturbative_sum(self, defaults, rng):
        field = HermitianField.spin1(defaults)
        for _ in range(50):
            t, x = rng.uniform(0, 6, size=2)
            if sample_B(defaults, t, x).magnitude < 0.2:
                continue
            closed = float(metric_g11_top(defaults, t, x))
            summed = quantum_metric_g11(field, t, x, m=1.0)
            assert summed == pytest.approx(closed, rel=1e-10, abs=1e-12)

    def test_projector_oracle(self, defaults):
        """g11 = Re <dx eta| (1 - P) |dx eta> with a phase-aligned FD derivative."""
        t, x = 0.8, 1.1
        h = 1e-5
        field = HermitianField.spin1(defaults)

        def top_state(xq):
            _, vecs = band_eigensystem_grid(field.rep, b_components(defaults, t, xq))
            return vecs[:, 0]

        v0 = top_state(x)
        vp = top_state(x + h)
        vm = top_state(x - h)
        vp = vp * np.exp(-1j * np.angle(np.vdot(v0, vp)))
        vm = vm * np.exp(-1j * np.angle(np.vdot(v0, vm)))
        dv = (vp - vm) / (2 * h)
        proj = np.outer(v0, v0.conj())
        residual = dv - proj @ dv
        expected = float(np.real(np.vdot(residual, residual)))
        assert float(metric_g11_top(defaults, t, x)) == pytest.approx(expected, rel=1e-5)

    def test_nonnegative(self, defaults, rng):
        t = rng.uniform(0, 6, size=500)
        x = rng.uniform(0, 6, size=500)
        g = metric_g11_top(defaults, t, x)
        assert np.all(g >= -1e-15)

    def test_periodicity(self, defaults, rng):
        t, x = rng.uniform(0, 5, size=2)
        base = float(metric_g11_top(defaults, t, x))
        shifted = float(
            metric_g11_top(defaults, t - defaults.period, x + 2 * defaults.wavelength)
        )
        assert shifted == pytest.approx(base, abs=1e-12)

    def test_all_bands_positive_semidefinite(self, defaults, rng):
        field = HermitianField.spin1(defaults)
        for _ in range(20):
            t, x = rng.uniform(0, 6, size=2)
            if sample_B(defaults, t, x).magnitude < 0.3:
                continue
            for m in (1.0, 0.0, -1.0):
                assert quantum_metric_g11(field, t, x, m=m) >= -1e-12


class TestEffectivePotential:
    def test_constant_field_reduces_to_energy(self):
        params = FieldParams(alpha=0.0, nu=0.0, gamma=0.5)
        assert effective_potential(params, 1.0, 2.0, mass=1.0) == pytest.approx(0.5)

    def test_composition(self, defaults):
        t, x = 0.0, 0.0
        v = effective_potential(defaults, t, x, mass=1.0)
        expected = float(metric_g11_top(defaults, t, x)) / 2.0 + float(
            b_magnitude(defaults, t, x)
        )
        assert float(v) == pytest.approx(expected, abs=1e-14)

    def test_dominates_band_energy(self, defaults, rng):
        t = rng.uniform(0, 6, size=200)
        x = rng.uniform(0, 6, size=200)
        v = effective_potential(defaults, t, x, mass=1.0)
        assert np.all(v >= b_magnitude(defaults, t, x) - 1e-15)

    def test_mass_scaling(self, defaults):
        t, x = 0.7, 1.9
        v1 = float(effective_potential(defaults, t, x, mass=1.0))
        v2 = float(effective_potential(defaults, t, x, mass=2.0))
        g = float(metric_g11_top(defaults, t, x))
        assert v1 - v2 == pytest.approx(g / 4.0, rel=1e-12)

    def test_periodicity(self, defaults, rng):
        t, x = rng.uniform(0, 5, size=2)
        base = float(effective_potential(defaults, t, x, mass=1.0))
        shifted = float(
            effective_potential(
                defaults, t + 3 * defaults.period, x - defaults.wavelength, mass=1.0
            )
        )
        assert shifted == pytest.approx(base, abs=1e-12)


class TestForces:
    def test_trivial_field_all_zero(self):
        params = FieldParams(alpha=0.0, nu=0.0, gamma=0.5)
        f = force_components(params, 0.9, 1.7, mass=1.0)
        assert f.e_field == pytest.approx(0.0, abs=1e-12)
        assert f.grad_eps == pytest.approx(0.0, abs=1e-12)
        assert f.grad_metric == pytest.approx(0.0, abs=1e-12)
        assert f.total == pytest.approx(0.0, abs=1e-12)

    def test_grad_eps_matches_fd_of_band_energy(self, defaults):
        t, x = 0.0, defaults.wavelength / 4.0
        h = 1e-6
        fd = -(
            float(b_magnitude(defaults, t, x + h)) - float(b_magnitude(defaults, t, x - h))
        ) / (2 * h)
        f = force_components(defaults, t, x, mass=1.0)
        assert f.grad_eps == pytest.approx(fd, abs=1e-8)

    def test_grad_metric_matches_fd_of_metric(self, defaults):
        t, x = 1.1, 0.6
        h = 1e-4
        fd = -(
            float(metric_g11_top(defaults, t, x + h))
            - float(metric_g11_top(defaults, t, x - h))
        ) / (2 * h * 2.0)
        f = force_components(defaults, t, x, mass=1.0)
        assert f.grad_metric == pytest.approx(fd, abs=1e-6)

    def test_total_is_exact_sum(self, defaults, rng):
        t = rng.uniform(0, 6, size=40)
        x = rng.uniform(0, 6, size=40)
        fg = force_grid(defaults, t, x, mass=1.0)
        np.testing.assert_array_equal(fg.total, fg.e_field + fg.grad_eps + fg.grad_metric)

    def test_curvature_force_dominates_correlation(self, defaults):
        n = 64
        t = (np.arange(n) + 0.5) * defaults.period / n
        x = (np.arange(n) + 0.5) * defaults.wavelength / n
        fg = force_grid(defaults, t[:, None], x[None, :], mass=1.0)
        total = fg.total.ravel()
        e = fg.e_field.ravel()
        corr = np.corrcoef(total, e)[0, 1]
        assert corr > 0.5

    def test_reflection_antisymmetry_of_flux(self):
        """Flipping the axial offset sign reverses the integrated curvature."""
        n = 96
        plus = FieldParams(gamma=0.5)
        minus = FieldParams(gamma=-0.5)
        t = (np.arange(n) + 0.5) * plus.period / n
        x = (np.arange(n) + 0.5) * plus.wavelength / n
        ep = electric_field(plus, t[:, None], x[None, :])
        em = electric_field(minus, t[:, None], x[None, :])
        assert float(np.sum(ep)) == pytest.approx(-float(np.sum(em)), abs=1e-12)

    def test_scalar_wrapper_matches_grid(self, defaults, rng):
        t = rng.uniform(0, 6, size=6)
        x = rng.uniform(0, 6, size=6)
        fg = force_grid(defaults, t, x, mass=1.3)
        for i in range(6):
            f = force_components(defaults, float(t[i]), float(x[i]), mass=1.3)
            assert f.e_field == pytest.approx(float(fg.e_field[i]), abs=1e-14)
            assert f.grad_eps == pytest.approx(float(fg.grad_eps[i]), abs=1e-14)
            # The metric-gradient stencil divides ULP-level kernel differences
            # between vectorized and scalar trig by 2h, so exact agreement is
            # not attainable there.
            assert f.grad_metric == pytest.approx(float(fg.grad_metric[i]), abs=1e-10)
            assert f.total == pytest.approx(float(fg.total[i]), abs=1e-10)
