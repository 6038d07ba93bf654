"""Spin representations, the dressed eigenproblem, and the closed-form state."""

import numpy as np
import pytest

from synthflux.errors import DegeneratePointError, PolePatchError
from synthflux.field import BVector, FieldParams, sample_B
from synthflux.spin import (
    HermitianField,
    band_eigensystem_grid,
    dressed_state_spin1,
    eigensystem_at,
    hamiltonian_at,
    hamiltonian_grid,
    spin_generators,
)


def random_b(rng, scale=2.0) -> np.ndarray:
    while True:
        b = rng.uniform(-scale, scale, size=3)
        if np.linalg.norm(b) > 0.1:
            return b


class TestSpinGenerators:
    @pytest.mark.parametrize("two_j", range(1, 9))
    def test_generator_invariants(self, two_j):
        rep = spin_generators(two_j)
        j = two_j / 2.0
        gens = (rep.j1, rep.j2, rep.j3)
        for g in gens:
            assert np.max(np.abs(g - g.conj().T)) < 1e-12
        for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            comm = gens[a] @ gens[b] - gens[b] @ gens[a]
            assert np.linalg.norm(comm - 1j * gens[c]) < 1e-10
        casimir = sum(g @ g for g in gens)
        np.testing.assert_allclose(casimir, j * (j + 1) * np.eye(rep.dim), atol=1e-10)
        np.testing.assert_allclose(np.diag(rep.j3).real, j - np.arange(rep.dim))

    def test_spin_half_is_half_pauli(self):
        rep = spin_generators(1)
        np.testing.assert_allclose(rep.j1, [[0, 0.5], [0.5, 0]], atol=1e-15)
        np.testing.assert_allclose(rep.j2, [[0, -0.5j], [0.5j, 0]], atol=1e-15)
        np.testing.assert_allclose(rep.j3, [[0.5, 0], [0, -0.5]], atol=1e-15)

    def test_spin_one_matches_three_level_convention(self):
        rep = spin_generators(2)
        np.testing.assert_allclose(np.diag(rep.j3), [1, 0, -1], atol=1e-15)
        lowering = rep.j1 - 1j * rep.j2
        expected = np.zeros((3, 3), dtype=complex)
        expected[1, 0] = np.sqrt(2.0)
        expected[2, 1] = np.sqrt(2.0)
        np.testing.assert_allclose(lowering, expected, atol=1e-15)

    def test_spin_two(self):
        rep = spin_generators(4)
        np.testing.assert_allclose(np.diag(rep.j3), [2, 1, 0, -1, -2], atol=1e-15)
        casimir = rep.j1 @ rep.j1 + rep.j2 @ rep.j2 + rep.j3 @ rep.j3
        np.testing.assert_allclose(casimir, 6.0 * np.eye(5), atol=1e-12)

    @pytest.mark.parametrize("two_j", [0, -1])
    def test_rejects_trivial_representation(self, two_j):
        with pytest.raises(ValueError):
            spin_generators(two_j)

    def test_rejects_non_integer(self):
        with pytest.raises(ValueError):
            spin_generators(1.5)

    def test_generators_immutable(self):
        rep = spin_generators(2)
        with pytest.raises(ValueError):
            rep.j3[0, 0] = 5.0


class TestHamiltonian:
    def test_axis_field_is_diagonal(self):
        rep = spin_generators(2)
        h = hamiltonian_grid(rep, np.array([0.0, 0.0, 2.0]))
        np.testing.assert_allclose(h, np.diag([2.0, 0.0, -2.0]), atol=1e-15)

    def test_explicit_spin1_matrix_at_origin(self, defaults):
        field = HermitianField.spin1(defaults)
        h = hamiltonian_at(field, 0.0, 0.0)
        # B = (1, 0, 1.5): diagonal from J3, 1/sqrt(2) couplings from J1.
        s = 1.0 / np.sqrt(2.0)
        expected = np.array(
            [[1.5, s, 0.0], [s, 0.0, s], [0.0, s, -1.5]], dtype=complex
        )
        np.testing.assert_allclose(h, expected, atol=1e-15)

    def test_hermitian_everywhere(self, defaults, rng):
        field = HermitianField.spin1(defaults)
        for _ in range(20):
            t, x = rng.uniform(0, 7, size=2)
            h = hamiltonian_at(field, t, x)
            np.testing.assert_allclose(h, h.conj().T, atol=1e-14)

    def test_spin_half_unit_field_eigenvalues(self, rng):
        rep = spin_generators(1)
        b = random_b(rng)
        b /= np.linalg.norm(b)
        w = np.linalg.eigvalsh(hamiltonian_grid(rep, b))
        np.testing.assert_allclose(w, [-0.5, 0.5], atol=1e-12)


class TestEigensystem:
    def test_axis_field_bands(self, defaults):
        field = HermitianField.spin1(FieldParams(alpha=0.0, nu=0.0, gamma=2.0))
        bands = eigensystem_at(field, 0.3, 0.4)
        assert [b.band_index for b in bands] == [1.0, 0.0, -1.0]
        np.testing.assert_allclose([b.energy for b in bands], [2.0, 0.0, -2.0], atol=1e-12)
        np.testing.assert_allclose(bands[0].state, [1, 0, 0], atol=1e-12)

    def test_spin1_spectral_structure(self, defaults, rng):
        field = HermitianField.spin1(defaults)
        for _ in range(200):
            t, x = rng.uniform(-10, 10, size=2)
            mag = sample_B(defaults, t, x).magnitude
            if mag < 0.1:
                continue
            bands = eigensystem_at(field, t, x)
            energies = np.array([b.energy for b in bands])
            np.testing.assert_allclose(energies, [mag, 0.0, -mag], atol=1e-10 * mag)
            states = np.column_stack([b.state for b in bands])
            np.testing.assert_allclose(states.conj().T @ states, np.eye(3), atol=1e-12)
            h = hamiltonian_at(field, t, x)
            for b in bands:
                residual = np.linalg.norm(h @ b.state - b.energy * b.state)
                assert residual <= 1e-10 * mag

    @pytest.mark.parametrize("two_j", [1, 2, 3, 4, 5])
    def test_spin_j_energies_are_m_times_magnitude(self, two_j, defaults, rng):
        field = HermitianField(spin_generators(two_j), defaults)
        j = two_j / 2.0
        t, x = rng.uniform(0, 6, size=2)
        mag = sample_B(defaults, t, x).magnitude
        bands = eigensystem_at(field, t, x)
        expected = (j - np.arange(two_j + 1)) * mag
        np.testing.assert_allclose([b.energy for b in bands], expected, atol=1e-10 * mag)

    def test_phase_convention_deterministic(self, defaults, rng):
        field = HermitianField.spin1(defaults)
        t, x = rng.uniform(0, 6, size=2)
        for band in eigensystem_at(field, t, x):
            i = int(np.argmax(np.abs(band.state)))
            assert band.state[i].imag == pytest.approx(0.0, abs=1e-14)
            assert band.state[i].real > 0

    def test_degenerate_point_raises(self):
        field = HermitianField.spin1(FieldParams(gamma=1.0))
        with pytest.raises(DegeneratePointError):
            eigensystem_at(field, np.pi, np.pi / 2)

    def test_batched_grid_matches_pointwise(self, defaults, rng):
        field = HermitianField.spin1(defaults)
        t = rng.uniform(0, 6, size=4)
        x = rng.uniform(0, 6, size=3)
        from synthflux.field import b_components

        energies, states = band_eigensystem_grid(field.rep, b_components(defaults, t[:, None], x[None, :]))
        for i in range(4):
            for j in range(3):
                bands = eigensystem_at(field, t[i], x[j])
                np.testing.assert_allclose(
                    energies[i, j], [b.energy for b in bands], atol=1e-12
                )
                for col, band in enumerate(bands):
                    overlap = abs(np.vdot(states[i, j, :, col], band.state))
                    assert overlap == pytest.approx(1.0, abs=1e-12)


class TestDressedState:
    def test_north_pole(self):
        state = dressed_state_spin1(BVector(0.0, 0.0, 1.0))
        np.testing.assert_allclose(state.state, [1, 0, 0], atol=1e-15)
        assert state.energy == pytest.approx(1.0)
        assert state.band_index == 1.0

    def test_equator(self):
        state = dressed_state_spin1(BVector(1.0, 0.0, 0.0))
        np.testing.assert_allclose(state.state, np.array([1.0, np.sqrt(2.0), 1.0]) / 2.0, atol=1e-15)

    def test_is_top_band_eigenvector(self, defaults):
        b = BVector(1.0, 0.0, 1.5)
        state = dressed_state_spin1(b)
        field = HermitianField.spin1(defaults)
        h = hamiltonian_grid(field.rep, b.as_array())
        residual = np.linalg.norm(h @ state.state - b.magnitude * state.state)
        assert residual <= 1e-10 * b.magnitude
        assert np.linalg.norm(state.state) == pytest.approx(1.0, abs=1e-12)

    def test_matches_eigensolver_up_to_phase(self, defaults, rng):
        field = HermitianField.spin1(defaults)
        checked = 0
        while checked < 300:
            b = random_b(rng)
            mag = np.linalg.norm(b)
            if mag + b[2] <= 1e-3 * mag:
                continue
            state = dressed_state_spin1(BVector(*b))
            _, vecs = band_eigensystem_grid(field.rep, b)
            overlap = abs(np.vdot(state.state, vecs[:, 0]))
            assert overlap == pytest.approx(1.0, abs=1e-10)
            checked += 1

    def test_pole_raises(self):
        with pytest.raises(PolePatchError):
            dressed_state_spin1(BVector(0.0, 0.0, -1.0))
        with pytest.raises(PolePatchError):
            dressed_state_spin1(BVector(1e-12, 0.0, -1.0))

    def test_zero_field_raises(self):
        with pytest.raises(DegeneratePointError):
            dressed_state_spin1(BVector(0.0, 0.0, 0.0))


class TestHermitianField:
    def test_band_index_to_column(self, defaults):
        field = HermitianField.spin1(defaults)
        assert field.band_index_to_column(1.0) == 0
        assert field.band_index_to_column(0.0) == 1
        assert field.band_index_to_column(-1.0) == 2
        with pytest.raises(ValueError):
            field.band_index_to_column(0.5)
        with pytest.raises(ValueError):
            field.band_index_to_column(2.0)
