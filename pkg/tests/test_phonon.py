import numpy as np
import pytest
import scipy.constants as sc
from hypothesis import given, settings, strategies as st

from hbndb import phonon
from hbndb.errors import (
    AmbiguousMappingError,
    CoverageError,
    StructureMismatchError,
    ValidationError,
)


def make_pair(displacement, masses=(1.0, 12.011, 14.007, 10.811), cell=12.0):
    n = len(masses)
    rng = np.random.default_rng(3)
    ground = rng.uniform(1.0, cell - 1.0, size=(n, 3))
    return phonon.GeometryPair(
        species=("H", "C", "N", "B")[:n],
        masses=np.asarray(masses),
        ground_positions=ground,
        excited_positions=ground + np.asarray(displacement),
        lattice=np.eye(3) * cell,
    )


def complete_modes(n_atoms, seed=0, energies=None):
    n = 3 * n_atoms
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    if energies is None:
        energies = np.linspace(10.0, 180.0, n)
    return phonon.PhononModeSet(energies_mev=energies,
                                eigenvectors=q.reshape(n, n_atoms, 3))


class TestConfigurationCoordinates:
    def test_identity_geometries_give_zero(self):
        pair = make_pair(np.zeros((4, 3)))
        modes = complete_modes(4)
        q_k, total_q = phonon.configuration_coordinates(pair, modes)
        assert np.allclose(q_k, 0.0)
        assert total_q == 0.0

    def test_single_displaced_atom_along_mode(self):
        # one atom of unit mass moved 0.1 A along x, eigenvector entirely on it
        pair = make_pair(np.array([[0.1, 0, 0], [0, 0, 0], [0, 0, 0], [0, 0, 0]]),
                         masses=(1.0, 12.0, 14.0, 11.0))
        vecs = np.zeros((1, 4, 3))
        vecs[0, 0, 0] = 1.0
        modes = phonon.PhononModeSet(energies_mev=np.array([100.0]),
                                     eigenvectors=vecs)
        q_k, total_q = phonon.configuration_coordinates(pair, modes)
        assert q_k[0] == pytest.approx(0.1, abs=1e-15)
        assert total_q == pytest.approx(0.1, abs=1e-15)

    def test_matches_brute_force_triple_sum(self):
        rng = np.random.default_rng(5)
        disp = rng.uniform(-0.05, 0.05, size=(4, 3))
        pair = make_pair(disp)
        modes = complete_modes(4, seed=9)
        q_k, total_q = phonon.configuration_coordinates(pair, modes)

        # independent brute-force evaluation of the triple sum
        expect = np.zeros(modes.mode_count)
        for k in range(modes.mode_count):
            acc = 0.0
            for a in range(4):
                for i in range(3):
                    acc += (np.sqrt(pair.masses[a]) * disp[a, i]
                            * modes.eigenvectors[k, a, i])
            expect[k] = acc
        assert np.allclose(q_k, expect, atol=1e-12)

        expect_q = np.sqrt(sum(pair.masses[a] * disp[a, i] ** 2
                               for a in range(4) for i in range(3)))
        assert total_q == pytest.approx(expect_q, rel=1e-12)

    def test_minimum_image_wrapping(self):
        pair = make_pair(np.zeros((4, 3)))
        shifted = phonon.GeometryPair(
            species=pair.species, masses=pair.masses,
            ground_positions=pair.ground_positions,
            excited_positions=pair.excited_positions + np.array([12.0, 0, 0]),
            lattice=pair.lattice)
        assert np.allclose(shifted.displacements(), 0.0, atol=1e-12)

    def test_ambiguous_displacement_rejected(self):
        # oblique cell: a wrapped displacement along a1+a2 keeps a Cartesian
        # component larger than half the shortest lattice vector
        lattice = np.array([[12.0, 0.0, 0.0], [6.0, 10.0, 0.0], [0.0, 0.0, 12.0]])
        ground = np.array([[1.0, 1.0, 1.0], [3.0, 2.0, 2.0],
                           [5.0, 3.0, 3.0], [7.0, 4.0, 4.0]])
        disp = np.zeros((4, 3))
        disp[0] = 0.49 * (lattice[0] + lattice[1])
        pair = phonon.GeometryPair(
            species=("H", "C", "N", "B"),
            masses=np.array([1.0, 12.0, 14.0, 11.0]),
            ground_positions=ground,
            excited_positions=ground + disp,
            lattice=lattice)
        with pytest.raises(AmbiguousMappingError):
            pair.displacements()

    def test_atom_count_mismatch(self):
        pair = make_pair(np.zeros((4, 3)))
        with pytest.raises(StructureMismatchError):
            phonon.configuration_coordinates(pair, complete_modes(5))

    def test_completeness_mode_sum_equals_direct_q(self):
        rng = np.random.default_rng(17)
        disp = rng.uniform(-0.08, 0.08, size=(4, 3))
        pair = make_pair(disp)
        modes = complete_modes(4, seed=23)
        q_k, total_q = phonon.configuration_coordinates(pair, modes)
        assert np.sqrt(np.sum(q_k**2)) == pytest.approx(total_q, rel=1e-8)

    def test_linearity_in_displacement(self):
        rng = np.random.default_rng(29)
        disp = rng.uniform(-0.02, 0.02, size=(4, 3))
        modes = complete_modes(4, seed=2)
        q1, _ = phonon.configuration_coordinates(make_pair(disp), modes)
        q3, _ = phonon.configuration_coordinates(make_pair(3.0 * disp), modes)
        assert np.allclose(q3, 3.0 * q1, rtol=1e-9, atol=1e-12)
        s1 = phonon.partial_hr(modes.energies_mev, q1)
        s3 = phonon.partial_hr(modes.energies_mev, q3)
        assert np.allclose(s3, 9.0 * s1, rtol=1e-9)


class TestPartialHr:
    def test_zero_displacement(self):
        assert phonon.partial_hr(100.0, 0.0) == 0.0

    def test_si_conversion_oracle(self):
        # convert (meV, amu A^2) to SI and apply s = omega q^2 / (2 hbar)
        omega = 100e-3 * sc.e / sc.hbar          # rad/s
        q_sq = 1.0 * sc.physical_constants["atomic mass constant"][0] * 1e-20
        expected = omega * q_sq / (2.0 * sc.hbar)
        assert phonon.partial_hr(100.0, 1.0) == pytest.approx(expected, rel=1e-6)
        assert phonon.partial_hr(100.0, 1.0) == pytest.approx(11.96, rel=2e-4)

    def test_inverse_point(self):
        assert phonon.partial_hr(100.0, 0.2892) == pytest.approx(1.000, rel=1e-3)

    def test_negative_frequency_rejected(self):
        with pytest.raises(ValidationError):
            phonon.partial_hr(-1.0, 0.5)


class TestDwFactor:
    def test_trivial_points(self):
        assert phonon.dw_factor(0.0) == 1.0
        assert phonon.dw_factor(np.log(2.0)) == pytest.approx(0.5, rel=1e-12)
        assert phonon.dw_factor(3.5) == pytest.approx(0.030197, rel=1e-4)

    def test_negative_rejected(self):
        with pytest.raises(ValidationError):
            phonon.dw_factor(-0.1)

    @given(s1=st.floats(0.0, 20.0), s2=st.floats(0.0, 20.0))
    @settings(max_examples=50, deadline=None)
    def test_product_rule_and_monotonicity(self, s1, s2):
        assert phonon.dw_factor(s1 + s2) == pytest.approx(
            phonon.dw_factor(s1) * phonon.dw_factor(s2), rel=1e-12)
        if s1 < s2:
            assert phonon.dw_factor(s1) >= phonon.dw_factor(s2)


class TestSpectralDensity:
    def decomp(self, weights, energies):
        weights = np.asarray(weights, dtype=float)
        energies = np.asarray(energies, dtype=float)
        return phonon.HrDecomposition(
            partial_hr=weights, mode_q=np.sqrt(weights),
            energies_mev=energies, total_hr=float(weights.sum()), total_q=1.0)

    def test_single_mode_normalization(self):
        spec = phonon.spectral_density(self.decomp([1.0], [80.0]),
                                       smearing_sigma_mev=1.0)
        assert spec.integral() == pytest.approx(1.0, abs=1e-3)

    def test_two_mode_additivity(self):
        spec = phonon.spectral_density(self.decomp([0.5, 1.5], [60.0, 120.0]),
                                       smearing_sigma_mev=2.0)
        assert spec.integral() == pytest.approx(2.0, abs=2e-3)

    def test_peak_position(self):
        spec = phonon.spectral_density(self.decomp([1.0], [100.0]),
                                       smearing_sigma_mev=3.0)
        assert spec.max_position() == pytest.approx(0.100, abs=0.01 * 3e-3)

    def test_narrow_grid_rejected(self):
        with pytest.raises(CoverageError):
            phonon.spectral_density(self.decomp([1.0], [100.0]),
                                    smearing_sigma_mev=3.0,
                                    grid_ev=np.linspace(0.0, 0.09, 200))

    def test_integral_matches_total_for_any_sigma(self):
        rng = np.random.default_rng(31)
        weights = rng.uniform(0.01, 0.8, 6)
        energies = rng.uniform(20.0, 190.0, 6)
        for sigma in (0.7, 3.0, 9.0):
            spec = phonon.spectral_density(self.decomp(weights, energies),
                                           smearing_sigma_mev=sigma)
            assert spec.integral() == pytest.approx(float(weights.sum()),
                                                    rel=1.5e-3)


class TestHrDecomposition:
    def test_frequency_floor_excludes_soft_modes(self):
        rng = np.random.default_rng(41)
        disp = rng.uniform(-0.05, 0.05, size=(4, 3))
        pair = make_pair(disp)
        energies = np.concatenate([[0.0, 0.2, 0.4], np.linspace(10, 170, 9)])
        modes = complete_modes(4, seed=4, energies=energies)
        decomp = phonon.hr_decomposition(pair, modes)
        assert decomp.excluded_modes == (0, 1, 2)
        assert np.all(decomp.partial_hr[:3] == 0.0)
        assert decomp.total_hr == pytest.approx(float(decomp.partial_hr.sum()),
                                                rel=1e-12)
        assert decomp.dw_factor == pytest.approx(np.exp(-decomp.total_hr),
                                                 rel=1e-12)
        # direct total q stays valid; the mode-sum q matches for complete bases
        assert decomp.mode_sum_q == pytest.approx(decomp.total_q, rel=1e-8)


class TestModeSetValidation:
    def test_negative_energy_rejected(self):
        vecs = np.zeros((1, 2, 3))
        vecs[0, 0, 0] = 1.0
        with pytest.raises(ValidationError):
            phonon.PhononModeSet(energies_mev=np.array([-5.0]),
                                 eigenvectors=vecs)

    def test_unnormalized_eigenvector_rejected(self):
        vecs = np.zeros((1, 2, 3))
        vecs[0, 0, 0] = 0.7
        with pytest.raises(ValidationError):
            phonon.PhononModeSet(energies_mev=np.array([50.0]),
                                 eigenvectors=vecs)

    def test_too_many_modes_rejected(self):
        vecs = np.zeros((7, 2, 3))
        vecs[:, 0, 0] = 1.0
        with pytest.raises(ValidationError):
            phonon.PhononModeSet(energies_mev=np.full(7, 10.0),
                                 eigenvectors=vecs)
