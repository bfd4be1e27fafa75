import math

import numpy as np
import pytest

from composite_bosons.fock import SectorBasis, enumerate_sector
from composite_bosons.hamiltonian import (
    TermId,
    assemble_hamiltonian,
    build_term,
    two_body_element,
)
from composite_bosons.modespace import LowestK, TwoBodyTensor, mode_space
from composite_bosons.models import build_ring_model, random_mode_space

R2 = math.sqrt(2.0)


@pytest.fixture(scope="module")
def two_site():
    space = build_ring_model(2, 1.0, -4.0)
    spectrum = space.solve_composites(LowestK(1))
    return space, spectrum


@pytest.fixture(scope="module")
def random_model():
    space = random_mode_space(3, seed=20240, attraction=(40.0, 55.0))
    spectrum = space.solve_composites(LowestK(2))
    return space, spectrum


def test_two_body_element_contact():
    t4 = np.zeros((2, 2, 2, 2))
    t4[1, 1, 1, 1] = -3.5
    tensor = TwoBodyTensor(t4)
    assert two_body_element(tensor, 1, 1, 1, 1) == -3.5


def test_two_body_element_exchange_symmetry(random_model):
    space, _ = random_model
    t = space.two_body
    m = space.n_modes
    for m_i in range(m):
        for n_i in range(m):
            for p_i in range(m):
                for q_i in range(m):
                    assert two_body_element(t, m_i, n_i, p_i, q_i) == pytest.approx(
                        two_body_element(t, n_i, m_i, q_i, p_i), abs=1e-14
                    )


def test_two_body_element_zero_tensor():
    tensor = TwoBodyTensor(np.zeros((2, 2, 2, 2)))
    for idx in np.ndindex(2, 2, 2, 2):
        assert two_body_element(tensor, *idx) == 0.0


def test_two_body_element_range_check():
    tensor = TwoBodyTensor(np.zeros((2, 2, 2, 2)))
    with pytest.raises(IndexError):
        two_body_element(tensor, 0, 0, 0, 2)


def test_two_body_element_matches_slot_normalization(random_model):
    # the dedicated accessor and the generic contraction agree
    from composite_bosons.algebra import Atom, FormalProduct, TwoBody, labeled_matrix_element

    space, spectrum = random_model
    m = space.n_modes
    for m_i, n_i, p_i, q_i in [(0, 1, 2, 0), (1, 1, 0, 2), (2, 0, 1, 1)]:
        via_contraction = labeled_matrix_element(
            FormalProduct(1.0, (Atom(m_i, 1), Atom(n_i, 2))),
            (TwoBody(1, 2),),
            FormalProduct(1.0, (Atom(p_i, 2), Atom(q_i, 1))),
            space,
            spectrum,
        )
        assert two_body_element(space.two_body, m_i, n_i, p_i, q_i) == pytest.approx(
            via_contraction, abs=1e-14
        )


def test_ss_single_particle_block(random_model):
    space, spectrum = random_model
    basis = enumerate_sector(1, space.n_modes, spectrum.n_composites)
    block = build_term(TermId.SS, basis, space, spectrum).to_dense()
    assert np.max(np.abs(block - space.one_body.mat)) <= 1e-12


def test_cc_single_molecule_diagonal(two_site):
    space, spectrum = two_site
    basis = enumerate_sector(2, space.n_modes, spectrum.n_composites)
    cc = build_term(TermId.CC, basis, space, spectrum).to_dense()
    j = [i for i, s in enumerate(basis.states) if s.n_molecules == 1][0]
    assert cc[j, j] == pytest.approx(spectrum.energies[0], abs=1e-12)
    assert np.max(np.abs(np.delete(np.delete(cc, j, 0), j, 1))) == 0.0


def test_css_element_double_occupation(two_site):
    # <molecule b | CSS | two atoms in mode p> reduces to eps_b * c_b[p, p]
    space, spectrum = two_site
    basis = enumerate_sector(2, space.n_modes, spectrum.n_composites)
    css = build_term(TermId.CSS, basis, space, spectrum).to_dense()
    states = list(basis.states)
    i_mol = states.index(next(s for s in states if s.n_molecules == 1))
    for p in range(space.n_modes):
        atoms = [0, 0]
        atoms[p] = 2
        j = states.index(next(s for s in states if s.atoms == tuple(atoms)))
        want = spectrum.energies[0] * spectrum.coefficients[0, p, p]
        assert css[i_mol, j] == pytest.approx(want, abs=1e-12)


def test_assemble_vacuum_and_single(random_model):
    space, spectrum = random_model
    b0 = enumerate_sector(0, space.n_modes, spectrum.n_composites)
    h0 = assemble_hamiltonian(b0, space, spectrum)
    assert h0.total.to_dense().shape == (1, 1)
    assert h0.total.nnz == 0

    b1 = enumerate_sector(1, space.n_modes, spectrum.n_composites)
    h1 = assemble_hamiltonian(b1, space, spectrum)
    ss = h1.term(TermId.SS).to_dense()
    assert np.max(np.abs(h1.total.to_dense() - ss)) == 0.0
    for term in TermId:
        if term is not TermId.SS:
            assert h1.term(term).nnz == 0


def test_two_site_n2_assembled_matrix(two_site):
    # analytic form: atom block is the pair Hamiltonian in the mode basis,
    # the molecule couples through eps0 * (bound eigenvector), diagonal eps0
    space, spectrum = two_site
    basis = enumerate_sector(2, 2, 1)
    ham = assemble_hamiltonian(basis, space, spectrum)
    eps0 = -(2.0 + 2.0 * R2)
    x, y = math.cos(math.pi / 8.0), math.sin(math.pi / 8.0)
    expected = np.array(
        [
            [-4.0, 0.0, -2.0, eps0 * x],
            [0.0, -4.0, 0.0, 0.0],
            [-2.0, 0.0, 0.0, eps0 * y],
            [eps0 * x, 0.0, eps0 * y, eps0],
        ]
    )
    assert np.max(np.abs(ham.total.to_dense() - expected)) <= 1e-12


def test_atom_block_equals_pair_hamiltonian(two_site):
    space, spectrum = two_site
    basis = enumerate_sector(2, 2, 1)
    ham = assemble_hamiltonian(basis, space, spectrum)
    atom_block = (
        ham.term(TermId.SS).to_dense() + ham.term(TermId.SSSS).to_dense()
    )[:3, :3]
    assert np.max(np.abs(atom_block - space.pair_hamiltonian().mat)) <= 1e-12


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_hermiticity_and_adjoint_pairing(random_model, n):
    space, spectrum = random_model
    basis = enumerate_sector(n, space.n_modes, spectrum.n_composites)
    ham = assemble_hamiltonian(basis, space, spectrum)
    total = ham.total.to_dense()
    assert np.max(np.abs(total - total.T)) <= 1e-12
    css = ham.term(TermId.CSS).to_dense()
    ssc = ham.term(TermId.SSC).to_dense()
    assert np.array_equal(css, ssc.T)


def test_constituent_number_conservation(random_model):
    space, spectrum = random_model
    b2 = enumerate_sector(2, space.n_modes, spectrum.n_composites)
    b3 = enumerate_sector(3, space.n_modes, spectrum.n_composites)
    union = SectorBasis.union(b2, b3)
    for term in TermId:
        block = build_term(term, union, space, spectrum).to_dense()
        cross = block[: b2.dim, b2.dim :]
        cross2 = block[b2.dim :, : b2.dim]
        assert np.all(cross == 0.0)
        assert np.all(cross2 == 0.0)


def test_interaction_linearity(random_model):
    # doubling the two-body tensor (same composites) exactly doubles the
    # interaction-driven parts of every term
    space, spectrum = random_model
    doubled = mode_space(space.one_body.mat, 2.0 * space.two_body.t4)
    zeroed = mode_space(space.one_body.mat, np.zeros_like(space.two_body.t4))
    basis = enumerate_sector(3, space.n_modes, spectrum.n_composites)
    for term in TermId:
        base = build_term(term, basis, space, spectrum).to_dense()
        two = build_term(term, basis, doubled, spectrum).to_dense()
        none = build_term(term, basis, zeroed, spectrum).to_dense()
        assert np.max(np.abs((two - none) - 2.0 * (base - none))) <= 1e-10


def test_build_term_rejects_mismatched_spectrum(two_site, random_model):
    space, _ = two_site
    _, spectrum3 = random_model
    basis = enumerate_sector(2, 2, 1)
    with pytest.raises(ValueError, match="modes"):
        build_term(TermId.SS, basis, space, spectrum3)
