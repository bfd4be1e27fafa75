"""Second-quantized Hamiltonian terms as sparse sector-block matrices.

Seven normal-ordered operator strings cover every process with at most two
entities (atoms or molecules) on each side:

====== =======================================================
SS     atom one-body hopping/energy
SSSS   atom-atom scattering
CC     molecule one-body energy
CSS    two atoms -> one molecule (rearrangement)
SSC    one molecule -> two atoms (adjoint rearrangement)
SCSC   atom-molecule scattering, direct plus two exchange kets
CCCC   molecule-molecule scattering, direct plus two exchange kets
====== =======================================================

Each term is applied to every ket basis state by explicit ladder actions;
every bra-ket coefficient is an exact few-particle contraction evaluated
through :mod:`composite_bosons.algebra`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

from .algebra import (
    Atom,
    ElementEngine,
    FormalProduct,
    OneBody,
    Pair,
    TwoBody,
    pair_interaction_ops,
)
from .fock import OccupationState, SectorBasis, apply_ladder
from .modespace import CompositeSpectrum, ModeSpace, TwoBodyTensor
from .numerics import SparseMatrix

HERMITICITY_TOL = 1e-12

_SQRT_HALF = 1.0 / math.sqrt(2.0)


class TermId(enum.Enum):
    SS = "SS"
    SSSS = "SSSS"
    CC = "CC"
    CSS = "CSS"
    SSC = "SSC"
    SCSC = "SCSC"
    CCCC = "CCCC"


TERM_PREFACTOR: Mapping[TermId, float] = {
    TermId.SS: 1.0,
    TermId.SSSS: 0.5,
    TermId.CC: 1.0,
    TermId.CSS: _SQRT_HALF,
    TermId.SSC: _SQRT_HALF,
    TermId.SCSC: 1.0,
    TermId.CCCC: 0.5,
}

_H2 = pair_interaction_ops(1, 2)
_H3 = (OneBody(1), OneBody(2), OneBody(3), TwoBody(1, 2), TwoBody(1, 3), TwoBody(2, 3))
_H4 = (
    OneBody(1),
    OneBody(2),
    OneBody(3),
    OneBody(4),
    TwoBody(1, 2),
    TwoBody(1, 3),
    TwoBody(1, 4),
    TwoBody(2, 3),
    TwoBody(2, 4),
    TwoBody(3, 4),
)
_T_CROSS_3 = (TwoBody(1, 2), TwoBody(1, 3))
_T_CROSS_4 = (TwoBody(1, 3), TwoBody(1, 4), TwoBody(2, 3), TwoBody(2, 4))


def two_body_element(two_body: TwoBodyTensor, m: int, n: int, p: int, q: int) -> float:
    """Atom-atom scattering coefficient with the ket in swapped slot order.

    The ket assigns mode p to particle 2 and q to particle 1, so the fixed
    slot convention of the tensor gives ``T4[m, n, q, p]``.
    """
    t4 = two_body.t4
    mm = t4.shape[0]
    for idx in (m, n, p, q):
        if not 0 <= idx < mm:
            raise IndexError(f"mode index {idx} out of range [0, {mm})")
    return float(t4[m, n, q, p])


# ---------------------------------------------------------------------------
# Bra-ket coefficients, each with the literal label structure of its term.


def _coeff_ss(eng: ElementEngine, n: int, m: int) -> float:
    return eng.element(
        FormalProduct(1.0, (Atom(n, 1),)),
        (OneBody(1),),
        FormalProduct(1.0, (Atom(m, 1),)),
    )


def _coeff_ssss(eng: ElementEngine, m: int, n: int, p: int, q: int) -> float:
    # ket modes sit in swapped slots: p on particle 2, q on particle 1
    return eng.element(
        FormalProduct(1.0, (Atom(m, 1), Atom(n, 2))),
        (TwoBody(1, 2),),
        FormalProduct(1.0, (Atom(p, 2), Atom(q, 1))),
    )


def _coeff_cc(eng: ElementEngine, a: int, b: int) -> float:
    return eng.element(
        FormalProduct(1.0, (Pair(a, (1, 2)),)),
        _H2,
        FormalProduct(1.0, (Pair(b, (1, 2)),)),
    )


def _coeff_css(eng: ElementEngine, a: int, m: int, n: int) -> float:
    return eng.element(
        FormalProduct(1.0, (Pair(a, (1, 2)),)),
        _H2,
        FormalProduct(1.0, (Atom(m, 2), Atom(n, 1))),
    )


def _coeff_ssc(eng: ElementEngine, m: int, n: int, a: int) -> float:
    return eng.element(
        FormalProduct(1.0, (Atom(m, 1), Atom(n, 2))),
        _H2,
        FormalProduct(1.0, (Pair(a, (1, 2)),)),
    )


def _coeff_scsc(eng: ElementEngine, m: int, a: int, b: int, n: int) -> float:
    bra = FormalProduct(1.0, (Atom(m, 1), Pair(a, (2, 3))))
    direct = eng.element(bra, _T_CROSS_3, FormalProduct(1.0, (Pair(b, (2, 3)), Atom(n, 1))))
    exch_1 = eng.element(bra, _H3, FormalProduct(1.0, (Pair(b, (1, 3)), Atom(n, 2))))
    exch_2 = eng.element(bra, _H3, FormalProduct(1.0, (Pair(b, (1, 2)), Atom(n, 3))))
    return direct + exch_1 + exch_2


def _coeff_cccc(eng: ElementEngine, a: int, b: int, t: int, u: int) -> float:
    bra = FormalProduct(1.0, (Pair(a, (1, 2)), Pair(b, (3, 4))))
    direct = eng.element(
        bra, _T_CROSS_4, FormalProduct(1.0, (Pair(t, (3, 4)), Pair(u, (1, 2))))
    )
    exch_1 = eng.element(
        bra, _H4, FormalProduct(1.0, (Pair(t, (2, 4)), Pair(u, (1, 3))))
    )
    exch_2 = eng.element(
        bra, _H4, FormalProduct(1.0, (Pair(t, (2, 3)), Pair(u, (1, 4))))
    )
    return direct + exch_1 + exch_2


# ---------------------------------------------------------------------------
# Ladder-path evaluation.


def _walk(
    state: OccupationState,
    steps: list[tuple[str, int, str]],
) -> tuple[float, OccupationState] | None:
    """Apply ladder steps right-to-left, returning (coefficient, image).

    The coefficient multiplies the sqrt factors in sorted order so that a
    path and its reverse produce bitwise-equal products.
    """
    factors: list[float] = []
    current = state
    for species, index, direction in steps:
        coeff, nxt = apply_ladder(current, species, index, direction)  # type: ignore[arg-type]
        if nxt is None:
            return None
        factors.append(coeff)
        current = nxt
    product = 1.0
    for f in sorted(factors):
        product *= f
    return product, current


def _occupied(counts: tuple[int, ...]) -> list[int]:
    return [i for i, n in enumerate(counts) if n > 0]


def _term_contributions(
    term: TermId,
    ket: OccupationState,
    space: ModeSpace,
    spectrum: CompositeSpectrum,
    eng: ElementEngine,
) -> Iterator[tuple[OccupationState, float]]:
    """Yield (bra state, value) pairs for one term applied to one ket."""
    n_modes = space.n_modes
    n_comp = spectrum.n_composites
    pref = TERM_PREFACTOR[term]

    if term is TermId.SS:
        for m in _occupied(ket.atoms):
            for n in range(n_modes):
                coeff = _coeff_ss(eng, n, m)
                if coeff == 0.0:
                    continue
                walked = _walk(ket, [("atom", m, "annihilate"), ("atom", n, "create")])
                if walked:
                    ladder, bra = walked
                    yield bra, pref * coeff * ladder

    elif term is TermId.SSSS:
        for q in _occupied(ket.atoms):
            _, after_q = apply_ladder(ket, "atom", q, "annihilate")
            assert after_q is not None
            for p in _occupied(after_q.atoms):
                for m in range(n_modes):
                    for n in range(n_modes):
                        coeff = _coeff_ssss(eng, m, n, p, q)
                        if coeff == 0.0:
                            continue
                        walked = _walk(
                            ket,
                            [
                                ("atom", q, "annihilate"),
                                ("atom", p, "annihilate"),
                                ("atom", n, "create"),
                                ("atom", m, "create"),
                            ],
                        )
                        if walked:
                            ladder, bra = walked
                            yield bra, pref * coeff * ladder

    elif term is TermId.CC:
        for b in _occupied(ket.molecules):
            for a in range(n_comp):
                coeff = _coeff_cc(eng, a, b)
                if coeff == 0.0:
                    continue
                walked = _walk(
                    ket, [("molecule", b, "annihilate"), ("molecule", a, "create")]
                )
                if walked:
                    ladder, bra = walked
                    yield bra, pref * coeff * ladder

    elif term is TermId.CSS:
        for n in _occupied(ket.atoms):
            _, after_n = apply_ladder(ket, "atom", n, "annihilate")
            assert after_n is not None
            for m in _occupied(after_n.atoms):
                for a in range(n_comp):
                    coeff = _coeff_css(eng, a, m, n)
                    if coeff == 0.0:
                        continue
                    walked = _walk(
                        ket,
                        [
                            ("atom", n, "annihilate"),
                            ("atom", m, "annihilate"),
                            ("molecule", a, "create"),
                        ],
                    )
                    if walked:
                        ladder, bra = walked
                        yield bra, pref * coeff * ladder

    elif term is TermId.SSC:
        for a in _occupied(ket.molecules):
            for m in range(n_modes):
                for n in range(n_modes):
                    coeff = _coeff_ssc(eng, m, n, a)
                    if coeff == 0.0:
                        continue
                    walked = _walk(
                        ket,
                        [
                            ("molecule", a, "annihilate"),
                            ("atom", n, "create"),
                            ("atom", m, "create"),
                        ],
                    )
                    if walked:
                        ladder, bra = walked
                        yield bra, pref * coeff * ladder

    elif term is TermId.SCSC:
        for n in _occupied(ket.atoms):
            _, after_n = apply_ladder(ket, "atom", n, "annihilate")
            assert after_n is not None
            for b in _occupied(after_n.molecules):
                for a in range(n_comp):
                    for m in range(n_modes):
                        coeff = _coeff_scsc(eng, m, a, b, n)
                        if coeff == 0.0:
                            continue
                        walked = _walk(
                            ket,
                            [
                                ("atom", n, "annihilate"),
                                ("molecule", b, "annihilate"),
                                ("molecule", a, "create"),
                                ("atom", m, "create"),
                            ],
                        )
                        if walked:
                            ladder, bra = walked
                            yield bra, pref * coeff * ladder

    elif term is TermId.CCCC:
        for t in _occupied(ket.molecules):
            _, after_t = apply_ladder(ket, "molecule", t, "annihilate")
            assert after_t is not None
            for u in _occupied(after_t.molecules):
                for b in range(n_comp):
                    for a in range(n_comp):
                        coeff = _coeff_cccc(eng, a, b, t, u)
                        if coeff == 0.0:
                            continue
                        walked = _walk(
                            ket,
                            [
                                ("molecule", t, "annihilate"),
                                ("molecule", u, "annihilate"),
                                ("molecule", b, "create"),
                                ("molecule", a, "create"),
                            ],
                        )
                        if walked:
                            ladder, bra = walked
                            yield bra, pref * coeff * ladder

    else:  # pragma: no cover - exhaustive enum
        raise ValueError(f"unknown term {term!r}")


def _check_consistent(basis: SectorBasis, space: ModeSpace, spectrum: CompositeSpectrum) -> None:
    if basis.n_atom_modes != space.n_modes:
        raise ValueError(
            f"basis has {basis.n_atom_modes} atom modes, mode space has {space.n_modes}"
        )
    if spectrum.n_modes != space.n_modes:
        raise ValueError(
            f"spectrum was built over {spectrum.n_modes} modes, mode space has {space.n_modes}"
        )
    if basis.n_molecule_modes != spectrum.n_composites:
        raise ValueError(
            f"basis has {basis.n_molecule_modes} molecule modes, spectrum has "
            f"{spectrum.n_composites} composites"
        )


def build_term(
    term: TermId,
    basis: SectorBasis,
    space: ModeSpace,
    spectrum: CompositeSpectrum,
    engine: ElementEngine | None = None,
) -> SparseMatrix:
    """Sector-block matrix of a single term on the given basis.

    Contributions landing outside the basis are dropped (projection onto the
    span); within a fixed-N sector that never happens because every term
    conserves the constituent number.
    """
    _check_consistent(basis, space, spectrum)
    eng = engine if engine is not None else ElementEngine(space, spectrum)
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for j, ket in enumerate(basis.states):
        for bra, value in _term_contributions(term, ket, space, spectrum, eng):
            i = basis.position(bra)
            if i is not None and value != 0.0:
                rows.append(i)
                cols.append(j)
                vals.append(value)
    return SparseMatrix.from_triples(basis.dim, rows, cols, vals)


class HermiticityError(AssertionError):
    """Assembled matrix failed the Hermiticity (or adjoint-pairing) check."""


@dataclass(frozen=True)
class SparseHamiltonian:
    """Assembled sector Hamiltonian: per-term blocks plus their sum."""

    basis: SectorBasis
    terms: Mapping[TermId, SparseMatrix]
    total: SparseMatrix

    def term(self, term: TermId) -> SparseMatrix:
        return self.terms[term]


def _worst_asymmetry_entries(mat: SparseMatrix, limit: int = 5) -> str:
    dense = mat.to_dense()
    diff = np.abs(dense - dense.T)
    flat = np.argsort(diff, axis=None)[::-1][:limit]
    rows, cols = np.unravel_index(flat, diff.shape)
    parts = [
        f"({r},{c}): {dense[r, c]!r} vs ({c},{r}): {dense[c, r]!r}"
        for r, c in zip(rows, cols)
        if diff[r, c] > 0
    ]
    return "; ".join(parts) if parts else "none"


def assemble_hamiltonian(
    basis: SectorBasis,
    space: ModeSpace,
    spectrum: CompositeSpectrum,
    engine: ElementEngine | None = None,
) -> SparseHamiltonian:
    """Build all seven term blocks and their sum on one sector basis.

    Hermiticity of the sum and the adjoint pairing between the two
    rearrangement blocks are asserted, not assumed; a failure raises with
    the offending entries.
    """
    eng = engine if engine is not None else ElementEngine(space, spectrum)
    terms = {term: build_term(term, basis, space, spectrum, eng) for term in TermId}
    total = SparseMatrix.zero(basis.dim)
    for term in TermId:
        total = total + terms[term]
    asym = total.max_abs_asymmetry()
    if asym > HERMITICITY_TOL:
        raise HermiticityError(
            f"assembled sector matrix asymmetry {asym:.3e} exceeds {HERMITICITY_TOL:.1e}; "
            f"worst entries: {_worst_asymmetry_entries(total)}"
        )
    pairing = (terms[TermId.CSS] + _negate(terms[TermId.SSC].transpose())).max_abs()
    if pairing > HERMITICITY_TOL:
        raise HermiticityError(
            f"rearrangement blocks are not adjoint: max |CSS - SSC^T| = {pairing:.3e}"
        )
    return SparseHamiltonian(basis, terms, total)


def _negate(mat: SparseMatrix) -> SparseMatrix:
    return SparseMatrix(mat.dim, mat.rows, mat.cols, -mat.vals)
