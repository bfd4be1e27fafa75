"""Ideal Bose algebra on the truncated atom/molecule Fock space.

Atom and molecule modes are treated as independent oscillators.  On a
truncated single-mode space the commutator [a, adag] equals the identity on
every state below the cap -- exactly, when the sqrt(n) entries are kept as
exact square-root numbers -- and every cross-mode or cross-species
commutator vanishes identically.
"""

import numpy as np

from composite_bosons import (
    exact_commutator,
    exact_ladder_matrix,
    ladder_matrix,
    truncated_states,
)

cap = 6
states = truncated_states(1, 0, cap)
a = exact_ladder_matrix(states, "atom", 0, "annihilate")
adag = exact_ladder_matrix(states, "atom", 0, "create")
comm = exact_commutator(a, adag)

print(f"single atom mode, occupations 0..{cap}")
print("[a, adag] diagonal (exact):", [str(comm[i][i].r) for i in range(len(states))])
print("identity holds exactly on occupations", list(range(cap)),
      "- the top state feels the truncation")

print()
two_species = truncated_states(1, 1, 4)
a_atom = ladder_matrix(two_species, "atom", 0, "annihilate")
c_mol = ladder_matrix(two_species, "molecule", 0, "create")
cross = a_atom @ c_mol - c_mol @ a_atom
print(f"atom/molecule cross commutator on a {len(two_species)}-state space: "
      f"max |entry| = {np.max(np.abs(cross))}")
