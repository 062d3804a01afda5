"""Exact constructions and checks for equiangular lines, mutually unbiased bases and spin models."""

from .cyclotomic import CycArray, Cyclotomic, root_of_unity, sqrt_rational
from .fields import FiniteField, GaloisRing, gf, gr_make
from .abelian import (
    CyclicProductGroup,
    HughesGroup,
    ExplicitGroup,
    is_difference_set,
    is_relative_difference_set,
    singer_difference_set,
)
from .semifield import Semifield, semifield_make_dickson, semifield_make_field, semifield_verify
from .lineset import (
    Backend,
    LineSet,
    gram,
    is_equiangular,
    is_flat,
    is_mub_family,
    load_lineset,
    relative_bound,
    save_lineset,
)
from .constructions import (
    MubFamily,
    alltop,
    alltop_wf_equivalence,
    eal_from_difference_set,
    extract_rds_from_schur_group,
    fiducial_diagnostics,
    hoggar,
    mubs_from_rds,
    mubs_from_semifield,
    pauli_orbit,
    wf,
)
from .pauli import all_paulis, eigen_family, nice_error_basis_check, pauli, pauli_context
from .spin import (
    TypeIIMatrix,
    diagonal_conjugation_check,
    fourier_matrix,
    is_spin_model,
    is_type_ii,
    potts,
    quadratic_circulant,
    spin_mub_triple,
)
from .reports import Check

__version__ = "0.1.0"
