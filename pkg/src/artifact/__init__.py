"""Exact computations with dg and simplicial comodules over simply connected coalgebras.

Chain complexes over finite products of prime fields and the rationals,
Dold-Kan with Eilenberg-Zilber/Alexander-Whitney, comodules and cotensor
products, Postnikov towers as fibrant replacements, and Cotor by two
independent methods.
"""

from .exactla import Mat, field, FieldSpec, LinAlgError
from .chain import (
    ChainComplex, ChainMap, ChainError, sphere, disk, disk_to_sphere, tensor,
    homology, homology_dims, is_quasi_iso, split_decompose, pullback,
)
from .coalg import DGCoalgebra, fixture, validate_coalgebra
from .comod import (
    Comodule, ComoduleMap, ComoduleError, trivial_comodule, coalgebra_as_comodule,
    cofree, cotensor, gamma_comodule, n_comodule, counit_map, comonoidal_map,
)
from .postnikov import build_tower, build_stower, fibrant_replace, verify_tower, TowerError
from .derived import cotor_table, cobar_complex, derived_cotensor, dold_kan_cotor_compare
from .codec import encode, decode, CodecError, ParseError, ValidationError

__version__ = "0.1.0"
