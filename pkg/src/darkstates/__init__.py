"""Dark, transparent and invisible states of two-level atoms in a cavity.

Exact subspace computation, singlet-product decompositions, amplitude
quantization and unitary evolution for the Tavis-Cummings model.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .darkspace import (  # noqa: E402
    constraint_certificates,
    dark_basis,
    dark_dimension,
    invisible_basis,
    is_dark,
    is_invisible,
    is_transparent,
    transparent_basis,
    transparent_dimension,
    witness_vector,
)
from .operators import (  # noqa: E402
    ModelParams,
    build_full_tc_hamiltonian,
    build_rwa_hamiltonian,
    lowering_matrix,
    raising_matrix,
)
from .sector import AtomBasisState, enumerate_sector, sector  # noqa: E402
from .singlets import Matching, enumerate_matchings, singlet_decompose  # noqa: E402
from .states import StateVector, atomic_state  # noqa: E402
from .validation import InvalidArgumentError  # noqa: E402

__all__ = [
    "__version__",
    "AtomBasisState",
    "InvalidArgumentError",
    "Matching",
    "ModelParams",
    "StateVector",
    "atomic_state",
    "build_full_tc_hamiltonian",
    "build_rwa_hamiltonian",
    "constraint_certificates",
    "dark_basis",
    "dark_dimension",
    "enumerate_matchings",
    "enumerate_sector",
    "invisible_basis",
    "is_dark",
    "is_invisible",
    "is_transparent",
    "lowering_matrix",
    "raising_matrix",
    "sector",
    "singlet_decompose",
    "transparent_basis",
    "transparent_dimension",
    "witness_vector",
]
