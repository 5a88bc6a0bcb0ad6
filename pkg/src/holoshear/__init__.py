"""Generalized shear coordinates on Teichmüller space and on moduli spaces of
3d spacetimes, over the algebra R_Λ (complex, dual or split-complex numbers)."""

__version__ = "0.1.0"

from .coords import (
    ConstraintMap,
    CotangentVector,
    GenShearVector,
    LamVector,
    ShearVector,
    constraint_map,
    constraint_residual,
    load_coords,
    sample_in_kernel,
    save_coords,
)
from .errors import *  # noqa: F401,F403
from .fatgraph import (
    SHIPPED_GRAPHS,
    EdgePath,
    FatGraph,
    load_graph,
    shipped_graph,
    transport_path,
    whitehead,
)
from .holonomy import earthquake_cocycle, grafting_cocycle, holonomy
from .moves import (
    apply_move,
    decompose_move,
    move_cotangent,
    move_lam,
    move_x,
    move_z,
    relation_suite,
)
from .poisson import (
    cotangent_bivector,
    dirac_bivector,
    goldman_bracket_traces,
    grav_bivector,
    pi_sharp,
    wp_bivector,
    wp_coefficients,
)
from .ralgebra import Lambda, RNum, extend, li2
from .rmatrix import LieVec, Mat2, kappa
