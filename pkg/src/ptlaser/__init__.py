"""Transfer-matrix engine for PT-symmetric laser-absorbers in one dimension."""

__version__ = "0.1.0"

from .core import IDENTITY, LasingPoleError, PTLaserError, SpectralGrid, TransferMatrix, mat_det, mat_mul
from .elements import (
    DfbHalf,
    GainSlab,
    Mirror,
    NearThresholdModel,
    Propagation,
    Slab,
    StructureSpec,
    build_structure,
    dfb_half_matrix,
    fp_laser,
    gain_family,
    gain_slab_matrix,
    mirror_matrix,
    near_threshold,
    near_threshold_matrix,
    pt_dfb,
    slab_matrix,
)
from .scattering import ScatteringCoefficients, TwoPortInput, cpa_input, outputs, s_coefficients, theta
from .spectral import (
    RootResult,
    SearchRegion,
    ThresholdNotBracketedError,
    cpa_lasing_coincidence,
    find_zeros,
    lasing_threshold,
    verify_pt_epsilon,
    verify_pt_matrix,
)
