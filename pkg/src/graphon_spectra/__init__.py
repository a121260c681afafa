"""Spectral tools for graphons, their samples and Cayley graphons."""

from .cayley import (
    FiniteGroup,
    Irrep,
    IrrepSet,
    TorusBandParams,
    abelian_spectrum,
    cayley_graphon,
    coefficient_function,
    cyclic_group,
    direct_product,
    discretize_torus_graphon,
    eigenbasis_via_reps,
    group_convolve,
    group_fourier,
    inverse_fourier,
    is_class_function,
    parseval_check,
    quasi_abelian_spectrum,
    schur_check,
    spectrum_via_reps,
    symmetric_group_3,
    ws_closed_form_spectrum,
)
from .gft import (
    convergence_report,
    gft,
    graph_spectrum,
    graphon_filter_response,
    igft,
    iwft,
    match_sample_groups,
    poly_filter_apply,
    sample_group_projection,
    wft,
)
from .graphon import (
    Graph,
    GraphonSignal,
    StepGraphon,
    apply_operator,
    common_refinement,
    cut_norm,
    graphon_from_graph,
    lift_signal,
    lp_norms,
    operator_spectrum,
)
from .linalg import (
    DistinctEigenvalueGroup,
    ProjectionKernel,
    SignedSpectrum,
    eigh_hermitian,
    eigh_symmetric,
    group_distinct,
    hs_distance,
    projection_kernel,
    signed_order,
    truncate_alpha,
)
from .sampling import SampleRecord, sample_fixed_blocks, sample_w_random, sampled_signal

__version__ = "0.1.0"
