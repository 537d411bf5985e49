"""Moments of spectral determinants |det(zI - AU)|^2 over Haar-random
unitaries: exact determinantal formulas, regularized inverse determinants,
derived eigenvalue densities, and the Monte Carlo machinery to verify them.
"""

__version__ = "0.1.0"

from .numerics import (
    BigRat,
    HermSpectrum,
    Poly,
    QuadratureRule,
    adaptive_integrate,
    beta_rat,
    det,
    find_root_monotone,
    gram_eigs,
    quad_rule,
)
from .report import VerificationReport, make_exact_report, make_report
from .sampling import (
    EnsembleSpec,
    McEstimate,
    cue_rank1,
    eig_histogram,
    ginibre,
    gue,
    gue_rank1,
    haar_unitary,
    mc_average,
    sample,
)
from .schur import (
    Partition,
    cauchy_check,
    conjugate,
    dim_u,
    dim_u_conj,
    hr_er,
    lagrange_weights,
    orthogonality_check,
    schur_eval,
)
from .betadet import (
    MeasureParams,
    factorial_det_check,
    lemma1_check,
    norm_const,
    prop1_check,
    quadrature_vs_exact,
)
from .moments import (
    MomentQuery,
    detpoly,
    invariant_ensemble_moment,
    moment_neg,
    moment_neg_z,
    moment_pos,
    moment_pos_exact,
    moment_pos_z,
)
from .regdet import (
    AsymptoticCoeffs,
    RegQuery,
    asym_coeffs,
    ef_coefficient,
    f_eps,
    ik_exact,
    r_eps,
    r_eps_zero_limit,
    theorem2a_density_ratio,
)
from .besselint import BesselSpec, fn_general, fn_rank1, i0_series, j0
from .densities import (
    DensityQuery,
    SpectralLaw,
    cue_rank1_count_finite,
    cue_rank1_count_limit,
    cue_rank1_density,
    fz_phi,
    ginibre_density,
    ginibre_reduction_check,
    gue_rank1_density,
    mp_law,
)
