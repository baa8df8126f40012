"""Mellin transforms and asymptotics of iterated integrals near a saddle.

The package turns iterated integrals of meromorphic one-forms along the
level arcs ``{x**lambda1 y**lambda2 = t}`` into exact rational Mellin
transforms, reads off log-monomial expansions with certified tails, and
checks them against an independent quadrature oracle. A separate module
verifies quasi-unipotence propagation on graded free Lie algebras.
"""

from .asymptotics import (
    Expansion,
    PoleLattice,
    TailCertificate,
    ZeroFreeCertificate,
    as_expansion,
    certify_zero_free,
    partial_sum,
    pole_lattice,
    select_gap_point,
    tail_bound,
    tail_certificate,
)
from .chen import ElementarySymbol, IteratedPolynomial, decompose, evaluate
from .elementary import (
    EdgeFitError,
    MellinSeries,
    MultiIndex,
    compensator,
    edge_elementary,
    elementary_mellin,
    monomial_mellin,
    pole_vector,
)
from .lie import (
    GradedAutomorphism,
    GradedFreeLie,
    extend_automorphism,
    hall_basis,
    is_quasiunipotent,
    var_check,
    witt_dimension,
)
from .mellin import (
    LogMonomialSeries,
    RationalMellin,
    convolve,
    inverse_mellin,
    mellin_log_monomial,
    partial_fractions,
)
from .oracle import (
    OneForm,
    ParamPath,
    PathPiece,
    QuadratureError,
    abelian_integral,
    iterated_quadrature,
    line_path,
    saddle_path,
)
from .saddle import (
    EdgePiece,
    EdgeSeries,
    FormSeries,
    PolycycleDescriptor,
    SaddleChart,
    SaddlePiece,
    ValidationError,
    fit_edge_series,
    pullback_form,
    validate_chart,
)

__version__ = "0.1.0"
