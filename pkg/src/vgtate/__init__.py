"""Finite-field point counts, Frobenius traces and determinant certificates
for the elliptic K3 surfaces S_a."""

__version__ = "0.1.0"

from .counting import fiber_count_charsum, fiber_count_naive, fiber_cubic
from .detsieve import (
    EliminationCertificate,
    SieveReport,
    candidate_classes,
    check_hypotheses,
    eliminate,
    lemma48_rule,
    replay_certificate,
    verify_condition_star_star,
)
from .errors import (
    BadDenominator,
    BadParameter,
    BadPrime,
    DivisionByZero,
    FieldMismatch,
    NotASquare,
    OracleBoundExceeded,
    UndefinedAtZeroOrInfinity,
)
from .fibration import (
    INF,
    FiberClass,
    SurfaceParam,
    classify_fiber,
    discriminant,
    map_h,
    map_j,
    multiplicity_profile,
    reduce_param,
)
from .ff import ExtFieldElem, FieldSpec, field_arith, find_nonresidue, legendre, quad_char, sqrt_field
from .trace import (
    TraceReport,
    frobenius_trace,
    quartic_criterion,
    special_contribution,
    trace_value,
    verify_prop45,
)


