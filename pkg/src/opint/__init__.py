"""Operator integrals against positive operator valued measures."""
from opint.errors import (
    ConfigError,
    DecompositionFailure,
    DimensionMismatch,
    DomainViolation,
    EigSolverFailure,
    IndexOutOfRange,
    InsufficientBoundaryData,
    IoFailure,
    NonEvaluable,
    OpintError,
    QuadratureFailure,
    ScenarioFailure,
    SeparatingSubspaceTooSmall,
)
from opint.measures import (
    AtomicComplexMeasure,
    DensityComplexMeasure,
    IntegrationVerdict,
    Monomial,
    QuadraturePolicy,
    SeriesPolicy,
    Status,
    integrability_test,
    integrate,
    total_variation,
)
from opint.povm import (
    DiagonalFormMeasure,
    DiscretePOVM,
    ModelSpace,
    NaimarkDilation,
    ScalarIdentityPOVM,
    SequencePOVM,
    naimark_dilate,
    random_povm,
    scalar_measure,
    spectral_measure,
    validate_povm,
    verify_dilation,
)
from opint.integrals import (
    DomainCertificate,
    DomainKind,
    OperatorIntegral,
    Verdict,
    form_domain_member,
    form_integral,
    kato_operator_from_form,
    max_weak_sym_integral,
    moment_operators,
    sq_domain_member,
    strong_domain_member,
    strong_integral,
    tilde_integral,
    variance_form,
    weak_sym_integral,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DecompositionFailure",
    "DimensionMismatch",
    "DomainViolation",
    "EigSolverFailure",
    "IndexOutOfRange",
    "InsufficientBoundaryData",
    "IoFailure",
    "NonEvaluable",
    "OpintError",
    "QuadratureFailure",
    "ScenarioFailure",
    "SeparatingSubspaceTooSmall",
    "AtomicComplexMeasure",
    "DensityComplexMeasure",
    "IntegrationVerdict",
    "Monomial",
    "QuadraturePolicy",
    "SeriesPolicy",
    "Status",
    "integrability_test",
    "integrate",
    "total_variation",
    "DiagonalFormMeasure",
    "DiscretePOVM",
    "ModelSpace",
    "NaimarkDilation",
    "ScalarIdentityPOVM",
    "SequencePOVM",
    "naimark_dilate",
    "random_povm",
    "scalar_measure",
    "spectral_measure",
    "validate_povm",
    "verify_dilation",
    "DomainCertificate",
    "DomainKind",
    "OperatorIntegral",
    "Verdict",
    "form_domain_member",
    "form_integral",
    "kato_operator_from_form",
    "max_weak_sym_integral",
    "moment_operators",
    "sq_domain_member",
    "strong_domain_member",
    "strong_integral",
    "tilde_integral",
    "variance_form",
    "weak_sym_integral",
]
