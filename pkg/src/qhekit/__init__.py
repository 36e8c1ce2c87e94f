"""qhekit: numerics for the limits of non-interactive quantum homomorphic encryption.

Dense, desk-scale simulation of encrypt/evaluate/decrypt schemes on named
registers, with checkers for plaintext secrecy, deterministic completeness
and message-support orthogonality, a constructive data-localisation
procedure, and exact dimension audits for evaluation sets.
"""

from ._version import __version__
from .catalog import (
    CatalogEntry,
    build_constructed_secure_problem,
    build_controlled_flip_gate,
    build_identity_scheme,
    build_leaky_problem,
    build_qotp_scheme,
    build_tag_evaluate_scheme,
    catalog,
    pauli_word_matrix,
    pauli_words,
    verify_catalog,
)
from .checks import (
    DimensionAudit,
    Report,
    audit_dimension,
    audit_reversible_classical,
    check_completeness,
    check_no_programming,
    check_security,
    check_theorem1,
    qubits_for_set,
)
from .layout import (
    Layout,
    apply_operator,
    assemble_ket,
    embed_operator,
    partial_trace,
    reduced_from_ket,
    schmidt,
)
from .linalg import (
    basis_ket,
    eig_hermitian,
    fidelity_pure,
    is_unitary,
    kron,
    random_ket,
    random_unitary,
    trace_distance,
    unitaries_equal_up_to_phase,
)
from .localiser import (
    ExtractionError,
    GramCheckFailed,
    LeakageDetected,
    LocalisationError,
    LocalisationProblem,
    LocalisationResult,
    check_zero_leakage,
    extract_plaintext,
    localise,
    probe_states,
)
from .qinfo import (
    DensityOp,
    SupportProjector,
    is_product,
    mutual_information,
    orthogonal_support,
    product_deviation,
    support,
    von_neumann_entropy,
)
from .scheme import (
    Evaluation,
    FootprintOp,
    PipelineTrace,
    QheScheme,
    RegisterState,
    localisation_problem_at_t1,
    run_pipeline,
)
from .tolerances import DEFAULT_TOLERANCES, Tolerances

__all__ = [
    "__version__",
    "CatalogEntry",
    "DEFAULT_TOLERANCES",
    "DensityOp",
    "DimensionAudit",
    "Evaluation",
    "ExtractionError",
    "FootprintOp",
    "GramCheckFailed",
    "Layout",
    "LeakageDetected",
    "LocalisationError",
    "LocalisationProblem",
    "LocalisationResult",
    "PipelineTrace",
    "QheScheme",
    "RegisterState",
    "Report",
    "SupportProjector",
    "Tolerances",
    "apply_operator",
    "assemble_ket",
    "audit_dimension",
    "audit_reversible_classical",
    "basis_ket",
    "build_constructed_secure_problem",
    "build_controlled_flip_gate",
    "build_identity_scheme",
    "build_leaky_problem",
    "build_qotp_scheme",
    "build_tag_evaluate_scheme",
    "catalog",
    "check_completeness",
    "check_no_programming",
    "check_security",
    "check_theorem1",
    "check_zero_leakage",
    "eig_hermitian",
    "embed_operator",
    "extract_plaintext",
    "fidelity_pure",
    "is_product",
    "is_unitary",
    "kron",
    "localisation_problem_at_t1",
    "localise",
    "mutual_information",
    "orthogonal_support",
    "partial_trace",
    "pauli_word_matrix",
    "pauli_words",
    "probe_states",
    "product_deviation",
    "qubits_for_set",
    "random_ket",
    "random_unitary",
    "reduced_from_ket",
    "run_pipeline",
    "schmidt",
    "support",
    "trace_distance",
    "unitaries_equal_up_to_phase",
    "verify_catalog",
    "von_neumann_entropy",
]
