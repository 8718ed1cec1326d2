"""
Commutation package
Exact tools for commutation groups over Z_d, organized by functionality
"""

from .model import (
    CommutationError,
    MatrixError,
    ParseError,
    ContextMismatchError,
    CapExceededError,
    ConsistencyError,
    NotDarbouxError,
    CertificateError
)

from .algebra import (
    CommutatorMatrix,
    new_commutator_matrix,
    zero_matrix,
    random_commutator_matrix,
    lower_part,
    bilinear,
    commutator_value,
    tensor_double,
    embed_scale,
    matmul_mod,
    determinant_mod,
    is_unit
)

from .rewrite import (
    Generator,
    Phase,
    NormalForm,
    RewriteRule,
    parse_word,
    format_word,
    format_normal_form,
    normalize,
    reduce_word,
    rewrite_steps,
    words_equal,
    inversion_measure,
    inversion_sum,
    inversion_sum_between,
    formal_commutator,
    multiplicities,
    reverse_word
)

from .group import (
    GroupContext,
    GroupElement,
    multiply,
    inverse,
    power,
    commutator,
    commutes,
    order,
    evaluate,
    from_normal_form,
    to_normal_form,
    enumerate_group,
    centre
)

from .contextuality import (
    Leaf,
    Pair,
    ContextualWord,
    ValueAssignment,
    Contextual,
    NonContextual,
    Seed,
    parse_bracketing,
    format_bracketing,
    check_witness,
    verify_contextual_word,
    compatible_submonoid,
    search_contextual_word,
    canonical_scalar_assignment,
    value_assignment,
    validate_assignment,
    find_left_splitting,
    compatibility_graph,
    is_cluster_graph,
    find_pattern,
    to_dot,
    classify_z2,
    pad_word,
    maximal_cliques,
    local_splittings,
    consistent_model,
    check_local_consistency,
    glue_global_section,
    load_fixtures,
    fixture_matrix,
    peres_mermin_square
)

from .darboux import (
    CogredientResult,
    swap_cogredient,
    add_cogredient,
    standard_form,
    darboux_form,
    is_darboux,
    is_cogredient,
    relative_parity,
    decide_darboux
)

from .representation import (
    WeylOperator,
    represent,
    compose_weyl,
    weyl_equal,
    to_dense,
    format_weyl,
    parse_pauli_string,
    verify_representation
)

from .history import log_event, format_trace

__all__ = [
    # Errors
    'CommutationError',
    'MatrixError',
    'ParseError',
    'ContextMismatchError',
    'CapExceededError',
    'ConsistencyError',
    'NotDarbouxError',
    'CertificateError',
    # Algebra
    'CommutatorMatrix',
    'new_commutator_matrix',
    'zero_matrix',
    'random_commutator_matrix',
    'lower_part',
    'bilinear',
    'commutator_value',
    'tensor_double',
    'embed_scale',
    'matmul_mod',
    'determinant_mod',
    'is_unit',
    # Rewriting
    'Generator',
    'Phase',
    'NormalForm',
    'RewriteRule',
    'parse_word',
    'format_word',
    'format_normal_form',
    'normalize',
    'reduce_word',
    'rewrite_steps',
    'words_equal',
    'inversion_measure',
    'inversion_sum',
    'inversion_sum_between',
    'formal_commutator',
    'multiplicities',
    'reverse_word',
    # Group
    'GroupContext',
    'GroupElement',
    'multiply',
    'inverse',
    'power',
    'commutator',
    'commutes',
    'order',
    'evaluate',
    'from_normal_form',
    'to_normal_form',
    'enumerate_group',
    'centre',
    # Contextuality
    'Leaf',
    'Pair',
    'ContextualWord',
    'ValueAssignment',
    'Contextual',
    'NonContextual',
    'Seed',
    'parse_bracketing',
    'format_bracketing',
    'check_witness',
    'verify_contextual_word',
    'compatible_submonoid',
    'search_contextual_word',
    'canonical_scalar_assignment',
    'value_assignment',
    'validate_assignment',
    'find_left_splitting',
    'compatibility_graph',
    'is_cluster_graph',
    'find_pattern',
    'to_dot',
    'classify_z2',
    'pad_word',
    'maximal_cliques',
    'local_splittings',
    'consistent_model',
    'check_local_consistency',
    'glue_global_section',
    'load_fixtures',
    'fixture_matrix',
    'peres_mermin_square',
    # Darboux
    'CogredientResult',
    'swap_cogredient',
    'add_cogredient',
    'standard_form',
    'darboux_form',
    'is_darboux',
    'is_cogredient',
    'relative_parity',
    'decide_darboux',
    # Representation
    'WeylOperator',
    'represent',
    'compose_weyl',
    'weyl_equal',
    'to_dense',
    'format_weyl',
    'parse_pauli_string',
    'verify_representation',
    # History
    'log_event',
    'format_trace'
]
