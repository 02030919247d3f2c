"""Deck transformation groups of finite coverings, Galois embedding problems,
and Weierstrass polynomial realizations over a disc with holes."""

from .approx import (
    ApproximationCertificate,
    DegreeExhaustedError,
    SampledCoeffMap,
    check_homotopy,
    estimate_eps,
    fit_rational_polys,
)
from .braid import (
    BraidWord,
    ConfigPath,
    braid_to_config_path,
    config_to_coeffs,
    lift_permutation,
    tau,
)
from .embedding import (
    EmbeddingInstance,
    EmbeddingSolution,
    NoSolutionError,
    canonical_monodromy,
)
from .embedding import solve as solve_embedding
from .embedding import verify as verify_embedding
from .freecover import (
    CosetTable,
    DeckGroup,
    FreeWord,
    Tower,
    act,
    deck_group,
    is_normal,
    kernel_table,
    restriction_hom,
    subtable,
    tower_quotient_check,
)
from .monodromy import (
    MonodromyRep,
    TrackingConfig,
    characteristic_hom,
    deck_action_on_roots,
    irreducibility_check,
    refine_and_compare,
    splitting_cover,
    track_loop,
)
from .permgroup import (
    GroupHom,
    PermGroup,
    Permutation,
    centralizer_in_sym,
    closure,
    compose,
    inverse,
    isomorphic_as_groups,
)
from .pipeline import (
    PipelineReport,
    VerificationError,
    realize_group,
    run_monodromy,
    run_verify_tower,
    solve_semitop_embedding,
)
from .wpoly import (
    BaseSpace,
    BivariatePolyQi,
    Disc,
    GaussianRational,
    LoopPath,
    WeierstrassPoly,
    default_base_space,
    discriminant_at,
    eval_poly,
    generator_loops,
    roots_at,
)

__version__ = "0.1.0"
