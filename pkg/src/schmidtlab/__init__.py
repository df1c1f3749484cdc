"""Schmidt-game engine and verification laboratory.

Play (alpha, beta)-games on the flat torus against expanding and
partially hyperbolic model systems, derive Alice's winning constants,
verify transcripts move by move, build reply trees carrying Frostman
measures, and estimate dimensions of the winning sets.
"""

from .alice import (
    AliceStrategy,
    InterleavedAlice,
    StrategyConstants,
    constants_report,
    constants_to_obj,
    derive_constants,
    interleave_beta,
    interleave_target,
    interleaved_strategy,
    verify_interleaved,
)
from .bob import BobSpec, ChaserBob, RandomBob, RemoteBob, bob_constraints, make_bob
from .boxdim import (
    BoxCountReport,
    PointSample,
    box_counting_dimension,
    cantor_sample,
    sample_winning_points,
)
from .errors import (
    AvoidInfeasible,
    BlockClaimViolation,
    ConstantsError,
    CountingViolation,
    DepthCapExceeded,
    EngineError,
)
from .game import (
    GameConfig,
    Move,
    Transcript,
    VerificationReport,
    run_game,
    transcript_from_obj,
    transcript_to_obj,
    validate_move,
    verify_transcript,
)
from .systems import (
    Rectangle,
    SystemSpec,
    conformal_torus,
    linear_circle,
    named_system,
    nonlinear_circle,
    orbit_min_distance,
    parse_system_config,
    skew_product,
    sys_id,
)
from .torus import (
    RADIUS_CAP,
    Ball,
    Point,
    balls_disjoint,
    contains_ball,
    distance,
    pack_disjoint_subballs,
)
from .treelab import (
    LazyTree,
    NodeMeasure,
    TreeFamily,
    build_game_tree,
    closed_form_bound,
    default_opening,
    dimension_lower_bound,
    frostman_check,
    product_measure_check,
    rescale_measures,
)

__all__ = [
    "AliceStrategy", "InterleavedAlice", "StrategyConstants", "constants_report",
    "constants_to_obj", "derive_constants", "interleave_beta", "interleave_target",
    "interleaved_strategy", "verify_interleaved",
    "BobSpec", "ChaserBob", "RandomBob", "RemoteBob", "bob_constraints", "make_bob",
    "BoxCountReport", "PointSample", "box_counting_dimension", "cantor_sample",
    "sample_winning_points",
    "AvoidInfeasible", "BlockClaimViolation", "ConstantsError", "CountingViolation",
    "DepthCapExceeded", "EngineError",
    "GameConfig", "Move", "Transcript", "VerificationReport", "run_game",
    "transcript_from_obj", "transcript_to_obj", "validate_move", "verify_transcript",
    "Rectangle", "SystemSpec", "conformal_torus", "linear_circle", "named_system",
    "nonlinear_circle", "orbit_min_distance", "parse_system_config", "skew_product",
    "sys_id",
    "RADIUS_CAP", "Ball", "Point", "balls_disjoint", "contains_ball", "distance",
    "pack_disjoint_subballs",
    "LazyTree", "NodeMeasure", "TreeFamily", "build_game_tree", "closed_form_bound",
    "default_opening", "dimension_lower_bound", "frostman_check",
    "product_measure_check", "rescale_measures",
]
