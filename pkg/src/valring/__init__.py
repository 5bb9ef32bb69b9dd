"""Exact key-polynomial chains and valuation-ring presentations over the
p-adically valued rationals."""

from .algebra import (
    INF,
    BranchDescriptor,
    OracleValue,
    ResidueClass,
    ResidueField,
    UniPoly,
    ValuedFieldCtx,
    hensel_root,
    nu_oracle,
    pval,
    qexpand,
    resultant,
)
from .expandval import (
    FullExpansion,
    SSet,
    expansion_from_index_tuple,
    expansion_level,
    full_expansion,
    make_neat,
    s_set,
    truncate,
)
from .keychain import (
    COLLAPSED,
    FULL,
    IMAX,
    ChainEntry,
    KeyChain,
    Segmentation,
    augment,
    build_chain,
    collapse,
    gauss_start,
    newton_polygon,
    residual_poly,
    segment,
    validate,
    validation_passed,
)
from .presentrel import (
    GeneratorSet,
    PlateauRel,
    RelationGen,
    ideal_generators,
    plateau_relation,
    redundancy_cofactor,
    relation,
)
from .rewrite import (
    NeatReport,
    TraceStep,
    building,
    is_neat,
    prec_compare,
    reduction,
    replay,
    total_reduction,
    total_s_building,
    vdeg,
)
from .verify import (
    Certificate,
    check_relations,
    completeness_probe,
    eval_e,
    eval_eta,
    integral_rep,
    membership,
)
from .xpoly import XPoly, mu0

__all__ = [name for name in dir() if not name.startswith("_")]
