"""Finite combinatorics of creature forcing: norms, truncated conditions,
products, cardinal-characteristic systems, and explicit parameter families.
"""

from .numeric import (
    Cmp,
    DEFAULT_PRECISION,
    LogTower,
    TowerDomainError,
    subset_count,
    tower,
    tower_add,
    tower_cmp,
    tower_div,
    tower_eval,
    tower_exp2,
    tower_le,
    tower_log2,
    tower_mul,
    tower_pow,
    tower_sub,
)
from .creatures import (
    Creature,
    bigness_refine,
    full_creature,
    lognorm_cmp,
    lognorm_value_cmp,
    norm,
    range_refine,
)
from .relational import (
    FinRelSystem,
    TukeyPair,
    brute_characteristics,
    check_tukey,
    dual,
    leq_card,
)
from .connections import (
    IntervalPartition,
    SigmaCover,
    Slalom,
    build_partition,
    ed_blocks,
    ed_maps,
    escape_measure,
    fbg_profile,
    gch_profile,
    l24_maps,
    l25_maps,
    l26_maps,
    l27_maps,
)
from .conditions import (
    NameOracle,
    ParamTriple,
    PreconditionError,
    TruncCondition,
    and_restrict,
    branch_slalom,
    branches,
    catch_real,
    check_reading,
    early_read,
    fuse,
    localize,
    order_check,
    poss_count,
    possibilities,
    thin,
    validate,
)
from .products import (
    CoordinateSpace,
    ProductCondition,
    ProductNameOracle,
    RestrictedName,
    bounding_extract,
    branch_key,
    modest_refine,
    product_branches,
    product_catch,
    product_check_reading,
    product_early_read,
    product_fuse,
    product_order_check,
    product_poss_count,
    product_possibilities,
    product_restrict,
    restricted_localize,
    schedule_plan,
)
from .family import (
    BoundingSequences,
    FamilyTuple,
    TreeFamily,
    build_single,
    build_tree,
    certificate_summary,
    toy_family,
    verify_suitable,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
