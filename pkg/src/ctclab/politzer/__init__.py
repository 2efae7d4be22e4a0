"""Massless scalar field on Politzer spacetime via exact characteristics."""

from .field import (
    PolitzerField,
    RimReport,
    WeylElement,
    bump_field,
    evaluate,
    evaluate_batch,
    field_from_json,
    left_mover,
    minkowski_compare,
    minkowski_evaluate,
    random_field,
    right_mover,
    rim_check,
    split_movers,
    symplectic_form,
    weyl,
    weyl_multiply,
    zero_field,
)
from .geometry import (
    DELTA0,
    CharacteristicTrace,
    LightRay,
    PolitzerGeometry,
    critical_coordinates,
    lightray_set,
    trace_characteristic,
    wrap_bound,
)
from .profiles import BumpProfile, MoverProfile, SumProfile, profiles_equal
from .regions import (
    Diamond,
    LocalizationData,
    SpacetimeRegion,
    ctc_diamonds,
    interval,
    localization,
    region_from_json,
    regions_equal,
    union,
)

__all__ = [
    "DELTA0",
    "BumpProfile",
    "CharacteristicTrace",
    "Diamond",
    "LightRay",
    "LocalizationData",
    "MoverProfile",
    "PolitzerField",
    "PolitzerGeometry",
    "RimReport",
    "SpacetimeRegion",
    "SumProfile",
    "WeylElement",
    "bump_field",
    "critical_coordinates",
    "ctc_diamonds",
    "evaluate",
    "evaluate_batch",
    "field_from_json",
    "interval",
    "left_mover",
    "lightray_set",
    "localization",
    "minkowski_compare",
    "minkowski_evaluate",
    "profiles_equal",
    "random_field",
    "region_from_json",
    "regions_equal",
    "right_mover",
    "rim_check",
    "split_movers",
    "symplectic_form",
    "trace_characteristic",
    "union",
    "weyl",
    "weyl_multiply",
    "wrap_bound",
    "zero_field",
]
