"""DOM masking: extended selectors, runtime value extraction, mask plans."""

from .dom import DomElement, DomSnapshot
from .selectors import ExtendedSelector, match_selector, parse_selector
from .rvss import (
    Extraction,
    ResourceValueStringSpec,
    evaluate_rvss,
    number_to_month,
    parse_rvss,
)
from .mask import (
    MASK_OVERLAY_CSS,
    BlockedElement,
    MaskPlan,
    MaskReason,
    WebMappingConfig,
    compute_mask,
    normalize_url,
    parse_web_config,
    reevaluate_triggers,
)

__all__ = [
    "DomElement",
    "DomSnapshot",
    "ExtendedSelector",
    "match_selector",
    "parse_selector",
    "Extraction",
    "ResourceValueStringSpec",
    "evaluate_rvss",
    "number_to_month",
    "parse_rvss",
    "MASK_OVERLAY_CSS",
    "BlockedElement",
    "MaskPlan",
    "MaskReason",
    "WebMappingConfig",
    "compute_mask",
    "normalize_url",
    "parse_web_config",
    "reevaluate_triggers",
]
