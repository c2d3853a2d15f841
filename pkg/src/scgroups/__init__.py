"""String C-group representations of symmetric groups: checking, rank
reduction and augmentation, CPR graphs and enumeration."""

from .perm import (
    DEFAULT_INTERSECTION_LIMIT,
    BlockSystem,
    IntersectionLimitExceeded,
    Permutation,
    StabilizerChain,
    compose,
    element_order,
    intersection_order,
    is_primitive_on,
    minimal_block,
    orbits,
    parity,
)
from .sggi import (
    CheckReport,
    GeneratorTuple,
    dual,
    generates_full_symmetric,
    ip_holds,
    is_string,
    is_string_c_group,
    schlafli,
    sesqui_extension,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_INTERSECTION_LIMIT",
    "BlockSystem",
    "CheckReport",
    "GeneratorTuple",
    "IntersectionLimitExceeded",
    "Permutation",
    "StabilizerChain",
    "compose",
    "dual",
    "element_order",
    "generates_full_symmetric",
    "intersection_order",
    "ip_holds",
    "is_primitive_on",
    "is_string",
    "is_string_c_group",
    "minimal_block",
    "orbits",
    "parity",
    "schlafli",
    "sesqui_extension",
]
