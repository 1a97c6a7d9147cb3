from . import _version, exceptions, types
from .cubeset import (
    CubeSet,
    GeneratorSpec,
    SubCube,
    dump_set,
    generate,
    harper_segment,
    is_subcube,
    load_set,
    make_set,
    section,
    subcube_members,
    union_of,
)
from .decomposition import decompose, split_bookkeeping, verify_decomposition
from .harness import SuiteParams, emit_report, replay, run_suite
from .hypercontractivity import (
    PseudoBooleanFn,
    polyanskiy_check,
    sparse_section_expectation,
    spherical_average,
)
from .isoperimetry import (
    best_subcube,
    edge_boundary,
    ellis_check,
    influence_profile,
    iso_excess,
    min_boundary_oracle,
    talagrand_ratio,
)
from .options import Option
from .sections import (
    entropy,
    mutual_information,
    product_structure,
    section_table,
    sectional_control,
    shearer_check,
)

__version__ = _version.__version__


__all__ = [
    "CubeSet",
    "GeneratorSpec",
    "Option",
    "PseudoBooleanFn",
    "SubCube",
    "SuiteParams",
    "best_subcube",
    "decompose",
    "dump_set",
    "edge_boundary",
    "ellis_check",
    "emit_report",
    "entropy",
    "exceptions",
    "generate",
    "harper_segment",
    "influence_profile",
    "is_subcube",
    "iso_excess",
    "load_set",
    "make_set",
    "min_boundary_oracle",
    "mutual_information",
    "polyanskiy_check",
    "product_structure",
    "replay",
    "run_suite",
    "section",
    "section_table",
    "sectional_control",
    "shearer_check",
    "sparse_section_expectation",
    "spherical_average",
    "split_bookkeeping",
    "subcube_members",
    "talagrand_ratio",
    "types",
    "union_of",
    "verify_decomposition",
]
