from .templates import (
    GadgetTemplate,
    Port,
    all_vertex_signatures,
    base_templates,
    get_base,
    mirror_signature,
    mirror_template,
    parse_signature,
    signature_of_template,
)
from .conformance import ConformanceReport, build_harness, conformance, bend_contract

__all__ = [
    "GadgetTemplate",
    "Port",
    "all_vertex_signatures",
    "base_templates",
    "get_base",
    "mirror_signature",
    "mirror_template",
    "parse_signature",
    "signature_of_template",
    "ConformanceReport",
    "build_harness",
    "conformance",
    "bend_contract",
]
