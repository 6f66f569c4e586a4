"""Micromagnetic simulator for SOT-driven switching of a chiral free layer.

The compiled extension carries the full implementation; this package just
re-exports it.
"""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __doc__ as _core_doc
except ImportError:  # in-tree test runs place _core next to the package
    from _core import *  # noqa: F401,F403
    from _core import __doc__ as _core_doc

__doc__ = _core_doc
__all__ = [
    "Mesh",
    "RunConfig",
    "ConfigError",
    "parse_config",
    "load_config",
    "relax",
    "write",
    "effective_field",
    "total_energy",
    "anisotropy_map",
    "classify",
    "skyrmion_number",
    "phase_diagram",
    "dmi_window",
    "gradient_curve",
    "write_ovf",
    "read_ovf",
]
