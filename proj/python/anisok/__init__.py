"""Directional (conical and cylindrical) K-functions and replicated-pattern
isotropy tests for 3D point patterns."""

from ._anisok import (
    AnisokError,
    BoxWindow,
    KKind,
    PointPattern,
    compress,
    cone_contains,
    cone_volume,
    cylinder_contains,
    cylinder_volume,
    default_r_max,
    equal_shape_link,
    equal_volume_link,
    isotropy_test,
    k_profile,
    power_curve,
    read_pattern,
    simulate,
    write_pattern,
)

__all__ = [
    "AnisokError",
    "BoxWindow",
    "KKind",
    "PointPattern",
    "compress",
    "cone_contains",
    "cone_volume",
    "cylinder_contains",
    "cylinder_volume",
    "default_r_max",
    "equal_shape_link",
    "equal_volume_link",
    "isotropy_test",
    "k_profile",
    "power_curve",
    "read_pattern",
    "simulate",
    "write_pattern",
]
