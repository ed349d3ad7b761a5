"""Exact verification engine for minimal third syzygies of Z over Z[D_4n]."""

from .constructions import (
    Quintuple,
    ReductionTrace,
    StandardGenerators,
    build_K,
    build_partial_l,
    build_resolution,
    noniso_certificate,
    normalize_x,
    phi_ops,
    psi_ops,
    quintuple_map,
    reduce_quintuple,
    standard_generators,
)
from .errors import ClosureError, Omega3Error, PreconditionError, UsageError
from .gmod import GModule, generated_by, hom_lattice, kernel_image, multiplier_lattice
from .groupring import DihedralContext, RingElement, RingMatrix, dihedral, realize
from .intlat import Lattice

__version__ = "0.1.0"

__all__ = [
    "ClosureError",
    "DihedralContext",
    "GModule",
    "Lattice",
    "Omega3Error",
    "PreconditionError",
    "Quintuple",
    "ReductionTrace",
    "RingElement",
    "RingMatrix",
    "StandardGenerators",
    "UsageError",
    "build_K",
    "build_partial_l",
    "build_resolution",
    "dihedral",
    "generated_by",
    "hom_lattice",
    "kernel_image",
    "multiplier_lattice",
    "noniso_certificate",
    "normalize_x",
    "phi_ops",
    "psi_ops",
    "quintuple_map",
    "realize",
    "reduce_quintuple",
    "standard_generators",
]
