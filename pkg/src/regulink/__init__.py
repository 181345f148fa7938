"""Numerical homotopy invariants of maps out of S^3: degrees, Hopf invariants,
isoclinic SO(4) classes, and the framing class of the links L_d."""
from .curves import PolylineLoop, TraceConfig, linking_number, trace_preimage
from .estimate import IntegerEstimate
from .invariants import degree, hopf_invariant, so3_class
from .link import frame_map, link_class
from .maps import MapHandle
from .so4 import isoclinic_split, pair_degrees

__version__ = "0.1.0"

__all__ = [
    "IntegerEstimate", "MapHandle", "PolylineLoop", "TraceConfig",
    "degree", "frame_map", "hopf_invariant", "isoclinic_split", "link_class",
    "linking_number", "pair_degrees", "so3_class", "trace_preimage",
]
