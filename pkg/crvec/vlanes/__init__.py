"""
This subpackage contains the lane layer: lane containers and the backends
implementing the lane-wise operations the kernels are built from.
"""
from .batch import LaneBatch, LaneMask, WIDTHS, KIND_F64, KIND_F32, KIND_INT
from .backend import Backend, get_backend, available_backends
