"""
crvec - correctly rounded, lane-parallel elementary functions.

The package provides branch-free binary32 exp2f/log2f kernels, binary64
exp2/log kernels with a fast path and scalar callout, the high precision
oracle they are verified against, the generator of their tables and the
verification and benchmark harnesses.
"""
pass
