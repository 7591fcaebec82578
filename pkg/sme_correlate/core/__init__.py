"""
Numerical core: vectorization and matrix-exponential actions.
"""
