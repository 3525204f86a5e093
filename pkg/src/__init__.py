"""
MNPCA: non-linear two-sided principal components for matrix-valued data.
"""

__version__ = '0.1.0'
