"""Kernels, feature construction, MNPCA and its baselines."""
