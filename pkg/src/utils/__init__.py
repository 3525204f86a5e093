"""
Configuration, logging, errors and integrity checks.
"""
