"""File formats for samples, labels, latents, tables and fitted models."""
