"""Classification harness, data generators and Monte Carlo studies."""
