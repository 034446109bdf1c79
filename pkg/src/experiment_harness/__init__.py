"""Parameter scans, Poisson count simulation and visibility estimation."""
