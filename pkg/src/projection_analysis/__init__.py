"""Fourfold projection amplitudes, angle conditions and detection probabilities."""
