"""Exact few-photon Fock-space states, mode transforms and post-selection."""
