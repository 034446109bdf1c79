"""Command-line front end, run configuration and output files."""
