"""Linear-optics element constructors and circuit composition."""
