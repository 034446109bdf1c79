"""Biphoton qutrit states, the two-qutrit Bell basis and the SPDC second-order state."""
