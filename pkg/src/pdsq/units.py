"""Physical constants fixed project-wide."""

BOHR_PER_ANGSTROM = 1.8897259886
EV_PER_HARTREE = 27.211386245988
