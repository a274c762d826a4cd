"""Neighbour offsets on the 3-D voxel lattice."""

import itertools

# All 26 neighbours at Chebyshev distance 1.
NEIGHBOURS = tuple(d for d in itertools.product((-1, 0, 1), repeat=3) if d != (0, 0, 0))

# One representative per +/- pair: the first non-zero component is positive.
DIRECTIONS = tuple(d for d in NEIGHBOURS if next(c for c in d if c != 0) > 0)

assert len(DIRECTIONS) == 13
