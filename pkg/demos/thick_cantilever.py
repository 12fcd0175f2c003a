"""Normalized tip deflection of the thick plane-stress cantilever.

Each column is a formulation, each row an n x n mesh of 4:1 cells.  Values
approach 1 from below for the stress-hybrid kinds; the penalty kind
overshoots on coarse meshes before settling.
"""

from shvem.study import table_a3

levels = (1, 2, 4, 8, 16)
table = table_a3(levels=levels)
kinds = list(table)
print("mesh    " + "".join(f"{k:>11s}" for k in kinds))
for i, n in enumerate(levels):
    print(f"{n:>2d}x{n:<2d}   " + "".join(f"{table[k][i]:11.4f}" for k in kinds))
