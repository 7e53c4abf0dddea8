"""
Hausdorff content of a Cantor set
=================================

Middle-thirds Cantor sets of depth 2 to 4, sampled on a grid of 2^8 points
of the unit interval. Content of codimension d = 1 - log2/log3 is computed
exactly with a dynamic program over runs on the line, and compared with
the greedy cover.
"""
import math

from capkit.content import ContentParams, content_exact, content_greedy
from capkit.space import build_cantor

d = 1 - math.log(2) / math.log(3)
for depth in (2, 3, 4):
    space, E = build_cantor(1 / 3, depth, 8)
    for rho in (0.5, 0.1):
        params = ContentParams(d, rho)
        exact = content_exact(space, E, params)
        greedy = content_greedy(space, E, params)
        print(f"depth {depth} |E|={len(E):3d} rho={rho}: exact {exact.value:.4f} "
              f"with {len(exact.cover)} balls, greedy {greedy.value:.4f}")
