# Orderings, types, and why F(3,1) has no vanishing ordering.
import numpy as np

from unituran import family_F, tight_path
from unituran.vanishing import count_vanishing_orderings, find_vanishing_ordering, is_vanishing, type_assignment

path = tight_path(3, 5)
print(path.edges)

tau = find_vanishing_ordering(path)  # lex-least vanishing ordering
print("ordering:", tau)
for S, types in sorted(type_assignment(path, tau).items()):
    print(S, sorted(types))  # one type per shadow set

# the identity order is not always vanishing
print("identity vanishing?", is_vanishing(path, range(path.n)))
print("vanishing orderings of the path:", count_vanishing_orderings(path))

# random relabelings keep the answer
rng = np.random.default_rng(0)
perm = rng.permutation(path.n)
print("relabelled:", find_vanishing_ordering(path.relabel(perm)))

F = family_F(3, 1)
print(F.n, "vertices,", F.num_edges, "edges")
print("vanishing ordering of F(3,1):", find_vanishing_ordering(F, prune=True))
