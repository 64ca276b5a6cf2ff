# Embedding F(3,1) into a reduced graph through an anchor family.
from unituran import family_F
from unituran.conditions import paper_split_certificate
from unituran.reduced import (
    anchor_certified_graph,
    build_reduced_map_from_anchors,
    find_reduced_map,
    is_d_dense,
    verify_reduced_map,
)

F = family_F(3, 1)
A, anchors = anchor_certified_graph(3, 8, size=2, pair=(1, 3), seed=0, extra=0.3)
print("classes:", len(A.classes), "constituents:", len(A.constituents))
print("half dense?", is_d_dense(A, 0.5))

rm = build_reduced_map_from_anchors(F, A, anchors, paper_split_certificate(3, 1, 1, 3))
print("phi:", rm.phi)
print("valid:", verify_reduced_map(F, A, rm))

# direct search finds some map too (not necessarily the same one)
found = find_reduced_map(F, A, budget=10**6)
print("search found a map:", found is not None and verify_reduced_map(F, A, found))
