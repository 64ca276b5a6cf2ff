# Split certificates for every pair, then the combined verdict.
from unituran import family_F
from unituran.conditions import find_split_certificate, pairs, paper_split_certificate, verdict, verify_split

F = family_F(3, 1)
for pair in pairs(3):
    cert = find_split_certificate(F, pair)
    print(pair, "ordering", cert.ordering, "|part1| =", len(cert.part1), "|part2| =", len(cert.part2))
    print("   constructed certificate ok:", verify_split(F, paper_split_certificate(3, 1, *pair)))

v = verdict(F)
print("club:", v.club, "spade:", v.spade_holds)
print("claimed density:", v.claimed_density)

# k = 4: hints skip the search
G = family_F(4, 2)
hints = {p: paper_split_certificate(4, 2, *p) for p in pairs(4)}
print("F(4,2):", verdict(G, hints=hints).claimed_density)
