# Random palette graphs: edge density, F-freeness, and the density inequality.
import numpy as np

from unituran import family_F
from unituran.density import azuma_bound, concentration_experiment
from unituran.palette import conj_palette, lower_bound, trial_graph, vanishing_palette, verify_palette_avoids
from unituran.vanishing import is_vanishing

F = family_F(3, 1)
for P in (vanishing_palette(3), conj_palette(3, 1, 2)):
    rep = verify_palette_avoids(P, F, n=30, trials=8, seed=1)
    d = rep.densities
    print(P.tuples, "target", lower_bound(P), "mean %.4f +- %.4f" % (d.mean(), d.std(ddof=1) / np.sqrt(len(d))))
    print("   all F-free:", rep.all_free)
# F(3,1) has star certificates for every pair, so the second palette is not
# expected to avoid it; its hosts only block graphs that lack one.

H = trial_graph(vanishing_palette(3), 30, seed=1, trial=0)
print(H.num_edges, "edges; identity ordering vanishing:", is_vanishing(H, range(H.n)))

rep = concentration_experiment(3, 30, vanishing_palette(3), trials=20, witnesses_per_trial=20, mu=0.02, seed=0)
print("violations:", rep.violations, "smallest margin: %.1f" % rep.min_margin)
print("Azuma bound at n=30: %.3f (weak at this size)" % azuma_bound(30, 3, 0.02)[0])
print("Azuma bound at n=300: %.3g" % azuma_bound(300, 3, 0.02)[0])
