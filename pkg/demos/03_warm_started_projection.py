# Projection onto a growing polyhedron: warm starts and the enumeration oracle.
import numpy as np

from haloproj import HalfSpace, Polyhedron, brute_force_project, project
from haloproj.oracle import sweep

#%%
# Add random cuts one at a time and re-project the same anchor. The warm
# start resumes from the previous working set, so few changes are needed.
rng = np.random.default_rng(0)
d = 4
x0 = rng.uniform(-3, 3, d)
warm = Polyhedron(d)
for k in range(1, 13):
    a = rng.standard_normal(d)
    warm.add(HalfSpace.from_inequality(a, rng.uniform(0.0, 2.0)))
    w = project(warm, x0)
    c = project(warm.copy(), x0, warm=False)
    if not w.feasible:
        print(k, "empty")
        break
    print(f"{k:2d} constraints: warm changes {w.working_set_changes}, cold changes {c.working_set_changes}, "
          f"gap {np.linalg.norm(w.point - c.point):.1e}, dist {np.linalg.norm(x0 - w.point):.4f}")

#%%
# The enumeration oracle agrees with the active-set solver.
slow = brute_force_project(warm, x0)
print("oracle distance:", np.linalg.norm(slow.point - project(warm, x0).point))
reports = sweep(200)
print(sum(r.agree for r in reports), "/ 200 seeded instances agree")
