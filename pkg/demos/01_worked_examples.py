# The three one-dimensional examples: convergence, divergence, and an empty cut.
import numpy as np

from haloproj import RunConfig, contraction_operator, run, sign_operator, translation_operator, verify_trace

#%%
# T = 0.5 Id. Fix T = {0}, and every cut halves the remaining gap: x_n = 0.75^n.
cfg = RunConfig([1.0], contraction_operator(0.5, 1))
res = run(cfg)
print(res.status.value, "after", res.stop_index, "cuts; final point", res.final_point)
for n in range(6):
    print(f"  x_{n} = {res.trace.points[n, 0]:.6f}   0.75^{n} = {0.75**n:.6f}")

#%%
# T x = x + 1 has no fixed point. The cuts march off to infinity at speed 1/2.
cfg = RunConfig([0.0], translation_operator(1.0, [1.0]), divergence_radius=50.0)
res = run(cfg)
print(res.status.value, "at n =", res.stop_index, "with x_n =", res.final_point[0])

#%%
# T x = x + sigma(x) with sigma(0) = +1, sigma(1/2) = -1. The second cut
# contradicts the first, and the solver returns a Farkas certificate.
cfg = RunConfig([0.0], sign_operator())
res = run(cfg)
print(res.status.value, "; C_%d is empty" % res.stop_index)
print("cuts a z <= b:", np.c_[res.polyhedron.A, res.polyhedron.b].tolist())
print("certificate (index, weight):", res.infeasibility_certificate)

#%%
# The monotone distance and obtuse-angle inequalities hold along every run.
for cfg in (RunConfig([1.0], contraction_operator(0.5, 1)), RunConfig([0.0], sign_operator())):
    print(cfg.operator.describe(), "violations:", verify_trace(run(cfg), cfg))
