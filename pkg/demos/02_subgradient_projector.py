# Subgradient projector of f(x) = sum_n n x_n^(2n), truncated to R^d.
import numpy as np

from haloproj import RunConfig, ell2_example, run, subgradient_projector

#%%
# Along x_n = e_1 + e_n the residual ||x_n - T x_n|| = (1+n)/sqrt(4+4n^4)
# goes to zero, although every x_n stays at distance sqrt(2) from Fix T = {0}.
d = 60
f = ell2_example(d)
T = subgradient_projector(f)
for n in (2, 5, 11, 20, 51, 60):
    x = np.zeros(d)
    x[0] = x[n - 1] = 1.0
    print(f"n={n:2d}  f={f.value(x):4.0f}  ||g||={np.linalg.norm(f.gradient(x)):9.2f}  "
          f"residual={np.linalg.norm(x - T.evaluate(x)):.5f}  ||x||={np.linalg.norm(x):.4f}")

#%%
# The outer-approximation run from a few starting points in R^5.
T5 = subgradient_projector(ell2_example(5))
for x0 in ([1, 1, 0, 0, 0], [1, 1, 1, 1, 1], [0.5, -0.5, 0.5, -0.5, 0.5]):
    res = run(RunConfig(x0, T5))
    print(x0, res.status.value, "after", res.stop_index, "cuts, ||final|| =",
          f"{np.linalg.norm(res.final_point):.2e}")

#%%
# f is extremely flat near 0 in the high coordinates, so the residual drops
# below tolerance long before the iterate is small.
res = run(RunConfig([1, 1, 1, 1, 1], T5))
for n in range(0, len(res.trace), 100):
    print(f"n={n:4d}  ||x_n||={np.linalg.norm(res.trace.points[n]):.3e}  residual={res.trace.residual[n]:.3e}")
