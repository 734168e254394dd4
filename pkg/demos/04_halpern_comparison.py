# Outer approximation against anchored (Halpern) averaging on T = 0.5 Id.
import time

from haloproj import RunConfig, contraction_operator, halpern_baseline, run

for tol in (1e-2, 1e-3, 1e-4):
    cfg = RunConfig([1.0], contraction_operator(0.5, 1), tol_residual=tol, max_iter=1_000_000)
    t0 = time.perf_counter()
    a = run(cfg)
    t1 = time.perf_counter()
    b = halpern_baseline(cfg)
    t2 = time.perf_counter()
    print(f"residual <= {tol:g}: outer approximation {a.stop_index} iterations ({t1 - t0:.3f} s), "
          f"Halpern {b.stop_index} iterations ({t2 - t1:.3f} s)")
