"""Grid pre-distance of degenerate metrics.

For ds^2 = du^2 + v^2 dv^2 the distance from (0, 0) to (0, 1) is
int_0^1 v dv = 1/2, while moving along the singular set v = 0 costs exactly
the Euclidean length.  The graph distance over-estimates the infimum over
paths and converges under refinement; the table shows the refinement study
the CLI writes to CSV.  The last part shows the axiom report for a metric all
of whose semi-definite points are peaks, and the rejection of
du^2 + u^2 dv^2, whose singular points on the v-axis are not peaks.

Run:  python demos/distance_near_singular_set.py
"""
from kossowski import Jet2, metric_from_A2_data
from kossowski.distance import convergence_rows, metric_axiom_report
from kossowski.errors import NonPeakPresent
from kossowski.metric import metric_from_coeffs

N = 12
u, v = Jet2.var_u(N), Jet2.var_v(N)
one, zero = u.one_like(), Jet2.zero(N)

m = metric_from_coeffs(one, zero, v * v)
print("du^2 + v^2 dv^2, (0,0) -> (0,1); exact 0.5")
for p, q, d, n in convergence_rows(m, (0.0, 0.0), (0.0, 1.0), [25, 50, 100, 200, 400]):
    print(f"  n={n:4d}  d={d:.6f}")
print("du^2 + v^2 dv^2, (0,0) -> (0.5,1)")
for p, q, d, n in convergence_rows(m, (0.0, 0.0), (0.5, 1.0), [25, 50, 100, 200, 400]):
    print(f"  n={n:4d}  d={d:.6f}")

rep = metric_axiom_report(metric_from_A2_data(v, zero), samples=100, n=200)
print("A2 builder h=v:", {k: rep.to_json()[k] for k in ("triangle_violations", "positivity_failures",
                                                       "ball_failures", "passed")})
try:
    metric_axiom_report(metric_from_coeffs(one, zero, u * u), samples=10, n=32)
except NonPeakPresent as exc:
    print("du^2 + u^2 dv^2 rejected:", exc)
