"""A one-parameter family of isometric surfaces.

Initial data (a, c) along the singular curve determine a realization; the
straight line between two admissible choices with a(0) < 0 stays admissible,
so every member of the family is isometric to the same Kossowski metric while
its limiting normal curvature kappa_nu(0) = -a_s(0) varies continuously.
Choosing the alternate class (-a, -2 mu - c) for one endpoint flips the sign
of a(0) and is refused with SignClash.

Run:  python demos/isometric_deformation.py
"""
import numpy as np

from kossowski import Jet1, Jet2, metric_from_A2_data
from kossowski.errors import SignClash
from kossowski.metric import connection_coeffs
from kossowski.realization import (
    CurveSpec,
    alternate_class,
    deformation_path,
    initial_data,
    limiting_normal_curvature,
    realize_from_data,
)
from kossowski.verify import first_form_residual

N = 12
u, v = Jet2.var_u(N), Jet2.var_v(N)
t = Jet1.var(N)
metric = metric_from_A2_data(v + 0.3 * u * v, 0.2 * u)
alpha = connection_coeffs(metric)[0]

spec0 = CurveSpec(Jet1.constant(0.0, N), Jet1.constant(0.1, N))
spec1 = CurveSpec(0.5 - 0.2 * t, -0.4 + 0.0 * t)
end0, end1 = initial_data(spec0, alpha), initial_data(spec1, alpha)

print("   s   kappa_nu(0)   -a_s(0)   first-form residual")
for s in np.linspace(0.0, 1.0, 5):
    a, c = deformation_path(end0, end1, s)
    g = realize_from_data(metric, a, c)
    print(f"{s:5.2f}  {limiting_normal_curvature(g):11.6f}  {-float(a[0]):9.6f}  {first_form_residual(g):.1e}")

try:
    deformation_path(end0, alternate_class(*end1, spec1.mu), 0.5)
except SignClash as exc:
    print("alternate endpoint refused:", exc)
