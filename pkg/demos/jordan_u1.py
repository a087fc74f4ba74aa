# Non-normal transient growth and the u1 bound
#
# T = [[0.5, 1], [0, 0.5]] has spectral radius 1/2 but ||T^k|| grows before
# it decays. The quantity u1 = sum_k ||T^k|| bounds the convolution norm on
# every l^p, and ln r(T) * u1 stays below -1.

# %%
import numpy as np

from dtvstab.certify import corollary2_report

T = np.array([[0.5, 1.0], [0.0, 0.5]])
print([round(float(np.linalg.norm(np.linalg.matrix_power(T, k), 2)), 4) for k in range(10)])

# %%
rep = corollary2_report(T)
print("u1 in", rep["u1_lower"], rep["u1_upper"])
print("ln r(T) * u1 =", rep["product"])
for row in rep["lp_rows"]:
    print("p =", row["p"], "truncated norms", [round(x, 4) for x in row["lowers"]])
