# Scalar families U(n, m) = gamma^(n-m)
#
# For a constant scalar generator everything is known in closed form: the
# growth bound is ln|gamma| and the convolution norm on c0 is 1/(1-|gamma|).
# The product of the two stays below -1 and creeps up to it as gamma -> 1.

# %%
import numpy as np

from dtvstab.certify import sweep, sweep_csv

gammas = [0.5, 0.9, 0.99, 0.999]
rows = sweep(gammas)
for r in rows:
    print(f"gamma={r['gamma']:<6} omega0={r['omega0']:+.6f}  c=[{r['c_lower']:.6f}, {r['c_upper']:.6f}]  product={r['product_corner']:+.6f}")

# %%
# closed form for comparison
for g in gammas:
    print(g, np.log(g) / (1 - g))

# %%
# a finer grid, written as CSV
print(sweep_csv(sweep(np.linspace(0.05, 0.95, 10))))
