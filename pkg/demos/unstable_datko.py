# Detecting instability with Datko sums
#
# For an exponentially stable family the sums sum_n ||U(n, j) x||^p stay
# bounded. Here the generator has spectral radius 1.5, so the partial sums
# blow past the divergence threshold after a few dozen steps.

# %%
import numpy as np

from dtvstab.certify import certify_family, datko_check
from dtvstab.family import EvolutionFamily, GeneratorSpec
from dtvstab.sequences import SpaceSpec

theta = 0.4
rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
spec = GeneratorSpec.constant(1.5 * rot)

for row in datko_check(EvolutionFamily(spec), 2, j_max=2, horizon=200):
    print(f"j={row.j} e{row.basis}: diverged={row.diverged} at n={row.diverged_at}")

# %%
cert = certify_family(spec, SpaceSpec("c0"), timestamp=False)
print(cert.verdict, cert.exit_code)
print(cert.notes)

# %%
# the same rotation scaled to radius 0.9 is certified
print(certify_family(GeneratorSpec.constant(0.9 * rot), SpaceSpec("c0"), timestamp=False).verdict)
