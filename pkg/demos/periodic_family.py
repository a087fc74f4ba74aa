# A period-2 scalar family with a transient prefix
#
# The generators alternate 2 and 1/8, so single steps can double the state
# while the two-step monodromy contracts by 1/4. A large first step adds
# transient growth without changing the asymptotics.

# %%
import numpy as np

from dtvstab.certify import certify_family
from dtvstab.family import EvolutionFamily, GeneratorSpec, growth_bound_oracle, semigroup_spectral_radius
from dtvstab.sequences import SpaceSpec

spec = GeneratorSpec.periodic([[[2.0]], [[0.125]]], prefix=[[[3.0]]])
fam = EvolutionFamily(spec)

g = growth_bound_oracle(fam)
print("omega0 =", g.value, "(ln 0.5 =", -0.6931471805599453, ")")
r = semigroup_spectral_radius(fam)
print("semigroup radius in", r.lower, r.upper)

# %%
# orbit norms from every start in one period
for m in (0, 1, 2):
    print(m, [round(float(np.linalg.norm(fam.propagator(m + k, m), 2)), 4) for k in range(8)])

# %%
cert = certify_family(spec, SpaceSpec("c0"), timestamp=False)
print(cert.verdict)
print("c in", cert.c_bracket["lower"], cert.c_bracket["upper"], "via", cert.c_bracket["upper_provenance"])
print("product corners", cert.thm12_i["product_favorable"], cert.thm12_i["product_conservative"])
print("disk check", cert.thm12_ii["status"], "margin", cert.thm12_ii["margin"])
