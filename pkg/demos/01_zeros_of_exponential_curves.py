# %% [markdown]
# # Zeros of f(z) = p(z, e^z)
#
# Rigorous isolation with the argument principle, then refinement.
# Every zero printed below comes with a box of winding number one.

# %%
import mpmath

from expcurves.exact_numerics import BivariatePoly
from expcurves.zero_finder import Box, ZeroFinderConfig, isolate_zeros, refine_zero

# %% [markdown]
# e^z - 1 vanishes at 2*pi*i*k. Three of them sit inside the box.

# %%
zs = isolate_zeros(BivariatePoly.from_string("Y - 1"), Box(-1, 1, -8, 8))
for z in zs:
    print(mpmath.nstr(z.center, 20), "multiplicity", z.multiplicity)

# %% [markdown]
# Fixed points of exp: e^z = z. They drift to the right slowly, roughly
# like log(2*pi*k) + 2*pi*i*k.

# %%
p = BivariatePoly.from_string("Y - X")
cfg = ZeroFinderConfig(record_tree=True)
zs = isolate_zeros(p, Box(0, 4, 0, 40), cfg)
for z in zs:
    print(mpmath.nstr(z.center, 25))

# each subdivision step should conserve the zero count
print("conserved:", all(sum(c) == n for _, n, _, c in cfg.tree))

# %% [markdown]
# Refining one of them to a thousand bits is cheap; Krawczyk does the work.

# %%
z = refine_zero(p, zs[1].box, target_bits=1000)
print(mpmath.nstr(z.center, 60))
print("residual bound", mpmath.nstr(z.residual_bound, 5))
