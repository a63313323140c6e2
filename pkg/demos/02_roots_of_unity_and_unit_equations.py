# %% [markdown]
# # Vanishing sums of roots of unity, unit equations
#
# The order bound tells us how far to look; enumeration confirms that
# nothing escapes it.

# %%
from fractions import Fraction

from expcurves.expdioph import (
    ExpDiophInstance,
    FinRankMulGroup,
    UnitEquationInstance,
    norm_bound,
    solve_bounded,
    solve_unit_equation,
)
from expcurves.rou_sums import dz_order_bound, enumerate_vanishing_sums

# %%
for k in range(1, 5):
    print("k =", k, "order bound", dz_order_bound(k, 1))

# %% [markdown]
# With coefficients +-1 and k = 2 only z - z and 1 + z + z^2 shapes
# survive, so every order divides 6.

# %%
sums = enumerate_vanishing_sums(2, 30, coefficients=[Fraction(1), Fraction(-1)])
print(len(sums), "sums; largest order", max(s.order for s in sums))

# %% [markdown]
# x1 + x2 = 1 with both x_i roots of unity: only the primitive sixth roots.

# %%
for sol in solve_unit_equation(UnitEquationInstance([1, 1], FinRankMulGroup(None, ())), 0):
    print([str(g) for g in sol])

# %% [markdown]
# An exponential Diophantine equation, 2^m = m + 1, solved in a box
# whose size comes from the norm bound.

# %%
N = norm_bound(10, 5)
print("N =", N)
print(solve_bounded(ExpDiophInstance([1, "-m-1"], [[2], [1]]), N))
