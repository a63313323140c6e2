# %% [markdown]
# # Finding zeros that lie in a field generated by logarithms
#
# For p = XY - 2*log 2 the point z = log 2 is a zero: log 2 * 2 = 2 log 2.
# The pipeline finds it from bounds alone, then verifies it numerically.

# %%
import json

from expcurves.pipeline import ExpFieldData, independence_report, kzeros
from expcurves.exact_numerics import BivariatePoly

# %%
data = ExpFieldData.from_json(
    {"poly": "X*Y - 2*c1", "log_generators": [{"log": 2}], "exp_values": [2], "precision": 256}
)
report = kzeros(data)
print(json.dumps(report["candidates"]))
for v in report["verified"]:
    print(v["status"], v["winding"], v["residual"])

# %% [markdown]
# XY - 1 has no such zeros over the rationals with 2*pi*i adjoined.

# %%
print(kzeros(ExpFieldData.from_json({"poly": "X*Y - 1", "log_generators": [], "exp_values": []}))["candidates"])

# %% [markdown]
# Fixed points of exp: searching for small algebraic relations among the
# first few, at 200 digits. None turn up, which is what one expects.

# %%
rep = independence_report(BivariatePoly.from_string("Y - X"), (0, 4, 0, 40), 3, 10**4, 665, max_zeros=5)
for z in rep["zeros"]:
    print(z["center_re"][:18], z["center_im"][:18])
print("relations:", rep["relations"])
print(rep["heuristic_certificate"])
