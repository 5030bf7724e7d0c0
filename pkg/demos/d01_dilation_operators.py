# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Ancilla operators for the dilation
#
# The ancilla space is a grid of `M + 1` points on `[0, 1]`.  We build the SBP
# pair, the penalized generator and its symmetrized form, then look at how the
# tridiagonal stencil `Fh` relates to it.

# %%
import warnings

import numpy as np

from dilatesim import dilation

M = 8
ops = dilation.DilationOperators.build(M)
np.set_printoptions(precision=3, suppress=True, linewidth=120)

# %%
print("SBP residual:", dilation.sbp_residual(ops.D, ops.Hnorm))
print("H-skewness of the penalized generator:", dilation.h_skew_defect(ops.GhTilde, ops.Hnorm))
print(ops.Fh.real)

# %% [markdown]
# `Fh` differs from the symmetrized generator only in the two corners.

# %%
print(np.abs(ops.delta).round(3).real)

# %% [markdown]
# ## The triple `(Fh, r_h, l_h)`
#
# `r_h` is the normalized profile `(j/M)^beta`.  The readout functional at a
# mid index `x` undoes the normalization, so `<l_h|r_h> = 1` there.

# %%
beta = 3
with warnings.catch_warnings():
    warnings.simplefilter("ignore")  # M + 1 = 9 has no qubit layout; fine here
    tr = dilation.build_triple(beta, M)
for x in tr.mid_indices:
    print(x, tr.weight(int(x)) * tr.r[x].real)

# %% [markdown]
# Higher moments drift away from one, slowly, as `k` grows.

# %%
M = 255
tr = dilation.build_triple(beta, M)
F = dilation.build_fh(M)
for k in (0, 1, 4, 16, 32):
    print(k, dilation.moment_defect(F, tr, k))

# %%
for beta in (3, 4, 5):
    print(beta, [f"{dilation.interior_defect(beta, M) * M**2 / dilation.c_theta(beta):.4f}"
                 for M in (32, 128, 512)])
