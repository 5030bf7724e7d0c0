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
# # Block encodings and preparing `|r_h>`

# %%
import numpy as np

from dilatesim import blockenc, circuit_io, qsvt
from dilatesim.circuits import count_resources

np.set_printoptions(precision=4, suppress=True, linewidth=120)
theta = 2 / 7

# %% [markdown]
# `U_init` block-encodes `diag(j/M)` with `alpha = 1`.

# %%
be = blockenc.build_u_init(2)
print(blockenc.extract_block(be).real)
print(circuit_io.to_text(be.circuit))

# %% [markdown]
# The shift and the stencil.

# %%
print(blockenc.extract_block(blockenc.build_u_r(2)).real)
f = blockenc.build_u_theta_f(2, theta)
print(f.alpha, f.num_ancillas)
print((blockenc.extract_block(f) * f.alpha).real)

# %% [markdown]
# ## QSVT turns `diag(j/M)` into `diag((j/M)^beta)`

# %%
xs = np.linspace(0, 1, 6)
for beta in (3, 5, 7):
    print(beta, np.abs(qsvt.qsvt_polynomial(qsvt.load_phases(beta), xs) - xs**beta).max())

# %%
for m, beta in [(3, 3), (4, 3), (4, 4)]:
    std = qsvt.prepare_rh(m, beta, amplify="standard")
    ext = qsvt.prepare_rh(m, beta, amplify="exact")
    print(m, beta, f"p={std.success_probability:.4f}", f"F={std.fidelity:.12f}",
          f"grover k={std.iterates} -> {std.amplified_probability:.3f}",
          f"exact -> {ext.amplified_probability:.6f}")

# %%
rc = count_resources(qsvt.prep_circuit(3, 3))
print(circuit_io.resources_csv(rc))
