# %% [markdown]
# # A proximal SVM in one linear solve
#
# Training a linear proximal SVM needs two sums over the data: E^T E and
# E^T D e, where each row of E is a feature vector with -1 appended and D
# holds the +1/-1 labels. The plane then comes from one SPD solve.

# %%
import numpy as np

from halfsplit import accumulate_shard, classify_sign, decision_value, merge, solve_plane

rng = np.random.default_rng(0)
pos = rng.normal(size=(50, 2)) + [2.0, 1.0]
neg = rng.normal(size=(50, 2)) - [2.0, 1.0]
x = np.vstack([pos, neg])
y = np.repeat([1, -1], 50)

# %%
acc = accumulate_shard(x, y, d=2)
print("E^T E =\n", acc.ete)
print("E^T D e =", acc.etde)

# %%
plane = solve_plane(acc, mu=1.0)
print("w =", plane.w, " gamma =", plane.gamma)
correct = sum(classify_sign(plane, r) == s for r, s in zip(x, y))
print(f"training points on the right side: {correct}/{len(y)}")

# %% [markdown]
# The sums are additive, so two halves of the data can be accumulated apart
# and merged. This is what the shard engine does.

# %%
halves = merge(accumulate_shard(x[::2], y[::2], 2), accumulate_shard(x[1::2], y[1::2], 2))
print("max |difference| after merge:", np.abs(halves.ete - acc.ete).max())
print("decision value at origin:", decision_value(solve_plane(halves, 1.0), [0.0, 0.0]))

# %% [markdown]
# mu trades fit against the ridge term: small mu shrinks the plane toward 0.

# %%
for mu in (0.01, 0.1, 1.0, 10.0, 1e4):
    p = solve_plane(acc, mu)
    print(f"mu={mu:<8g} |w|={np.linalg.norm(p.w):.4f}")
