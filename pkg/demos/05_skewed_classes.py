# %% [markdown]
# # Split selection on skewed classes
#
# With 90% of rows in one class, plain accuracy barely separates candidate
# splits: almost any plane gets ~0.9. The symmetric F1 score (mean of the F1
# of each side) rewards splits that also get the small side right.

# %%
from halfsplit import BuildConfig, SyntheticSpec, build_tree, generate_synthetic, stratified_split
from halfsplit.metrics import accuracy, f1_macro_from_split
from halfsplit.tree_builder import score_candidates

data = generate_synthetic(SyntheticSpec(n_classes=3, d=2, proportions=[0.9, 0.05, 0.05], total=1000,
                                        scale=2.0, sigma=1.0, seed=1))
print("class counts", data.class_counts())

# %%
train, val = stratified_split(data, 0.2, seed=0)
for idx, part, plane, conf in score_candidates(train, val, [0, 1, 2], BuildConfig()):
    print(f"{str(part):<14} accuracy {accuracy(conf):.3f}  f1 {f1_macro_from_split(conf):.3f}  {conf}")

# %%
for metric in ("accuracy", "f1"):
    tree = build_tree(data, BuildConfig(selection_metric=metric))
    print(f"{metric:<9} picks root split {tree.root.partition}")
