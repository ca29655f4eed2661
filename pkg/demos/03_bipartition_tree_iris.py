# %% [markdown]
# # The bipartition tree on Iris
#
# At each node every balanced split of the node's classes gets a plane; the
# split scoring best on a held-out slice is kept and both halves recurse.

# %%
import numpy as np

from halfsplit import (
    BuildConfig,
    Internal,
    apply_standardizer,
    build_tree,
    enumerate_bipartitions,
    fit_standardizer,
    load_iris,
    predict,
    predict_batch,
    stratified_split,
)

iris = load_iris()
train, test = stratified_split(iris, 1 / 3, seed=0)
std = fit_standardizer(train)
train, test = apply_standardizer(std, train), apply_standardizer(std, test)

# %%
for n in (2, 3, 4, 5, 10):
    print(n, "classes ->", len(enumerate_bipartitions(list(range(n)))), "candidate splits")
print(enumerate_bipartitions([0, 1, 2]))

# %%
tree = build_tree(train, BuildConfig(mu=1.0, seed=0))


def show(node, indent=""):
    if isinstance(node, Internal):
        names = lambda side: "+".join(iris.class_names[c] for c in side)
        print(f"{indent}{names(node.partition.positive)} | {names(node.partition.negative)}"
              f"  (validation accuracy {node.validation_accuracy:.3f})")
        show(node.pos_child, indent + "  ")
        show(node.neg_child, indent + "  ")
    else:
        print(f"{indent}-> {iris.class_names[node.class_id]}")


show(tree.root)
print("depth", tree.depth(), "planes trained", tree.planes_trained)

# %%
labels, evaluations, seconds = predict_batch(tree, test.features)
print(f"test accuracy {np.mean(labels == test.labels):.3f}, {evaluations / test.m:.2f} planes per row")
print("one sample:", predict(tree, test.features[0]), "true", test.labels[0])
