# %% [markdown]
# # Map/reduce training on shards
#
# Rows are split into contiguous shards; each shard's Gram sums are a map
# task and the reducer adds them in shard order. The order is fixed, so the
# threaded backend gives exactly the same bits as the serial one.

# %%
import numpy as np

from halfsplit import ExecConfig, LabeledView, run_confusion_job, run_training_job, shard_rows
from halfsplit import SyntheticSpec, generate_synthetic

data = generate_synthetic(SyntheticSpec(n_classes=4, d=3, counts=[2500] * 4, sigma=1.5, seed=3))
# classes 0 and 1 against 2 and 3
view = LabeledView.from_partition(data, positive=[0, 1], negative=[2, 3])
print(view.m, "rows,", view.d, "features")

# %%
print(shard_rows(10, 3))
ref = run_training_job(view, shard_rows(view.m, 1), mu=1.0)
for k in (2, 4, 8, 16):
    p = run_training_job(view, shard_rows(view.m, k), mu=1.0)
    print(f"k={k:2d}  max rel diff {np.max(np.abs(p.w - ref.w) / np.abs(ref.w)):.2e}")

# %%
plan = shard_rows(view.m, 8)
serial = run_training_job(view, plan, 1.0, ExecConfig(backend="serial"))
threaded = run_training_job(view, plan, 1.0, ExecConfig(backend="threaded", threads=4))
print("bit-identical:", serial.w.tobytes() == threaded.w.tobytes() and serial.gamma == threaded.gamma)

# %%
conf = run_confusion_job(serial, view, plan)
print(conf, "total", conf.total)
