# %% [markdown]
# # Tree vs One-vs-One vs One-vs-Rest
#
# All three use the same proximal solver, so differences come from how the
# planes are organized. OvO evaluates n(n-1)/2 planes per sample, OvR n, the
# tree at most ceil(log2 n).

# %%
from halfsplit import BuildConfig, SyntheticSpec, generate_synthetic, stratified_split
from halfsplit.bench import run_benchmark

data = generate_synthetic(SyntheticSpec(n_classes=10, d=6, counts=[2000] * 10, scale=3.0, sigma=1.0, seed=1))
train, test = stratified_split(data, 0.5, seed=0)

# %%
report = run_benchmark(train, test, config=BuildConfig(), reps=3)
print(f"{'method':<6}{'acc':>8}{'train s':>10}{'test s':>10}{'planes':>8}{'evals/row':>11}")
for r in report.methods.values():
    print(f"{r.method:<6}{r.accuracy:>8.4f}{r.train_seconds_median:>10.4f}{r.test_seconds_median:>10.5f}"
          f"{r.planes_trained:>8}{r.planes_evaluated_per_sample:>11.2f}")

# %%
t, o = report.methods["tree"], report.methods["ovo"]
print(f"tree test time is {100 * (1 - t.test_seconds_median / o.test_seconds_median):.1f}% below OvO")
print(report.to_csv())
