"""The evaluation harness: does private PCA cost any model accuracy?

Five-fold cross validation on a wine-quality-shaped table.  Within each
fold the transform is fitted on training rows only, then a linear model is
trained on the projections.  Private PCA tracks the pooled-plaintext
baseline to the fourth decimal; fitting PCA per provider separately is the
one that loses accuracy.
"""

from pppca.datasets import make_wine_like
from pppca.evaluation import compare, render_report

wine = make_wine_like(rows=800)
print(f"table: {wine.rows} rows, {wine.cols} features, target '{wine.label_name}'")
print("methods: pooled-plaintext PCA, per-provider PCA, private PCA (both kinds)\n")

reports = compare(
    wine,
    parties=2,
    k=6,
    methods=["centralized", "separate", "pppca-he", "pppca-ss"],
    seed=1,
    key_bits=512,       # demo speed; protocol runs use 2048-bit keys
    allow_test_key=True,
)
print(render_report(reports))

by_name = {r.method: r for r in reports}
base = by_name["centralized"].mean_metric
for method in ("separate", "pppca-he", "pppca-ss"):
    delta = by_name[method].mean_metric - base
    print(f"RMSE delta vs centralized, {method:12s}: {delta:+.5f}")
