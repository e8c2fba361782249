#!/usr/bin/env python3
"""One-off developer utility: export scikit-learn's bundled UCI tables
(iris, wine, breast cancer) as ARFF files under data/uci/.

The exported files are committed, so the package itself never needs
scikit-learn. Re-run only to regenerate them.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from sklearn.datasets import load_breast_cancer, load_iris, load_wine

from clfbench.data import from_arrays
from clfbench.datasets import write_arff

OUT = Path(__file__).resolve().parents[1] / "data" / "uci"


def sanitize(name: str) -> str:
    return name.strip().replace(" ", "_").replace("(", "").replace(")", "").replace("/", "_")


def export(loader, dataset_id: str) -> None:
    bunch = loader()
    d = from_arrays(
        dataset_id,
        bunch.data,
        bunch.target,
        class_values=[sanitize(str(t)) for t in bunch.target_names],
        feature_names=[sanitize(f) for f in bunch.feature_names],
    )
    OUT.mkdir(parents=True, exist_ok=True)
    write_arff(d, OUT / f"{dataset_id}.arff")
    print(f"wrote {OUT / (dataset_id + '.arff')}: {d.n_rows} rows, "
          f"{d.n_features} features, {d.schema.num_classes} classes")


if __name__ == "__main__":
    export(load_iris, "iris")
    export(load_wine, "wine")
    export(load_breast_cancer, "breast_cancer")
