import hypothesis
import numpy as np
import pytest

from excir.data import Dataset, FeatureColumn, OutputVector

hypothesis.settings.register_profile(
    "default", max_examples=50, deadline=None, derandomize=True
)
hypothesis.settings.load_profile("default")


XOR_ROWS = np.array([[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=float)


@pytest.fixture
def xor_dataset() -> Dataset:
    return Dataset(
        (
            FeatureColumn("f1", "discrete", XOR_ROWS[:, 0]),
            FeatureColumn("f2", "discrete", XOR_ROWS[:, 1]),
        ),
        OutputVector(XOR_ROWS[:, 2], "discrete"),
        "y",
    )


@pytest.fixture
def xor_csv(tmp_path):
    path = tmp_path / "xor.csv"
    path.write_text("f1,f2,y\n0,0,0\n0,1,1\n1,0,1\n1,1,0\n", encoding="utf-8")
    return path


def make_dataset(columns: dict[str, np.ndarray], y=None, y_kind="continuous") -> Dataset:
    feats = []
    for name, values in columns.items():
        values = np.asarray(values, dtype=float)
        kind = "discrete" if np.all(values == np.floor(values)) else "continuous"
        feats.append(FeatureColumn(name, kind, values))
    output = OutputVector(np.asarray(y, dtype=float), y_kind) if y is not None else None
    return Dataset(tuple(feats), output, "y" if output is not None else None)
