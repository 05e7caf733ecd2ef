import json

import numpy as np
import pytest

from edforecast.data import SourceDataset


def make_dataset(source_id="SRC", n=80, n_train=64, r=1, k=2, u=2, kind="wave", seed=0):
    """Small synthetic normalized dataset with the contract's shapes."""
    rng = np.random.default_rng(seed)
    n_chi = (r + 1) * k
    t_index = np.arange(r, r + n, dtype=np.int64)
    if kind == "constant":
        chi = np.full((n, n_chi), 0.5, dtype=np.float32)
        psi = np.full((n, u), 0.5, dtype=np.float32)
    else:
        base = np.sin(np.arange(n + n_chi + u * k) / 6.0) * 0.3 + 0.5
        chi = np.stack([base[i : i + n_chi] for i in range(n)]).astype(np.float32)
        psi = np.stack([base[i + n_chi : i + n_chi + u] for i in range(n)]).astype(np.float32)
        chi += rng.normal(0, 0.01, chi.shape).astype(np.float32)
    return SourceDataset(
        source_id=source_id, t_index=t_index, chi=chi, psi=psi,
        n_train=n_train, norm_min=1.0, norm_max=9.0,
    )


def write_dataset_files(tmp_path, dataset, r, k, u):
    """Materialize a SourceDataset as the csv + manifest file contract."""
    n_chi = (r + 1) * k
    header = ["t_index"] + [f"chi_{i}" for i in range(n_chi)] + [f"psi_{j}" for j in range(u)]
    lines = [",".join(header)]
    for i in range(dataset.n):
        cells = [str(int(dataset.t_index[i]))]
        cells += [repr(float(v)) for v in dataset.chi[i]]
        cells += [repr(float(v)) for v in dataset.psi[i]]
        lines.append(",".join(cells))
    csv_path = tmp_path / f"dataset_{dataset.source_id}.csv"
    csv_path.write_text("\n".join(lines) + "\n")
    manifest = {
        "r": r, "k": k, "u": u, "train_fraction": dataset.n_train / dataset.n,
        "sources": {
            dataset.source_id: {
                "file": csv_path.name,
                "patterns": dataset.n,
                "train_patterns": dataset.n_train,
                "test_patterns": dataset.n - dataset.n_train,
                "normalizer": {"min": dataset.norm_min, "max": dataset.norm_max},
            }
        },
    }
    manifest_path = tmp_path / "manifest.json"
    manifest_path.write_text(json.dumps(manifest))
    return str(csv_path), str(manifest_path)


@pytest.fixture
def wave_dataset():
    return make_dataset()


@pytest.fixture
def constant_dataset():
    return make_dataset(kind="constant")
