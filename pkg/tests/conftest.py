import random
import sys

import pytest

from crispmetrics.core import ConfusionMatrix, ScoredDataset, write_dataset_csv


def random_matrices(count, n_max, seed):
    """Fixed-seed random matrices with 1 <= n <= n_max."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(1, n_max)
        cuts = sorted(rng.randint(0, n) for _ in range(3))
        a, b, c, d = cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], n - cuts[2]
        out.append(ConfusionMatrix(a, b, c, d))
    return out


def random_dataset(n, seed, ties=False):
    rng = random.Random(seed)
    labels = [rng.randint(0, 1) for _ in range(n)]
    if ties:
        scores = [float(rng.randint(0, 10)) for _ in range(n)]
    else:
        scores = [rng.gauss(lab * 1.0, 1.0) for lab in labels]
    return ScoredDataset.from_arrays(labels, scores, [f"r{i}" for i in range(n)])


@pytest.fixture
def m_ref():
    return ConfusionMatrix(40, 10, 20, 30)


def scores_for(m, labels):
    """Scores in {0, 1} that realize matrix m at threshold 0.5 on the given true labels.

    Class-0 instances are predicted 1 for the first m.c of them, class-1
    instances for the first m.d of them.
    """
    seen = [0, 0]
    quota = (m.c, m.d)
    out = []
    for y in labels:
        out.append(1.0 if seen[y] < quota[y] else 0.0)
        seen[y] += 1
    return out


def write_pair_manifest(tmp_path, matrices):
    """Write one dataset per classifier on a shared instance set plus a manifest."""
    first = next(iter(matrices.values()))
    labels = [0] * (first.a + first.c) + [1] * (first.b + first.d)
    ids = [f"x{i}" for i in range(len(labels))]
    lines = ["name,path,threshold"]
    for name, m in matrices.items():
        path = tmp_path / f"{name}.csv"
        write_dataset_csv(ScoredDataset.from_arrays(labels, scores_for(m, labels), ids), path)
        lines.append(f"{name},{path.name},0.5")
    manifest = tmp_path / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


A_MATRIX = ConfusionMatrix(85, 10, 0, 5)
B_MATRIX = ConfusionMatrix(70, 2, 15, 13)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "VERDICTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
