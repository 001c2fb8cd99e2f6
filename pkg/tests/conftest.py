import numpy as np
import pytest

from stepclust.ingest import epoch_columns


def wide_csv(rows, T, subjects=None):
    header = ["day_id", "subject_id"] + epoch_columns(T)
    lines = [",".join(header)]
    for i, (day_id, values) in enumerate(rows):
        subj = "" if subjects is None else subjects[i]
        lines.append(",".join([day_id, subj] + [str(v) for v in values]))
    return "\n".join(lines) + "\n"


@pytest.fixture
def write_csv(tmp_path):
    def _write(rows, T, name="days.csv", subjects=None):
        p = tmp_path / name
        p.write_text(wide_csv(rows, T, subjects))
        return p

    return _write


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
