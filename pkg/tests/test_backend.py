import os
import subprocess
import sys

import numpy as np

from stepclust import _accel

SCRIPT = """
import numpy as np
from stepclust import backend_name
from stepclust.pipeline import PipelineConfig, run_pipeline
from stepclust.simulation import SimSpec, generate
ds = generate(SimSpec("step-pattern", (20, 20, 20), seed=1))
for method in ("kmeans", "pam"):
    r, m, _ = run_pipeline(ds.matrix, PipelineConfig(k=3, method=method))
    print(backend_name(), method, " ".join(map(str, r.labels)), repr(float(m.eigenvalues[0])))
"""


def run(flag):
    env = dict(os.environ)
    env.pop("STEPCLUST_DISABLE_NUMBA", None)
    if flag:
        env["STEPCLUST_DISABLE_NUMBA"] = flag
    out = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    return [line.split(" ", 2) for line in out.stdout.strip().splitlines()]


def test_env_flag_selects_numpy_and_results_match():
    fast, slow = run(""), run("1")
    assert {r[0] for r in fast} == {"numba" if _accel.HAVE_NUMBA else "numpy"}
    assert {r[0] for r in slow} == {"numpy"}
    for a, b in zip(fast, slow):
        assert a[1:] == b[1:]


def test_flag_spellings():
    for flag in ("true", "ON", "yes"):
        assert run(flag)[0][0] == "numpy"
    assert np.isin(_accel.backend_name(), ["numba", "numpy"])
