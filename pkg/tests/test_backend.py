"""The numba kernels and the numpy fallback must give identical counts."""
import json
import os
import subprocess
import sys

import pytest

from a3quartic import _accel

SCRIPT = """
import json
from a3quartic import _accel, kernels
Bs = [1, 2, 17, 100, 999, 5000]
print(json.dumps({"backend": _accel.BACKEND,
                  "direct": [kernels.count_direct_half(B) for B in Bs],
                  "torsor": [kernels.count_torsor(B) for B in Bs]}))
"""


def _run(disable):
    env = dict(os.environ)
    env.pop("A3Q_DISABLE_NUMBA", None)
    if disable:
        env["A3Q_DISABLE_NUMBA"] = "1"
    out = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True,
                         text=True, check=True)
    return json.loads(out.stdout)


@pytest.mark.skipif(not _accel.USE_NUMBA, reason="numba is not available")
def test_backends_agree():
    fast, slow = _run(False), _run(True)
    assert fast["backend"] == "numba" and slow["backend"] == "numpy"
    assert fast["direct"] == slow["direct"]
    assert fast["torsor"] == slow["torsor"]


def test_flag_values():
    assert _accel.BACKEND in ("numba", "numpy")
    assert _accel.available_workers() >= 1
