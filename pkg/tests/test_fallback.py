import os
import subprocess
import sys

from rwb import kernel

SCRIPT = """
from rwb import kernel, parse_formula
from rwb.chase import chase
from rwb.generate import load_theory
t = load_theory("transitivity")
r = chase(parse_formula("[x:A, y:A, z:A] R(x, y) & R(y, z)", t.signature), t)
print(kernel.BACKEND, r.status, sorted(r.model.relations["R"]))
"""


def _run(env):
    out = subprocess.run([sys.executable, "-c", SCRIPT], env=dict(os.environ, **env),
                         capture_output=True, text=True, check=True)
    return out.stdout.split(" ", 1)


def test_pure_python_fallback_selected_and_agrees():
    backend, rest = _run({"RWB_PURE_PYTHON": "1"})
    assert backend == "python"
    default_backend, default_rest = _run({"RWB_PURE_PYTHON": "0"})
    assert default_backend == kernel.BACKEND
    assert rest == default_rest


def test_compiled_kernel_built():
    assert kernel.BACKEND == "cython"
