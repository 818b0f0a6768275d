import subprocess
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


@pytest.mark.parametrize("name,args", [
    ("heat_capacity_curve.py", ["--points", "5"]),
    ("zeroth_order_gap.py", ["--alphas", "0.01", "0.003", "0.001"]),
    ("mc_convergence.py", ["--max-exp", "4"]),
])
def test_script_runs(name, args):
    proc = subprocess.run([sys.executable, str(SCRIPTS / name), *args], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.strip()
