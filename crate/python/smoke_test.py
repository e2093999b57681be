"""Build the extension with cargo, import it, and exercise the main entry points."""

import importlib.util
import shutil
import subprocess
import sys
import sysconfig
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def build_module() -> Path:
    subprocess.run(
        ["cargo", "build", "--release", "-p", "hardcore-rsa-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libhardcore_rsa_py.so"
    out = Path(tempfile.mkdtemp()) / ("hardcore_rsa" + sysconfig.get_config_var("EXT_SUFFIX"))
    shutil.copy(lib, out)
    return out


def load(path: Path):
    spec = importlib.util.spec_from_file_location("hardcore_rsa", path)
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


def main() -> int:
    hr = load(build_module())

    alpha = hr.renyi_alpha(1e-6)
    assert abs(alpha - 0.7475979202) < 1e-6, alpha

    p = hr.saturate_classical(50.0, seed=1)
    assert abs(sum(p.gaps) + 2 * p.rod_count - 50.0) < 1e-9
    assert p.max_gap < 2.0
    assert hr.saturate_classical(3.0, seed=2, mode="naive").rod_count == 1

    g = hr.run_ghost(100.0, seed=3)
    assert all(b - a >= 2.0 for a, b in zip(g.rods, g.rods[1:]))
    c = hr.run_ghost(40.0, seed=3, geometry="circle")
    assert abs(sum(c.gaps) + 2 * len(c) - 40.0) < 1e-9

    t = hr.solve_density(20.0)
    assert abs(t.value_at(5.0) - 5.0 / 3.0) < 1e-3
    assert abs(hr.solve_gap_expectation(1.0, 10.0).value_at(4.0) - 1.0) < 1e-3
    assert abs(hr.solve_retention(12.0).value_at(4.0) - 0.5) < 1e-3
    _, lam = hr.solve_h_and_lambda(1.5, l_big=50.0)
    assert lam > 0

    assert abs(hr.expected_rods_ghost(100.0) - 24.575364) < 1e-6
    assert hr.expected_rods_ghost(100.0, "circle") == 25.0
    assert abs(hr.occupancy(5.0, 20.0) - 0.5) < 1e-12
    assert abs(hr.success_prob(2, 20.0) - 0.7225) < 1e-12
    assert abs(hr.pair_correlation_circle(5.0) - 0.25) < 1e-12

    sq = hr.saturate_classical_2d(20.0, seed=4)
    assert sq.is_valid() and 40 <= sq.count <= 70
    assert sq.largest_empty_square(0.1) < 2.0
    gc = hr.ghost_then_classical(20.0, seed=5)
    assert gc.count >= gc.ghost_count

    rows = hr.run_experiment(
        'schema_version = 1\nprocess = "classical"\nL = 3.0\ntrials = 50\n'
        'master_seed = 1\nstatistics = ["rod_count"]\n'
    )
    assert rows[0].mean == 1.0 and rows[0].variance == 0.0

    try:
        hr.occupancy(1.0, 5.0)
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError below the validity floor")

    print("python smoke test: OK")
    return 0


if __name__ == "__main__":
    sys.exit(main())
