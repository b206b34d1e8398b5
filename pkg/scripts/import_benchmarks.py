"""Regenerate the bundled TA/DMU instance files and bounds registry.

Source: the ``jsp_instance_utils`` wheel (MIT), whose ``instances.py`` holds
every classic instance as a (2, J, M) array (machine order, durations) plus
its best-known makespan. Usage:

    pip download jsp-instance-utils --no-deps -d /tmp/w
    python scripts/import_benchmarks.py /tmp/w/jsp_instance_utils-*.whl
"""

import argparse
import importlib.util
import re
import sys
import tempfile
import zipfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from shoprepair.instances import write_standard  # noqa: E402
from shoprepair.model import Instance  # noqa: E402

KEEP = re.compile(r"^(ta\d\d|dmu\d\d)$")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("wheel")
    ap.add_argument("--out", default=str(ROOT / "src" / "shoprepair" / "data"))
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        with zipfile.ZipFile(args.wheel) as zf:
            zf.extract("jsp_instance_utils/instances.py", tmp)
        spec = importlib.util.spec_from_file_location("src_instances",
                                                      Path(tmp) / "jsp_instance_utils" / "instances.py")
        mod = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(mod)

    out = Path(args.out)
    (out / "instances").mkdir(parents=True, exist_ok=True)
    bounds = []
    names = sorted(n for n in vars(mod) if KEEP.match(n))
    for name in names:
        arr = getattr(mod, name)
        machines, durations = arr[0], arr[1]
        inst = Instance.from_lists(name, [list(zip(map(int, mr), map(int, dr)))
                                          for mr, dr in zip(machines, durations)],
                                   num_machines=int(machines.shape[1]))
        text = f"# {name}: {inst.num_jobs} jobs x {inst.num_machines} machines\n" + write_standard(inst)
        (out / "instances" / f"{name}.txt").write_text(text)
        ub = getattr(mod, f"{name}_makespan", None)
        if ub is not None:
            optimal = getattr(mod, f"{name}_makespan_is_optimal", False)
            bounds.append(f"{name} {int(ub)}" + ("  # optimal" if optimal else ""))
    header = "# best-known makespan upper bounds (name UB); '# optimal' marks proven optima\n"
    (out / "bounds.txt").write_text(header + "\n".join(bounds) + "\n")
    print(f"wrote {len(names)} instances and {len(bounds)} bounds to {out}")


if __name__ == "__main__":
    main()
