"""Benchmark instance parsing, serialization and the upper-bound registry.

Two on-disk layouts are understood:

* standard: ``J M`` header, then J rows of ``machine duration`` pairs
  (machines 0-based). Lines starting with ``#`` are comments.
* Taillard: processing-time matrix followed by a machine-order matrix with
  1-based machine ids, either with the ``Times`` / ``Machines`` section
  markers of the original distribution or as a bare ``J M`` header followed
  by the two matrices.
"""

from __future__ import annotations

import logging
import re
from importlib import resources
from pathlib import Path

from .model import Instance, Schedule, ScheduledOp
from .rng import SplitMix64

log = logging.getLogger(__name__)


class ParseError(ValueError):
    def __init__(self, msg: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + msg)
        self.line = line
        self.column = column


def _tokens(text: str) -> list[tuple[str, int, int]]:
    """Whitespace tokens with their (1-based) line and column, comments dropped."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.lstrip().startswith("#"):
            continue
        for m in re.finditer(r"\S+", raw):
            out.append((m.group(), lineno, m.start() + 1))
    return out


def _int(tok: tuple[str, int, int], what: str) -> int:
    s, line, col = tok
    try:
        return int(s)
    except ValueError:
        raise ParseError(f"expected integer {what}, got {s!r}", line, col) from None


def parse_standard(text: str, name: str = "instance") -> Instance:
    toks = _tokens(text)
    if len(toks) < 2:
        raise ParseError("missing 'J M' header", 1)
    n_jobs, n_mach = _int(toks[0], "job count"), _int(toks[1], "machine count")
    if n_jobs < 0 or n_mach < 0:
        raise ParseError("negative dimensions", toks[0][1])
    body = toks[2:]
    if len(body) != 2 * n_jobs * n_mach:
        where = body[-1] if body else toks[1]
        raise ParseError(f"expected {2 * n_jobs * n_mach} integers after the header "
                         f"({n_jobs} rows of {n_mach} pairs), found {len(body)}", where[1], where[2])
    jobs = []
    for r in range(n_jobs):
        row = body[r * 2 * n_mach:(r + 1) * 2 * n_mach]
        ops = []
        for i in range(0, len(row), 2):
            m, d = _int(row[i], "machine"), _int(row[i + 1], "duration")
            if not 0 <= m < n_mach:
                raise ParseError(f"machine id {m} outside [0, {n_mach})", row[i][1], row[i][2])
            if d < 0:
                raise ParseError(f"negative duration {d}", row[i + 1][1], row[i + 1][2])
            ops.append((m, d))
        jobs.append(tuple(ops))
    return Instance(name, n_jobs, n_mach, tuple(jobs))


def parse_taillard(text: str, name: str = "instance") -> Instance:
    lines = text.splitlines()
    marker = {ln.strip().lower(): i for i, ln in enumerate(lines)}
    if "times" in marker and "machines" in marker:
        # header: the first line holding only integers carries J and M
        dims = None
        for i, ln in enumerate(lines[:marker["times"]]):
            parts = ln.split()
            if len(parts) >= 2 and all(re.fullmatch(r"-?\d+", p) for p in parts):
                dims = (int(parts[0]), int(parts[1]), i + 1)
                break
        if dims is None:
            raise ParseError("no dimension line before 'Times'", 1)
        n_jobs, n_mach, _ = dims
        t_start, m_start = marker["times"] + 1, marker["machines"] + 1
        times = _matrix(lines, t_start, n_jobs, n_mach)
        machines = _matrix(lines, m_start, n_jobs, n_mach)
        trailing = _tokens("\n".join(lines[m_start + n_jobs:]))
        if trailing:
            raise ParseError("unexpected data after machine matrix", m_start + n_jobs + trailing[0][1])
    else:
        toks = _tokens(text)
        if len(toks) < 2:
            raise ParseError("missing 'J M' header", 1)
        n_jobs, n_mach = _int(toks[0], "job count"), _int(toks[1], "machine count")
        body = toks[2:]
        if len(body) != 2 * n_jobs * n_mach:
            where = body[-1][1] if body else toks[1][1]
            raise ParseError(f"expected {2 * n_jobs * n_mach} matrix entries, found {len(body)}", where)
        vals = [(_int(t, "entry"), t[1], t[2]) for t in body]
        half = n_jobs * n_mach
        times = [vals[r * n_mach:(r + 1) * n_mach] for r in range(n_jobs)]
        machines = [vals[half + r * n_mach:half + (r + 1) * n_mach] for r in range(n_jobs)]
    jobs = []
    for r in range(n_jobs):
        ops = []
        for c in range(n_mach):
            d, dl, dc = times[r][c]
            m, ml, mc = machines[r][c]
            if not 1 <= m <= n_mach:
                raise ParseError(f"machine id {m} outside [1, {n_mach}]", ml, mc)
            if d < 0:
                raise ParseError(f"negative duration {d}", dl, dc)
            ops.append((m - 1, d))
        jobs.append(tuple(ops))
    return Instance(name, n_jobs, n_mach, tuple(jobs))


def _matrix(lines: list[str], start: int, rows: int, cols: int) -> list[list[tuple[int, int, int]]]:
    out = []
    for r in range(rows):
        idx = start + r
        if idx >= len(lines):
            raise ParseError(f"matrix truncated: expected {rows} rows", idx)
        parts = [(m.group(), m.start() + 1) for m in re.finditer(r"\S+", lines[idx])]
        if len(parts) != cols:
            raise ParseError(f"expected {cols} entries, found {len(parts)}", idx + 1)
        row = []
        for s, col in parts:
            row.append((_int((s, idx + 1, col), "entry"), idx + 1, col))
        out.append(row)
    return out


def write_standard(instance: Instance) -> str:
    out = [f"{instance.num_jobs} {instance.num_machines}"]
    for ops in instance.jobs:
        out.append(" ".join(f"{m} {d}" for m, d in ops))
    return "\n".join(out) + "\n"


def write_taillard(instance: Instance) -> str:
    out = [f"{instance.num_jobs} {instance.num_machines}", "Times"]
    out += [" ".join(str(d) for _, d in ops) for ops in instance.jobs]
    out.append("Machines")
    out += [" ".join(str(m + 1) for m, _ in ops) for ops in instance.jobs]
    return "\n".join(out) + "\n"


def load_bounds(text: str) -> dict[str, int]:
    bounds: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError("expected 'name UB'", lineno)
        name, ub = parts
        try:
            value = int(ub)
        except ValueError:
            raise ParseError(f"non-integer upper bound {ub!r}", lineno, raw.find(ub) + 1) from None
        key = name.lower()
        if key in bounds:
            log.warning("duplicate bound for %s on line %d; keeping the later value", name, lineno)
        bounds[key] = value
    return bounds


# -- built-ins ---------------------------------------------------------------

# The 5x3 worked example behind the golden tests (jobs/steps 0-based).
DEMO_5X3 = Instance.from_lists("demo_5x3", [
    [(0, 3), (1, 2), (2, 2)],
    [(0, 2), (2, 1), (1, 4)],
    [(1, 4), (2, 3), (0, 2)],
    [(2, 2), (0, 1), (1, 3)],
    [(1, 2), (0, 4), (2, 1)],
], num_machines=3)

# Its reference static schedule (makespan 19; not optimal, see tests).
DEMO_5X3_SCHEDULE = Schedule(ScheduledOp(j, k, m, s, e) for j, k, m, s, e in [
    (0, 0, 0, 3, 6), (0, 1, 1, 14, 16), (0, 2, 2, 17, 19),
    (1, 0, 0, 0, 2), (1, 1, 2, 2, 3), (1, 2, 1, 3, 7),
    (2, 0, 1, 10, 14), (2, 1, 2, 14, 17), (2, 2, 0, 17, 19),
    (3, 0, 2, 0, 2), (3, 1, 0, 2, 3), (3, 2, 1, 7, 10),
    (4, 0, 1, 0, 2), (4, 1, 0, 6, 10), (4, 2, 2, 10, 11),
])

def _data_dir():
    return resources.files("shoprepair") / "data"


def builtin_names() -> list[str]:
    names = ["demo:5x3"]
    inst_dir = _data_dir() / "instances"
    if inst_dir.is_dir():
        names += sorted(p.name[:-4] for p in inst_dir.iterdir() if p.name.endswith(".txt"))
    return names


def load_instance(ref: str) -> Instance:
    """Resolve ``demo:5x3``, a bundled benchmark name (``ta01``, ``dmu03``)
    or a file path (layout auto-detected)."""
    low = ref.lower()
    if low in ("demo:5x3", "demo_5x3"):
        return DEMO_5X3
    bundled = _data_dir() / "instances" / f"{low}.txt"
    if bundled.is_file():
        return parse_standard(bundled.read_text(), name=low)
    path = Path(ref)
    if not path.is_file():
        raise FileNotFoundError(f"no such instance file or built-in: {ref}")
    text = path.read_text()
    return parse_any(text, name=path.stem)


def parse_any(text: str, name: str = "instance") -> Instance:
    lowered = text.lower()
    if re.search(r"^\s*times\s*$", lowered, re.M):
        return parse_taillard(text, name)
    try:
        return parse_standard(text, name)
    except ParseError as std_err:
        try:
            return parse_taillard(text, name)
        except ParseError:
            raise std_err from None


def bundled_bounds() -> dict[str, int]:
    path = _data_dir() / "bounds.txt"
    return load_bounds(path.read_text()) if path.is_file() else {}


def random_instance(rng: SplitMix64, num_jobs: int, num_machines: int, max_dur: int = 99,
                    name: str | None = None, full_routes: bool = True) -> Instance:
    """Synthetic instance: each job visits a random ordering of machines.

    With ``full_routes`` every job visits every machine once (Taillard style);
    otherwise each job gets a random route length in [1, M].
    """
    jobs = []
    for _ in range(num_jobs):
        route = list(range(num_machines))
        rng.shuffle(route)
        if not full_routes:
            route = route[:rng.between(1, num_machines)]
        jobs.append([(m, rng.between(1, max_dur)) for m in route])
    return Instance.from_lists(name or f"rand_{num_jobs}x{num_machines}", jobs, num_machines)
