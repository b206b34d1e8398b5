"""Deterministic SVG Gantt charts: one row per machine, one labelled bar per operation."""

from __future__ import annotations

from typing import Iterable
from xml.sax.saxutils import escape

from .model import Schedule

PALETTE = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2",
           "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"]

ROW_H = 28
BAR_H = 20
LEFT = 48
TOP = 30
BOTTOM = 28


def render_svg(schedule: Schedule, num_machines: int | None = None,
               breakdowns: Iterable[tuple[int, int, int]] = (),
               staging: Iterable[tuple[int, int, int]] = (),
               title: str = "", scale: float | None = None) -> str:
    """SVG text for ``schedule``.

    ``breakdowns`` and ``staging`` are (machine, start, length) triples drawn
    as hatched rectangles (red for downtime, grey for WIP staging).
    """
    breakdowns = sorted(breakdowns)
    staging = sorted(staging)
    if num_machines is None:
        num_machines = 1 + max([o.machine for o in schedule.ops] + [b[0] for b in breakdowns],
                               default=-1)
    horizon = max([schedule.makespan] + [s + d for _, s, d in breakdowns] + [1])
    if scale is None:
        scale = max(2.0, min(40.0, 800.0 / horizon))
    width = LEFT + int(round(horizon * scale)) + 20
    height = TOP + num_machines * ROW_H + BOTTOM

    def x(t: int) -> str:
        return f"{LEFT + t * scale:.2f}"

    def w(d: int) -> str:
        return f"{d * scale:.2f}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="monospace" font-size="10">',
           "<defs>",
           '<pattern id="down" patternUnits="userSpaceOnUse" width="6" height="6" '
           'patternTransform="rotate(45)"><rect width="6" height="6" fill="#fde0e0"/>'
           '<line x1="0" y1="0" x2="0" y2="6" stroke="#c00" stroke-width="2"/></pattern>',
           '<pattern id="wip" patternUnits="userSpaceOnUse" width="6" height="6" '
           'patternTransform="rotate(-45)"><rect width="6" height="6" fill="#eee"/>'
           '<line x1="0" y1="0" x2="0" y2="6" stroke="#666" stroke-width="1.5"/></pattern>',
           "</defs>"]
    if title:
        out.append(f'<text x="{LEFT}" y="16" font-size="12">{escape(title)}</text>')
    for m in range(num_machines):
        y = TOP + m * ROW_H
        out.append(f'<g class="machine" data-machine="{m}">')
        out.append(f'<text x="4" y="{y + BAR_H - 6}">M{m}</text>')
        out.append(f'<line x1="{LEFT}" y1="{y + ROW_H - 2}" x2="{width - 20}" '
                   f'y2="{y + ROW_H - 2}" stroke="#ddd"/>')
        out.append("</g>")
    for m, s, d in breakdowns:
        y = TOP + m * ROW_H
        out.append(f'<rect class="breakdown" x="{x(s)}" y="{y}" width="{w(d)}" height="{BAR_H}" '
                   f'fill="url(#down)" stroke="#c00"/>')
    for m, s, d in staging:
        y = TOP + m * ROW_H
        out.append(f'<rect class="staging" x="{x(s)}" y="{y}" width="{w(d)}" height="{BAR_H}" '
                   f'fill="url(#wip)" stroke="#666"/>')
    for o in sorted(schedule.ops, key=lambda o: (o.machine, o.start, o.job, o.step)):
        y = TOP + o.machine * ROW_H
        label = f"J{o.job + 1}({o.step + 1})"
        color = PALETTE[o.job % len(PALETTE)]
        out.append(f'<g class="op" data-job="{o.job}" data-step="{o.step + 1}">'
                   f'<rect x="{x(o.start)}" y="{y}" width="{w(o.end - o.start)}" height="{BAR_H}" '
                   f'fill="{color}" stroke="#222"/>'
                   f'<text x="{x(o.start)}" dx="2" y="{y + BAR_H - 6}" fill="#fff">{label}</text>'
                   f"<title>{label} M{o.machine} {o.start}-{o.end}</title></g>")
    axis_y = TOP + num_machines * ROW_H + 12
    step = max(1, _nice_step(horizon))
    for t in range(0, horizon + 1, step):
        out.append(f'<text x="{x(t)}" y="{axis_y}" text-anchor="middle">{t}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _nice_step(horizon: int) -> int:
    for s in (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000):
        if horizon / s <= 20:
            return s
    return horizon // 20
