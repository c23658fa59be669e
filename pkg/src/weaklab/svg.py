"""Tiny self-contained SVG writer: axes, bars, polylines, labels.

Coordinates are formatted with fixed precision so identical data gives
byte-identical files.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np


def _f(v: float) -> str:
    return f"{v:.2f}"


@dataclass
class Figure:
    xlim: tuple[float, float]
    ylim: tuple[float, float]
    width: int = 640
    height: int = 400
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    margin: int = 56
    _items: list[str] = field(default_factory=list)

    def __post_init__(self):
        lo, hi = self.ylim
        if not hi > lo:
            self.ylim = (lo, lo + 1.0)
        lo, hi = self.xlim
        if not hi > lo:
            self.xlim = (lo, lo + 1.0)

    def px(self, x: float) -> float:
        x0, x1 = self.xlim
        return self.margin + (x - x0) / (x1 - x0) * (self.width - 2 * self.margin)

    def py(self, y: float) -> float:
        y0, y1 = self.ylim
        return self.height - self.margin - (y - y0) / (y1 - y0) * (self.height - 2 * self.margin)

    def bars(self, x, heights, width: float, fill: str = "#4c72b0", base: float = 0.0):
        for xi, hi in zip(np.asarray(x, float), np.asarray(heights, float)):
            top, bottom = self.py(max(hi, base)), self.py(min(hi, base))
            top = max(top, self.margin - 4.0)
            bottom = min(bottom, self.height - self.margin + 4.0)
            left = self.px(xi - width / 2)
            w = self.px(xi + width / 2) - left
            self._items.append(
                f'<rect x="{_f(left)}" y="{_f(top)}" width="{_f(w)}" '
                f'height="{_f(max(bottom - top, 0.0))}" fill="{fill}"/>')

    def polyline(self, x, y, stroke: str = "#c44e52", width: float = 2.0):
        pts = " ".join(f"{_f(self.px(a))},{_f(self.py(b))}"
                       for a, b in zip(np.asarray(x, float), np.asarray(y, float)))
        self._items.append(f'<polyline points="{pts}" fill="none" stroke="{stroke}" '
                           f'stroke-width="{width}"/>')

    def markers(self, x, y, fill: str = "#c44e52", r: float = 3.0):
        for a, b in zip(np.asarray(x, float), np.asarray(y, float)):
            self._items.append(f'<circle cx="{_f(self.px(a))}" cy="{_f(self.py(b))}" '
                               f'r="{r}" fill="{fill}"/>')

    def text(self, x_px: float, y_px: float, s: str, anchor: str = "middle", size: int = 12):
        self._items.append(f'<text x="{_f(x_px)}" y="{_f(y_px)}" font-size="{size}" '
                           f'text-anchor="{anchor}" font-family="sans-serif">{escape(s)}</text>')

    def _axes(self) -> list[str]:
        m, w, h = self.margin, self.width, self.height
        out = [f'<line x1="{m}" y1="{h - m}" x2="{w - m}" y2="{h - m}" stroke="black"/>',
               f'<line x1="{m}" y1="{m}" x2="{m}" y2="{h - m}" stroke="black"/>']
        for v in _ticks(*self.xlim):
            out.append(f'<line x1="{_f(self.px(v))}" y1="{h - m}" x2="{_f(self.px(v))}" '
                       f'y2="{h - m + 5}" stroke="black"/>')
            out.append(f'<text x="{_f(self.px(v))}" y="{h - m + 18}" font-size="11" '
                       f'text-anchor="middle" font-family="sans-serif">{v:g}</text>')
        for v in _ticks(*self.ylim):
            out.append(f'<line x1="{m - 5}" y1="{_f(self.py(v))}" x2="{m}" '
                       f'y2="{_f(self.py(v))}" stroke="black"/>')
            out.append(f'<text x="{m - 8}" y="{_f(self.py(v) + 4)}" font-size="11" '
                       f'text-anchor="end" font-family="sans-serif">{v:g}</text>')
        return out

    def to_string(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
                f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">')
        body = ['<rect width="100%" height="100%" fill="white"/>']
        body += self._items
        body += self._axes()
        if self.title:
            body.append(f'<text x="{self.width / 2:.2f}" y="24" font-size="15" '
                        f'text-anchor="middle" font-family="sans-serif">{escape(self.title)}</text>')
        if self.xlabel:
            body.append(f'<text x="{self.width / 2:.2f}" y="{self.height - 12}" font-size="12" '
                        f'text-anchor="middle" font-family="sans-serif">{escape(self.xlabel)}</text>')
        if self.ylabel:
            body.append(f'<text x="16" y="{self.height / 2:.2f}" font-size="12" '
                        f'text-anchor="middle" font-family="sans-serif" '
                        f'transform="rotate(-90 16 {self.height / 2:.2f})">{escape(self.ylabel)}</text>')
        return "\n".join([head, *body, "</svg>"]) + "\n"

    def save(self, path) -> None:
        path = os.fspath(path)
        with open(path + ".tmp", "w") as fh:
            fh.write(self.to_string())
        os.replace(path + ".tmp", path)


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    span = hi - lo
    step = 10 ** math.floor(math.log10(span / n))
    for mult in (1, 2, 5, 10):
        if span / (step * mult) <= n:
            step *= mult
            break
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-9 * span:
        out.append(round(v, 12))
        v += step
    return out
