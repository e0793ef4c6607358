"""Buffered scalar draws from a numpy Generator.

Pulling one float at a time from numpy costs a Python-to-C round trip per call;
drawing in blocks and handing values out of a list is several times faster and
keeps the stream identical regardless of how many values are consumed per step.
"""

from __future__ import annotations

import numpy as np

BLOCK = 4096


class BufferedStream:
    """Yields standard normal or uniform(0, 1) draws from ``gen`` one by one."""

    __slots__ = ("_gen", "_kind", "_block", "_buf", "_pos")

    def __init__(self, gen: np.random.Generator, kind: str = "normal", block: int = BLOCK):
        if kind not in ("normal", "uniform"):
            raise ValueError(f"unknown stream kind {kind!r}")
        self._gen = gen
        self._kind = kind
        self._block = block
        self._buf: list[float] = []
        self._pos = 0

    def _refill(self) -> None:
        if self._kind == "normal":
            self._buf = self._gen.standard_normal(self._block).tolist()
        else:
            self._buf = self._gen.random(self._block).tolist()
        self._pos = 0

    def next(self) -> float:
        if self._pos >= len(self._buf):
            self._refill()
        x = self._buf[self._pos]
        self._pos += 1
        return x

    def take(self, n: int) -> list[float]:
        out: list[float] = []
        while n > 0:
            if self._pos >= len(self._buf):
                self._refill()
            chunk = self._buf[self._pos:self._pos + n]
            self._pos += len(chunk)
            n -= len(chunk)
            out.extend(chunk)
        return out
