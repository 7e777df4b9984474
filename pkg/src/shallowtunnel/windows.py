"""Bilateral coefficient sequences on a finite integer index window.

Truncated Laurent-type expansions live on windows like k in [-N, N] or
[-N-2, N-1].  Every recursion in the solver reads neighbours such as
c[k-2] or c[-k-1]; after truncation those reads must return 0 outside
the stored window, which is exactly what :class:`SeriesWindow` does.
"""

from __future__ import annotations

import numpy as np


class SeriesWindow:
    """Real coefficients c_k stored densely for lo <= k <= hi.

    Reads outside the window return 0.0 (series truncation convention);
    writes outside the window raise ``IndexError``.
    """

    __slots__ = ("lo", "hi", "values")

    def __init__(self, lo: int, hi: int, values=None):
        if hi < lo:
            raise ValueError(f"empty window [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi
        if values is None:
            self.values = np.zeros(hi - lo + 1)
        else:
            self.values = np.asarray(values, dtype=float).copy()
            if self.values.shape != (hi - lo + 1,):
                raise ValueError("values length does not match window")

    def __getitem__(self, k: int) -> float:
        if self.lo <= k <= self.hi:
            return float(self.values[k - self.lo])
        return 0.0

    def __setitem__(self, k: int, value: float) -> None:
        if not self.lo <= k <= self.hi:
            raise IndexError(f"index {k} outside window [{self.lo}, {self.hi}]")
        self.values[k - self.lo] = value

    def indices(self) -> range:
        return range(self.lo, self.hi + 1)

    def copy(self) -> "SeriesWindow":
        return SeriesWindow(self.lo, self.hi, self.values)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __len__(self) -> int:
        return self.values.size

    def __repr__(self) -> str:
        return f"SeriesWindow([{self.lo}, {self.hi}], max|c|={self.max_abs():.3e})"
