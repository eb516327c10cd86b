from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .validation import check_scan_arrays


@dataclass(frozen=True)
class ScanResult:
    """Ordered (x, p, sigma) samples of a frequency, detuning or time scan.

    ``x`` is in SI units (rad/s or s); ``meta`` records the model and provenance.
    """

    x: np.ndarray
    p: np.ndarray
    sigma: np.ndarray = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        x, p, sigma = check_scan_arrays(self.x, self.p, self.sigma)
        for arr in (x, p, sigma):
            arr.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "sigma", sigma)

    def __len__(self):
        return self.x.size

    def replace(self, **changes):
        kw = {"x": self.x, "p": self.p, "sigma": self.sigma, "meta": dict(self.meta)}
        kw.update(changes)
        return ScanResult(**kw)
