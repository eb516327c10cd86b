"""scikit-learn style wrappers around the spectrum models and the fitter.

``X`` is a column (or 1-D array) of drive frequencies in rad/s, ``y`` the
measured excitation probabilities.  Per-point standard errors go in ``sigma``.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_consistent_length, check_is_fitted

from .scan import ScanResult
from .spectroscopy import LineshapeModel, fit


def _as_freqs(X):
    X = check_array(X, ensure_2d=False, dtype=float)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single frequency column, got shape {X.shape}")
        X = X[:, 0]
    return X


class _SpectrumRegressor(RegressorMixin, BaseEstimator):
    def _template(self):
        raise NotImplementedError

    def _default_bounds(self):
        raise NotImplementedError

    def fit(self, X, y, sigma=None):
        x = _as_freqs(X)
        y = check_array(y, ensure_2d=False, dtype=float)
        check_consistent_length(x, y)
        if sigma is not None:
            sigma = check_array(sigma, ensure_2d=False, dtype=float)
            check_consistent_length(x, sigma)
        template = self._template()
        bounds = dict(self._default_bounds())
        bounds.update(self.bounds or {})
        free = {k: bounds[k] for k in self.free}
        meta = {"shots": self.shots} if self.shots else {}
        data = ScanResult(x, y, sigma, meta)
        self.fit_result_ = fit(
            template, free, data, n_starts=self.n_starts, weighting=self.weighting, shots=self.shots
        )
        self.model_ = template.with_params(**self.fit_result_.params)
        for k, v in self.fit_result_.params.items():
            setattr(self, f"{k}_", float(v))
        return self

    def predict(self, X):
        check_is_fitted(self, "model_")
        return self.model_.evaluate(_as_freqs(X))


class SidebandSpectrumRegressor(_SpectrumRegressor):
    """Carrier + first-sideband thermal spectrum; fits ``nbar`` by default.

    Examples
    --------
    >>> est = SidebandSpectrumRegressor(rabi=2*np.pi*46e3, nu_z=2*np.pi*268e3,
    ...                                 eta_eff=0.013, pulse_time=40e-6)
    >>> est.fit(freqs, p, sigma=err).nbar_  # doctest: +SKIP
    """

    def __init__(
        self,
        rabi=1.0,
        nu_z=1.0,
        eta_eff=0.0,
        pulse_time=1.0,
        nbar=0.0,
        carrier_freq=0.0,
        debye_waller=False,
        free=("nbar",),
        bounds=None,
        weighting="data",
        shots=None,
        n_starts=8,
    ):
        self.rabi = rabi
        self.nu_z = nu_z
        self.eta_eff = eta_eff
        self.pulse_time = pulse_time
        self.nbar = nbar
        self.carrier_freq = carrier_freq
        self.debye_waller = debye_waller
        self.free = free
        self.bounds = bounds
        self.weighting = weighting
        self.shots = shots
        self.n_starts = n_starts

    def _template(self):
        return LineshapeModel(
            carrier_freqs=(self.carrier_freq,),
            rabi=self.rabi,
            pulse_time=self.pulse_time,
            nu_z=self.nu_z,
            eta_eff=self.eta_eff,
            nbar=self.nbar,
            debye_waller=self.debye_waller,
        )

    def _default_bounds(self):
        return {
            "nbar": (0.0, 1000.0),
            "rabi": (0.5 * self.rabi, 2.0 * self.rabi),
            "nu_z": (0.8 * self.nu_z, 1.2 * self.nu_z),
            "eta_eff": (0.5 * self.eta_eff, 2.0 * self.eta_eff),
            "f1": (self.carrier_freq - 2 * self.rabi, self.carrier_freq + 2 * self.rabi),
        }


class TwoIonSpectrumRegressor(_SpectrumRegressor):
    """Two resonances under a common drive; fits both frequencies and the Rabi frequency.

    ``pulse_time`` defaults to a resonant pi pulse at the initial ``rabi`` and is
    held fixed during the fit.  After fitting, ``splitting_`` holds |f2 - f1|.
    """

    def __init__(
        self,
        f1=0.0,
        f2=1.0,
        rabi=1.0,
        pulse_time=None,
        observable="sum",
        free=("f1", "f2", "rabi"),
        bounds=None,
        weighting="data",
        shots=None,
        n_starts=8,
    ):
        self.f1 = f1
        self.f2 = f2
        self.rabi = rabi
        self.pulse_time = pulse_time
        self.observable = observable
        self.free = free
        self.bounds = bounds
        self.weighting = weighting
        self.shots = shots
        self.n_starts = n_starts

    def _template(self):
        t = self.pulse_time if self.pulse_time is not None else math.pi / self.rabi
        return LineshapeModel(
            carrier_freqs=(self.f1, self.f2),
            rabi=self.rabi,
            pulse_time=t,
            include_sidebands=False,
            observable=self.observable,
        )

    def _default_bounds(self):
        w = 2.5 * self.rabi
        return {
            "f1": (self.f1 - w, self.f1 + w),
            "f2": (self.f2 - w, self.f2 + w),
            "rabi": (0.5 * self.rabi, 2.0 * self.rabi),
        }

    @property
    def splitting_(self):
        check_is_fitted(self, "model_")
        f1, f2 = self.model_.carrier_freqs
        return abs(f2 - f1)
