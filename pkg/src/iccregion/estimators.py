"""Scikit-learn style wrappers: ``fit`` computes a rate region, ``predict`` tests membership."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from . import baselines, icc_model
from .region_geom import axis_intercepts, point_distances


class _RegionEstimator(BaseEstimator):
    """Common fit/predict plumbing; subclasses implement ``_region``."""

    def _channel(self) -> icc_model.ChannelParams:
        return icc_model.ChannelParams(float(self.P1), float(self.P2), float(self.a12),
                                       float(self.a21), float(self.K))

    def fit(self, X=None, y=None):
        """Compute the region. ``X`` and ``y`` are ignored."""
        region = self._region(self._channel())
        self.region_ = region
        self.vertices_ = np.array(region.vertices)
        self.intercepts_ = axis_intercepts(region) if not region.is_empty else (0.0, 0.0)
        return self

    def decision_function(self, X):
        """Minus the distance (bits) of each rate pair to the region; 0 inside."""
        check_is_fitted(self, "region_")
        X = check_array(X, dtype=float)
        if X.shape[1] != 2:
            raise ValueError(f"expected rate pairs of shape (n, 2), got {X.shape}")
        return -point_distances(self.region_, X)

    def predict(self, X):
        """1 for rate pairs inside the region (within ``tol``), else 0."""
        return (self.decision_function(X) >= -self.tol).astype(int)


class ConferencingRegion(_RegionEstimator):
    """Achievable region with transmitter conferencing, from the full grid sweep."""

    def __init__(self, P1=6.0, P2=1.5, a12=0.74, a21=0.74, K=4.0, resolution=9,
                 lambda_grid=(0.0, 0.5, 1.0, 1.5), relay_signs=(1, -1),
                 zero_cooperation=False, tol=1e-9):
        self.P1 = P1
        self.P2 = P2
        self.a12 = a12
        self.a21 = a21
        self.K = K
        self.resolution = resolution
        self.lambda_grid = lambda_grid
        self.relay_signs = relay_signs
        self.zero_cooperation = zero_cooperation
        self.tol = tol

    def _config(self) -> icc_model.SweepConfig:
        return icc_model.SweepConfig(
            resolution=int(self.resolution), lambda_grid=tuple(self.lambda_grid),
            relay_signs=tuple(self.relay_signs), zero_cooperation=bool(self.zero_cooperation))

    def _region(self, params):
        result = icc_model.sweep(params, self._config())
        self.n_polygons_ = result.n_polygons
        self.slope_violations_ = result.slope_violations
        return result.region


class IdealConferencingRegion(ConferencingRegion):
    """Region with all power on the cell-index layers (reduced bounds)."""

    def _region(self, params):
        return icc_model.ideal_conferencing_region(params, self._config())


class HanKobayashiRegion(_RegionEstimator):
    def __init__(self, P1=6.0, P2=1.5, a12=0.74, a21=0.74, resolution=17, tol=1e-9):
        self.P1 = P1
        self.P2 = P2
        self.a12 = a12
        self.a21 = a21
        self.resolution = resolution
        self.tol = tol

    K = 0.0  # not used by this baseline

    def _region(self, params):
        return baselines.hk_region(params, int(self.resolution))


class BroadcastRegion(HanKobayashiRegion):
    """Two-antenna broadcast capacity region (full transmitter cooperation)."""

    def _region(self, params):
        return baselines.gvbc_region(params, int(self.resolution))
