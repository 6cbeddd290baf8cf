"""Scikit-learn style estimators wrapping the functional core.

The feature extractors fit on a :class:`~dspectrum.graph.Graph` and expose
per-node feature matrices, so downstream tooling that speaks numpy arrays
(clusterers, plotting, model selection) composes directly. All estimators
follow the sklearn parameter conventions: constructor arguments are stored
verbatim, validation happens in ``fit``, and fitted state lives in
trailing-underscore attributes.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import blocks, dynamics, peeling
from .sir import DEFAULT_H_LIST, SirParams, profile_all_nodes
from .validation import check_graph

__all__ = ["SpectrumExtractor", "SirProfiler", "SpectrumKMeans"]

SPECTRUM_METHODS = ("deletion", "fixedpoint", "both")


def spectrum_by_method(g, method: str) -> peeling.DSpectrum:
    """Spectrum via one algorithm, or both with an exact cross-check."""
    if method == "deletion":
        return peeling.full_spectrum(g)
    if method == "fixedpoint":
        return dynamics.compute_spectrum_chained(g)
    if method == "both":
        by_deletion = peeling.full_spectrum(g)
        by_dynamics = dynamics.compute_spectrum_chained(g)
        where = peeling.first_spectrum_mismatch(by_deletion, by_dynamics)
        if where is not None:
            raise peeling.SpectrumMismatchError(*where)
        return by_deletion
    raise ValueError(f"unknown method {method!r}; choose from {SPECTRUM_METHODS}")


class SpectrumExtractor(BaseEstimator, TransformerMixin):
    """Per-node rank spectra as an ``(n_nodes, max_degree + 1)`` feature matrix.

    Parameters
    ----------
    method : {"deletion", "fixedpoint", "both"}
        Which solver to run; "both" runs the two independent algorithms and
        raises :class:`~dspectrum.peeling.SpectrumMismatchError` if they
        ever disagree.
    """

    def __init__(self, method: str = "both"):
        self.method = method

    def fit(self, G, y=None):
        g = check_graph(G)
        spectrum = spectrum_by_method(g, self.method)
        self.spectrum_ = spectrum.matrix
        self.delta_ = spectrum.delta
        self.orders_ = spectrum.orders
        self.n_features_out_ = spectrum.delta + 1
        return self

    def transform(self, G) -> np.ndarray:
        return spectrum_by_method(check_graph(G), self.method).matrix

    def fit_transform(self, G, y=None) -> np.ndarray:
        return self.fit(G).spectrum_


class SirProfiler(BaseEstimator, TransformerMixin):
    """Per-node infection rates across the multiplier sweep as features."""

    def __init__(
        self,
        h_list=DEFAULT_H_LIST,
        runs_per_source: int = 1000,
        seed: int = 0,
        workers: int = 1,
    ):
        self.h_list = h_list
        self.runs_per_source = runs_per_source
        self.seed = seed
        self.workers = workers

    def _profile(self, g) -> tuple[np.ndarray, float]:
        params = SirParams(runs_per_source=self.runs_per_source, seed=self.seed)
        profiles = profile_all_nodes(g, self.h_list, params, workers=self.workers)
        return np.vstack([p.rates for p in profiles]), profiles[0].beta if profiles else 0.0

    def fit(self, G, y=None):
        g = check_graph(G)
        self.profiles_, self.beta_ = self._profile(g)
        self.h_list_ = tuple(float(h) for h in self.h_list)
        return self

    def transform(self, G) -> np.ndarray:
        return self._profile(check_graph(G))[0]

    def fit_transform(self, G, y=None) -> np.ndarray:
        return self.fit(G).profiles_


class SpectrumKMeans(ClusterMixin, BaseEstimator):
    """Deterministic k-means for spectrum rows or rate profiles.

    Greedy farthest-point seeding from ``seed``; assignment ties break to
    the lower cluster id. ``n_clusters`` is reduced (with a warning) when it
    exceeds the number of distinct rows; the effective count is exposed as
    ``n_clusters_``.
    """

    def __init__(self, n_clusters: int = 8, seed: int = 0, standardize: bool = False):
        self.n_clusters = n_clusters
        self.seed = seed
        self.standardize = standardize

    def fit(self, X, y=None):
        X = check_array(X, dtype=np.float64)
        if self.standardize:
            self.offset_ = X.mean(axis=0)
            scale = X.std(axis=0)
            scale[scale == 0] = 1.0
            self.scale_ = scale
        else:
            self.offset_ = np.zeros(X.shape[1])
            self.scale_ = np.ones(X.shape[1])
        work = (X - self.offset_) / self.scale_
        labels, centers, inertia = blocks.kmeans_fit(work, self.n_clusters, self.seed)
        self.labels_ = labels
        self.cluster_centers_ = centers * self.scale_ + self.offset_
        self.inertia_ = inertia
        self.n_clusters_ = centers.shape[0]
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "cluster_centers_")
        X = check_array(X, dtype=np.float64)
        work = (X - self.offset_) / self.scale_
        centers = (self.cluster_centers_ - self.offset_) / self.scale_
        d2 = ((work[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        return d2.argmin(axis=1)
