"""scikit-learn compatible wrappers around the functional API.

These let graph quantities drop into pipelines, ``clone`` and
``get_params``/``set_params`` like any other estimator.
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._validation import ContractError, check_probability
from .graph import INF, Graph, build_laplacian, connected_components, is_connected
from .spectral import kirchhoff_index, pseudo_inverse, resistance_matrix, symmetric_eigen
from .sync import incidence_matrix
from .theory import crb_lower_bound


def _check_pairs(X, n):
    pairs = check_array(X, dtype=np.int64, ensure_min_samples=0)
    if pairs.shape[1] != 2:
        raise ValueError(f"expected an (k, 2) array of node pairs, got shape {pairs.shape}")
    if pairs.size and (pairs.min() < 0 or pairs.max() >= n):
        raise ValueError(f"node ids must lie in [0, {n})")
    return pairs


class ResistanceDistance(TransformerMixin, BaseEstimator):
    """Fit on an adjacency matrix, then map node pairs to resistance distances.

    Pairs in different connected components map to ``inf``.

    Attributes
    ----------
    pinv_ : ndarray of shape (n, n)
        Laplacian pseudoinverse.
    eigenvalues_ : ndarray of shape (n,)
        Laplacian spectrum, ascending.
    trace_pinv_ : float
    kirchhoff_index_ : float
        ``inf`` when the graph is disconnected.
    connected_ : bool
    """

    def fit(self, X, y=None):
        g = Graph(check_array(X, dtype=None, ensure_min_samples=2))
        self.graph_ = g
        spectrum = symmetric_eigen(build_laplacian(g))
        self.eigenvalues_ = spectrum.eigenvalues
        self.trace_pinv_ = spectrum.pinv_trace()
        self.pinv_ = pseudo_inverse(build_laplacian(g))
        self.connected_ = is_connected(g)
        self.kirchhoff_index_ = kirchhoff_index(g)
        labels = np.empty(g.n, dtype=np.intp)
        for k, comp in enumerate(connected_components(g)):
            labels[comp] = k
        self.component_labels_ = labels
        return self

    def transform(self, X):
        check_is_fitted(self, "pinv_")
        pairs = _check_pairs(X, self.graph_.n)
        i, j = pairs[:, 0], pairs[:, 1]
        d = self.pinv_[i, i] + self.pinv_[j, j] - 2.0 * self.pinv_[i, j]
        d[i == j] = 0.0
        d[self.component_labels_[i] != self.component_labels_[j]] = INF
        return d

    def resistance_matrix(self):
        check_is_fitted(self, "pinv_")
        r = resistance_matrix(self.pinv_)
        lab = self.component_labels_
        r[lab[:, None] != lab[None, :]] = INF
        return r


class KirchhoffFeatures(TransformerMixin, BaseEstimator):
    """Stateless transformer from a batch of graphs to spectral summary features.

    ``X`` is a sequence of adjacency matrices (or :class:`Graph` objects).
    Output columns are ``trace_pinv``, ``kirchhoff_index``, ``connected``
    and ``xn`` (``p * trace_pinv``; NaN when ``p`` is None).
    """

    feature_names = ("trace_pinv", "kirchhoff_index", "connected", "xn")

    def __init__(self, p=None):
        self.p = p

    def fit(self, X, y=None):
        if self.p is not None:
            check_probability(self.p)
        return self

    def transform(self, X):
        p = None if self.p is None else check_probability(self.p)
        rows = []
        for item in X:
            g = item if isinstance(item, Graph) else Graph(np.asarray(item))
            tr = symmetric_eigen(build_laplacian(g)).pinv_trace()
            connected = is_connected(g)
            rows.append([
                tr,
                g.n * tr if connected else INF,
                float(connected),
                np.nan if p is None else p * tr,
            ])
        return np.array(rows, dtype=np.float64).reshape(-1, 4)

    def get_feature_names_out(self, input_features=None):
        return np.array(self.feature_names, dtype=object)


class TranslationSynchronizer(RegressorMixin, BaseEstimator):
    """Least-squares synchronization of translations.

    ``fit(X, y)`` takes measured pairs ``X`` of shape (m, 2) and relative
    measurements ``y`` of shape (m,) or (m, d), where row ``k`` observes
    ``x[X[k, 0]] - x[X[k, 1]]``. The fitted centered positions are the
    maximum likelihood estimate under i.i.d. isotropic Gaussian noise.
    ``predict`` returns the implied relative measurement for any pair.

    Parameters
    ----------
    n_nodes : int, optional
        Number of nodes; defaults to one more than the largest id in ``X``.
    """

    def __init__(self, n_nodes=None):
        self.n_nodes = n_nodes

    def fit(self, X, y):
        pairs = check_array(X, dtype=np.int64)
        if pairs.shape[1] != 2:
            raise ValueError(f"expected an (m, 2) array of node pairs, got shape {pairs.shape}")
        y = np.asarray(y, dtype=np.float64)
        self._y_1d = y.ndim == 1
        h = check_array(y.reshape(len(y), -1))
        if len(h) != len(pairs):
            raise ValueError("X and y have different numbers of rows")
        n = int(pairs.max()) + 1 if self.n_nodes is None else int(self.n_nodes)
        flip = pairs[:, 0] > pairs[:, 1]
        oriented = np.where(flip[:, None], pairs[:, ::-1], pairs)
        h = np.where(flip[:, None], -h, h)
        order = np.lexsort((oriented[:, 1], oriented[:, 0]))
        oriented, h = oriented[order], h[order]
        if len(np.unique(oriented, axis=0)) != len(oriented):
            raise ContractError("each node pair may be measured at most once")
        g = Graph.from_edges(n, oriented)
        if not is_connected(g):
            raise ContractError("measurement graph must be connected")
        self.graph_ = g
        self.pinv_ = pseudo_inverse(build_laplacian(g))
        self.trace_pinv_ = float(np.trace(self.pinv_))
        pos = self.pinv_ @ (incidence_matrix(g).T @ h)
        self.positions_ = pos - pos.mean(axis=0, keepdims=True)
        self.n_features_in_ = 2
        return self

    def predict(self, X):
        check_is_fitted(self, "positions_")
        pairs = _check_pairs(X, self.graph_.n)
        out = self.positions_[pairs[:, 0]] - self.positions_[pairs[:, 1]]
        return out[:, 0] if self._y_1d else out

    def cramer_rao_bound(self, sigma2):
        """``d * sigma2 * trace(L^+)`` for isotropic per-axis noise variance ``sigma2``."""
        check_is_fitted(self, "positions_")
        return crb_lower_bound(self.positions_.shape[1] * sigma2, self.trace_pinv_)
