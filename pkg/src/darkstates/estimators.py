"""scikit-learn style wrappers for working with batches of sector amplitudes.

Rows of ``X`` are states of the sector ``B(n, k)`` in the library's basis
order (lexicographic labels).  Fitting computes the exact subspace once;
the array work afterwards is plain floating point.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .darkspace import dark_basis, invisible_basis, transparent_basis
from .sector import sector
from .singlets import enumerate_matchings, expand_matching
from .validation import InvalidArgumentError, check_atoms, check_sector_array, check_weight

__all__ = ["DarkSubspaceProjector", "SingletDecomposer"]

_KINDS = {"dark": dark_basis, "transparent": transparent_basis, "invisible": invisible_basis}


def _orthonormal_rows(M):
    if M.shape[0] == 0:
        return M
    q, _ = np.linalg.qr(M.T)
    return q.T


class DarkSubspaceProjector(TransformerMixin, BaseEstimator):
    """Orthogonal projection onto the dark (or transparent, invisible) subspace.

    ``transform`` returns coordinates in an orthonormal basis of the
    subspace, ``inverse_transform`` maps them back, ``predict`` flags rows
    lying in the subspace to within ``tol``.
    """

    def __init__(self, n=2, k=1, couplings=None, kind="dark", tol=1e-10):
        self.n = n
        self.k = k
        self.couplings = couplings
        self.kind = kind
        self.tol = tol

    def fit(self, X=None, y=None):
        n = check_atoms(self.n)
        k = check_weight(n, self.k)
        if self.kind not in _KINDS:
            raise InvalidArgumentError(f"kind must be one of {sorted(_KINDS)}")
        sub = _KINDS[self.kind](n, k, self.couplings)
        self.basis_ = sub
        self.labels_ = sector(n, k).labels
        self.n_features_in_ = len(self.labels_)
        self.components_ = _orthonormal_rows(sub.to_numpy())
        self.n_components_ = self.components_.shape[0]
        if X is not None:
            check_sector_array(X, self.n_features_in_)
        return self

    def _check(self, X):
        check_is_fitted(self, "components_")
        return check_sector_array(X, self.n_features_in_)

    def transform(self, X):
        X = self._check(X)
        return X @ self.components_.T

    def inverse_transform(self, Z):
        check_is_fitted(self, "components_")
        Z = np.asarray(Z)
        if Z.ndim == 1:
            Z = Z.reshape(1, -1)
        if Z.shape[1] != self.n_components_:
            raise InvalidArgumentError(
                f"expected {self.n_components_} coordinates per row, got {Z.shape[1]}"
            )
        return Z @ self.components_

    def project(self, X):
        return self.inverse_transform(self.transform(X))

    def residual(self, X):
        """Norm of each row's component orthogonal to the subspace."""
        X = self._check(X)
        return np.linalg.norm(X - self.project(X), axis=1)

    def predict(self, X):
        return self.residual(X) <= self.tol

    def score(self, X, y=None):
        """Mean squared norm captured by the subspace."""
        X = self._check(X)
        kept = np.linalg.norm(self.transform(X), axis=1) ** 2
        total = np.linalg.norm(X, axis=1) ** 2
        return float(np.mean(np.divide(kept, total, out=np.zeros_like(kept), where=total > 0)))


class SingletDecomposer(TransformerMixin, BaseEstimator):
    """Least-squares coefficients over a family of singlet-product states.

    With the default restricted family the columns form a basis of the dark
    subspace, so dark rows reconstruct exactly and the coefficients are
    unique.  Use ``singlets.singlet_decompose`` for exact rational results.
    """

    def __init__(self, n=2, k=1, restrict="non_crossing_uncovered"):
        self.n = n
        self.k = k
        self.restrict = restrict

    def fit(self, X=None, y=None):
        n = check_atoms(self.n)
        k = check_weight(n, self.k)
        if 2 * k > n:
            raise InvalidArgumentError(f"singlet products need 2k <= n, got n={n}, k={k}")
        self.family_ = tuple(enumerate_matchings(n, k, self.restrict))
        cols = [[float(a) for a in expand_matching(m).amps] for m in self.family_]
        self.expansion_ = np.array(cols).T
        self.n_features_in_ = self.expansion_.shape[0]
        if X is not None:
            check_sector_array(X, self.n_features_in_)
        return self

    def transform(self, X):
        check_is_fitted(self, "expansion_")
        X = check_sector_array(X, self.n_features_in_)
        coef, *_ = np.linalg.lstsq(self.expansion_, X.T, rcond=None)
        return coef.T

    def inverse_transform(self, C):
        check_is_fitted(self, "expansion_")
        return np.atleast_2d(C) @ self.expansion_.T

    def residual(self, X):
        check_is_fitted(self, "expansion_")
        X = check_sector_array(X, self.n_features_in_)
        return np.linalg.norm(X - self.inverse_transform(self.transform(X)), axis=1)
