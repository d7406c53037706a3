"""Input validation shared by the library, the estimators and the CLI."""

import math
from fractions import Fraction

import numpy as np

MAX_ATOMS = 24


class InvalidArgumentError(ValueError):
    """Raised when an argument violates an operation's preconditions."""


def check_atoms(n, cap=None):
    cap = MAX_ATOMS if cap is None else cap
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise InvalidArgumentError(f"atom count must be an integer, got {n!r}")
    if n < 1:
        raise InvalidArgumentError(f"atom count must be >= 1, got {n}")
    if n > cap:
        raise InvalidArgumentError(f"atom count {n} exceeds cap {cap}")
    return int(n)


def check_weight(n, k):
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)):
        raise InvalidArgumentError(f"excitation weight must be an integer, got {k!r}")
    if not 0 <= k <= n:
        raise InvalidArgumentError(f"need 0 <= k <= n, got k={k}, n={n}")
    return int(k)


def as_fraction(value):
    """Parse an exact rational from an int, Fraction, float or ``"p/q"`` string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise InvalidArgumentError(f"non-finite value {value!r}")
        return Fraction(float(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidArgumentError(f"cannot parse {value!r} as a fraction") from exc
    raise InvalidArgumentError(f"cannot interpret {value!r} as a rational number")


def check_couplings(n, couplings, exact=True):
    """Return a tuple of ``n`` couplings; ``None`` means all equal to 1.

    Couplings must be non-negative and at least one must be positive.
    """
    if couplings is None:
        vals = [Fraction(1)] * n
    else:
        if isinstance(couplings, str):
            couplings = [c for c in couplings.split(",") if c.strip()]
        vals = [as_fraction(g) for g in couplings]
        if len(vals) != n:
            raise InvalidArgumentError(f"expected {n} couplings, got {len(vals)}")
    if any(g < 0 for g in vals):
        raise InvalidArgumentError("couplings must be non-negative")
    if not any(g > 0 for g in vals):
        raise InvalidArgumentError("at least one coupling must be positive")
    if exact:
        return tuple(vals)
    return tuple(float(g) for g in vals)


def equal_couplings(couplings):
    return couplings is None or len(set(as_fraction(g) for g in couplings)) <= 1


def check_sector_array(X, n_features):
    """Validate a 2-d array of amplitudes with ``n_features`` columns.

    Complex input is kept complex; real input is returned as float64.
    """
    X = np.asarray(X)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2:
        raise InvalidArgumentError(f"expected a 2-d array, got shape {X.shape}")
    if X.shape[1] != n_features:
        raise InvalidArgumentError(
            f"expected {n_features} amplitudes per row, got {X.shape[1]}"
        )
    if np.iscomplexobj(X):
        X = X.astype(np.complex128)
    else:
        X = X.astype(np.float64)
    if not np.all(np.isfinite(X)):
        raise InvalidArgumentError("amplitudes must be finite")
    return X
