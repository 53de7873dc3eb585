"""WENO reconstruction of interface values from cell averages.

Polynomial degree k in {0, 1, 2, 3} gives nominal order s = 2k+1 in
{1, 3, 5, 7}. Candidate stencil r in [0, k] covers cells {i-r, ..., i-r+k};
row r of the coefficient table maps those cell averages to the value at the
right interface x_{i+1/2} of cell i. The optimal weights d recombine the
candidates into the full (2k+1)-cell reconstruction, and the smoothness
forms B_r are the quadratic forms q^T B_r q summing the squared scaled
derivatives of each candidate polynomial over the central cell.

All tables are exact rationals, derived once (the symbolic derivation lives
in the test suite as the oracle) and frozen here.

Reconstruction functions accept stacked windows with arbitrary leading batch
axes; the window axis is last and holds cells (i-k, ..., i+k) in increasing
order. The right-side value at an interface is the mirrored reconstruction:
apply the left-value procedure to the index-reversed window of the cell on
the right of the interface.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ConfigError, DimensionError

DEFAULT_EPSILON = 1e-6

SUPPORTED_DEGREES = (0, 1, 2, 3)


def _fm(den, rows):
    return tuple(tuple(Fraction(v, den) for v in row) for row in rows)


def _fv(den, vals):
    return tuple(Fraction(v, den) for v in vals)


_COEFFS = {
    0: _fm(1, [[1]]),
    1: _fm(2, [[1, 1],
               [-1, 3]]),
    2: _fm(6, [[2, 5, -1],
               [-1, 5, 2],
               [2, -7, 11]]),
    3: _fm(12, [[3, 13, -5, 1],
                [-1, 7, 7, -1],
                [1, -5, 13, 3],
                [-3, 13, -23, 25]]),
}

_WEIGHTS = {
    0: _fv(1, [1]),
    1: _fv(3, [2, 1]),
    2: _fv(10, [3, 6, 1]),
    3: _fv(35, [4, 18, 12, 1]),
}

_SMOOTHNESS = {
    0: (_fm(1, [[0]]),),
    1: (_fm(1, [[1, -1], [-1, 1]]),
        _fm(1, [[1, -1], [-1, 1]])),
    2: (_fm(6, [[20, -31, 11], [-31, 50, -19], [11, -19, 8]]),
        _fm(6, [[8, -13, 5], [-13, 26, -13], [5, -13, 8]]),
        _fm(6, [[8, -19, 11], [-19, 50, -31], [11, -31, 20]])),
    3: (_fm(240, [[2107, -4701, 3521, -927],
                  [-4701, 11003, -8623, 2321],
                  [3521, -8623, 7043, -1941],
                  [-927, 2321, -1941, 547]]),
        _fm(240, [[547, -1261, 961, -247],
                  [-1261, 3443, -2983, 801],
                  [961, -2983, 2843, -821],
                  [-247, 801, -821, 267]]),
        _fm(240, [[267, -821, 801, -247],
                  [-821, 2843, -2983, 961],
                  [801, -2983, 3443, -1261],
                  [-247, 961, -1261, 547]]),
        _fm(240, [[547, -1941, 2321, -927],
                  [-1941, 7043, -8623, 3521],
                  [2321, -8623, 11003, -4701],
                  [-927, 3521, -4701, 2107]])),
}


@dataclass(frozen=True)
class WenoTables:
    """Reconstruction tables for one polynomial degree.

    exact_* fields hold the rational values; the float arrays are their
    closest doubles. coeffs_windowed / smoothness_windowed embed each
    candidate's table into the full (2k+1)-wide window so batched
    reconstruction is a single contraction per quantity.
    """

    k: int
    exact_coeffs: tuple
    exact_weights: tuple
    exact_smoothness: tuple
    coeffs: np.ndarray              # (k+1, k+1)
    weights: np.ndarray             # (k+1,)
    smoothness: np.ndarray          # (k+1, k+1, k+1)
    coeffs_windowed: np.ndarray     # (k+1, 2k+1)
    smoothness_windowed: np.ndarray  # (k+1, 2k+1, 2k+1)

    @property
    def order(self) -> int:
        return 2 * self.k + 1

    @property
    def window(self) -> int:
        return 2 * self.k + 1


@lru_cache(maxsize=None)
def build_tables(k: int) -> WenoTables:
    """Tables for polynomial degree k (reconstruction order 2k+1)."""
    if k not in SUPPORTED_DEGREES:
        raise ConfigError(
            f"unsupported reconstruction degree k={k}, "
            f"expected one of {SUPPORTED_DEGREES}")
    exact_c = _COEFFS[k]
    exact_d = _WEIGHTS[k]
    exact_b = _SMOOTHNESS[k]
    coeffs = np.array([[float(v) for v in row] for row in exact_c])
    weights = np.array([float(v) for v in exact_d])
    smooth = np.array([[[float(v) for v in row] for row in mat]
                       for mat in exact_b])
    width = 2 * k + 1
    cw = np.zeros((k + 1, width))
    sw = np.zeros((k + 1, width, width))
    for r in range(k + 1):
        lo = k - r  # window position of cell i-r
        cw[r, lo:lo + k + 1] = coeffs[r]
        sw[r, lo:lo + k + 1, lo:lo + k + 1] = smooth[r]
    return WenoTables(k=k, exact_coeffs=exact_c, exact_weights=exact_d,
                      exact_smoothness=exact_b, coeffs=coeffs, weights=weights,
                      smoothness=smooth, coeffs_windowed=cw,
                      smoothness_windowed=sw)


def _check_window(tables: WenoTables, window: np.ndarray) -> np.ndarray:
    window = np.asarray(window, float)
    if window.shape[-1] != tables.window:
        raise DimensionError(
            f"window of {window.shape[-1]} cells for degree k={tables.k}; "
            f"need {tables.window}")
    return window


def smoothness_indicators(tables: WenoTables, window: np.ndarray) -> np.ndarray:
    """beta_r = q_r^T B_r q_r for every candidate stencil; (..., k+1)."""
    window = _check_window(tables, window)
    return np.einsum("...a,rab,...b->...r", window,
                     tables.smoothness_windowed, window)


def nonlinear_weights(tables: WenoTables, epsilon: float,
                      window: np.ndarray) -> np.ndarray:
    """Normalised weights omega_r = (d_r/(eps+beta_r)^2) / sum; (..., k+1)."""
    if epsilon <= 0.0:
        raise ConfigError(f"epsilon must be positive, got {epsilon}")
    beta = smoothness_indicators(tables, window)
    raw = tables.weights / np.square(epsilon + beta)
    return raw / np.sum(raw, axis=-1, keepdims=True)


def reconstruct_left(tables: WenoTables, epsilon: float,
                     window: np.ndarray) -> np.ndarray:
    """Value just left of x_{i+1/2} from the window centred on cell i."""
    window = _check_window(tables, window)
    candidates = np.einsum("rt,...t->...r", tables.coeffs_windowed, window)
    omega = nonlinear_weights(tables, epsilon, window)
    return np.sum(omega * candidates, axis=-1)


def reconstruct_right(tables: WenoTables, epsilon: float,
                      window: np.ndarray) -> np.ndarray:
    """Value just right of x_{i-1/2} from the window centred on cell i.

    Mirror image of reconstruct_left: the same procedure on the reversed
    window.
    """
    window = _check_window(tables, window)
    return reconstruct_left(tables, epsilon, window[..., ::-1])


@lru_cache(maxsize=None)
def _window_indices(n_cells: int, k: int):
    """Periodic gather indices: rows are interfaces i+1/2, columns windows."""
    cells = np.arange(n_cells)[:, None]
    left = (cells + np.arange(-k, k + 1)[None, :]) % n_cells
    right = (cells + 1 + np.arange(k, -k - 1, -1)[None, :]) % n_cells
    left.setflags(write=False)
    right.setflags(write=False)
    return left, right


def reconstruct_interface_states(model, field: np.ndarray, tables: WenoTables,
                                 epsilon: float, characteristic: bool = True):
    """Left and right states at every interface of a periodic field.

    field has shape (..., D, N); entry i of each returned array belongs to
    interface i+1/2 (the right edge of cell i). With characteristic=True and
    D > 1, windows are projected onto the characteristic fields of the
    adjacent cell (cell i for the left value, cell i+1 for the right value),
    reconstructed per field, and projected back.
    """
    field = np.asarray(field, float)
    if field.ndim < 2:
        raise DimensionError(f"field must be (..., D, N), got {field.shape}")
    n_cells = field.shape[-1]
    if n_cells < tables.window:
        raise DimensionError(
            f"{n_cells} cells cannot support a {tables.window}-cell window")
    idx_left, idx_right = _window_indices(n_cells, tables.k)
    win_left = field[..., idx_left]    # (..., D, N, W)
    win_right = field[..., idx_right]  # reversed windows centred on cell i+1
    if characteristic and field.shape[-2] > 1:
        _, right_vec, left_vec = model.eigen_cells(field)
        # reference cell i+1 for the right-side value
        right_vec_next = np.roll(right_vec, -1, axis=-3)
        left_vec_next = np.roll(left_vec, -1, axis=-3)
        char_left = np.einsum("...ncd,...dnt->...cnt", left_vec, win_left)
        char_right = np.einsum("...ncd,...dnt->...cnt", left_vec_next, win_right)
        rec_left = reconstruct_left(tables, epsilon, char_left)
        rec_right = reconstruct_left(tables, epsilon, char_right)
        state_left = np.einsum("...ndc,...cn->...dn", right_vec, rec_left)
        state_right = np.einsum("...ndc,...cn->...dn", right_vec_next, rec_right)
        return state_left, state_right
    state_left = reconstruct_left(tables, epsilon, win_left)
    state_right = reconstruct_left(tables, epsilon, win_right)
    return state_left, state_right
