"""
Compositional data handling: zero imputation, closure and log-ratio transforms.

Count and abundance tables are plain 2-D arrays with samples in rows and taxa
in columns. Every function validates its input and returns a new array.
"""

import numpy as np

#: row sums of a composition must match 1 this closely
ROW_SUM_TOL = 1e-10
#: rows within this distance of 1 are silently re-closed
RENORMALIZE_TOL = 1e-6


def _as_matrix(mat, name="matrix"):
    mat = np.array(mat, dtype=float, copy=True)
    if mat.ndim == 1:
        mat = mat[np.newaxis, :]
    if mat.ndim != 2:
        raise ValueError(f"{name} must be two dimensional, got ndim={mat.ndim}")
    if not np.all(np.isfinite(mat)):
        raise ValueError(f"{name} contains non-finite entries")
    return mat


def validate_counts(mat):
    """Check a count/abundance table and return it as a float array.

    Raises
    ------
    ValueError
        If the table has negative or non-finite entries, fewer than two
        columns, or a row that is entirely zero.
    """
    mat = _as_matrix(mat, "count matrix")
    n, p = mat.shape
    if n < 1 or p < 2:
        raise ValueError(f"count matrix needs n >= 1 and p >= 2, got {mat.shape}")
    if np.any(mat < 0):
        raise ValueError("count matrix has negative entries")
    empty = np.flatnonzero(~np.any(mat > 0, axis=1))
    if empty.size:
        raise ValueError(f"count matrix has all-zero rows: {empty.tolist()}")
    return mat


def impute_pseudo_count(mat, pseudo_count=0.5):
    """Replace zero entries with a constant pseudo count.

    Strictly positive entries are left untouched, so this is *not* the
    "add c everywhere" variant.

    Parameters
    ----------
    mat : array_like
        n x p nonnegative counts, rows are samples.
    pseudo_count : float
        Replacement value for zeros, must be positive.

    Returns
    -------
    numpy.ndarray
        Copy of `mat` with zeros replaced.

    Examples
    --------
    >>> impute_pseudo_count([[0, 3], [2, 0]])
    array([[0.5, 3. ],
           [2. , 0.5]])
    """
    if not pseudo_count > 0:
        raise ValueError(f"pseudo_count must be positive, got {pseudo_count}")
    mat = validate_counts(mat)
    mat[mat == 0] = pseudo_count
    return mat


def to_relative_abundance(mat):
    """Close each row so it sums to one.

    Parameters
    ----------
    mat : array_like
        n x p strictly positive abundances (impute zeros first).

    Returns
    -------
    numpy.ndarray
        Composition matrix on the simplex.
    """
    mat = _as_matrix(mat, "abundance matrix")
    if mat.shape[1] < 2:
        raise ValueError("need at least two components")
    if np.any(mat <= 0):
        raise ValueError("abundances must be strictly positive; impute zeros first")
    return mat / mat.sum(axis=1, keepdims=True)


def validate_composition(mat):
    """Return `mat` as a composition matrix, re-closing near-unit rows.

    Rows off by more than ``RENORMALIZE_TOL`` raise, since such input is
    almost certainly unnormalized counts rather than rounding noise.
    """
    mat = _as_matrix(mat, "composition")
    if mat.shape[1] < 2:
        raise ValueError("need at least two components")
    if np.any(mat <= 0):
        raise ValueError("compositions must be strictly positive")
    sums = mat.sum(axis=1)
    bad = np.flatnonzero(np.abs(sums - 1.0) > RENORMALIZE_TOL)
    if bad.size:
        raise ValueError(
            f"rows {bad[:5].tolist()} do not sum to 1 (e.g. {sums[bad[0]]!r}); "
            "call to_relative_abundance first")
    if np.any(np.abs(sums - 1.0) > ROW_SUM_TOL):
        mat = mat / sums[:, np.newaxis]
    return mat


def clr_transform(mat):
    r"""Centered log-ratio transform of a composition matrix.

    Entry (i, j) becomes :math:`\log \xi_{ij} - \frac{1}{p}\sum_k \log \xi_{ik}`,
    the log of the part over the row's geometric mean. Rows of the result
    sum to zero.

    Parameters
    ----------
    mat : array_like
        n x p composition matrix (strictly positive rows summing to 1).

    Returns
    -------
    numpy.ndarray
        n x p CLR coordinates.

    Examples
    --------
    >>> clr_transform([[0.25, 0.25, 0.25, 0.25]])
    array([[0., 0., 0., 0.]])
    """
    lmat = np.log(validate_composition(mat))
    return lmat - lmat.mean(axis=1, keepdims=True)


def alr_transform(mat, ref_col=-1):
    """Additive log-ratio transform against a reference column.

    Parameters
    ----------
    mat : array_like
        n x p composition matrix.
    ref_col : int
        Index of the reference part, default the last column. Negative
        indices count from the end.

    Returns
    -------
    numpy.ndarray
        n x (p - 1) matrix of ``log(xi_j / xi_ref)`` with the reference
        column removed and the remaining order preserved.
    """
    mat = validate_composition(mat)
    p = mat.shape[1]
    if not isinstance(ref_col, (int, np.integer)) or not -p <= ref_col < p:
        raise ValueError(f"ref_col {ref_col!r} out of range for p={p}")
    ref_col = int(ref_col) % p
    lmat = np.log(mat)
    ratios = lmat - lmat[:, [ref_col]]
    return np.delete(ratios, ref_col, axis=1)


def alr_inverse(coords, ref_col=-1):
    """Map ALR coordinates back to the simplex.

    `ref_col` is the position the reference part occupies in the output,
    so ``alr_inverse(alr_transform(x, k), k)`` recovers ``x``.
    """
    coords = _as_matrix(coords, "alr coordinates")
    p = coords.shape[1] + 1
    if not -p <= ref_col < p:
        raise ValueError(f"ref_col {ref_col!r} out of range for p={p}")
    ref_col = int(ref_col) % p
    full = np.insert(coords, ref_col, 0.0, axis=1)
    full = np.exp(full - full.max(axis=1, keepdims=True))
    return full / full.sum(axis=1, keepdims=True)


def centering_projection(p):
    """The p x p centering matrix ``I - 11^T / p``.

    Applying it to a log-basis vector gives the CLR vector; it is symmetric,
    idempotent and annihilates constant vectors.
    """
    if not isinstance(p, (int, np.integer)) or p < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {p!r}")
    return np.eye(p) - np.full((p, p), 1.0 / p)


def filter_low_counts(mat, min_count):
    """Drop columns whose total count across all samples is below `min_count`.

    Returns
    -------
    filtered : numpy.ndarray
    kept : numpy.ndarray
        Integer indices of the retained columns.
    """
    if min_count < 0:
        raise ValueError(f"min_count must be >= 0, got {min_count}")
    mat = _as_matrix(mat, "count matrix")
    if np.any(mat < 0):
        raise ValueError("count matrix has negative entries")
    kept = np.flatnonzero(mat.sum(axis=0) >= min_count)
    if kept.size == 0:
        raise ValueError(f"no column has a total count >= {min_count}")
    return mat[:, kept], kept


def counts_to_clr(mat, pseudo_count=0.5):
    """Impute, close and CLR-transform a raw count table in one step."""
    return clr_transform(to_relative_abundance(impute_pseudo_count(mat, pseudo_count)))
