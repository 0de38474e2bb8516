"""
Collection of functions to bin retrieval statistics (permutation statistics, document scores) with boost_histogram.
"""
import warnings

import boost_histogram as bh
import numpy as np


# Define a custom warning for range issues
class RangeWarning(Warning):
    pass


# Always show the range warnings
warnings.filterwarnings("always", category=RangeWarning)


def create_axis(bins, range=None, data=np.array([])):
    """
    Create a regular axis for the given data.

    Parameters
    ----------
    bins : int
        The number of bins.
    range : None or tuple, optional
        The (min, max) range. If None, it is determined from the data, and (0, 1) for empty data.

    Returns
    -------
    boost_histogram.axis.Regular
        The axis, without underflow and overflow bins.

    Raises
    ------
    ValueError
        If bins is not positive or the range is not valid.
    """
    if bins <= 0:
        raise ValueError(f"Number of bins must be positive, but got {bins}.")
    if range is not None:
        x_min, x_max = range
    elif len(data) == 0:
        x_min, x_max = 0, 1
    else:
        x_min, x_max = float(np.min(data)), float(np.max(data))
    if not (np.isfinite(x_min) and np.isfinite(x_max)) or x_min > x_max:
        raise ValueError(f"Range of [{x_min}, {x_max}] is not valid.")

    # expand empty range to avoid divide by zero
    if x_min == x_max:
        x_min, x_max = x_min - 0.5, x_max + 0.5
    return bh.axis.Regular(bins, x_min, x_max, underflow=False, overflow=False)


def make_hist(data=np.array([]), bins=50, range=None):
    """
    Create a histogram and fill it with the data.

    Parameters
    ----------
    data : array-like, optional
        1D data (default is an empty array).
    bins : int, optional
        Number of bins (default is 50).
    range : tuple, optional
        The binning range. If None, it is determined from the data.

    Returns
    -------
    boost_histogram.Histogram
        The filled histogram.

    Warns
    -----
    RangeWarning
        If more than 1% of the data is outside of the binning range.
    """
    data = np.asarray(data, dtype=float)
    axis = create_axis(bins, range, data)
    h = bh.Histogram(axis, storage=bh.storage.Weight())
    if len(data) > 0:
        # The upper edge is inclusive
        upper = axis.edges[-1]
        h.fill(np.where(data == upper, upper - 1e-12 * max(1.0, abs(upper)), data))
        range_coverage = h.sum().value / len(data)
        if range_coverage < 0.99:
            warnings.warn(
                f"Only {100*range_coverage:.2f}% of data contained in the binning range [{axis.edges[0]}, {axis.edges[-1]}].",
                category=RangeWarning,
                stacklevel=2,
            )
    return h


def make_null_distribution_hist(statistics, observed, bins=50):
    """
    Bin the permuted statistics of a randomization test over a range that includes the observed statistic.

    Parameters
    ----------
    statistics : array-like
        Permuted |mean difference| values.
    observed : float
        The observed |mean difference|.
    bins : int, optional
        Number of bins (default is 50).

    Returns
    -------
    boost_histogram.Histogram
        The histogram of the null distribution.
    """
    statistics = np.asarray(statistics, dtype=float)
    upper = max(float(statistics.max()) if len(statistics) else 0.0, observed)
    return make_hist(statistics, bins=bins, range=(0.0, upper if upper > 0 else 1.0))
