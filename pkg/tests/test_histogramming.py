import boost_histogram as bh
import numpy as np
from ontosearch.histogramming import (
    RangeWarning,
    create_axis,
    make_hist,
    make_null_distribution_hist,
)
from pytest import approx, raises, warns


def test_make_hist():
    """
    Test make_hist() function.
    """
    h = make_hist(data=[0, 1, 2, 3, 4], bins=5, range=(0, 5))
    assert isinstance(h, bh.Histogram)
    assert isinstance(h.axes[0], bh.axis.Regular)
    assert h.sum().value == 5
    assert h.sum().variance == 5
    assert h[0].value == 1
    assert h[-1].value == 1


def test_upper_edge_inclusive():
    """
    Check that the upper edge of the last bin is inclusive.
    """
    data = [0] * 3 + [1] * 4 + [2] * 5 + [3] * 6 + [4] * 7 + [5] * 8
    h = make_hist(data=data, bins=5, range=(0, 5))
    assert np.array_equal(h.values(), [3, 4, 5, 6, 15])


def test_create_axis():
    """
    Test axis creation from a range, from data and for degenerate inputs.
    """
    axis = create_axis(4, data=np.array([0.2, 0.6]))
    assert axis.edges[0] == approx(0.2)
    assert axis.edges[-1] == approx(0.6)
    assert create_axis(2).edges[-1] == 1
    assert create_axis(2, data=np.array([0.3, 0.3])).edges[0] == approx(-0.2)

    with raises(ValueError):
        create_axis(0, (0, 1))
    with raises(ValueError):
        create_axis(5, (1, 0))


def test_range_coverage_warning():
    """
    Test the warning when data falls outside the binning range.
    """
    warn_message = r"Only 80.00% of data contained in the binning range [0.0, 5.0]."

    with warns(RangeWarning) as warn_info:
        make_hist(data=[0, 1, 2, 3, 10], bins=5, range=(0, 5))
    assert str(warn_info[0].message) == warn_message


def test_null_distribution_hist():
    """
    Test that the null distribution range covers the observed statistic.
    """
    h = make_null_distribution_hist([0.0, 0.01, 0.02, 0.02], observed=0.1, bins=10)
    assert h.axes[0].edges[-1] == approx(0.1)
    assert h.sum().value == 4
    assert h.values()[5:].sum() == 0

    h = make_null_distribution_hist([0.0, 0.05, 0.1], observed=0.05, bins=2)
    assert h.values().tolist() == [1, 2]

    h = make_null_distribution_hist([0.0, 0.0], observed=0.0, bins=5)
    assert h.sum().value == 2
