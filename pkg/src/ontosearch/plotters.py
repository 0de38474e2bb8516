# -*- coding: utf-8 -*-
"""
Collection of functions to plot retrieval evaluations: precision-recall and F-measure-recall curves,
and the null distribution of the randomization test.
"""
from importlib.resources import files

import matplotlib.pyplot as plt
import numpy as np

from .histogramming import make_null_distribution_hist


def set_style(style="default"):
    """
    Set the ontosearch plotting style.

    Parameters
    ----------
    style : str, optional
        Name of a bundled style. Default is 'default'.

    Raises
    ------
    ValueError
        If the specified style is not in the available styles.
    """
    available_styles = ["default"]

    if style not in available_styles:
        raise ValueError(f"{style} not in the available styles: {available_styles}")
    plt.style.use(str(files("ontosearch") / f"{style}_style.mplstyle"))


def create_curve_figure(figsize=(10, 4.5), wspace=0.25):
    """
    Create a figure with two side-by-side axes, for the P-R and the F-R curves.

    Parameters
    ----------
    figsize : tuple, optional
        Figure size in inches. Default is (10, 4.5).
    wspace : float, optional
        Width spacing between subplots. Default is 0.25.

    Returns
    -------
    fig : matplotlib.figure.Figure
        The created figure.
    axes : ndarray
        The P-R and F-R axes.
    """
    set_style()
    fig, axes = plt.subplots(ncols=2, figsize=figsize)
    fig.subplots_adjust(wspace=wspace)
    return fig, axes


def plot_curve(curve, ax, **kwargs):
    """
    Plot an 11-point curve given as (recall level, value) pairs.

    Parameters
    ----------
    curve : list of tuple
        The (recall, value) points.
    ax : matplotlib.axes.Axes
        The Axes instance for plotting.
    **kwargs
        Additional keyword arguments forwarded to ax.plot(), such as label, color, linestyle...
    """
    kwargs.setdefault("marker", "o")
    recall, value = zip(*curve) if curve else ((), ())
    ax.plot(recall, value, **kwargs)


def plot_pr_and_f_curves(reports, labels=None, axes=None):
    """
    Overlay the average P-R and F-R curves of several metric reports.

    Parameters
    ----------
    reports : list of MetricReport
        The reports.
    labels : list of str, optional
        One legend label per report. Default is the preset of the report manifest, else "run i".
    axes : sequence of two matplotlib.axes.Axes, optional
        The P-R and F-R axes. Default is a new figure from create_curve_figure().

    Returns
    -------
    fig : matplotlib.figure.Figure
        The figure.
    axes : sequence of matplotlib.axes.Axes
        The P-R and F-R axes.

    Raises
    ------
    ValueError
        If labels and reports have different lengths.
    """
    if labels is None:
        labels = [r.manifest.get("preset", f"run {i}") for i, r in enumerate(reports)]
    if len(labels) != len(reports):
        raise ValueError(f"Got {len(labels)} labels for {len(reports)} reports.")
    if axes is None:
        fig, axes = create_curve_figure()
    else:
        fig = axes[0].get_figure()

    for report, label in zip(reports, labels):
        plot_curve(report.pr_curve, axes[0], label=f"{label} (MAP {report.map:.4f})")
        plot_curve(report.f_curve, axes[1], label=label)

    for ax, ylabel in zip(axes, ["Interpolated precision", "F-measure"]):
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1.05)
        ax.set_xlabel("Recall")
        ax.set_ylabel(ylabel)
    axes[0].legend(loc="lower left")
    return fig, axes


def plot_null_distribution(statistics, observed, p_value, ax=None, bins=50, **kwargs):
    """
    Plot the permuted statistics of a randomization test and mark the observed statistic.

    Parameters
    ----------
    statistics : array-like
        Permuted |mean difference| values.
    observed : float
        Observed |mean difference|.
    p_value : float
        Two-sided p-value, shown in the legend.
    ax : matplotlib.axes.Axes, optional
        The Axes instance for plotting. Default is a new figure.
    bins : int, optional
        Number of bins (default is 50).
    **kwargs
        Additional keyword arguments forwarded to ax.hist().

    Returns
    -------
    fig : matplotlib.figure.Figure
        The figure.
    ax : matplotlib.axes.Axes
        The axes.
    """
    if ax is None:
        set_style()
        fig, ax = plt.subplots()
    else:
        fig = ax.get_figure()

    hist = make_null_distribution_hist(statistics, observed, bins=bins)
    kwargs.setdefault("histtype", "stepfilled")
    kwargs.setdefault("alpha", 0.6)
    kwargs.setdefault("label", "Permutations")
    ax.hist(
        x=hist.axes[0].centers,
        bins=hist.axes[0].edges,
        weights=np.nan_to_num(hist.values(), 0),
        **kwargs,
    )
    ax.axvline(observed, color="black", linestyle="--", label=f"Observed (p = {p_value:.4f})")
    ax.set_xlabel(r"$|\overline{\Delta AP}|$")
    ax.set_ylabel("Permutations")
    ax.legend(loc="upper right")
    return fig, ax


def savefig(fig, path):
    """
    Save a figure with a tight layout and close it.

    Parameters
    ----------
    fig : matplotlib.figure.Figure
        The figure.
    path : str
        The output file path.
    """
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
