"""CSV exports for decompositions, LE series and LE-sample distributions."""
from __future__ import annotations

import csv
from typing import IO

import numpy as np

from .divergence import EmpiricalDistribution, GompertzReference, gompertz_pdf
from .emd import Decomposition
from .lyapunov import LESeries
from .trajectory import AnalysisWindow


def write_decomposition(window: AnalysisWindow, d: Decomposition, sink: IO[str]) -> None:
    """Columns ``t, v, imf1..imfK, residual``."""
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(["t", "v", *[f"imf{i.index}" for i in d.imfs], "residual"])
    cols = [window.t, window.v, *[i.values for i in d.imfs], d.residual]
    for row in zip(*cols):
        w.writerow([repr(float(x)) for x in row])


def write_le_series(series: LESeries, sink: IO[str], t0: float = 0.0) -> None:
    """Columns ``k, t, lambda, exp_lambda`` with t = t0 + k dt."""
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(["k", "t", "lambda", "exp_lambda"])
    for k, lam in zip(series.k_grid, series.lambdas):
        w.writerow([int(k), repr(float(t0 + k * series.dt)), repr(float(lam)), repr(float(np.exp(lam)))])


def reference_density(ref: GompertzReference, dist: EmpiricalDistribution) -> np.ndarray:
    """Gompertz density at the bin centres, normalised over the grid's support."""
    pdf = gompertz_pdf(ref, dist.centers)
    return pdf / np.sum(pdf * dist.widths)


def write_distribution(dist: EmpiricalDistribution, ref: GompertzReference, sink: IO[str]) -> None:
    """Columns ``bin_center, mass, reference_density``."""
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(["bin_center", "mass", "reference_density"])
    for c, m, q in zip(dist.centers, dist.mass, reference_density(ref, dist)):
        w.writerow([repr(float(c)), repr(float(m)), repr(float(q))])
