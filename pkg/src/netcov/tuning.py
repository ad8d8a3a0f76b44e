"""Cross-validated penalty tuning with the one-standard-error rule.

The lambda grid is computed once from the full training set and reused
across folds.  Every fold re-runs the whole preparation chain
(residualization, standardization, orthonormalization) on its own
training part, so held-out rows never influence the transformations
they are evaluated under.  Out-of-fold deviances are averaged per
observation; the selected penalty is the largest grid value whose mean
deviance is within one standard error of the minimum, and the model is
then refit on the full training set at that value.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .pipeline import (holdout_deviance, predict_eta, predict_response,
                       prepare)
from .solver import fit_path, lambda_grid, lambda_max

__all__ = ["CVResult", "FitResult", "cross_validate", "select_and_refit",
           "one_se_select", "write_cv_csv"]


@dataclass(frozen=True)
class CVResult:
    """Per-lambda out-of-fold deviance summary and the selected grid points."""

    lambdas: np.ndarray
    mean_deviance: np.ndarray
    se: np.ndarray
    fold_deviance: np.ndarray
    fold_assignment: np.ndarray
    index_min: int
    index_one_se: int
    seed: object
    folds: int
    redrawn: bool

    @property
    def lambda_min(self):
        return float(self.lambdas[self.index_min])

    @property
    def lambda_one_se(self):
        return float(self.lambdas[self.index_one_se])


@dataclass
class FitResult:
    """A tuned fit: refit coefficients plus the whole path and CV summary."""

    mu: float
    beta: np.ndarray
    active_groups: tuple
    lambda_hat: float
    index_hat: int
    path: object
    cv: CVResult
    deviance: float
    kkt_residual: float
    family: str
    column_means: np.ndarray
    column_sds: np.ndarray
    y_mean: float
    y_sd: float
    nuisance_model: object


def one_se_select(mean_deviance, se):
    """Indices of the minimizing lambda and the one-SE lambda.

    The grid is descending in lambda, so the one-SE choice is the
    smallest index whose mean deviance is within one standard error of
    the minimum.  Ties on the minimum go to the larger lambda.
    """
    mean_deviance = np.asarray(mean_deviance, dtype=np.float64)
    idx_min = int(np.argmin(mean_deviance))
    limit = mean_deviance[idx_min] + se[idx_min]
    idx_one_se = int(np.flatnonzero(mean_deviance <= limit)[0])
    return idx_min, idx_one_se


def _seeded_rng(seed, tag):
    if seed is None:
        return np.random.default_rng()
    return np.random.default_rng((int(seed), int(tag)))


def _fold_assignment(n, folds, rng):
    """Seeded round-robin assignment; fold sizes differ by at most one."""
    fold = np.empty(n, dtype=np.int64)
    fold[rng.permutation(n)] = np.arange(n) % folds
    return fold


def _constant_y_fold(y, rows, assignment, folds):
    """True if any fold's training part has a constant response."""
    for f in range(folds):
        y_tr = y[rows[assignment != f]]
        if y_tr.size == 0 or np.all(y_tr == y_tr[0]):
            return True
    return False


def cross_validate(dataset, spec, folds=10, seed=None, grid_size=100,
                   min_ratio=0.05, rows=None):
    """K-fold cross-validation of the penalty level over one lambda grid.

    Deterministic given ``seed``: the fold assignment is a seeded
    round-robin over a random permutation.  Under the binomial family an
    assignment leaving some fold's training part with constant response
    is redrawn once from a derived seed; a second failure is an error.
    """
    if rows is None:
        rows = dataset.train_rows
    if rows is None:
        rows = np.arange(dataset.N)
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size < folds:
        raise ValueError(f"{rows.size} training rows cannot fill {folds} folds")

    prep_full = prepare(dataset, spec, rows)
    grid = lambda_grid(lambda_max(prep_full.problem), grid_size=grid_size,
                       min_ratio=min_ratio)

    assignment = _fold_assignment(rows.size, folds, _seeded_rng(seed, 0))
    redrawn = False
    if dataset.family == "binomial" and _constant_y_fold(
            dataset.y, rows, assignment, folds):
        assignment = _fold_assignment(rows.size, folds,
                                      _seeded_rng(seed, 1))
        redrawn = True
        if _constant_y_fold(dataset.y, rows, assignment, folds):
            raise ValueError(
                "fold assignment leaves a constant binary response in some "
                "fold's training part even after one redraw"
            )

    fold_dev = np.empty((folds, grid.size))
    for f in range(folds):
        tr = rows[assignment != f]
        ho = rows[assignment == f]
        prep = prepare(dataset, spec, tr)
        pf = fit_path(prep.problem, prep.basis, prep.emap, lambdas=grid)
        for a, entry in enumerate(pf.entries):
            fold_dev[f, a] = holdout_deviance(prep, entry.mu, entry.beta, ho,
                                              dataset.family)

    mean_dev = fold_dev.mean(axis=0)
    se = fold_dev.std(axis=0, ddof=1) / np.sqrt(folds)
    idx_min, idx_one_se = one_se_select(mean_dev, se)
    return CVResult(
        lambdas=grid, mean_deviance=mean_dev, se=se, fold_deviance=fold_dev,
        fold_assignment=assignment, index_min=idx_min,
        index_one_se=idx_one_se, seed=seed, folds=folds, redrawn=redrawn,
    )


def select_and_refit(dataset, spec, cv, rows=None):
    """Refit on the full training set at the one-SE lambda.

    Fits the whole path (warm-started from lambda_max) so that the
    returned object also carries every grid entry for path reports and
    ROC curves; the headline coefficients are those at the one-SE point.
    """
    if rows is None:
        rows = dataset.train_rows
    if rows is None:
        rows = np.arange(dataset.N)
    rows = np.asarray(rows, dtype=np.int64)

    prep = prepare(dataset, spec, rows)
    pf = fit_path(prep.problem, prep.basis, prep.emap, lambdas=cv.lambdas)
    entry = pf.entries[cv.index_one_se]
    return FitResult(
        mu=entry.mu, beta=entry.beta, active_groups=entry.active_groups,
        lambda_hat=entry.lam, index_hat=cv.index_one_se, path=pf, cv=cv,
        deviance=entry.deviance, kkt_residual=entry.kkt_residual,
        family=dataset.family,
        column_means=prep.design_std.column_means,
        column_sds=prep.design_std.column_sds,
        y_mean=prep.design_std.y_mean, y_sd=prep.design_std.y_sd,
        nuisance_model=prep.nuisance_model,
    ), prep


def write_cv_csv(cv, path):
    """``cv.csv``: lambda, mean deviance, SE, selection flags."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "mean_deviance", "se", "is_min",
                         "is_one_se"])
        for i, lam in enumerate(cv.lambdas):
            writer.writerow([repr(float(lam)), repr(float(cv.mean_deviance[i])),
                             repr(float(cv.se[i])), int(i == cv.index_min),
                             int(i == cv.index_one_se)])
