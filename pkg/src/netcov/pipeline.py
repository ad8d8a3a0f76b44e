"""End-to-end preparation of a penalized problem from a dataset.

The chain is always: optional nuisance residualization (coefficients
from training rows), column/response standardization (training
statistics), overlap expansion of the chosen feature groups, groupwise
orthonormalization (training rows), then the solver-ready problem.
Test rows are transformed with the training-fitted parameters only.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .data import build_design
from .groups import ebg_groups, expand, nbg_groups, singleton_groups, split_communities
from .preprocess import orthonormalize, residualize_nuisance, standardize
from .solver import PenalizedProblem, deviance

__all__ = ["Prepared", "make_groups", "prepare", "predict_eta",
           "predict_response", "holdout_deviance"]

SCHEMES = ("nbg", "ebg", "lasso")


@dataclass(frozen=True)
class Prepared:
    """Everything needed to fit on the training rows and predict anywhere."""

    problem: PenalizedProblem
    basis: object
    emap: object
    spec: object
    design_std: object   # DesignMatrix over all rows, training statistics
    y_std: np.ndarray    # response aligned with design rows (standardized if gaussian)
    nuisance_model: object
    train_rows: np.ndarray


def make_groups(dataset, scheme, split_target=None, seed=None):
    """Build the GroupSpec for a scheme, optionally after community splitting.

    Returns (spec, community_map_used); the community map differs from
    the dataset's only when ``split_target`` is given.
    """
    scheme = str(scheme).lower()
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    cm = dataset.communities
    if split_target is not None:
        cm = split_communities(cm, split_target, seed)
    idx = dataset.index
    if scheme == "nbg":
        spec = nbg_groups(cm, idx)
    elif scheme == "ebg":
        spec = ebg_groups(cm, idx)
    else:
        spec = singleton_groups(idx)
    return spec, cm


def prepare(dataset, spec, train_rows=None):
    """Residualize, standardize, expand and orthonormalize for one fit."""
    if train_rows is None:
        train_rows = dataset.train_rows
    if train_rows is None:
        train_rows = np.arange(dataset.N)
    train_rows = np.asarray(train_rows, dtype=np.int64)

    design = build_design(dataset)
    Z = design.Z
    y = dataset.y
    nuisance_model = None
    if dataset.nuisance is not None:
        # the response stays 0/1 under the binomial family; only the
        # features are nuisance-corrected there
        Z, y, nuisance_model = residualize_nuisance(
            Z, y, dataset.nuisance, train_rows,
            residualize_y=(dataset.family == "gaussian"),
        )
        design = build_design(dataset)
        design = type(design)(Z=Z, index=design.index)

    design_std, y_std = standardize(design, y, train_rows, dataset.family)
    if y_std is None:
        y_std = np.asarray(y, dtype=np.float64)

    emap = expand(spec)
    Z_star = emap.expand_design(design_std.Z[train_rows])
    U, basis, multipliers = orthonormalize(Z_star, emap, spec.names)
    kept_names = tuple(spec.names[gi] for gi in basis.kept)
    problem = PenalizedProblem(
        U=U, y=y_std[train_rows], family=dataset.family,
        slices=basis.u_slices, multipliers=multipliers, names=kept_names,
    )
    return Prepared(problem=problem, basis=basis, emap=emap, spec=spec,
                    design_std=design_std, y_std=y_std,
                    nuisance_model=nuisance_model, train_rows=train_rows)


def predict_eta(prepared, mu, beta, rows):
    """Linear predictor for the given rows from original-space coefficients."""
    return mu + prepared.design_std.Z[rows] @ beta


def predict_response(prepared, mu, beta, rows, family):
    """Response-scale predictions: de-standardized mean or probability."""
    eta = predict_eta(prepared, mu, beta, rows)
    if family == "gaussian":
        if prepared.design_std.y_mean is not None:
            return prepared.design_std.y_mean + prepared.design_std.y_sd * eta
        return eta
    return expit(eta)


def holdout_deviance(prepared, mu, beta, rows, family):
    """Per-observation deviance of a fit on held-out rows."""
    eta = predict_eta(prepared, mu, beta, rows)
    return deviance(family, prepared.y_std[rows], eta) / len(rows)
