"""A miniature seeded experiment sweep: simulate, fit, evaluate, compare.

The CLI drives the same machinery (``netcov sweep --config ... --out ...``);
this script runs a two-cell grid in-process and prints the tidy metrics
table.  Every cell is an independent seeded job: a synthetic design, a
group-sparse coefficient vector, drawn responses, cross-validated fits for
the grouped scheme and the plain-LASSO baseline, and support/prediction
scores against the known truth.
"""

import os
import tempfile

from netcov import cli

CONFIG = """
seed = 2024
experiment.schemes = ebg
experiment.families = gaussian
experiment.n_active = 1
experiment.alphas = 0.1,0.4
experiment.replicates = 1
data.N = 150
data.K = 3
data.nodes_per_community = 4
data.d = 1
solver.grid_size = 40
solver.folds = 5
sweep.methods = scheme,lasso,cpm
"""

with tempfile.TemporaryDirectory() as tmp:
    cfg_path = os.path.join(tmp, "sweep.cfg")
    with open(cfg_path, "w") as fh:
        fh.write(CONFIG)
    out = os.path.join(tmp, "out")
    code = cli.main(["sweep", "--config", cfg_path, "--out", out])
    assert code == 0

    print("cells:", sorted(os.listdir(os.path.join(out, "cells"))))
    print("\nmetrics.csv:")
    with open(os.path.join(out, "metrics.csv")) as fh:
        for line in fh:
            print(" ", line.rstrip())
    print("\nrerunning with the emitted run_manifest reproduces every CSV "
          "byte for byte.")
