"""Shared fixtures: one synthetic dataset, PCA model, and trained bundle
per session, so the expensive training work happens exactly once."""

from __future__ import annotations

import numpy as np
import pytest

from gcskit.dataset import Bundle, encode_designs, resample_all
from gcskit.pca import fit as fit_pca
from gcskit.synthetic import synthetic_dataset
from gcskit.tandem import (
    TrainConfig,
    loss_weights_from_pca,
    train_forward,
    train_inverse,
)
from gcskit.vectorize import encode_performance_matrix

# Weight decay off: at a few hundred records and ~100 epochs the nets are
# nowhere near overfitting, and the default decay strength would dominate
# the update long before convergence.
QUICK_CONFIG = TrainConfig(weight_decay=0.0, max_epochs=120, patience=120, seed=0)


@pytest.fixture(scope="session")
def big_dataset():
    return synthetic_dataset(800, seed=7)


@pytest.fixture(scope="session")
def small_dataset():
    return synthetic_dataset(40, seed=11)


@pytest.fixture(scope="session")
def pca_model(big_dataset):
    forces, max_disps = resample_all(big_dataset)
    return fit_pca(forces, max_displacements=max_disps)


@pytest.fixture(scope="session")
def big_vectors(big_dataset, pca_model):
    designs = encode_designs(big_dataset)
    forces, max_disps = resample_all(big_dataset)
    performances = encode_performance_matrix(forces, max_disps, pca_model)
    return designs, performances


@pytest.fixture(scope="session")
def trained_bundle(big_vectors, pca_model):
    designs, performances = big_vectors
    weights = loss_weights_from_pca(pca_model)
    fwd, _ = train_forward(designs, performances, weights, QUICK_CONFIG)
    inverses = {}
    for alpha in (0.0, 1.0):
        inv, _ = train_inverse(
            designs, performances, weights, fwd, QUICK_CONFIG.with_alpha(alpha)
        )
        inverses[alpha] = inv
    return Bundle(
        pca=pca_model,
        forward=fwd,
        inverses=inverses,
        metadata={"trained_on": "synthetic-800"},
    )


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


# ------------------------------------------------------------------
# Release-gate reporting: the acceptance tests record one line per
# criterion; the hook replays them in the terminal summary so they are
# visible even though pytest captures stdout.

ACCEPTANCE_LINES: list[str] = []


def record_criterion(number, ok: bool, detail: str, tag: str | None = None) -> str:
    tag = tag or ("PASS" if ok else "FAIL")
    line = f"criterion {number}: {tag} — {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line, flush=True)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
