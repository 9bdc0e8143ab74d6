"""Seeded synthetic datasets for sanity checks and demos."""

from __future__ import annotations

import numpy as np


def two_gaussians(m: int = 400, n_features: int = 2, separation: float = 4.0, seed: int = 0):
    """Two balanced isotropic unit-variance Gaussian blobs.

    Class means sit at ``-/+ separation / 2`` along the all-ones diagonal
    (scaled to unit length), so the Bayes error is
    ``Phi(-separation / 2)`` (about 2.3% at the default).
    Returns ``(X, y)`` with rows in random order.
    """
    rng = np.random.default_rng(seed)
    y = np.repeat([0, 1], [m // 2, m - m // 2])
    direction = np.ones(n_features) / np.sqrt(n_features)
    centers = np.where(y[:, None] == 1, 1.0, -1.0) * (separation / 2) * direction
    X = centers + rng.standard_normal((m, n_features)) + 5.0
    order = rng.permutation(m)
    return X[order], y[order]


def discrete_mi_sample(m: int, seed: int = 0):
    """Feature on a 5-letter alphabet whose distribution depends on a balanced
    binary label.  Returns ``(x, y, joint)`` with ``joint`` the exact
    5 x 2 probability table."""
    rng = np.random.default_rng(seed)
    cond = np.array([[0.40, 0.30, 0.15, 0.10, 0.05], [0.05, 0.10, 0.20, 0.30, 0.35]])
    y = rng.integers(0, 2, size=m)
    u = rng.random(m)
    x = (u[:, None] > np.cumsum(cond[y], axis=1)).sum(axis=1).astype(np.float64)
    return x, y, (cond * 0.5).T


def ams_like_table(n_subjects: int = 20, seed: int = 0) -> list[dict]:
    """Rows in the AMS table layout with a planted SpO2 -> score relation.

    Each subject has four events (sea level, high altitude, night 1,
    overnight 1) with morning and evening readings.  Lower SpO2 raises the
    expected score; the other vitals are noise.  About 2% of numeric cells
    are left empty to exercise imputation.
    """
    rng = np.random.default_rng(seed)
    events = ["Sea level", "High altitude", "Night 1", "Overnight 1"]
    rows = []
    for s in range(1, n_subjects + 1):
        tolerance = rng.normal(0.0, 1.0)
        for e, event in enumerate(events):
            for time in ("AM", "PM"):
                spo2 = 98.0 - 4.0 * e + 2.0 * tolerance + rng.normal(0.0, 1.5)
                score = int(np.clip(np.rint((96.0 - spo2) / 2.0 + rng.normal(0.0, 0.8)), 0, 12))
                row = {
                    "Subject": f"S{s}",
                    "Event": event,
                    "Time": time,
                    "SpO2": round(spo2, 1),
                    "HR": round(rng.normal(75, 10), 0),
                    "CO_pct": round(rng.normal(1.0, 0.3), 2),
                    "CO_ppm": round(rng.normal(2.0, 0.5), 2),
                    "Psys": round(rng.normal(120, 10), 0),
                    "Pdia": round(rng.normal(80, 8), 0),
                    "Hct": round(rng.normal(44, 3), 1),
                    "AMS_score": score,
                }
                for k in ("HR", "CO_ppm", "Hct"):
                    if rng.random() < 0.02:
                        row[k] = ""
                rows.append(row)
    return rows


def write_ams_like_csv(path, n_subjects: int = 20, seed: int = 0) -> None:
    import csv

    rows = ams_like_table(n_subjects, seed)
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
