"""Supervised next-day price baselines: linear regression on today's prices,
a persistence predictor, and a logistic classifier for tomorrow's movement."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from datetime import date
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .errors import ConfigError, DataError, NumericalError
from .market_data import Movement, PriceSeries, movement

OLS_JITTER = 1e-8


def chronological_split(n: int, train_fraction: float = 0.8) -> tuple[slice, slice]:
    """Index slices for an ordered train/test split (no shuffling, so the test
    part never leaks into the past)."""
    if n < 2:
        raise DataError(f"need at least 2 samples to split, got {n}")
    cut = int(train_fraction * n)
    cut = min(max(cut, 1), n - 1)
    return slice(0, cut), slice(cut, n)


def regression_dataset(series: PriceSeries) -> tuple[np.ndarray, np.ndarray, list[date]]:
    """Rows of today's four prices against tomorrow's close.

    Returns (features, targets, target_dates) with one row per day that has a
    successor.
    """
    if len(series) < 2:
        raise DataError("need at least 2 bars for next-close regression")
    rows = np.array(
        [[bar.open, bar.high, bar.low, bar.close] for bar in series.bars], dtype=float
    )
    features = rows[:-1]
    targets = rows[1:, 3]
    dates = [bar.date for bar in series.bars[1:]]
    return features, targets, dates


class NextCloseRegressor(BaseEstimator):
    """Least squares on (features + intercept) via the normal equations, with
    a small diagonal jitter for rank safety."""

    def fit(self, X: np.ndarray, y: np.ndarray) -> "NextCloseRegressor":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.shape[0] < X.shape[1]:
            raise DataError(f"need rows >= columns, got shape {X.shape}")
        design = np.column_stack([X, np.ones(X.shape[0])])
        gram = design.T @ design + OLS_JITTER * np.eye(design.shape[1])
        try:
            solution = np.linalg.solve(gram, design.T @ y)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"normal equations are degenerate: {exc}") from None
        if not np.all(np.isfinite(solution)):
            raise NumericalError("non-finite regression coefficients")
        self.coef_ = solution[:-1]
        self.intercept_ = float(solution[-1])
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        if not hasattr(self, "coef_"):
            raise NotFittedError("NextCloseRegressor is not fitted yet")
        return np.asarray(X, dtype=float) @ self.coef_ + self.intercept_


def persistence_predict(today_close):
    """Tomorrow's close predicted as today's close, elementwise on arrays."""
    return np.asarray(today_close, dtype=float) if np.ndim(today_close) else float(today_close)


def accuracy_within(preds, actuals, tol: float = 0.02) -> float:
    """Fraction of predictions within ``tol`` relative error, boundary inclusive."""
    preds = np.asarray(preds, dtype=float)
    actuals = np.asarray(actuals, dtype=float)
    if preds.shape != actuals.shape:
        raise ConfigError(
            f"prediction/actual lengths differ: {preds.shape} vs {actuals.shape}"
        )
    if np.any(actuals <= 0):
        raise DataError("actual prices must be positive")
    return float(np.mean(np.abs(preds - actuals) / actuals <= tol))


def classification_dataset(
    series: PriceSeries, days: int = 3
) -> tuple[np.ndarray, np.ndarray, list[date]]:
    """Movement labels for tomorrow against the previous ``days`` bars' prices.

    Features are the block's prices as relative returns against the most
    recent of those days' close (scale-free); labels are 1 for UP, 0 for DOWN.
    """
    if len(series) < days + 1:
        raise DataError(f"need more than {days} bars for classification")
    rows = np.array(
        [[bar.open, bar.high, bar.low, bar.close] for bar in series.bars], dtype=float
    )
    features, labels, dates = [], [], []
    for t in range(days - 1, len(series) - 1):
        block = rows[t - days + 1 : t + 1]
        anchor = block[-1, 3]
        features.append((block / anchor - 1.0).reshape(-1))
        labels.append(1.0 if movement(series.bars[t + 1]) is Movement.UP else 0.0)
        dates.append(series.bars[t + 1].date)
    return np.array(features), np.array(labels), dates


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    expz = np.exp(z[~pos])
    out[~pos] = expz / (1.0 + expz)
    return out


def logistic_loss_grad(
    weights: np.ndarray, X: np.ndarray, y: np.ndarray
) -> tuple[float, np.ndarray]:
    """Mean cross-entropy and its gradient for a bias-augmented design matrix."""
    z = X @ weights
    p = _sigmoid(z)
    eps = 1e-12
    loss = float(-np.mean(y * np.log(p + eps) + (1.0 - y) * np.log(1.0 - p + eps)))
    grad = X.T @ (p - y) / X.shape[0]
    return loss, grad


class MovementClassifier(BaseEstimator):
    """Logistic regression trained by full-batch gradient descent on the mean
    cross-entropy; decisions use the 0.5 probability threshold."""

    def __init__(self, learning_rate: float = 0.5, epochs: int = 300, seed: int = 0):
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.seed = seed

    def fit(self, X: np.ndarray, y: np.ndarray) -> "MovementClassifier":
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be non-negative, got {self.epochs}")
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if set(np.unique(y)) - {0.0, 1.0}:
            raise DataError("labels must be binary 0/1")
        design = np.column_stack([X, np.ones(X.shape[0])])
        rng = np.random.default_rng(self.seed)
        weights = rng.normal(0.0, 0.01, size=design.shape[1])
        curve = []
        for _ in range(self.epochs):
            loss, grad = logistic_loss_grad(weights, design, y)
            if not np.isfinite(loss):
                raise NumericalError("non-finite logistic loss")
            curve.append(loss)
            weights = weights - self.learning_rate * grad
        self.weights_ = weights
        self.loss_curve_ = curve
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        if not hasattr(self, "weights_"):
            raise NotFittedError("MovementClassifier is not fitted yet")
        design = np.column_stack([np.asarray(X, dtype=float), np.ones(len(X))])
        return _sigmoid(design @ self.weights_)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(float)


def classification_report(
    model: MovementClassifier,
    train: tuple[np.ndarray, np.ndarray],
    test: tuple[np.ndarray, np.ndarray],
) -> tuple[float, float]:
    """(train accuracy, test accuracy) at the 0.5 threshold."""
    train_acc = float(np.mean(model.predict(train[0]) == train[1]))
    test_acc = float(np.mean(model.predict(test[0]) == test[1]))
    return train_acc, test_acc


@dataclass(frozen=True)
class PredictionReport:
    """Accuracy rows per algorithm plus the regression's per-day test predictions."""

    rows: tuple[tuple[str, float, float], ...]  # (algorithm, train_acc, test_acc)
    daily: tuple[tuple[date, float, float, bool], ...]  # (date, actual, predicted, correct)


def run_prediction(
    series: PriceSeries,
    tol: float = 0.02,
    learning_rate: float = 0.5,
    epochs: int = 300,
    seed: int = 0,
) -> PredictionReport:
    """Fit all three baselines on a single company's history (80/20 split)."""
    X, y, dates = regression_dataset(series)
    train_idx, test_idx = chronological_split(len(y))
    ols = NextCloseRegressor().fit(X[train_idx], y[train_idx])
    ols_row = (
        "ols",
        accuracy_within(ols.predict(X[train_idx]), y[train_idx], tol),
        accuracy_within(ols.predict(X[test_idx]), y[test_idx], tol),
    )
    persist_row = (
        "persistence",
        accuracy_within(persistence_predict(X[train_idx][:, 3]), y[train_idx], tol),
        accuracy_within(persistence_predict(X[test_idx][:, 3]), y[test_idx], tol),
    )
    Xc, yc, _ = classification_dataset(series)
    ctrain_idx, ctest_idx = chronological_split(len(yc))
    classifier = MovementClassifier(
        learning_rate=learning_rate, epochs=epochs, seed=seed
    ).fit(Xc[ctrain_idx], yc[ctrain_idx])
    logistic_row = ("logistic",) + classification_report(
        classifier,
        (Xc[ctrain_idx], yc[ctrain_idx]),
        (Xc[ctest_idx], yc[ctest_idx]),
    )
    test_preds = ols.predict(X[test_idx])
    daily = tuple(
        (d, float(actual), float(pred), bool(abs(pred - actual) / actual <= tol))
        for d, actual, pred in zip(dates[test_idx], y[test_idx], test_preds)
    )
    return PredictionReport(rows=(ols_row, persist_row, logistic_row), daily=daily)


def write_prediction_report(
    report: PredictionReport, company: str, out_dir: str | Path
) -> tuple[Path, Path]:
    """Write the accuracy table and the per-day predictions CSVs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table_path = out_dir / f"prediction_{company}.csv"
    with table_path.open("w", newline="", encoding="utf-8") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["algorithm", "train_accuracy", "test_accuracy"])
        for name, train_acc, test_acc in report.rows:
            writer.writerow([name, f"{train_acc:.4f}", f"{test_acc:.4f}"])
    daily_path = out_dir / f"prediction_daily_{company}.csv"
    with daily_path.open("w", newline="", encoding="utf-8") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["date", "actual", "predicted", "correct"])
        for d, actual, predicted, correct in report.daily:
            writer.writerow(
                [d.isoformat(), f"{actual:.4f}", f"{predicted:.4f}", int(correct)]
            )
    return table_path, daily_path
