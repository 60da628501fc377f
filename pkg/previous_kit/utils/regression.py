"""Standardized Ridge regression per layer kind and the network coefficient c."""
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from previous_kit.config import Config
from previous_kit.errors import FitError, ModelMismatchError
from previous_kit.extensions import logger
from previous_kit.models.metrics import ArchMetrics
from previous_kit.models.regression import ModelBundle, ObservationSet, RidgeModel, Target


def standardize(X) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Column-wise z-scores with sample standard deviation.

    Constant columns (and every column when n = 1) get std 1 and a zero Z column.

    Returns:
        (Z, mean, std)
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    mean = X.mean(axis=0)
    constant = np.ptp(X, axis=0) == 0
    mean[constant] = X[0, constant]
    if X.shape[0] > 1:
        std = X.std(axis=0, ddof=1)
    else:
        std = np.ones(X.shape[1])
    std[constant] = 1.0
    Z = (X - mean) / std
    Z[:, constant] = 0.0
    return Z, mean, std


def pearson(x, y) -> float:
    """Sample Pearson correlation coefficient.

    Raises:
        FitError: fewer than 2 points or a constant input
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size:
        raise FitError(f'pearson inputs differ in length ({x.size} vs {y.size})')
    if x.size < 2:
        raise FitError('pearson needs at least 2 points')
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise FitError('correlation undefined for a constant input')
    r = stats.pearsonr(x, y)[0]
    return float(np.clip(r, -1.0, 1.0))


def predictor_correlations(obs: ObservationSet) -> Tuple[Optional[float], ...]:
    """Pearson r of each predictor against the response, None where undefined."""
    result = []
    for j in range(obs.X.shape[1]):
        try:
            result.append(pearson(obs.X[:, j], obs.y))
        except FitError:
            result.append(None)
    return tuple(result)


def _rank(M: np.ndarray, rtol: float) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if not s.size or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def select_predictors(Z: np.ndarray, correlations: Sequence[Optional[float]],
                      rtol: float = Config.RANK_RTOL) -> Tuple[bool, ...]:
    """Keep the most correlated predictors that add numerical rank.

    Candidates are the non-constant columns of Z, tried by |r| descending
    (ties by column index); a candidate is kept only if it raises the rank
    of the kept set.
    """
    p = Z.shape[1]
    candidates = [j for j in range(p) if np.any(Z[:, j] != 0)]
    candidates.sort(key=lambda j: (-abs(correlations[j] or 0.0), j))
    kept: List[int] = []
    for j in candidates:
        if _rank(Z[:, kept + [j]], rtol) == len(kept) + 1:
            kept.append(j)
    return tuple(j in kept for j in range(p))


def fit_ridge(obs: ObservationSet, lam: float = Config.DEFAULT_LAMBDA, select: bool = False,
              rtol: float = Config.RANK_RTOL) -> RidgeModel:
    """Fit w = (Z'Z + lam I)^-1 Z' (y - mean(y)) on standardized predictors.

    The intercept is mean(y) and is not penalized. Constant predictors never
    enter the solve. Every other column does unless `select` is set, which
    keeps only the correlated predictors that add rank.

    Raises:
        FitError: no observations, non-positive responses, negative lambda,
            or a singular system at lambda = 0
    """
    if obs.n < 1:
        raise FitError(f'no observations for {obs.kind}/{obs.target}')
    if np.any(obs.y <= 0):
        raise FitError(f'{obs.kind}/{obs.target} responses must be positive')
    if lam < 0:
        raise FitError(f'lambda must be non-negative, got {lam}')

    Z, mean, std = standardize(obs.X)
    correlations = predictor_correlations(obs)
    if select:
        active = select_predictors(Z, correlations, rtol)
    else:
        active = tuple(bool(np.any(Z[:, j] != 0)) for j in range(Z.shape[1]))

    y_mean = float(obs.y.mean())
    y_centered = obs.y - y_mean
    coef = np.zeros(Z.shape[1])
    idx = [j for j, keep in enumerate(active) if keep]
    if idx:
        Za = Z[:, idx]
        gram = Za.T @ Za + lam * np.eye(len(idx))
        if lam == 0 and _rank(Za, rtol) < len(idx):
            raise FitError(f'singular system for {obs.kind}/{obs.target} at lambda 0')
        try:
            coef[idx] = np.linalg.solve(gram, Za.T @ y_centered)
        except np.linalg.LinAlgError as e:
            raise FitError(f'cannot solve {obs.kind}/{obs.target}: {e}')

    model = RidgeModel(
        kind=obs.kind,
        target=obs.target,
        coef=tuple(float(v) for v in coef),
        intercept=y_mean,
        mean=tuple(float(v) for v in mean),
        std=tuple(float(v) for v in std),
        lam=float(lam),
        n_obs=obs.n,
        active=tuple(active),
        correlations=correlations,
    )
    logger.debug(f'Fitted {model} on {obs.n} observations, active={active}')
    return model


def evaluate_layer(model: RidgeModel, m: ArchMetrics) -> Tuple[float, bool]:
    """Prediction of one layer and whether it was clamped at zero.

    Raises:
        ModelMismatchError: model and layer kinds differ
    """
    if model.kind is not m.kind:
        raise ModelMismatchError(f'{model.kind} model applied to {m.kind} layer {m.layer_name}')
    x = np.asarray(m.predictors)
    value = model.intercept + float(np.dot(model.coef, (x - np.asarray(model.mean)) / np.asarray(model.std)))
    if value < 0:
        logger.warning(f'Negative {model.target} prediction {value:.6g} for {m.layer_name} clamped to 0')
        return 0.0, True
    return value, False


def predict_layer(model: RidgeModel, m: ArchMetrics) -> float:
    """Predicted runtime (ms) or energy (mJ) of one layer, never negative."""
    return evaluate_layer(model, m)[0]


def fit_network_coefficient(sums, measured) -> float:
    """Least squares through the origin: c = sum(measured * sums) / sum(sums^2).

    Raises:
        FitError: length mismatch, empty input, non-positive values or zero-norm sums
    """
    sums = np.asarray(sums, dtype=float)
    measured = np.asarray(measured, dtype=float)
    if sums.size != measured.size or sums.size < 1:
        raise FitError(f'need equal non-empty vectors, got {sums.size} sums and {measured.size} measurements')
    if np.any(sums < 0) or np.any(measured <= 0):
        raise FitError('network sums and measurements must be positive')
    norm = float(np.dot(sums, sums))
    if norm == 0:
        raise FitError('zero-norm prediction sums')
    return float(np.dot(measured, sums) / norm)


def fit_bundle(observations: Mapping[Target, Mapping[str, ObservationSet]], system_id: str,
               lam: float = Config.DEFAULT_LAMBDA, select: bool = False,
               provenance: Optional[Dict[str, object]] = None) -> ModelBundle:
    """Fit every (kind, target) model. Network coefficients start at 1."""
    models = {}
    for target, per_kind in observations.items():
        for kind, obs in per_kind.items():
            model = fit_ridge(obs, lam=lam, select=select)
            models[(model.kind, model.target)] = model
        logger.info(f'Fitted {len(per_kind)} {target} model(s) for {system_id}')
    record = {
        'lambda': lam,
        'predictor_selection': 'pearson-rank' if select else 'none',
        'standardization': 'sample-std, unpenalized mean intercept',
    }
    record.update(provenance or {})
    return ModelBundle(system_id=system_id, models=models, provenance=record)
