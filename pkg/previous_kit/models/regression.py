"""Regression models: observation sets, Ridge models and model bundles."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from previous_kit.errors import FitError, FormatError, MissingModelError
from previous_kit.models.metrics import PREDICTOR_NAMES
from previous_kit.models.network import LayerKind


class Target(str, Enum):
    """Predicted quantity: runtime in ms or energy in mJ."""

    RUNTIME = 'runtime'
    ENERGY = 'energy'

    def __str__(self):
        return self.value

    @property
    def unit(self) -> str:
        return 'ms' if self is Target.RUNTIME else 'mJ'


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Design matrix X (rows [n_weights, ops, mem_ops]) and response y of one layer kind."""

    kind: LayerKind
    target: Target
    X: np.ndarray
    y: np.ndarray
    layer_names: Tuple[str, ...] = ()
    predictor_names: Tuple[str, ...] = PREDICTOR_NAMES

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float).reshape(-1, len(self.predictor_names))
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise FitError(f'{self.kind} observations: {X.shape[0]} rows but {y.shape[0]} responses')
        object.__setattr__(self, 'X', X)
        object.__setattr__(self, 'y', y)

    def __repr__(self):
        return f'<ObservationSet {self.kind}/{self.target} n={self.n}>'

    @property
    def n(self) -> int:
        return int(self.y.shape[0])


@dataclass(frozen=True)
class RidgeModel:
    """Standardized Ridge model of one (layer kind, target) pair.

    Predictions are intercept + sum(coef * (x - mean) / std). `active` marks
    the predictors kept by rank-pruned selection; inactive ones have coef 0.
    """

    kind: LayerKind
    target: Target
    coef: Tuple[float, ...]
    intercept: float
    mean: Tuple[float, ...]
    std: Tuple[float, ...]
    lam: float
    n_obs: int = 0
    active: Tuple[bool, ...] = (True, True, True)
    correlations: Tuple[Optional[float], ...] = (None, None, None)

    def __repr__(self):
        return f'<RidgeModel {self.kind}/{self.target} lambda={self.lam}>'

    def to_dict(self):
        return {
            'kind': self.kind.value,
            'target': self.target.value,
            'coef': list(self.coef),
            'intercept': self.intercept,
            'mean': list(self.mean),
            'std': list(self.std),
            'lambda': self.lam,
            'n_obs': self.n_obs,
            'active': list(self.active),
            'correlations': list(self.correlations),
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                kind=LayerKind(data['kind']),
                target=Target(data['target']),
                coef=tuple(float(v) for v in data['coef']),
                intercept=float(data['intercept']),
                mean=tuple(float(v) for v in data['mean']),
                std=tuple(float(v) for v in data['std']),
                lam=float(data['lambda']),
                n_obs=int(data.get('n_obs', 0)),
                active=tuple(bool(v) for v in data.get('active', [True] * len(PREDICTOR_NAMES))),
                correlations=tuple(None if v is None else float(v)
                                   for v in data.get('correlations', [None] * len(PREDICTOR_NAMES))),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f'malformed model block: {e}')


@dataclass(frozen=True)
class ModelBundle:
    """Per-kind models plus the network coefficient c for one system."""

    system_id: str
    models: Dict[Tuple[LayerKind, Target], RidgeModel] = field(default_factory=dict)
    c_runtime: float = 1.0
    c_energy: float = 1.0
    provenance: Dict[str, object] = field(default_factory=dict)

    def __repr__(self):
        return f'<ModelBundle {self.system_id} ({len(self.models)} models)>'

    def get_model(self, kind: LayerKind, target: Target, layer_name: Optional[str] = None) -> RidgeModel:
        """Model for a kind, failing loudly when the bundle lacks it."""
        try:
            return self.models[(LayerKind(kind), Target(target))]
        except KeyError:
            where = f' (layer {layer_name})' if layer_name else ''
            raise MissingModelError(f'no {target} model for kind {kind}{where}',
                                    payload={'kind': str(kind), 'layer': layer_name})

    def coefficient(self, target: Target) -> float:
        return self.c_runtime if Target(target) is Target.RUNTIME else self.c_energy

    def kinds(self, target: Target):
        return sorted(kind.value for kind, t in self.models if t is Target(target))

    def to_dict(self):
        ordered = sorted(self.models.values(), key=lambda m: (m.target.value, m.kind.value))
        return {
            'system_id': self.system_id,
            'provenance': dict(self.provenance),
            'models': [model.to_dict() for model in ordered],
            'c_runtime': self.c_runtime,
            'c_energy': self.c_energy,
        }

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise FormatError('model bundle must be a JSON object')
        try:
            models = [RidgeModel.from_dict(block) for block in data['models']]
            bundle = cls(
                system_id=str(data['system_id']),
                models={(m.kind, m.target): m for m in models},
                c_runtime=float(data['c_runtime']),
                c_energy=float(data['c_energy']),
                provenance=dict(data.get('provenance', {})),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise FormatError(f'malformed model bundle: {e}')
        if not (bundle.c_runtime > 0 and bundle.c_energy > 0):
            raise FormatError('network coefficients must be positive')
        return bundle
