"""Domain models package."""
from previous_kit.models.network import LayerKind, TensorShape, LayerSpec, NetworkDef, LayerShapes, ShapedNetwork
from previous_kit.models.metrics import ArchMetrics, MetricsOptions
from previous_kit.models.profile import TimingRecord, TimingLog, TimingStats, PowerTrace, ScheduleEntry, LayerProfile
from previous_kit.models.regression import Target, ObservationSet, RidgeModel, ModelBundle
from previous_kit.models.report import LayerPrediction, PredictionReport, SummaryRow, ReportSummary
from previous_kit.models.device import KindCoefficients, SyntheticDevice, SimulatedProfile

__all__ = [
    'LayerKind',
    'TensorShape',
    'LayerSpec',
    'NetworkDef',
    'LayerShapes',
    'ShapedNetwork',
    'ArchMetrics',
    'MetricsOptions',
    'TimingRecord',
    'TimingLog',
    'TimingStats',
    'PowerTrace',
    'ScheduleEntry',
    'LayerProfile',
    'Target',
    'ObservationSet',
    'RidgeModel',
    'ModelBundle',
    'LayerPrediction',
    'PredictionReport',
    'SummaryRow',
    'ReportSummary',
    'KindCoefficients',
    'SyntheticDevice',
    'SimulatedProfile'
]
