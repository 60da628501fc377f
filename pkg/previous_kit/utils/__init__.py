# Utils package
from previous_kit.utils.netdef import parse_network, serialize_network, validate, infer_shapes, topological_order
from previous_kit.utils.metrics import layer_weights, layer_ops, layer_mem_ops, network_metrics, network_totals
from previous_kit.utils.previousnet import PNetConfig, generate_01, generate_02, standard_suite
from previous_kit.utils.profiling import ingest_timing, segment_power_trace, layer_energy, build_observations
from previous_kit.utils.regression import standardize, fit_ridge, predict_layer, pearson, fit_network_coefficient
from previous_kit.utils.predict import predict_per_layer, error_report, summarize_reports
from previous_kit.utils.simdevice import make_device, simulate_profile

__all__ = [
    'parse_network',
    'serialize_network',
    'validate',
    'infer_shapes',
    'topological_order',
    'layer_weights',
    'layer_ops',
    'layer_mem_ops',
    'network_metrics',
    'network_totals',
    'PNetConfig',
    'generate_01',
    'generate_02',
    'standard_suite',
    'ingest_timing',
    'segment_power_trace',
    'layer_energy',
    'build_observations',
    'standardize',
    'fit_ridge',
    'predict_layer',
    'pearson',
    'fit_network_coefficient',
    'predict_per_layer',
    'error_report',
    'summarize_reports',
    'make_device',
    'simulate_profile'
]
