"""Pytest configuration and fixtures."""
import pytest
import sys
import os
from pathlib import Path

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from click.testing import CliRunner

from previous_kit.app import create_app
from previous_kit.extensions import init_logging

FIXTURES = Path(__file__).parent / 'fixtures'


@pytest.fixture(autouse=True)
def fresh_logging():
    """Bind the package logger to the current stderr."""
    init_logging('DEBUG')
    yield


@pytest.fixture
def app():
    """Create application for testing."""
    return create_app('testing')


@pytest.fixture
def runner():
    """Create CLI test runner."""
    return CliRunner()


@pytest.fixture
def fixture_path():
    """Return the path of a committed fixture file."""
    def resolve(name):
        return FIXTURES / name
    return resolve


def load_shaped_fixture(name):
    from previous_kit.utils.io import load_network
    from previous_kit.utils.netdef import infer_shapes
    return infer_shapes(load_network(FIXTURES / name))


@pytest.fixture
def alexnet():
    """Shaped AlexNet fixture."""
    return load_shaped_fixture('alexnet.json')


@pytest.fixture
def allcnnc():
    """Shaped All-CNN-C fixture."""
    return load_shaped_fixture('allcnnc.json')


@pytest.fixture
def unseen20():
    """Shaped 20-layer network absent from any training suite."""
    return load_shaped_fixture('unseen20.json')


@pytest.fixture(scope='session')
def suite_networks():
    """The five standard characterization networks, shaped."""
    from previous_kit.utils.netdef import infer_shapes
    from previous_kit.utils.previousnet import generate, standard_suite
    return [infer_shapes(generate(cfg)) for cfg in standard_suite()]


def train_on_device(device, networks, targets=('runtime',), lam=1.0, n_runs=3, sample_period_s=1e-3, select=False):
    """Profile networks on a synthetic device and fit a bundle from the artifacts."""
    from previous_kit.utils.metrics import network_metrics
    from previous_kit.utils.profiling import (
        build_observations, build_profiles, ingest_timing, merge_observations, segment_power_trace,
    )
    from previous_kit.utils.regression import fit_bundle
    from previous_kit.utils.simdevice import simulate_profile

    with_trace = 'energy' in targets
    groups = {target: [] for target in targets}
    profiles_out = []
    for shaped in networks:
        profile = simulate_profile(device, shaped, n_runs=n_runs, sample_period_s=sample_period_s,
                                   with_trace=with_trace)
        stats = ingest_timing(profile.timing)
        if with_trace:
            windows = segment_power_trace(profile.trace, profile.schedule)
            layer_profiles = build_profiles(stats, windows, sample_period_s)
        else:
            layer_profiles = build_profiles(stats)
        metrics = network_metrics(shaped)
        for target in targets:
            groups[target].append(build_observations(metrics, layer_profiles, target))
        profiles_out.append(profile)

    observations = {target: merge_observations(items) for target, items in groups.items()}
    return fit_bundle(observations, system_id=f'synthetic-{device.seed}', lam=lam, select=select), profiles_out


@pytest.fixture
def train():
    """Return the device training helper."""
    return train_on_device
