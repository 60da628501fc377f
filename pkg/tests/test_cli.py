"""Tests for the command-line interface."""
import json

import pytest

from previous_kit.utils.io import load_bundle

TRAIN_CONFIGS = [(8, 8, 4), (7, 7, 8)]
HELD_OUT = (10, 10, 6)
SIM_ARGS = ['--seed', '5', '--hidden-c', '0.9', '--n-runs', '3', '--sample-period', '0.001']


def invoke(runner, app, *args):
    return runner.invoke(app, [str(arg) for arg in args], catch_exceptions=False)


def generate_net(runner, app, tmp_path, h, w, c):
    path = tmp_path / f'net_{h}x{w}x{c}.json'
    result = invoke(runner, app, 'generate', '--variant', '01', '--h', h, '--w', w, '--c', c, '--out', path)
    assert result.exit_code == 0, result.output
    return path


def profile_net(runner, app, tmp_path, net_path):
    """Simulate and measure metrics of one network into its own directory."""
    out_dir = tmp_path / net_path.stem
    result = invoke(runner, app, 'simulate', '--net', net_path, '--out-dir', out_dir, *SIM_ARGS)
    assert result.exit_code == 0, result.output
    result = invoke(runner, app, 'metrics', '--net', net_path, '--out', out_dir / 'metrics.csv')
    assert result.exit_code == 0, result.output
    return out_dir


class TestGenerate:
    """Tests for the generate command."""

    def test_suite(self, runner, app, tmp_path):
        """Test the suite writes five documents with 60 conv layers in total."""
        result = invoke(runner, app, 'generate', '--suite', '--out-dir', tmp_path)
        assert result.exit_code == 0
        files = sorted(p.name for p in tmp_path.glob('*.json'))
        assert len(files) == 5
        assert 'previousnet02_256.json' in files

        conv_rows = 0
        for path in sorted(tmp_path.glob('previousnet01_*.json')):
            out = tmp_path / 'metrics' / f'{path.stem}.json'
            result = invoke(runner, app, '--format', 'json', 'metrics', '--net', path, '--out', out)
            assert result.exit_code == 0
            conv_rows += sum(1 for row in json.loads(out.read_text())['layers'] if row['kind'] == 'conv')
        assert conv_rows == 60

    def test_single_network_to_stdout(self, runner, app):
        """Test one net02 document on stdout."""
        result = invoke(runner, app, '--quiet', 'generate', '--variant', '02', '--c', '256')
        assert result.exit_code == 0
        assert json.loads(result.output)['name'] == 'previousnet02_256'

    def test_missing_dimensions(self, runner, app):
        """Test net01 needs every input dimension."""
        result = runner.invoke(app, ['generate', '--variant', '01', '--c', '8'])
        assert result.exit_code == 2

    def test_invalid_config(self, runner, app):
        """Test generator constraints exit 1."""
        result = runner.invoke(app, ['generate', '--variant', '01', '--h', '5', '--w', '5', '--c', '32'])
        assert result.exit_code == 1


class TestInspectAndMetrics:
    """Tests for the inspect and metrics commands."""

    def test_inspect_json(self, runner, app, fixture_path, tmp_path):
        """Test resolved shapes of AlexNet."""
        out = tmp_path / 'shapes.json'
        result = invoke(runner, app, '--format', 'json', 'inspect', '--net', fixture_path('alexnet.json'),
                        '--out', out)
        assert result.exit_code == 0
        data = json.loads(out.read_text())
        assert data['kinds']['conv'] == 5
        assert data['layers'][0] == {'name': 'conv1', 'kind': 'conv', 'inputs': ['input'],
                                     'output': {'h': 55, 'w': 55, 'c': 96}}

    def test_canonical(self, runner, app, fixture_path):
        """Test canonical output equals the committed fixture."""
        path = fixture_path('squeezenet.json')
        result = invoke(runner, app, '--quiet', 'inspect', '--net', path, '--canonical')
        assert result.output == path.read_text(encoding='utf-8')

    def test_metrics_totals(self, runner, app, fixture_path, tmp_path):
        """Test AlexNet totals in the JSON document."""
        out = tmp_path / 'metrics.json'
        invoke(runner, app, '--format', 'json', 'metrics', '--net', fixture_path('alexnet.json'), '--out', out)
        data = json.loads(out.read_text())
        assert data['totals']['ops'] == 726829536
        assert data['totals']['n_weights'] == 60965224
        assert data['options'] == {'im2col': False, 'count_bias_ops': True}

    def test_metrics_csv_header(self, runner, app, fixture_path):
        """Test CSV output starts with the layout marker."""
        result = invoke(runner, app, '--quiet', 'metrics', '--net', fixture_path('allcnnc.json'))
        lines = result.output.splitlines()
        assert lines[0] == '# previous-kit v1'
        assert lines[1] == 'layer,kind,h_out,w_out,c_out,n_weights,ops,mem_ops'
        assert len(lines) == 2 + 20

    def test_deterministic_and_worker_independent(self, runner, app, fixture_path, tmp_path):
        """Test repeated and threaded runs write identical bytes."""
        net = fixture_path('squeezenet.json')
        outputs = []
        for workers, name in [(1, 'a.csv'), (1, 'b.csv'), (4, 'c.csv')]:
            invoke(runner, app, '--workers', workers, 'metrics', '--net', net, '--out', tmp_path / name)
            outputs.append((tmp_path / name).read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]


class TestPipeline:
    """Simulate, fit and predict through the command line."""

    @pytest.fixture
    def bundle_path(self, runner, app, tmp_path):
        args = []
        for config in TRAIN_CONFIGS:
            out_dir = profile_net(runner, app, tmp_path, generate_net(runner, app, tmp_path, *config))
            args += ['--metrics', out_dir / 'metrics.csv', '--timing', out_dir / 'timing.csv',
                     '--trace', out_dir / 'trace.csv', '--schedule', out_dir / 'schedule.csv',
                     '--totals', out_dir / 'totals.json']
        path = tmp_path / 'bundle.json'
        result = invoke(runner, app, 'fit', '--target', 'both', '--lambda', '0', '--select', '--system-id', 'sim-5',
                        '--out', path, *args)
        assert result.exit_code == 0, result.output
        return path

    def test_bundle_contents(self, bundle_path):
        """Test the bundle records its fit and recovers c."""
        bundle = load_bundle(bundle_path)
        assert bundle.system_id == 'sim-5'
        assert bundle.kinds('runtime') == bundle.kinds('energy')
        assert 'conv' in bundle.kinds('runtime')
        assert bundle.provenance['lambda'] == 0.0
        assert bundle.provenance['suite'] == ['metrics', 'metrics']
        assert bundle.c_runtime == pytest.approx(0.9, rel=1e-6)
        assert bundle.c_energy == pytest.approx(0.9, rel=1e-6)

    def test_predict_held_out(self, runner, app, tmp_path, bundle_path):
        """Test per-layer errors on an unseen configuration stay below 0.1%."""
        net = generate_net(runner, app, tmp_path, *HELD_OUT)
        measured = profile_net(runner, app, tmp_path, net)
        out, plot = tmp_path / 'report.json', tmp_path / 'plot.csv'
        result = invoke(runner, app, '--format', 'json', 'predict', '--bundle', bundle_path, '--net', net,
                        '--target', 'both', '--measured', measured / 'timing.csv',
                        '--measured-trace', measured / 'trace.csv', '--measured-schedule', measured / 'schedule.csv',
                        '--totals', measured / 'totals.json', '--out', out, '--plot-data', plot)
        assert result.exit_code == 0, result.output

        reports = json.loads(out.read_text())['reports']
        assert [r['target'] for r in reports] == ['runtime', 'energy']
        for report in reports:
            assert all(abs(row['error_pct']) < 0.1 for row in report['per_layer'])
            assert abs(report['network_error_pct']) < 0.1
            assert report['network_total'] == pytest.approx(report['c_used'] * report['sum_layers'])
        assert len(plot.read_text().splitlines()) == 2 + 2 * 52

    def test_report_over_predictions(self, runner, app, tmp_path, bundle_path):
        """Test report aggregates saved prediction documents."""
        net = generate_net(runner, app, tmp_path, *HELD_OUT)
        measured = profile_net(runner, app, tmp_path, net)
        reports_dir = tmp_path / 'reports'
        reports_dir.mkdir()
        invoke(runner, app, '--format', 'json', 'predict', '--bundle', bundle_path, '--net', net,
               '--measured', measured / 'timing.csv', '--totals', measured / 'totals.json',
               '--out', reports_dir / 'held_out.json')
        out = tmp_path / 'summary.json'
        result = invoke(runner, app, '--format', 'json', 'report', '--inputs', reports_dir, '--out', out)
        assert result.exit_code == 0
        summary = json.loads(out.read_text())
        assert len(summary['rows']) == 1
        assert summary['sum_mape'] < 0.1

    def test_energy_needs_trace(self, runner, app, tmp_path):
        """Test energy fits refuse timing-only inputs."""
        out_dir = profile_net(runner, app, tmp_path, generate_net(runner, app, tmp_path, 8, 8, 4))
        result = runner.invoke(app, ['fit', '--target', 'energy', '--metrics', str(out_dir / 'metrics.csv'),
                                     '--timing', str(out_dir / 'timing.csv'), '--out', str(tmp_path / 'b.json')])
        assert result.exit_code == 2

    def test_simulate_worker_independent(self, runner, app, fixture_path, tmp_path):
        """Test threaded simulation writes the same artifacts."""
        for workers, name in [(1, 'serial'), (3, 'threaded')]:
            invoke(runner, app, '--workers', workers, 'simulate', '--net', fixture_path('allcnnc.json'),
                   '--noise', '0.05', '--out-dir', tmp_path / name, *SIM_ARGS)
        for artifact in ('timing.csv', 'schedule.csv', 'trace.csv', 'totals.json'):
            assert (tmp_path / 'serial' / artifact).read_bytes() == (tmp_path / 'threaded' / artifact).read_bytes()


class TestReport:
    """Tests for the report command."""

    def test_table_one(self, runner, app, fixture_path, tmp_path):
        """Test the committed totals table yields 3.24% MAPE."""
        reports_dir = tmp_path / 'in'
        reports_dir.mkdir()
        (reports_dir / 'table_one.csv').write_text(fixture_path('table_one.csv').read_text())
        out = tmp_path / 'summary.csv'
        result = invoke(runner, app, 'report', '--inputs', reports_dir, '--out', out)
        assert result.exit_code == 0
        lines = out.read_text().splitlines()
        assert lines[-1].startswith('MAPE,,,,3.24')
        assert len(lines) == 2 + 7 + 1

    def test_empty_directory(self, runner, app, tmp_path):
        """Test an empty input directory exits 1."""
        result = runner.invoke(app, ['report', '--inputs', str(tmp_path)])
        assert result.exit_code == 1
        assert 'no reports found' in result.output


class TestExitStatus:
    """Tests for error handling and exit statuses."""

    def test_unknown_subcommand(self, runner, app):
        """Test usage errors exit 2."""
        assert runner.invoke(app, ['frobnicate']).exit_code == 2

    def test_missing_file(self, runner, app, tmp_path):
        """Test unreadable inputs exit 2."""
        assert runner.invoke(app, ['inspect', '--net', str(tmp_path / 'none.json')]).exit_code == 2

    def test_malformed_network(self, runner, app, tmp_path):
        """Test syntax errors exit 2 with a position."""
        path = tmp_path / 'bad.json'
        path.write_text('{"name": "x",')
        result = runner.invoke(app, ['inspect', '--net', str(path)])
        assert result.exit_code == 2
        assert 'syntax error at line 1' in result.output

    def test_invalid_network(self, runner, app, tmp_path):
        """Test structural violations exit 1."""
        path = tmp_path / 'loop.json'
        path.write_text(json.dumps({'name': 'loop', 'input': {'h': 4, 'w': 4, 'c': 2}, 'layers': [
            {'name': 'a', 'kind': 'relu', 'inputs': ['b']},
            {'name': 'b', 'kind': 'relu', 'inputs': ['a']},
        ]}))
        result = runner.invoke(app, ['inspect', '--net', str(path)])
        assert result.exit_code == 1
        assert 'forward reference b in a' in result.output

    def test_invalid_network_json(self, runner, app, tmp_path):
        """Test json format writes the error dictionary with every violation."""
        path = tmp_path / 'loop.json'
        path.write_text(json.dumps({'name': 'loop', 'input': {'h': 4, 'w': 4, 'c': 2}, 'layers': [
            {'name': 'a', 'kind': 'relu', 'inputs': ['b']},
            {'name': 'b', 'kind': 'relu', 'inputs': ['a']},
        ]}))
        result = runner.invoke(app, ['--format', 'json', 'inspect', '--net', str(path)])
        assert result.exit_code == 1
        line = [row for row in result.output.splitlines() if row.startswith('{')][-1]
        error = json.loads(line)
        assert error['error'] == f'{path}: forward reference b in a'
        assert [v['rule'] for v in error['details']] == ['forward-reference', 'cycle']

    def test_missing_model(self, runner, app, fixture_path, tmp_path):
        """Test predicting a kind the bundle lacks exits 1."""
        bundle = tmp_path / 'bundle.json'
        bundle.write_text(json.dumps({'system_id': 'empty', 'provenance': {}, 'models': [],
                                      'c_runtime': 1.0, 'c_energy': 1.0}))
        result = runner.invoke(app, ['predict', '--bundle', str(bundle), '--net', str(fixture_path('alexnet.json'))])
        assert result.exit_code == 1
        assert 'no runtime model for kind conv' in result.output

    def test_malformed_bundle(self, runner, app, fixture_path, tmp_path):
        """Test a bundle missing fields exits 2."""
        bundle = tmp_path / 'bundle.json'
        bundle.write_text('{"system_id": "x"}')
        result = runner.invoke(app, ['predict', '--bundle', str(bundle), '--net', str(fixture_path('alexnet.json'))])
        assert result.exit_code == 2

    def test_version(self, runner, app):
        """Test --version prints the package version."""
        result = runner.invoke(app, ['--version'])
        assert result.exit_code == 0
        assert '1.0.0' in result.output
