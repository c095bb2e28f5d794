import json
import os

import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose

from src.config_utils.run_config import (
    DEFAULT_CONFIG, parse_grid, parse_params, parse_points, prepare_run_config, resolve_seed,
)
from src.datasets import (
    load_horses, load_horses_published, synthetic_blood_pressure, synthetic_systolic_intervals,
)
from src.errors import UsageError
from src.evaluation import PosteriorStatistics, SimulationStatistics
from src.simulations import EXPERIMENTS, conjugate_normal, run_experiment, variance_estimates
from src.utils import RunLogger, dump_json


class TestRunLogger:

    def test_appends_rows_under_one_header(self, tmp_path):
        logger = RunLogger(keys=['simulations'], logs_path=str(tmp_path), command='simulations')
        assert os.path.basename(logger.run_dir).startswith('simulations_')
        logger.log({'simulations': [{'experiment': 'a', 'mse_eb': 0.5, 'mse_raw': 1.0}]})
        logger.log({'simulations': [{'experiment': 'a', 'mse_eb': 0.3, 'mse_raw': 1.0}]})
        frame = pd.read_csv(os.path.join(logger.run_dir, 'simulations.csv'))
        assert frame['mse_eb'].tolist() == [0.5, 0.3]

    def test_unknown_key(self, tmp_path):
        logger = RunLogger(keys=['a'], logs_path=str(tmp_path), run_name='fixed')
        with pytest.raises(ValueError):
            logger.log({'b': [{'x': 1}]})

    def test_readable_summary(self, tmp_path):
        logger = RunLogger(keys=[], logs_path=str(tmp_path), run_name='fixed')
        logger.save_readable({'command': 'check', 'seed': 3})
        text = open(os.path.join(logger.run_dir, 'readable_summary.txt')).read()
        assert 'command\ncheck\n' in text

    def test_dump_json_handles_numpy(self, tmp_path):
        path = tmp_path / 'payload.json'
        dump_json({'m': np.array([1.0, 2.0]), 'k': np.int64(3), 'x': np.float64(0.25)}, path)
        assert json.load(open(path)) == {'m': [1.0, 2.0], 'k': 3, 'x': 0.25}


class TestRunConfig:

    def test_defaults_survive_missing_flags(self):
        config = prepare_run_config('tweedie', {'input': 'z.csv', 'sigma2': None, 'level': 0.9, 'json': True},
                                    environ={})
        assert config.flags['sigma2'] == 1.0
        assert config.flags['level'] == 0.9
        assert config.format == 'json'
        assert config.seed == DEFAULT_CONFIG['seed']
        assert DEFAULT_CONFIG['flags']['level'] == 0.95

    def test_seed_environment_wins(self):
        assert resolve_seed(4, {'EBKIT_SEED': '9'}) == 9
        assert resolve_seed(4, {}) == 4
        with pytest.raises(UsageError):
            resolve_seed(4, {'EBKIT_SEED': 'nine'})

    def test_parse_params(self):
        assert parse_params('rate=1.5, n=10') == {'rate': 1.5, 'n': 10.0}
        assert parse_params(None) == {}
        for bad in ('rate', 'rate=fast', '=1'):
            with pytest.raises(UsageError):
                parse_params(bad)

    def test_parse_grid_and_points(self):
        assert parse_grid('-1:1:5') == (-1.0, 1.0, 5)
        assert_allclose(parse_points('0:1:3'), [0.0, 0.5, 1.0])
        assert_allclose(parse_points('1, 2.5'), [1.0, 2.5])
        for bad in ('0:1', '0:1:x'):
            with pytest.raises(UsageError):
                parse_grid(bad)
        with pytest.raises(UsageError):
            parse_points('1,two')


class TestEvaluation:

    def test_posterior_statistics(self, tmp_path):
        run_dir = tmp_path / 'tweedie_run'
        run_dir.mkdir()
        pd.DataFrame({
            'z': [0.5, -4.0, 2.5, 1.0],
            'post_mean': [0.2, -3.0, 2.1, 0.4],
            'post_var': [0.5] * 4, 'ci_lo': [0.0] * 4, 'ci_hi': [1.0] * 4,
            'fdr': [1.0, 0.01, 0.15, 0.9],
        }).to_csv(run_dir / 'posterior.csv', index=False)
        stats = PosteriorStatistics('tweedie_run', str(tmp_path)).get_metric()
        assert stats['n'] == 4
        assert stats['n_flagged'] == 2
        assert stats['n_fdr'] == 2
        assert stats['max_abs_z_index'] == 1
        assert stats['post_mean_at_max'] == -3.0
        assert_allclose(stats['mean_shrinkage'], (0.3 + 1.0 + 0.4 + 0.6) / 4)

    def test_simulation_statistics(self, tmp_path):
        logger = RunLogger(keys=['simulations'], logs_path=str(tmp_path), run_name='sims')
        logger.log({'simulations': [run_experiment('linear_eb_groups', seed) for seed in range(3)]})
        stats = SimulationStatistics('sims', str(tmp_path)).get_metric()
        assert stats.loc['linear_eb_groups', 'n_runs'] == 3
        assert stats.loc['linear_eb_groups', 'improvement'] > 0

    def test_unknown_experiment(self):
        with pytest.raises(NotImplementedError):
            run_experiment('bootstrap', 0)


class TestSimulations:

    def test_conjugate_normal_tracks_the_bayes_rule(self):
        res = conjugate_normal(0)
        assert res['rmse_vs_bayes'] < 0.05
        assert res['mse_eb'] <= 0.7 * res['mse_raw']

    def test_variance_posterior_beats_the_raw_variances(self):
        res = variance_estimates(0)
        assert res['mse_eb'] < res['mse_raw']

    @pytest.mark.parametrize('name', sorted(EXPERIMENTS))
    def test_every_experiment_reports_errors(self, name):
        res = run_experiment(name, 1)
        assert res['experiment'] == name
        assert np.isfinite(res['mse_eb']) and res['mse_raw'] > 0


class TestDatasets:

    def test_horses(self):
        bounds, labels = load_horses()
        assert bounds.shape == (10, 1, 2)
        assert labels == list(range(1, 11))
        assert len(load_horses_published()) == 10

    def test_synthetic_systolic(self):
        X, labels = synthetic_systolic_intervals(n_per_group=15, seed=0)
        assert X.shape == (45, 1, 2)
        assert np.all(X[..., 0] < X[..., 1])
        assert labels.tolist() == [0] * 15 + [1] * 15 + [2] * 15

    def test_synthetic_blood_pressure(self):
        data, truth = synthetic_blood_pressure(n_patients=20, n_readings=3, seed=0)
        assert data.N == 20 and data.p == 2
        assert truth.shape == (20, 2)
        assert all(g.shape == (3, 2, 2) for g in data.groups)
