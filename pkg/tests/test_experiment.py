"""
Tests for the replicated classification harness and the convergence study.
"""

import json

import numpy as np
import pandas as pd
import pytest

from src.evaluation.convergence import convergence_ratio, convergence_study
from src.evaluation.experiment import (
    CheckerboardGenerator,
    ExperimentConfig,
    FashionMnistGenerator,
    TABLE_COLUMNS,
    load_config,
    run_experiment,
    run_replicate,
    summarize,
)
from src.utils.constants import ALL_METHODS, METHOD_2D2PCA, METHOD_MNPCA_ODD
from src.utils.errors import InvalidParameterError


@pytest.fixture
def small_config():
    return ExperimentConfig(
        generator=CheckerboardGenerator(alpha=0.125),
        n_train=20,
        n_test=10,
        replicates=2,
        sigma_grid=(-4, 0),
        seed=42,
    )


class TestExperimentConfig:

    def test_expected_rows(self, small_config):
        # three grid methods over two exponents plus one (2D)^2PCA row, per replicate
        assert small_config.expected_rows() == 2 * (3 * 2 + 1)

    def test_dict_round_trip(self, small_config):
        assert ExperimentConfig.from_dict(small_config.to_dict()) == small_config

    def test_fashion_generator_round_trip(self):
        config = ExperimentConfig(generator=FashionMnistGenerator(classes=(5, 9)))
        restored = ExperimentConfig.from_dict(json.loads(json.dumps(config.to_dict())))
        assert restored.generator == config.generator

    def test_unknown_key(self):
        with pytest.raises(InvalidParameterError):
            ExperimentConfig.from_dict({'generator': {'type': 'checkerboard', 'alpha': 0.1}, 'speed': 3})

    def test_unknown_method(self):
        with pytest.raises(InvalidParameterError):
            ExperimentConfig(generator=CheckerboardGenerator(0.1), methods=('pca',))

    def test_unknown_generator(self):
        with pytest.raises(InvalidParameterError):
            ExperimentConfig.from_dict({'generator': {'type': 'mnist'}})

    def test_overrides_skip_none(self, small_config):
        updated = small_config.with_overrides(replicates=5, seed=None)
        assert updated.replicates == 5
        assert updated.seed == small_config.seed

    def test_load_config(self, tmp_path, small_config):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(small_config.to_dict()))
        assert load_config(path) == small_config


class TestRunExperiment:

    @pytest.fixture
    def table(self, small_config):
        return run_experiment(small_config)

    def test_columns_and_row_count(self, small_config, table):
        assert list(table.columns) == TABLE_COLUMNS
        assert len(table) == small_config.expected_rows()
        assert set(table['method']) == set(ALL_METHODS)

    def test_accuracies_in_unit_interval(self, table):
        assert table['accuracy'].between(0.0, 1.0).all()

    def test_linear_baseline_has_no_exponent(self, table):
        linear = table[table['method'] == METHOD_2D2PCA]
        assert linear['exponent'].isna().all()
        assert len(linear) == 2

    def test_deterministic(self, small_config, table):
        again = run_experiment(small_config)
        pd.testing.assert_frame_equal(table, again)

    def test_parallel_matches_serial(self, small_config, table):
        parallel = run_experiment(small_config, jobs=2)
        pd.testing.assert_frame_equal(parallel, table)
        assert parallel.attrs['redraws'] == table.attrs['redraws']

    def test_replicate_independent_of_order(self, small_config, table):
        rows, _ = run_replicate(small_config, 1)
        second = table[table['replicate'] == 1].reset_index(drop=True)
        pd.testing.assert_frame_equal(pd.DataFrame(rows, columns=TABLE_COLUMNS), second)

    def test_redraw_count_recorded(self, table):
        assert table.attrs['redraws'] >= 0

    def test_single_method(self, small_config):
        config = small_config.with_overrides(methods=(METHOD_MNPCA_ODD,), replicates=1)
        table = run_experiment(config)
        assert len(table) == 2
        assert set(table['exponent']) == {-4.0, 0.0}

    def test_fashion_mnist_pool(self, tmp_path, rng, write_fashion_csv):
        labels = np.repeat([5, 9], 20)
        pixels = np.where(
            labels[:, None] == 5,
            rng.integers(0, 120, size=(40, 784)),
            rng.integers(100, 256, size=(40, 784)),
        )
        path = write_fashion_csv(tmp_path / "fashion.csv", labels, pixels)
        config = ExperimentConfig(
            generator=FashionMnistGenerator(path=str(path)),
            n_train=16,
            n_test=8,
            replicates=1,
            methods=(METHOD_2D2PCA,),
            seed=3,
        )
        table = run_experiment(config)
        assert len(table) == 1
        assert 0.0 <= table['accuracy'].iloc[0] <= 1.0

    def test_pool_too_small(self, tmp_path, rng, write_fashion_csv):
        path = write_fashion_csv(tmp_path / "tiny.csv", [5, 9, 5, 9], rng.integers(0, 256, size=(4, 784)))
        config = ExperimentConfig(
            generator=FashionMnistGenerator(path=str(path)),
            n_train=16,
            n_test=8,
            replicates=1,
        )
        with pytest.raises(InvalidParameterError):
            run_experiment(config)


class TestSummarize:

    def test_mean_and_standard_error(self):
        table = pd.DataFrame({
            'replicate': [0, 1, 0, 1],
            'method': ['kong', 'kong', '2d2pca', '2d2pca'],
            'exponent': [0.0, 0.0, np.nan, np.nan],
            'accuracy': [0.6, 0.8, 0.5, 0.5],
        })
        summary = summarize(table)
        assert list(summary.columns) == ['method', 'exponent', 'mean', 'se', 'count']
        kong = summary[summary['method'] == 'kong'].iloc[0]
        assert kong['mean'] == pytest.approx(0.7)
        assert kong['se'] == pytest.approx(np.std([0.6, 0.8], ddof=1) / np.sqrt(2))
        linear = summary[summary['method'] == '2d2pca'].iloc[0]
        assert np.isnan(linear['exponent'])
        assert linear['count'] == 2
        assert linear['se'] == pytest.approx(0.0)


class TestConvergence:

    def test_study_table(self):
        table = convergence_study(sample_sizes=(10, 20), replicates=3, seed=8)
        assert list(table.columns) == ['n', 'replicate', 'top_eigenvalue']
        assert len(table) == 6
        assert (table['top_eigenvalue'] >= 0).all()

    def test_study_deterministic(self):
        a = convergence_study(sample_sizes=(10,), replicates=2, seed=8)
        b = convergence_study(sample_sizes=(10,), replicates=2, seed=8)
        pd.testing.assert_frame_equal(a, b)

    def test_ratio(self):
        table = pd.DataFrame({
            'n': [50, 50, 50, 200, 200, 200],
            'replicate': [0, 1, 2, 0, 1, 2],
            'top_eigenvalue': [1.0, 2.0, 3.0, 1.5, 2.0, 2.5],
        })
        ratios = convergence_ratio(table)
        assert ratios['ratio'].iloc[0] == pytest.approx(0.5)
        assert (ratios['n_small'].iloc[0], ratios['n_large'].iloc[0]) == (50, 200)

    def test_ratio_needs_two_sizes(self):
        table = pd.DataFrame({'n': [50, 50], 'replicate': [0, 1], 'top_eigenvalue': [1.0, 2.0]})
        with pytest.raises(InvalidParameterError):
            convergence_ratio(table)
