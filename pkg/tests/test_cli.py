"""
Tests for the command-line interface.
"""

import json

import numpy as np
import pandas as pd
import pytest

from src.main import main
from src.methods.baselines import fit_2d2pca, transform_2d2pca
from src.methods.kernels import KernelSpec, Parity
from src.methods.mnpca import fit, transform_sample
from src.methods.svd_features import MatrixSample
from src.storage.model_store import load_model
from src.storage.sample_store import read_labeled, read_latents, read_sample, write_sample


@pytest.fixture
def simulated(tmp_path):
    path = tmp_path / "sim.csv"
    assert main(['simulate', '--n', '20', '--alpha', '0.125', '--seed', '5', '--out', str(path)]) == 0
    return path


@pytest.fixture
def fitted(tmp_path, simulated):
    model_path = tmp_path / "model.json"
    latents_path = tmp_path / "fit_latents.csv"
    code = main([
        'fit', '--data', str(simulated), '--kernel', 'gaussian', '--parity', 'odd', '--sigma2-auto',
        '--d1', '2', '--d2', '2', '--out-model', str(model_path), '--latents-out', str(latents_path),
    ])
    assert code == 0
    return model_path, latents_path


class TestSimulate:

    def test_writes_balanced_sample(self, tmp_path):
        path = tmp_path / "sim.csv"
        assert main(['simulate', '--n', '50', '--alpha', '0.125', '--seed', '1', '--out', str(path)]) == 0
        data = read_labeled(path)
        assert data.n == 50
        assert np.sum(data.labels == 1) == 25
        assert np.sum(data.labels == 2) == 25

    def test_same_seed_same_files(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            main(['simulate', '--n', '10', '--seed', '3', '--out', str(path)])
        assert a.read_text() == b.read_text()

    def test_odd_n_is_runtime_error(self, tmp_path, capsys):
        code = main(['simulate', '--n', '51', '--out', str(tmp_path / "x.csv")])
        assert code == 1
        assert "InvalidParameterError:" in capsys.readouterr().err


class TestFitAndTransform:

    def test_transform_reproduces_fit_latents(self, tmp_path, simulated, fitted):
        model_path, latents_path = fitted
        out = tmp_path / "latents.csv"
        assert main(['transform', '--model', str(model_path), '--data', str(simulated), '--out', str(out)]) == 0
        np.testing.assert_allclose(read_latents(out), read_latents(latents_path), atol=1e-10)

    def test_scree_row_count(self, tmp_path, fitted):
        model_path, _ = fitted
        out = tmp_path / "scree.csv"
        assert main(['scree', '--model', str(model_path), '--out', str(out)]) == 0
        assert len(pd.read_csv(out)) == 2 * 20

    def test_scree_to_stdout(self, fitted, capsys):
        model_path, _ = fitted
        assert main(['scree', '--model', str(model_path)]) == 0
        assert capsys.readouterr().out.startswith("side,index,eigenvalue")

    def test_scree_dimension_choice(self, tmp_path, simulated):
        model_path = tmp_path / "scree_model.json"
        code = main(['fit', '--data', str(simulated), '--sigma2', '0.5', '--scree', '--out-model', str(model_path)])
        assert code == 0
        assert load_model(model_path).A.shape[0] == 20

    def test_linear_kernel_matches_2d2pca(self, tmp_path, rng):
        sample = MatrixSample(rng.standard_normal((20, 6, 5)))
        data = write_sample(tmp_path / "lin.csv", sample)
        model_path = tmp_path / "lin.json"
        latents_path = tmp_path / "lin_latents.csv"
        code = main([
            'fit', '--data', str(data), '--kernel', 'linear', '--parity', 'linear-raw',
            '--r', '5', '--eps', '0', '--inverse', 'pseudo', '--d1', '2', '--d2', '2',
            '--out-model', str(model_path), '--latents-out', str(latents_path),
        ])
        assert code == 0
        baseline = fit_2d2pca(read_sample(data), 2, 2)
        expected = np.stack([transform_2d2pca(baseline, X) for X in read_sample(data)])
        np.testing.assert_allclose(np.abs(read_latents(latents_path)), np.abs(expected), atol=1e-8)

    def test_model_next_to_sample_with_same_stem(self, tmp_path, simulated):
        model_path = tmp_path / "sim.json"
        code = main([
            'fit', '--data', str(simulated), '--sigma2', '0.5', '--d1', '2', '--d2', '2', '--out-model', str(model_path),
        ])
        assert code == 0
        assert read_sample(simulated).n == 20
        out = tmp_path / "sim_latents.csv"
        assert main(['transform', '--model', str(model_path), '--data', str(simulated), '--out', str(out)]) == 0
        assert read_latents(out).shape == (20, 2, 2)

    def test_saved_model_matches_in_memory_fit(self, tmp_path, simulated):
        model_path = tmp_path / "odd.json"
        code = main([
            'fit', '--data', str(simulated), '--parity', 'odd', '--sigma2', '0.5',
            '--d1', '2', '--d2', '2', '--out-model', str(model_path),
        ])
        assert code == 0
        out = tmp_path / "odd_latents.csv"
        assert main(['transform', '--model', str(model_path), '--data', str(simulated), '--out', str(out)]) == 0

        sample = read_sample(simulated)
        kernel = KernelSpec.gaussian(0.5, Parity.ODD)
        expected = transform_sample(fit(sample, kernel, kernel, dims=(2, 2)), sample)
        np.testing.assert_allclose(read_latents(out), expected, rtol=0, atol=1e-12)

    def test_missing_data_file(self, tmp_path, capsys):
        code = main(['fit', '--data', str(tmp_path / "none.csv"), '--sigma2', '1', '--out-model', str(tmp_path / "m.json")])
        assert code == 1
        assert "FileNotFoundError:" in capsys.readouterr().err


class TestUsageErrors:

    def test_unknown_flag(self):
        assert main(['simulate', '--n', '10', '--out', 'x.csv', '--colour', 'red']) == 2

    def test_missing_subcommand(self):
        assert main([]) == 2

    def test_half_dimensions(self, simulated, tmp_path):
        assert main(['fit', '--data', str(simulated), '--d1', '2', '--out-model', str(tmp_path / "m.json")]) == 2

    def test_both_bandwidth_flags(self, simulated, tmp_path):
        code = main([
            'fit', '--data', str(simulated), '--sigma2', '1', '--sigma2-auto', '--out-model', str(tmp_path / "m.json"),
        ])
        assert code == 2

    def test_polynomial_needs_degree(self, simulated, tmp_path):
        code = main(['fit', '--data', str(simulated), '--kernel', 'polynomial', '--out-model', str(tmp_path / "m.json")])
        assert code == 2

    def test_linear_raw_needs_linear_kernel(self, simulated, tmp_path):
        code = main([
            'fit', '--data', str(simulated), '--kernel', 'gaussian', '--parity', 'linear-raw',
            '--sigma2', '1', '--out-model', str(tmp_path / "m.json"),
        ])
        assert code == 2


class TestBenchmark:

    @pytest.fixture
    def config_path(self, tmp_path):
        path = tmp_path / "bench.json"
        path.write_text(json.dumps({
            'generator': {'type': 'checkerboard', 'alpha': 0.125},
            'n_train': 20,
            'n_test': 10,
            'replicates': 5,
            'methods': ['mnpca-odd', '2d2pca'],
            'sigma_grid': [-2, 0],
            'seed': 11,
        }))
        return path

    def test_rows_and_overrides(self, tmp_path, config_path):
        out = tmp_path / "acc.csv"
        summary = tmp_path / "summary.csv"
        code = main([
            'benchmark', '--config', str(config_path), '--replicates', '2',
            '--out', str(out), '--summary-out', str(summary),
        ])
        assert code == 0
        table = pd.read_csv(out)
        assert list(table.columns) == ['replicate', 'method', 'exponent', 'accuracy']
        assert len(table) == 2 * (2 + 1)
        assert len(pd.read_csv(summary)) == 3

    def test_summarize(self, tmp_path, config_path, capsys):
        out = tmp_path / "acc.csv"
        main(['benchmark', '--config', str(config_path), '--replicates', '1', '--out', str(out)])
        capsys.readouterr()
        assert main(['summarize', '--table', str(out)]) == 0
        assert capsys.readouterr().out.startswith("method,exponent,mean,se,count")

    def test_missing_config(self, tmp_path, capsys):
        assert main(['benchmark', '--config', str(tmp_path / "none.json"), '--out', str(tmp_path / "a.csv")]) == 1
        assert "FileNotFoundError:" in capsys.readouterr().err


class TestConvergence:

    def test_writes_table(self, tmp_path):
        out = tmp_path / "conv.csv"
        ratio = tmp_path / "ratio.csv"
        code = main([
            'convergence', '--sizes', '10', '20', '--replicates', '3', '--seed', '2',
            '--out', str(out), '--ratio-out', str(ratio),
        ])
        assert code == 0
        assert len(pd.read_csv(out)) == 6
        assert len(pd.read_csv(ratio)) == 1
