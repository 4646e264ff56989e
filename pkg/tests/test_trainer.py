import numpy as np
import pytest

from gcsim.codes import partition_dataset
from gcsim.errors import ConfigurationError
from gcsim.latency import LatencyParams
from gcsim.simulator import ExperimentConfig
from gcsim.trainer import (
    generate_synthetic,
    mean_squared_error,
    partial_gradient,
    train,
    write_training_csv,
)

LAT = LatencyParams(mu_slow=0.1, mu_fast=10.0, alpha=0.01, switch_prob=0.05)


def trainer_config(**overrides):
    base = dict(
        num_workers=12,
        num_clusters=4,
        load=2,
        memberships=2,
        iterations=30,
        latency=LAT,
        initial_slow_count=6,
        master_seed=5,
        num_seeds=1,
        trainer_enabled=True,
        train_size=240,
        test_size=60,
        model_dim=20,
        learning_rate=0.05,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestSyntheticData:
    def test_reference_scale_shapes(self):
        ds = generate_synthetic(2000, 400, 1000, seed=0)
        assert ds.train_x.shape == (2000, 1000)
        assert ds.train_y.shape == (2000,)
        assert ds.test_x.shape == (400, 1000)
        assert ds.test_y.shape == (400,)

    def test_noiseless_targets_are_linear(self):
        ds = generate_synthetic(50, 10, 1, seed=3, noise_scale=0.0)
        ratio = ds.train_y / ds.train_x[:, 0]
        assert np.allclose(ratio, ds.true_model[0])

    def test_same_seed_is_bit_identical(self):
        a = generate_synthetic(100, 20, 5, seed=9)
        b = generate_synthetic(100, 20, 5, seed=9)
        assert np.array_equal(a.train_x, b.train_x)
        assert np.array_equal(a.test_y, b.test_y)

    def test_positive_sizes_required(self):
        with pytest.raises(ConfigurationError):
            generate_synthetic(0, 10, 5, seed=0)


class TestPartialGradient:
    def test_single_sample_definition(self):
        ds = generate_synthetic(10, 5, 4, seed=1)
        theta = np.arange(4, dtype=float)
        g = partial_gradient(theta, (3, 4), ds)
        x = ds.train_x[3]
        expected = 2 * (x @ theta - ds.train_y[3]) * x
        assert np.allclose(g, expected)

    def test_zero_at_the_noiseless_optimum(self):
        ds = generate_synthetic(60, 10, 6, seed=2, noise_scale=0.0)
        g = partial_gradient(ds.true_model, (0, 60), ds)
        assert np.linalg.norm(g) < 1e-10

    def test_decoded_gradient_equals_mean_of_batches(self):
        # Encode real partial gradients and decode from every cluster's full
        # codeword set: the result must equal the direct batch-gradient mean.
        from gcsim.codes import decode_full_gradient, encode
        from gcsim.trainer import build_cluster_codes

        ds = generate_synthetic(120, 20, 8, seed=4)
        part = partition_dataset(120, 12)
        theta = np.random.default_rng(0).standard_normal(8)
        grads = [partial_gradient(theta, part.batch_bounds[k], ds) for k in range(12)]
        config = trainer_config(train_size=120, model_dim=8)
        codes = build_cluster_codes(config)
        received = [
            {
                slot: encode(code, slot, [grads[b] for b in code.codewords[slot].support])
                for slot in range(code.ell)
            }
            for code in codes
        ]
        decoded = decode_full_gradient(codes, received)
        direct = np.mean(grads, axis=0)
        assert np.linalg.norm(decoded - direct) / np.linalg.norm(direct) < 1e-9


class TestTrain:
    def test_zero_learning_rate_flat_loss(self):
        config = trainer_config(learning_rate=0.0, iterations=10)
        ds = generate_synthetic(240, 60, 20, seed=5)
        result = train(config, ds)
        assert np.allclose(result.train_mse, result.train_mse[0])
        assert np.allclose(result.theta, 0.0)

    def test_coded_matches_uncoded_oracle(self):
        # Straggling only delays the update; the iterates must match plain
        # gradient descent on the mean of batch-average gradients.
        config = trainer_config()
        ds = generate_synthetic(240, 60, 20, seed=5)
        result = train(config, ds, record_iterates=True)

        part = partition_dataset(240, 12)
        theta = np.zeros(20)
        for t in range(config.iterations):
            grads = [
                partial_gradient(theta, part.batch_bounds[k], ds) for k in range(12)
            ]
            theta = theta - config.learning_rate * np.mean(grads, axis=0)
            gap = np.linalg.norm(result.iterates[t] - theta)
            assert gap / max(np.linalg.norm(theta), 1e-30) < 1e-9

    def test_loss_decreases_with_safe_step(self):
        config = trainer_config(iterations=40)
        ds = generate_synthetic(240, 60, 20, seed=5)
        result = train(config, ds)
        assert np.all(np.diff(result.train_mse) < 0)
        assert result.test_mse.shape == (40,)

    def test_requires_trainer_enabled(self):
        config = trainer_config(trainer_enabled=False)
        with pytest.raises(ConfigurationError):
            train(config, generate_synthetic(240, 60, 20, seed=5))

    def test_training_csv_round_trip(self, tmp_path):
        config = trainer_config(iterations=5)
        ds = generate_synthetic(240, 60, 20, seed=5)
        result = train(config, ds)
        path = tmp_path / "training.csv"
        write_training_csv(path, result)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "iteration,train_mse,test_mse"
        assert len(lines) == 6
        first = lines[1].split(",")
        assert float(first[1]) == pytest.approx(result.train_mse[0])


class TestMse:
    def test_matches_direct_formula(self):
        ds = generate_synthetic(30, 10, 3, seed=8)
        theta = np.ones(3)
        expected = np.mean((ds.train_x @ theta - ds.train_y) ** 2)
        assert mean_squared_error(theta, ds.train_x, ds.train_y) == pytest.approx(expected)
