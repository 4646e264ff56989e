import itertools

import numpy as np
import pytest

from gcsim.codes import (
    RESIDUAL_TOL,
    batch_average,
    build_cluster_code,
    decode_full_gradient,
    encode,
    partition_dataset,
    solve_decoding,
    _subset_solve,
)
from gcsim.errors import (
    ConfigurationError,
    DecodeFailureError,
    NotDecodableError,
    NotEnoughResultsError,
)


class TestPartition:
    def test_identity_split(self):
        part = partition_dataset(12, 12)
        assert part.batch_bounds == tuple((k, k + 1) for k in range(12))

    def test_uneven_split_larger_first(self):
        # 2000 = 12 * 166 + 8: eight batches of 167 then four of 166.
        part = partition_dataset(2000, 12)
        sizes = [part.batch_size(k) for k in range(12)]
        assert sizes == [167] * 8 + [166] * 4
        assert part.batch_bounds[0] == (0, 167)
        assert part.batch_bounds[-1] == (1834, 2000)

    def test_ranges_cover_and_are_disjoint(self):
        part = partition_dataset(101, 7)
        covered = []
        for start, stop in part.batch_bounds:
            covered.extend(range(start, stop))
        assert covered == list(range(101))

    def test_too_few_samples(self):
        with pytest.raises(ConfigurationError):
            partition_dataset(5, 6)

    def test_deterministic(self):
        assert partition_dataset(100, 9) == partition_dataset(100, 9)


class TestBuildClusterCode:
    @pytest.mark.parametrize("ell,r", [(3, 2), (4, 3), (5, 3), (2, 2), (3, 3), (6, 4)])
    def test_every_threshold_subset_decodes(self, ell, r):
        code = build_cluster_code(ell, r, seed=7)
        target = np.full(ell, 1.0 / ell)
        for subset in itertools.combinations(range(ell), ell - r + 1):
            weights = solve_decoding(code, list(subset))
            system = code.coefficient_rows[list(subset)].T
            assert np.linalg.norm(system @ weights - target) < RESIDUAL_TOL

    def test_cyclic_supports(self):
        code = build_cluster_code(5, 3, seed=1, cluster=2, batch_offset=10)
        for slot, spec in enumerate(code.codewords):
            expected = tuple(10 + (slot + j) % 5 for j in range(3))
            assert spec.support == expected
            assert all(c != 0.0 for c in spec.coeffs)

    def test_full_replication_when_r_equals_ell(self):
        # Each codeword covers all batches and is proportional to their sum,
        # so any single codeword decodes.
        code = build_cluster_code(3, 3, seed=5)
        for slot in range(3):
            row = code.coefficient_rows[slot]
            assert np.allclose(row, row[0])
            solve_decoding(code, [slot])

    def test_straggler_tolerance_is_tight(self):
        # Some subset one below the threshold must fail: dropping the r
        # codewords that cover a batch leaves it unrecoverable.
        for ell, r in ((3, 2), (5, 3)):
            code = build_cluster_code(ell, r, seed=7)
            failures = 0
            for subset in itertools.combinations(range(ell), ell - r):
                _, residual = _subset_solve(code.coefficient_rows, subset)
                failures += residual >= RESIDUAL_TOL
            assert failures > 0

    def test_deterministic_per_seed(self):
        a = build_cluster_code(4, 2, seed=9)
        b = build_cluster_code(4, 2, seed=9)
        assert np.array_equal(a.coefficient_rows, b.coefficient_rows)
        assert a.codewords == b.codewords
        c = build_cluster_code(4, 2, seed=10)
        assert not np.array_equal(a.coefficient_rows, c.coefficient_rows)

    def test_bad_load(self):
        with pytest.raises(ConfigurationError):
            build_cluster_code(3, 4, seed=0)
        with pytest.raises(ConfigurationError):
            build_cluster_code(3, 0, seed=0)


class TestSolveDecoding:
    def test_all_codewords_is_a_superset_solution(self):
        code = build_cluster_code(4, 2, seed=3)
        weights = solve_decoding(code, list(range(4)))
        recovered = weights @ code.coefficient_rows
        assert np.allclose(recovered, np.full(4, 0.25), atol=1e-12)

    def test_exact_threshold_pair(self):
        code = build_cluster_code(3, 2, seed=0)
        weights = solve_decoding(code, [0, 1])
        system = code.coefficient_rows[[0, 1]].T
        assert np.linalg.norm(system @ weights - np.full(3, 1 / 3)) < 1e-12

    def test_below_threshold(self):
        code = build_cluster_code(3, 2, seed=0)
        with pytest.raises(NotEnoughResultsError):
            solve_decoding(code, [0])

    def test_duplicate_and_out_of_range_slots(self):
        code = build_cluster_code(3, 2, seed=0)
        with pytest.raises(ConfigurationError):
            solve_decoding(code, [0, 0])
        with pytest.raises(ConfigurationError):
            solve_decoding(code, [0, 3])


class TestEncode:
    def test_scalar_case(self):
        code = build_cluster_code(1, 1, seed=2)
        g = np.array([1.0, -2.0, 0.5])
        out = encode(code, 0, [g])
        assert np.allclose(out, code.codewords[0].coeffs[0] * g)

    def test_zero_partials_give_zero(self):
        code = build_cluster_code(4, 3, seed=2)
        out = encode(code, 1, [np.zeros(5)] * 3)
        assert np.array_equal(out, np.zeros(5))

    def test_shape_mismatch(self):
        code = build_cluster_code(3, 2, seed=2)
        with pytest.raises(ValueError):
            encode(code, 0, [np.zeros(3), np.zeros(4)])
        with pytest.raises(ValueError):
            encode(code, 0, [np.zeros(3)])


class TestDecodeFullGradient:
    def _coded_setup(self, rng, P=3, ell=4, r=2, dim=6):
        codes = [
            build_cluster_code(ell, r, seed=11, cluster=p, batch_offset=p * ell)
            for p in range(P)
        ]
        grads = [rng.standard_normal(dim) for _ in range(P * ell)]
        return codes, grads

    def _received(self, code, grads, slots):
        out = {}
        for slot in slots:
            spec = code.codewords[slot]
            out[slot] = encode(code, slot, [grads[b] for b in spec.support])
        return out

    def test_full_information_matches_average(self, rng):
        codes, grads = self._coded_setup(rng)
        received = [self._received(c, grads, range(c.ell)) for c in codes]
        decoded = decode_full_gradient(codes, received)
        assert np.allclose(decoded, batch_average(grads), rtol=0, atol=1e-12)

    def test_threshold_subsets_match_oracle(self, rng):
        # Earliest-finisher subsets of exactly ell - r + 1 codewords per
        # cluster reproduce the direct average of all batch gradients.
        codes, grads = self._coded_setup(rng)
        oracle = batch_average(grads)
        for trial in range(20):
            received = []
            for code in codes:
                slots = rng.permutation(code.ell)[: code.decoding_threshold]
                received.append(self._received(code, grads, slots.tolist()))
            decoded = decode_full_gradient(codes, received)
            assert np.linalg.norm(decoded - oracle) / np.linalg.norm(oracle) < 1e-9

    def test_deficient_cluster_is_named(self, rng):
        codes, grads = self._coded_setup(rng)
        received = [self._received(c, grads, range(c.ell)) for c in codes]
        received[1] = self._received(codes[1], grads, range(codes[1].decoding_threshold - 1))
        with pytest.raises(NotDecodableError) as excinfo:
            decode_full_gradient(codes, received)
        assert excinfo.value.clusters == (1,)

    def test_broken_code_raises_decode_failure(self, rng):
        codes, grads = self._coded_setup(rng, P=1)
        code = codes[0]
        broken = code.__class__(
            ell=code.ell,
            r=code.r,
            cluster=0,
            batch_offset=0,
            codewords=code.codewords,
            coefficient_rows=np.zeros_like(code.coefficient_rows),
        )
        with pytest.raises(DecodeFailureError):
            decode_full_gradient([broken], [self._received(code, grads, range(code.ell))])
