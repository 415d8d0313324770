import numpy as np
import pytest

from src.engine.errors import KeyRangeError, ModelFormatError, RangeError, TruncatedModelError
from src.engine.kernel import biqgemm
from src.engine.model_io import HEADER, footprint, load, load_file, read_header, save, save_file
from src.engine.packing import pack_keys
from src.engine.quantizer import quantize_greedy
from src.models.matrix import DenseMatrix

REFERENCE_WEIGHTS_MB = {32: 1.049, 8: 0.262, 6: 0.197, 4: 0.131, 3: 0.098, 2: 0.066}

SMALLEST_MODEL = bytes.fromhex(
    '4251474d'   # magic
    '0100'       # version 1
    '01000000'   # m = 1
    '04000000'   # n = 4
    '01'         # beta = 1
    '04'         # mu = 4
    '0000803f'   # alpha 1.0
    '06'         # key for (-1, +1, +1, -1)
)


def random_model(rng, m=8, n=16, beta=2):
    return quantize_greedy(DenseMatrix(rng.standard_normal((m, n)).astype(np.float32)), beta)


class TestSaveLoad:
    def test_round_trip(self, rng):
        q = random_model(rng)
        loaded = load(save(q, 8))
        for plane, keys in zip(q.planes, loaded.keys):
            np.testing.assert_array_equal(keys.keys, pack_keys(plane, 8).keys)
        np.testing.assert_array_equal(loaded.quantized.alphas, q.alphas)
        assert all(a == b for a, b in zip(loaded.quantized.planes, q.planes))

    def test_many_random_models(self, rng):
        for _ in range(100):
            m, n = rng.integers(1, 20, size=2)
            mu = int(rng.choice([1, 3, 8, 12]))
            q = random_model(rng, m, n, int(rng.integers(1, 4)))
            loaded = load(save(q, mu))
            assert all(a == pack_keys(p, mu) for a, p in zip(loaded.keys, q.planes))

    def test_documented_bytes(self):
        q = quantize_greedy(DenseMatrix.from_rows([[-1, 1, 1, -1]], precision=32), 1)
        assert save(q, 4) == SMALLEST_MODEL
        assert load(SMALLEST_MODEL).keys[0].keys.tolist() == [[6]]

    @pytest.mark.parametrize('mu, container', [(8, 1), (9, 2), (16, 2)])
    def test_file_size(self, rng, mu, container):
        q = random_model(rng, m=5, n=40, beta=3)
        groups = -(-40 // mu)
        assert len(save(q, mu)) == HEADER.size + 3 * (4 * 5 + 5 * groups * container)

    def test_truncated(self, rng):
        data = save(random_model(rng), 8)
        with pytest.raises(TruncatedModelError):
            load(data[:-1])
        with pytest.raises(TruncatedModelError):
            load(data[:10])

    def test_wrong_magic(self, rng):
        data = save(random_model(rng), 8)
        with pytest.raises(ModelFormatError):
            load(b'NOPE' + data[4:])

    def test_wrong_version(self, rng):
        data = bytearray(save(random_model(rng), 8))
        data[4] = 9
        with pytest.raises(ModelFormatError):
            read_header(bytes(data))

    def test_key_out_of_range(self):
        data = bytearray(SMALLEST_MODEL)
        data[-1] = 0xFF
        with pytest.raises(KeyRangeError):
            load(bytes(data))

    def test_trailing_bytes(self):
        with pytest.raises(ModelFormatError):
            load(SMALLEST_MODEL + b'\x00')

    def test_loaded_model_multiplies_like_original(self, rng):
        q = random_model(rng, m=6, n=20, beta=2)
        X = DenseMatrix(rng.standard_normal((20, 3)).astype(np.float32))
        loaded = load(save(q, 8)).packed()
        np.testing.assert_array_equal(biqgemm(loaded, X).output.data, biqgemm(q, X, mu=8).output.data)

    def test_files(self, rng, tmp_path):
        q = random_model(rng)
        path = tmp_path / 'model.bqgm'
        save_file(path, q, 4)
        np.testing.assert_array_equal(load_file(path).quantized.alphas, q.alphas)


class TestFootprint:
    @pytest.mark.parametrize('bits, mb', sorted(REFERENCE_WEIGHTS_MB.items()))
    def test_reference_weight_sizes(self, bits, mb):
        assert round(footprint(512, 512, bits).weight_bytes / 1e6, 3) == mb

    def test_exact_bytes(self):
        assert footprint(512, 512, 4).weight_bytes == 131_072
        assert footprint(512, 512, 2).weight_bytes == 65_536
        assert footprint(512, 512, 32).weight_bytes == 1_048_576

    def test_activation_and_output_columns(self):
        f = footprint(512, 512, 3, batch=18)
        assert f.activation_bytes == 512 * 18 * 4
        assert f.output_bytes == 512 * 18 * 4
        assert f.total_bytes == f.weight_bytes + f.activation_bytes + f.output_bytes

    def test_alpha_overhead_reported_separately(self):
        assert footprint(512, 512, 3).alpha_bytes == 3 * 512 * 4
        assert footprint(512, 512, 32).alpha_bytes == 0

    def test_monotone(self):
        base = footprint(256, 256, 2).total_bytes
        assert footprint(512, 256, 2).total_bytes > base
        assert footprint(256, 512, 2).total_bytes > base
        assert footprint(256, 256, 3).total_bytes > base

    def test_rejects_zero_bits(self):
        with pytest.raises(RangeError):
            footprint(4, 4, 0)
