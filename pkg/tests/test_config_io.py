"""Config parsing and CSV/manifest serialization.

Round-trip tests hold the serializers to their contract: a file read back
reproduces every double bit for bit, and rerunning a writer with the same
inputs yields byte-identical files.
"""

import hashlib
import json

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from ppfilter.configfile import load_config, parse_config, take
from ppfilter.dynamics import StateModel, simulate_path
from ppfilter.encoding import EncoderParams, SpikeTrain, generate_spikes
from ppfilter.errors import ConfigError
from ppfilter.filtering import FilterMode, run_filter
from ppfilter.gaussian import GaussianBelief
from ppfilter.reports import (config_digest, format_value, read_belief_series,
                              read_csv, read_spike_train, write_belief_series,
                              write_csv, write_manifest, write_path,
                              write_spike_train)

# sha256 of the empty string, a fixed public constant
EMPTY_SHA256 = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"


class TestParseConfig:
    def test_typed_scalars(self):
        cfg = parse_config(
            "model.a = -0.1\n"
            "run.trials = 1000\n"
            "run.paired = true\n"
            "io.label = baseline\n")
        assert cfg["model.a"] == -0.1 and isinstance(cfg["model.a"], float)
        assert cfg["run.trials"] == 1000 and isinstance(cfg["run.trials"], int)
        assert cfg["run.paired"] is True
        assert cfg["io.label"] == "baseline"

    def test_lists_bracketed_and_bare(self):
        cfg = parse_config(
            "run.window = [5.0, 10.0]\n"
            "filter.modes = full_adf, uniform_coding\n"
            "sweep.values = [1, two, 3.5]\n")
        assert cfg["run.window"] == [5.0, 10.0]
        assert cfg["filter.modes"] == ["full_adf", "uniform_coding"]
        assert cfg["sweep.values"] == [1, "two", 3.5]

    def test_range_expansion(self):
        cfg = parse_config("sweep.center = [0:1:0.25]\n")
        assert cfg["sweep.center"] == [0.0, 0.25, 0.5, 0.75, 1.0]

    def test_range_includes_fuzzy_endpoint(self):
        # 0.05 steps accumulate binary error; the endpoint must still appear
        values = parse_config("sweep.center = [0.0:2.0:0.05]\n")["sweep.center"]
        assert len(values) == 41
        assert values[-1] == pytest.approx(2.0, abs=1e-12)
        assert np.all(np.diff(values) > 0)

    def test_single_point_range(self):
        assert parse_config("a.b = [2.0:2.0:1.0]\n")["a.b"] == [2.0]

    def test_comments_and_blanks(self):
        cfg = parse_config(
            "# full line comment\n"
            "\n"
            "model.a = 1.0  # trailing comment\n"
            "   \n")
        assert cfg == {"model.a": 1.0}

    @pytest.mark.parametrize("text, fragment", [
        ("model.a 1.0\n", "expected 'key = value'"),
        ("= 1.0\n", "missing key"),
        ("model.a = \n", "empty value"),
        ("model.a = [1, 2\n", "unterminated"),
        ("model.a = []\n", "empty list"),
        ("model.a = [1:x:2]\n", "bad range"),
        ("model.a = [0:1:0]\n", "step > 0"),
        ("model.a = [1:0:0.5]\n", "stop >= start"),
        ("model.a = 1\nmodel.a = 2\n", "duplicate"),
    ])
    def test_errors_name_the_fault(self, text, fragment):
        with pytest.raises(ConfigError, match=fragment):
            parse_config(text)

    def test_error_names_key(self):
        with pytest.raises(ConfigError, match="sweep.center"):
            parse_config("sweep.center = [0:1:0]\n")

    def test_load_config(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("model.a = -1.0\nrun.trials = 10\n", encoding="utf-8")
        assert load_config(path) == {"model.a": -1.0, "run.trials": 10}


class TestTake:
    CFG = {"a": 1, "b": 2.5, "c": True, "d": "word", "e": [1.0, 2.0]}

    def test_missing_with_default(self):
        assert take(self.CFG, "zz", float, default=3.0) == 3.0
        assert take(self.CFG, "zz", float) is None

    def test_missing_required(self):
        with pytest.raises(ConfigError, match="'zz'.*required"):
            take(self.CFG, "zz", float, required=True)

    def test_int_promotes_to_float(self):
        value = take(self.CFG, "a", float)
        assert value == 1.0 and isinstance(value, float)

    def test_scalar_wraps_to_list(self):
        assert take(self.CFG, "b", list) == [2.5]
        assert take(self.CFG, "e", list) == [1.0, 2.0]

    def test_exact_kinds(self):
        assert take(self.CFG, "a", int) == 1
        assert take(self.CFG, "c", bool) is True
        assert take(self.CFG, "d", str) == "word"

    @pytest.mark.parametrize("key, kind", [
        ("b", int),     # float does not demote
        ("c", float),   # bool is not a number here
        ("c", int),
        ("d", float),
        ("e", float),
    ])
    def test_mismatch_raises(self, key, kind):
        with pytest.raises(ConfigError, match=f"'{key}'"):
            take(self.CFG, key, kind)


class TestCsv:
    def test_format_value(self):
        assert format_value(True) == "1"
        assert format_value(np.bool_(False)) == "0"
        assert format_value(np.int64(-7)) == "-7"
        assert format_value(0.1) == "0.1"
        assert format_value(np.float64(1 / 3)) == repr(1 / 3)
        assert format_value("free") == "free"

    def test_round_trip_is_bit_exact(self, tmp_path):
        rng = np.random.default_rng(5)
        rows = rng.standard_normal((40, 3))
        rows[0] = [0.1, 1 / 3, 1e-308]
        path = tmp_path / "table.csv"
        write_csv(path, ["a", "b", "c"], rows)
        header, data = read_csv(path)
        assert header == ["a", "b", "c"]
        assert_array_equal(data, rows)

    def test_empty_table(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_csv(path, ["x", "y"], [])
        header, data = read_csv(path)
        assert header == ["x", "y"]
        assert data.shape == (0, 2)

    def test_rewrite_is_byte_identical(self, tmp_path):
        rows = np.random.default_rng(8).standard_normal((10, 2))
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        write_csv(first, ["u", "v"], rows)
        write_csv(second, ["u", "v"], rows)
        assert first.read_bytes() == second.read_bytes()


def small_trial(seed=3):
    model = StateModel.scalar(-1.0, 0.5, mean0=0.2, var0=0.0)
    enc = EncoderParams.scalar(0.0, 1.0, 0.2, 30.0)
    path = simulate_path(model, horizon=1.0, dt=1e-2, seed=[seed, 1])
    train = generate_spikes(enc, path, seed=[seed, 2])
    return model, enc, path, train


class TestSpikeTrainIo:
    def test_round_trip_bits(self, tmp_path):
        _, _, _, train = small_trial()
        assert len(train) > 0
        path = tmp_path / "spikes.csv"
        write_spike_train(path, train)
        back = read_spike_train(path, horizon=train.horizon)
        assert_array_equal(back.times, train.times)
        assert_array_equal(back.marks, train.marks)
        assert back.horizon == train.horizon

    def test_header_names_marks(self, tmp_path):
        train = SpikeTrain(times=np.array([0.5]),
                           marks=np.array([[1.0, -2.0]]), horizon=1.0)
        path = tmp_path / "spikes.csv"
        write_spike_train(path, train)
        header, _ = read_csv(path)
        assert header == ["t", "theta_1", "theta_2"]

    def test_empty_train(self, tmp_path):
        train = SpikeTrain.empty(mark_dim=1, horizon=2.0)
        path = tmp_path / "spikes.csv"
        write_spike_train(path, train)
        back = read_spike_train(path, horizon=2.0)
        assert len(back) == 0
        assert back.marks.shape == (0, 1)

    def test_rejects_foreign_csv(self, tmp_path):
        path = tmp_path / "other.csv"
        write_csv(path, ["x", "y"], [[1.0, 2.0]])
        with pytest.raises(ValueError, match="spike-train"):
            read_spike_train(path, horizon=1.0)


class TestPathIo:
    def test_round_trip(self, tmp_path):
        _, _, state_path, _ = small_trial()
        out = tmp_path / "path.csv"
        write_path(out, state_path.times, state_path.states)
        header, data = read_csv(out)
        assert header == ["t", "x_1"]
        assert_array_equal(data[:, 0], state_path.times)
        assert_array_equal(data[:, 1:], state_path.states)


class TestBeliefIo:
    def test_scalar_round_trip(self, tmp_path):
        model, enc, _, train = small_trial()
        result = run_filter(model, enc, train, GaussianBelief.scalar(0.0, 1.0),
                            dt=1e-2, mode=FilterMode.FULL_ADF)
        out = tmp_path / "belief.csv"
        write_belief_series(out, result)
        back = read_belief_series(out)
        assert_array_equal(back.times, result.times)
        assert_array_equal(back.means, result.means)
        assert_array_equal(back.covs, result.covs)

    def test_2d_packing(self, tmp_path):
        times = np.array([0.0, 0.1])
        means = np.array([[1.0, -2.0], [0.5, 0.25]])
        covs = np.array([[[2.0, 0.3], [0.3, 1.0]],
                         [[1.5, -0.2], [-0.2, 0.8]]])
        header, data = self._write_read(tmp_path, times, means, covs)
        assert header == ["t", "mu_1", "mu_2", "sigma_11", "sigma_12", "sigma_22"]
        assert_array_equal(data[:, 3], covs[:, 0, 0])
        assert_array_equal(data[:, 4], covs[:, 0, 1])
        assert_array_equal(data[:, 5], covs[:, 1, 1])

    @staticmethod
    def _write_read(tmp_path, times, means, covs):
        from ppfilter.filtering import FilterDiagnostics, FilterResult
        zeros = np.zeros(times.size)
        result = FilterResult(times=times, means=means, covs=covs,
                              diagnostics=FilterDiagnostics(zeros, zeros, 0))
        out = tmp_path / "belief2.csv"
        write_belief_series(out, result)
        back = read_belief_series(out)
        assert_array_equal(back.covs, covs)
        assert_array_equal(back.covs[0], back.covs[0].T)
        return read_csv(out)


class TestManifest:
    def test_digest_is_plain_sha256(self):
        assert config_digest("") == EMPTY_SHA256
        text = "model.a = -0.1\n"
        assert config_digest(text) == hashlib.sha256(text.encode()).hexdigest()

    def test_contents(self, tmp_path):
        out = tmp_path / "manifest.json"
        write_manifest(out, "compare-uniform", "run.trials = 3\n",
                       {"seed": 7, "dt": 0.001})
        payload = json.loads(out.read_text())
        assert payload["command"] == "compare-uniform"
        assert payload["config_sha256"] == config_digest("run.trials = 3\n")
        assert payload["settings"] == {"seed": 7, "dt": 0.001}
        assert set(payload["versions"]) == {"ppfilter", "numpy"}

    def test_rewrite_is_byte_identical(self, tmp_path):
        first = tmp_path / "a.json"
        second = tmp_path / "b.json"
        for out in (first, second):
            write_manifest(out, "decode", "x = 1\n", {"dt": 0.01, "seed": 1})
        assert first.read_bytes() == second.read_bytes()
