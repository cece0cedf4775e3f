import math

import numpy as np
import pytest

import absement as ab


def test_dtw_on_arrays():
    x = ab.FeatureMatrix(np.array([[0.0], [1.0], [0.0]]))
    y = ab.FeatureMatrix(np.array([[1.0], [0.0], [1.0]]))
    r = ab.dtw_absement(x, y)
    assert r.cost == 2.0
    assert r.path == [(1, 1), (2, 1), (3, 2), (3, 3)]
    assert r.scaled_cost == pytest.approx(2.0 / math.sqrt(3.0))
    assert ab.dtw_cost(y, x) == r.cost
    assert ab.distance_profile(x, y, "template").sum() == pytest.approx(r.cost)


def test_feature_matrix_round_trip(tmp_path):
    rng = np.random.default_rng(1)
    values = rng.normal(size=(12, 13))
    f = ab.FeatureMatrix(values, "test")
    assert (f.frames, f.coeffs) == (12, 13)
    np.testing.assert_array_equal(f.to_numpy(), values)
    ab.write_features(tmp_path / "a.feat", f, ["note"])
    assert ab.read_features(tmp_path / "a.feat") == f


def test_mfcc_shape():
    sr = 16000
    t = np.arange(sr // 2) / sr
    wave = ab.Waveform(0.5 * np.sin(2 * np.pi * 440 * t), sr)
    feats = ab.mfcc(wave)
    assert feats.coeffs == 13
    assert feats.frames == ab.frame_count(sr // 2, sr)
    assert np.all(np.isfinite(feats.to_numpy()))


def test_average_and_recognize():
    rng = np.random.default_rng(2)
    words = {w: rng.normal(size=(20 + 5 * i, 4)) for i, w in enumerate(["alpha", "beta", "gamma"])}
    lex = ab.build_lexicon([(w, ab.FeatureMatrix(v)) for w, v in words.items()])
    assert len(lex) == 3 and "beta" in lex

    noisy = ab.FeatureMatrix(words["beta"] + 0.05 * rng.normal(size=words["beta"].shape))
    res = ab.recognize(noisy, lex, k=2)
    assert res.ranked[0].word == "beta"
    assert len(res.top_k) == 2

    out = ab.dba_average([ab.FeatureMatrix(words["alpha"]), noisy], seed=3)
    assert all(b <= a + 1e-9 for a, b in zip(out.objective_trace, out.objective_trace[1:]))

    report = ab.evaluate([("beta", noisy)], lex, k=3)
    assert report.top1_accuracy == 1.0


def test_synth_corpus(tmp_path):
    n = ab.synth_corpus(tmp_path, 2, 3, 5, 0.002)
    assert n == 6
    rows = ab.read_manifest(tmp_path / "manifest.tsv")
    assert len(rows) == 6
    wave = ab.load_wav(rows[0][2])
    assert wave.sample_rate > 0


def test_error_mapping(tmp_path):
    with pytest.raises(ab.FileNotFoundError):
        ab.read_features(tmp_path / "missing.feat")
    (tmp_path / "bad.feat").write_text("FEAT 2 1 1\n0\n")
    with pytest.raises(ab.InputError):
        ab.read_features(tmp_path / "bad.feat")
    with pytest.raises(ValueError):
        ab.FeatureMatrix(np.array([[np.nan]]))


def test_synth_rejects_too_few_speakers(tmp_path):
    with pytest.raises(ab.InvalidArgumentError):
        ab.synth_corpus(tmp_path, 3, 2, 5, 0.002)
