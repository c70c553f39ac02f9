import math

import pytest

import localmot


def box_rows(track_id, slot, frames):
    return [(t, track_id, 100.0 * slot, 0.0, 40.0, 80.0) for t in frames]


def split_sequence():
    gt = box_rows(1, 0, range(1, 11))
    pred = box_rows(1, 0, range(1, 6)) + box_rows(2, 0, range(6, 11))
    return localmot.make_sequence("S1", gt, pred, num_frames=10, fps=10.0)


def test_iou():
    assert localmot.iou(localmot.Box(0, 0, 2, 2), localmot.Box(1, 1, 2, 2)) == pytest.approx(1 / 7)


def test_split_fixture_values():
    seq = split_sequence()
    strict = localmot.strict_metrics(seq)
    assert strict["det_f1"] == 1.0
    assert strict["idf1"] == 0.5
    assert strict["ata"] == pytest.approx(1 / 3, abs=1e-12)
    assert strict["mota"] == pytest.approx(0.9, abs=1e-12)
    assert localmot.local_metrics(seq, 1)["alta"]["value"] == pytest.approx(28 / 33, abs=1e-12)
    d = localmot.decompose(seq, None)
    assert d["normalised"]["split"] == pytest.approx(1.0, abs=1e-12)


def test_reductions():
    seq = split_sequence()
    strict = localmot.strict_metrics(seq)
    assert localmot.local_metrics(seq, 0)["alta"]["value"] == pytest.approx(strict["det_f1"])
    assert localmot.local_metrics(seq, 9)["alta"]["value"] == pytest.approx(strict["ata"])
    assert localmot.local_metrics(seq, None)["lidf1"]["value"] == pytest.approx(strict["idf1"])


def test_swap_leaves_ata_unchanged():
    seq = split_sequence()
    assert localmot.strict_metrics(seq.swapped())["ata"] == localmot.strict_metrics(seq)["ata"]
    assert localmot.decompose(seq.swapped(), None)["normalised"]["merge"] == pytest.approx(1.0)


def test_catalog_expectations():
    for name, seq, expected in localmot.fixture_catalog():
        strict = localmot.strict_metrics(seq)
        for key in ("det_f1", "idf1", "ata"):
            if key in expected:
                assert strict[key] == pytest.approx(expected[key], abs=1e-12), (name, key)


def test_evaluate_report():
    seqs = [seq for _, seq, _ in localmot.fixture_catalog()]
    one = localmot.evaluate({"synth": seqs}, horizons="0,1f,1s,strict", jobs=1)
    four = localmot.evaluate({"synth": seqs}, horizons="0,1f,1s,strict", jobs=4)
    assert one == four
    assert "combined" in one


def test_files_round_trip(tmp_path):
    localmot.write_catalog(tmp_path)
    report = localmot.evaluate_files(str(tmp_path / "gt"), {"synth": str(tmp_path / "trackers" / "synth")},
                                     horizons="1f,strict", decompose=True)
    table = localmot.compare(report, sort_key="ata")
    assert table


def test_parse_mot_errors():
    rows = localmot.parse_mot("1,1,0,0,10,10,1,1,1\n")
    assert rows[0][:2] == (1, 1)
    with pytest.raises(ValueError):
        localmot.parse_mot("1,1,0,0,-1,10\n")


def test_aggregation_helpers():
    assert localmot.mean_over_horizons([0.660, 0.520, 0.443]) == pytest.approx(0.541, abs=5e-4)
    assert localmot.kendall_tau_b([1, 2, 3], [1, 2, 3]) == pytest.approx(1.0)
    assert localmot.kendall_tau_b([1, 1, 1], [1, 2, 3]) is None
    assert math.isclose(localmot.association_fraction(0.5, 1.0), 0.5)
