import numpy as np
import pytest

from boostmot.dataio import (Detection, MotRow, RunConfig, config_from_mapping,
                             materialize_external, parse_mot_file,
                             read_detections, read_external_similarity,
                             read_ground_truth, read_kv_file, read_results,
                             read_run_config, write_detections, write_results)
from boostmot.errors import ConfigError, ContractError, ParseError


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


class TestParsing:
    def test_detection_row(self, tmp_path):
        p = tmp_path / "det.txt"
        write_lines(p, ["1,-1,10,20,30,40,0.9,-1,-1,-1"])
        frames = read_detections(p)
        assert list(frames) == [1]
        d = frames[1][0]
        assert (d.box.x, d.box.y, d.box.w, d.box.h) == (10, 20, 30, 40)
        assert d.conf == 0.9

    def test_empty_file(self, tmp_path):
        p = tmp_path / "det.txt"
        p.write_text("", encoding="utf-8")
        assert read_detections(p) == {}

    def test_zero_width_rejected_with_line_number(self, tmp_path):
        p = tmp_path / "det.txt"
        write_lines(p, ["1,-1,10,20,30,40,0.9,-1,-1,-1", "2,-1,10,20,0,40,0.9,-1,-1,-1"])
        with pytest.raises(ParseError, match="line 2"):
            read_detections(p)

    def test_malformed_row(self, tmp_path):
        p = tmp_path / "det.txt"
        write_lines(p, ["1,-1,abc,20,30,40,0.9"])
        with pytest.raises(ParseError, match="line 1"):
            parse_mot_file(p)
        write_lines(p, ["1,2,3"])
        with pytest.raises(ParseError):
            parse_mot_file(p)

    def test_non_monotone_frames_grouped(self, tmp_path):
        p = tmp_path / "det.txt"
        write_lines(p, ["3,-1,1,1,5,5,0.5", "1,-1,2,2,5,5,0.6", "3,-1,3,3,5,5,0.7"])
        frames = read_detections(p)
        assert sorted(frames) == [1, 3]
        assert [d.conf for d in frames[3]] == [0.5, 0.7]

    def test_normalize_conf(self, tmp_path):
        p = tmp_path / "det.txt"
        write_lines(p, ["1,-1,1,1,5,5,50", "1,-1,2,2,5,5,100"])
        frames = read_detections(p, normalize_conf=True)
        assert [d.conf for d in frames[1]] == [0.5, 1.0]


class TestRoundTrip:
    def quantized_rows(self, rng, n):
        rows = []
        for k in range(n):
            frame = int(rng.integers(1, 500))
            rows.append(MotRow(
                frame, k + 1,
                round(float(rng.uniform(0, 900)), 2), round(float(rng.uniform(0, 900)), 2),
                round(float(rng.uniform(1, 100)), 2), round(float(rng.uniform(1, 100)), 2),
                round(float(rng.uniform(0, 1)), 4)))
        return rows

    def test_write_read_value_identity_and_byte_stability(self, tmp_path, rng):
        rows = self.quantized_rows(rng, 1000)
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        write_results(p1, rows)
        back = parse_mot_file(p1)
        assert [(r.frame, r.track_id, r.x, r.y, r.w, r.h, r.conf) for r in back] == \
               [(r.frame, r.track_id, r.x, r.y, r.w, r.h, r.conf) for r in rows]
        write_results(p2, back)
        assert p1.read_bytes() == p2.read_bytes()

    def test_duplicate_frame_id_rejected(self, tmp_path):
        rows = [MotRow(1, 1, 0, 0, 5, 5, 0.5), MotRow(1, 1, 9, 9, 5, 5, 0.6)]
        with pytest.raises(ParseError, match="duplicate"):
            write_results(tmp_path / "r.txt", rows)

    def test_result_id_must_be_positive(self, tmp_path):
        with pytest.raises(ParseError):
            write_results(tmp_path / "r.txt", [MotRow(1, -1, 0, 0, 5, 5, 0.5)])
        p = tmp_path / "res.txt"
        write_lines(p, ["1,-1,1,1,5,5,0.9"])
        with pytest.raises(ParseError):
            read_results(p)


class TestGroundTruthFilters:
    def test_class_and_visibility_filters(self, tmp_path):
        p = tmp_path / "gt.txt"
        write_lines(p, [
            "1,1,0,0,10,20,1,1,1.0",    # pedestrian, kept
            "1,2,5,5,10,20,1,3,1.0",    # other class, skipped
            "1,3,9,9,10,20,1,1,0.0",    # zero visibility, skipped
            "1,4,7,7,10,20,0,1,1.0",    # consider-flag off, skipped
        ])
        frames = read_ground_truth(p)
        assert [tid for tid, _ in frames[1]] == [1]
        loose = read_ground_truth(p, pedestrian_only=False, skip_zero_visibility=False)
        assert [tid for tid, _ in loose[1]] == [1, 2, 3]

    def test_short_rows_always_kept(self, tmp_path):
        p = tmp_path / "gt.txt"
        write_lines(p, ["1,7,0,0,10,20,1"])
        frames = read_ground_truth(p)
        assert [tid for tid, _ in frames[1]] == [7]


class TestRunConfig:
    def test_defaults(self):
        cfg = RunConfig()
        assert cfg.tau == 0.6 and cfg.beta_c == 0.65
        assert cfg.creation_threshold == pytest.approx(0.7)

    def test_presets(self):
        cfg17 = config_from_mapping({"preset": "mot17"})
        assert (cfg17.tau, cfg17.beta_c) == (0.6, 0.65)
        cfg20 = config_from_mapping({"preset": "mot20"})
        assert (cfg20.tau, cfg20.beta_c) == (0.4, 0.5)

    def test_explicit_key_overrides_preset(self):
        cfg = config_from_mapping({"preset": "mot20", "tau": "0.45"})
        assert cfg.tau == 0.45 and cfg.beta_c == 0.5

    def test_unknown_key_named_in_error(self):
        with pytest.raises(ConfigError, match="bogus_key"):
            config_from_mapping({"bogus_key": "1"})

    def test_out_of_range_named(self):
        with pytest.raises(ConfigError):
            config_from_mapping({"tau": "1.5"})
        with pytest.raises(ConfigError):
            config_from_mapping({"alpha": "2.0"})
        with pytest.raises(ConfigError):
            config_from_mapping({"max_age": "0"})

    def test_file_round_trip(self, tmp_path):
        p = tmp_path / "run.cfg"
        write_lines(p, ["# tracker settings", "preset = mot20",
                        "use_s = true", "q = 1.5", "seed = 7"])
        cfg = read_run_config(p)
        assert cfg.use_s is True and cfg.seed == 7 and cfg.tau == 0.4

    def test_kv_syntax_errors(self, tmp_path):
        p = tmp_path / "run.cfg"
        write_lines(p, ["tau 0.5"])
        with pytest.raises(ConfigError):
            read_kv_file(p)
        write_lines(p, ["tau = 0.5", "tau = 0.6"])
        with pytest.raises(ConfigError, match="duplicate"):
            read_kv_file(p)

    def test_bool_parsing(self):
        cfg = config_from_mapping({"use_vt": "on", "use_sb": "0"})
        assert cfg.use_vt is True and cfg.use_sb is False
        with pytest.raises(ConfigError):
            config_from_mapping({"use_vt": "maybe"})

    def test_tau_init_explicit(self):
        cfg = config_from_mapping({"tau_init": "0.6", "tau": "0.6"})
        assert cfg.creation_threshold == 0.6


class TestExternalSimilarity:
    def test_parse_and_materialize(self, tmp_path):
        p = tmp_path / "app.txt"
        write_lines(p, ["# frame,i,j,value", "2,0,1,0.8", "2,1,0,0.3", "5,0,0,1.0"])
        data = read_external_similarity(p)
        mat = materialize_external(data[2], 2, 2)
        assert mat.tolist() == [[0.0, 0.8], [0.3, 0.0]]

    def test_out_of_range_index(self, tmp_path):
        p = tmp_path / "app.txt"
        write_lines(p, ["1,5,0,0.8"])
        data = read_external_similarity(p)
        with pytest.raises(ContractError):
            materialize_external(data[1], 2, 2)

    def test_malformed(self, tmp_path):
        p = tmp_path / "app.txt"
        write_lines(p, ["1,2,3"])
        with pytest.raises(ParseError):
            read_external_similarity(p)
