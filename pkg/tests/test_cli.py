import io
import logging

import pytest

from ontorec.cli import main
from ontorec.config import PipelineConfig, apply_settings, format_config, read_config_file
from ontorec.errors import ConfigError
from ontorec.rules import load_rulebase

SMALL = ["--products", "60", "--categories", "12", "--sessions", "400", "--seed", "5"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def work(tmp_path, capsys):
    wd = str(tmp_path / "w")
    assert run(capsys, "gen-synthetic", "--workdir", wd, *SMALL)[0] == 0
    return tmp_path / "w"


class TestConfig:
    def test_file_then_flags(self, tmp_path, capsys):
        conf = tmp_path / "c.conf"
        conf.write_text("# comment\nmin_sup = 0.2\ndelta = inf\nmin-conf=0.5\n")
        cfg = apply_settings(PipelineConfig(), read_config_file(conf), "file")
        assert (cfg.min_sup, cfg.delta, cfg.min_conf) == (0.2, float("inf"), 0.5)
        cfg = apply_settings(cfg, {"min_sup": "0.3"}, "flags")
        assert cfg.min_sup == 0.3 and cfg._sources["min_sup"] == "flags"

    def test_round_trip(self, tmp_path):
        cfg = apply_settings(PipelineConfig(), {"delta": "inf", "max_len": "4", "strip_query": "no"}, "x")
        conf = tmp_path / "c.conf"
        conf.write_text(format_config(cfg))
        assert apply_settings(PipelineConfig(), read_config_file(conf), "f") == cfg

    @pytest.mark.parametrize("settings", [{"nope": "1"}, {"min_sup": "abc"}, {"strip_query": "maybe"}])
    def test_bad_settings(self, settings):
        with pytest.raises(ConfigError):
            apply_settings(PipelineConfig(), settings, "x")

    def test_bad_line(self, tmp_path):
        conf = tmp_path / "c.conf"
        conf.write_text("min_sup 0.1\n")
        with pytest.raises(ConfigError, match=":1:"):
            read_config_file(conf)

    @pytest.mark.parametrize("argv", [["--min-sup", "1.5"], ["--min-sup", "0"], ["--thresholds", "0.5:0.1:0.1"],
                                      ["--window", "0"]])
    def test_rejected_at_validation(self, capsys, tmp_path, argv):
        code, _, err = run(capsys, "mine", "--workdir", str(tmp_path), *argv)
        assert code == 2 and err.startswith("E_CONFIG: ")

    def test_config_flag(self, capsys, tmp_path):
        conf = tmp_path / "c.conf"
        conf.write_text("min_sup = 7\n")
        code, _, err = run(capsys, "mine", "--config", str(conf))
        assert code == 2 and "min_sup" in err


class TestStages:
    def test_full_run(self, work, capsys, monkeypatch):
        wd = str(work)
        code, out, _ = run(capsys, "preprocess", "--workdir", wd)
        assert code == 0 and "sessions: 400" in out and "removed (crawler)" in out
        code, out, _ = run(capsys, "mine", "--workdir", wd)
        assert code == 0
        assert len(load_rulebase(work / "rules.tsv")) > 0
        code, out, _ = run(capsys, "evaluate", "--workdir", wd, "--folds", "3", "--thresholds", "0.1,0.5")
        assert code == 0 and out == (work / "report.tsv").read_text()
        assert len([l for l in out.splitlines() if not l.startswith(("#", "threshold"))]) == 2

        rb = load_rulebase(work / "rules.tsv")
        rule = max((r for r in rb if len(r.antecedent) == 1 and r.consequent != r.antecedent[0]),
                   key=lambda r: r.confidence)
        url = "/product/" + rule.antecedent[-1][1:]
        monkeypatch.setattr("sys.stdin", io.StringIO(url + "\n"))
        code, out, _ = run(capsys, "recommend", "--workdir", wd)
        assert code == 0 and out.splitlines()
        pages, conf, inst = out.splitlines()[0].split("\t")
        assert float(conf) == pytest.approx(rule.confidence, abs=1e-6)

    def test_delta_zero_keeps_only_revisits(self, work, capsys):
        # distinct products are >= 2 apart, so only a product followed by
        # itself (a later revisit) survives the distance check
        wd = str(work)
        run(capsys, "preprocess", "--workdir", wd)
        code, out, _ = run(capsys, "mine", "--workdir", wd, "--delta", "0")
        assert code == 0
        for line in (work / "frequent.tsv").read_text().splitlines():
            assert len(set(line.split("\t")[0].split())) == 1
        rb = load_rulebase(work / "rules.tsv")
        assert all(set(r.antecedent) == {r.consequent} for r in rb)

    def test_delta_zero_without_revisits_gives_no_rules(self, tmp_path, capsys):
        (tmp_path / "ontology.txt").write_text(
            "concept Top\nconcept A\nconcept B\nisa A Top\nisa B Top\ninstance a A\ninstance b B\n")
        (tmp_path / "annotations.tsv").write_text("/a\ta\n/b\tb\n")
        lines = [f'1.1.1.{u} - - [01/Jan/2024:00:0{i}:00 +0000] "GET /{p} HTTP/1.1" 200 1 "-" "ua"'
                 for u in range(5) for i, p in enumerate("ab")]
        (tmp_path / "access.log").write_text("\n".join(lines) + "\n")
        wd = str(tmp_path)
        assert run(capsys, "preprocess", "--workdir", wd)[0] == 0
        code, out, _ = run(capsys, "mine", "--workdir", wd, "--delta", "0", "--min-sup", "0.5")
        assert code == 0 and "rules: 0" in out
        assert len(load_rulebase(tmp_path / "rules.tsv")) == 0
        assert (tmp_path / "frequent.tsv").read_text() == "a\t5\t1.0\nb\t5\t1.0\n"
        code, out, _ = run(capsys, "mine", "--workdir", wd, "--min-sup", "0.5")
        assert "rules: 1" in out

    def test_rerun_is_byte_identical(self, work, capsys):
        wd = str(work)
        names = ["sessions.tsv", "sequences.tsv", "frequent.tsv", "rules.tsv"]
        snapshots = []
        for _ in range(2):
            run(capsys, "preprocess", "--workdir", wd)
            run(capsys, "mine", "--workdir", wd)
            snapshots.append([(work / n).read_bytes() for n in names])
        assert snapshots[0] == snapshots[1]

    def test_empty_log(self, tmp_path, capsys, caplog):
        (tmp_path / "empty.log").write_text("")
        with caplog.at_level(logging.WARNING, logger="ontorec"):
            code, out, _ = run(capsys, "preprocess", "--workdir", str(tmp_path), "--log", str(tmp_path / "empty.log"))
        assert code == 0 and "sessions: 0" in out
        assert "no sessions" in caplog.text
        assert (tmp_path / "sessions.tsv").read_text() == ""

    def test_missing_log(self, tmp_path, capsys):
        missing = tmp_path / "nowhere.log"
        code, _, err = run(capsys, "preprocess", "--workdir", str(tmp_path), "--log", str(missing))
        assert code == 1
        assert err.startswith("E_MISSING_INPUT: ") and str(missing) in err
        assert len(err.strip().splitlines()) == 1

    def test_malformed_log_reports_line(self, tmp_path, capsys):
        bad = tmp_path / "bad.log"
        bad.write_text('1.2.3.4 - - [01/Jan/2024:00:00:00 +0000] "GET / HTTP/1.1" 200 1 "-" "x"\ngarbage\n')
        code, _, err = run(capsys, "preprocess", "--workdir", str(tmp_path), "--log", str(bad))
        assert code == 1 and err.startswith("E_MALFORMED_LINE: ") and ":2" in err
        code, out, _ = run(capsys, "preprocess", "--workdir", str(tmp_path), "--log", str(bad),
                           "--skip-malformed", "true")
        assert code == 0 and "malformed lines skipped: 1" in out

    def test_recommend_without_rules(self, work, capsys):
        code, _, err = run(capsys, "recommend", "--workdir", str(work), "--rules", str(work / "none.tsv"))
        assert code == 1 and err.startswith("E_MISSING_INPUT")
