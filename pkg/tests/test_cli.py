import io

import pytest

from cdsqc.cli import EXIT_ABORT, EXIT_CONFIG, EXIT_OK, UsageError, cli_main, parse_message


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli_main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


class TestMessages:
    def test_hex_and_binary(self):
        assert parse_message("a5", 8) == "10100101"
        assert parse_message("0xA5", 8) == "10100101"
        assert parse_message("0b101", 3) == "101"

    @pytest.mark.parametrize("text, bits", [("zz", 8), ("a5", 4), ("0b12", 2), ("0b", 0)])
    def test_bad(self, text, bits):
        with pytest.raises(UsageError):
            parse_message(text, bits)


class TestRun:
    def test_honest(self):
        code, out, _ = _run("run", "--n", "4", "--message", "a5", "--seed", "3")
        assert code == EXIT_OK
        assert "aborted=false" in out and "delivered=exact" in out and "eta1=40% eta2=33.33%" in out

    def test_without_decoys_convention(self):
        _, out, _ = _run("run", "--n", "4", "--convention", "without-decoys")
        assert "eta1=100% eta2=66.67%" in out

    def test_attack_aborts(self):
        code, out, _ = _run("run", "--n", "32", "--attack", "intercept-resend", "--attack-links", "charlie_to_bob")
        assert code == EXIT_ABORT and "aborted=true" in out

    def test_cbdsqc_needs_two_messages(self):
        code, _, err = _run("run", "--protocol", "cbdsqc", "--n", "2", "--message", "f")
        assert code == EXIT_CONFIG and "2 --message" in err
        code, out, _ = _run("run", "--protocol", "cbdsqc", "--n", "2", "--message", "f", "--message", "3")
        assert code == EXIT_OK and "delivered=exact" in out

    @pytest.mark.parametrize(
        "argv",
        [["--n", "1"], ["--message", "zz"], ["--channel", "nonsense"], ["--repeat", "0"], ["--decoy-fraction", "1.5"],
         ["--protocol", "warp"], ["--attack-links", "moon"]],
    )
    def test_config_errors(self, argv):
        code, _, _ = _run("run", *argv)
        assert code == EXIT_CONFIG

    def test_repeat_writes_files(self, tmp_path):
        code, out, _ = _run("run", "--n", "2", "--repeat", "3", "--out", str(tmp_path / "t.jsonl"))
        assert code == EXIT_OK and len(out.splitlines()) == 3
        assert sorted(p.name for p in tmp_path.iterdir()) == ["t.0.jsonl", "t.1.jsonl", "t.2.jsonl"]


class TestReport:
    def test_table1(self, tmp_path):
        target = tmp_path / "table.csv"
        code, out, _ = _run("report", "table1", "--csv", "--out", str(target))
        assert code == EXIT_OK and target.read_text() == out
        rows = out.splitlines()
        assert len(rows) == 6
        assert "100%,66.67%,40%,33.33%" in rows[1 + 1]

    def test_detection(self):
        code, out, _ = _run("report", "detection", "--n", "16", "--trials", "20")
        assert code == EXIT_OK
        rates = {line.split(":")[0].split()[0]: float(line.split()[-1]) for line in out.splitlines()[1:]}
        assert rates["none"] == 0.0
        assert rates["intercept_resend_random_basis"] > 0.9 and rates["bell_pairing"] > 0.9


class TestReplay:
    def test_identical(self, tmp_path):
        path = tmp_path / "t.jsonl"
        assert _run("run", "--n", "3", "--seed", "9", "--out", str(path))[0] == EXIT_OK
        code, out, _ = _run("replay", str(path))
        assert code == EXIT_OK
        assert "with_decoys: c=6 q=15 b=3 eta1=40% eta2=33.33%" in out
        assert out.rstrip().endswith("replay identical")

    def test_tampered(self, tmp_path):
        path = tmp_path / "t.jsonl"
        _run("run", "--n", "3", "--out", str(path))
        path.write_text(path.read_text().replace('"qubit_cost":6', '"qubit_cost":7', 1))
        code, out, _ = _run("replay", str(path))
        assert code == EXIT_CONFIG and "DIFFERS" in out

    def test_missing_file(self, tmp_path):
        assert _run("replay", str(tmp_path / "none.jsonl"))[0] == EXIT_CONFIG

    def test_malformed(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text("{not json\n")
        code, _, err = _run("replay", str(path))
        assert code == EXIT_CONFIG and "malformed" in err
