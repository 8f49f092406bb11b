import csv
import io
import json

import pytest

from cmtori import cli
from cmtori.quadratic import BiquadraticCM, QuadraticField


def run(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSpecGrammar:
    @pytest.mark.parametrize(
        "text",
        ["iq:-1", "iq:-105", "biq:17,1", "biq:2,3", "prod:iq:-1;iq:-2", "prod:biq:17,1;iq:-5"],
    )
    def test_round_trip(self, text):
        spec = cli.parse_field_spec(text)
        assert cli.render_field_spec(spec) == text

    def test_components(self):
        spec = cli.parse_field_spec("prod:iq:-1;biq:17,1")
        assert spec.components == (QuadraticField(-1), BiquadraticCM(17, 1))

    @pytest.mark.parametrize(
        "text,fragment",
        [
            ("biq:4,1", "4 not squarefree"),
            ("iq:-12", "-12 not squarefree"),
            ("iq:5", "must be negative"),
            ("biq:1,1", "must be >= 2"),
            ("xyz:3", "prefix"),
            ("biq:17", "expected biq:<d>,<j>"),
        ],
    )
    def test_errors_annotated(self, text, fragment):
        with pytest.raises(cli.SpecParseError) as exc:
            cli.parse_field_spec(text)
        assert fragment in str(exc.value)
        assert text in str(exc.value)


class TestInfo:
    def test_json_report(self, capsys):
        code, out, _ = run(capsys, "info", "biq:17,1", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert payload["schema"] == 1
        row = payload["rows"][0]
        assert row["h_T"] == 2
        assert row["h_T1"] == 1
        assert row["tamagawa"] == 2
        assert row["e_local"] == {"2": 2}
        assert row["S"] == [2]
        assert row["route_agreement"] is True

    def test_iq_minus_1(self, capsys):
        code, out, _ = run(capsys, "info", "iq:-1", "--format", "json")
        assert code == 0
        row = json.loads(out)["rows"][0]
        assert row["h_T"] == 1 and row["tamagawa"] == 1

    def test_parse_error_exit_1(self, capsys):
        code, _, err = run(capsys, "info", "biq:4,1")
        assert code == 1
        assert "4 not squarefree" in err

    def test_insufficient_invariants_exit_2(self, capsys):
        code, _, err = run(capsys, "info", "biq:15,7")
        assert code == 2
        assert "Q unknown for biq:15,7" in err and "--Q" in err

    def test_q_override(self, capsys):
        code, out, _ = run(capsys, "info", "biq:15,7", "--Q", "1", "--format", "json")
        assert code == 0
        row = json.loads(out)["rows"][0]
        assert row["h_T"] == 4 and row["h_K"] == 8

    def test_usage_error_exit_1(self, capsys):
        code, _, _ = run(capsys, "info")
        assert code == 1

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, out, _ = run(capsys, "info", "iq:-5", "--format", "json", "--out", str(path))
        assert code == 0 and out == ""
        payload = json.loads(path.read_text(encoding="utf-8"))
        assert payload["rows"][0]["h_T"] == 2


class TestTable:
    def test_family_sqrtp_1(self, capsys):
        code, out, _ = run(
            capsys, "table", "--family", "sqrtp-1", "--bound", "20", "--format", "json"
        )
        assert code == 0
        rows = json.loads(out)["rows"]
        assert [r["p"] for r in rows] == [2, 3, 5, 7, 11, 13, 17, 19]
        assert [r["h_pipeline"] for r in rows] == [1, 1, 1, 1, 1, 1, 2, 1]
        assert all(r["route_agreement"] for r in rows)
        assert all(r["h_family"] == r["h_pipeline"] for r in rows)

    def test_family_skip_rows(self, capsys):
        code, out, _ = run(
            capsys, "table", "--family", "sqrtp-3", "--bound", "5", "--format", "json"
        )
        rows = json.loads(out)["rows"]
        p3 = next(r for r in rows if r["p"] == 3)
        assert "skipped" in p3["note"]
        code, out, _ = run(
            capsys, "table", "--family", "sqrtp-2", "--bound", "4", "--format", "json"
        )
        rows = json.loads(out)["rows"]
        assert "skipped" in next(r for r in rows if r["p"] == 2)["note"]

    def test_biq_range(self, capsys):
        code, out, _ = run(
            capsys, "table", "--family", "biq-range", "--bound", "10", "--format", "json"
        )
        assert code == 0
        rows = json.loads(out)["rows"]
        assert all(r["route_agreement"] for r in rows)
        seen = {(r["d"], r["j"]) for r in rows}
        assert (2, 1) in seen and (7, 6) in seen

    def test_json_deterministic(self, capsys):
        _, out1, _ = run(capsys, "table", "--family", "sqrtp-1", "--bound", "30", "--format", "json")
        _, out2, _ = run(capsys, "table", "--family", "sqrtp-1", "--bound", "30", "--format", "json")
        assert out1 == out2

    def test_csv_json_same_content(self, capsys):
        _, out_json, _ = run(
            capsys, "table", "--family", "sqrtp-1", "--bound", "20", "--format", "json"
        )
        _, out_csv, _ = run(
            capsys, "table", "--family", "sqrtp-1", "--bound", "20", "--format", "csv"
        )
        json_rows = json.loads(out_json)["rows"]
        reader = csv.reader(io.StringIO(out_csv))
        header = next(reader)
        for json_row, csv_row in zip(json_rows, reader, strict=True):
            for key, cell in zip(header, csv_row, strict=True):
                expected = json_row[key]
                if isinstance(expected, str):
                    assert cell == expected
                else:
                    assert json.loads(cell) == expected


class TestCount:
    def test_shimura(self, capsys):
        code, out, _ = run(
            capsys,
            "count", "--subject", "shimura", "biq:17,1", "--n", "3",
            "--assert-noncompact", "--format", "json",
        )
        assert code == 0
        assert json.loads(out)["rows"][0]["count"] == 2
        code, out, _ = run(
            capsys,
            "count", "--subject", "shimura", "biq:17,1", "--n", "2",
            "--assert-noncompact", "--format", "json",
        )
        assert json.loads(out)["rows"][0]["count"] == 1

    def test_shimura_needs_assertion(self, capsys):
        code, _, err = run(capsys, "count", "--subject", "shimura", "biq:17,1", "--n", "3")
        assert code == 2
        assert "not compact" in err

    def test_isogeny(self, capsys):
        code, out, _ = run(capsys, "count", "--subject", "isogeny", "iq:-5", "--format", "json")
        row = json.loads(out)["rows"][0]
        assert (row["lambda_count"], row["similitude_count"]) == (1, 2)

    def test_cm_points_level(self, capsys):
        code, out, _ = run(
            capsys,
            "count", "--subject", "cm-points", "biq:2,1", "--index-U", "5", "--format", "json",
        )
        assert json.loads(out)["rows"][0]["count"] == 5

    def test_inconsistent_level_exit_2(self, capsys):
        code, _, err = run(
            capsys,
            "count", "--subject", "cm-points", "biq:2,1", "--index-U", "2", "--mu-index", "4",
        )
        assert code == 2


class TestVerify:
    def test_hilbert_scope(self, capsys):
        code, out, _ = run(capsys, "verify", "--scope", "hilbert")
        assert code == 0
        assert "PASS hilbert: closed form vs exhaustive oracle" in out

    def test_failure_exits_3(self, capsys, monkeypatch):
        monkeypatch.setattr(
            cli, "run_verify", lambda scope, bound=None: [("doomed", False, "detail")]
        )
        code, out, _ = run(capsys, "verify", "--scope", "hilbert")
        assert code == 3
        assert "FAIL doomed" in out

    def test_padic_scope(self, capsys):
        code, out, _ = run(capsys, "verify", "--scope", "padic-lemmas")
        assert code == 0
        assert "PASS unramified square structure f=2" in out
        assert "PASS ramified quadratic count f=3" in out
        assert out.count("PASS -1 is a unit norm") == 6
        assert out.count("PASS 8th-cyclotomic norms") == 3

    def test_biquadratic_scope(self, capsys):
        code, out, _ = run(capsys, "verify", "--scope", "biquadratic", "--bound", "20")
        assert code == 0
        assert "PASS biquadratic consistency sweep" in out
