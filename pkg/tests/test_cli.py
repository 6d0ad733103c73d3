# Core dependencies
import csv
import io

# Package dependencies
import pytest

# Project dependencies
from cat_teleport.cli import main
from cat_teleport.reporting import manifest_path


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def test_fig1_columns_agree(tmp_path):
    """Verify that the closed-form and number-basis columns match"""
    out = tmp_path / "fig1.csv"
    assert main(["fig1", "--alpha", "3", "--points", "50", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 50
    for row in rows:
        assert float(row["F_closed"]) == pytest.approx(float(row["F_numeric"]), abs=1e-6)
    assert out.read_bytes().count(b"\r\n") == 51
    assert manifest_path(out).exists()


def test_fig1_rejects_a_non_positive_time_span(tmp_path, capsys):
    """Verify exit status 2, an error message and no output file"""
    out = tmp_path / "fig1.csv"
    assert main(["fig1", "--t-max", "0", "--out", str(out)]) == 2
    assert "error:" in capsys.readouterr().err
    assert not out.exists()


@pytest.mark.parametrize(
    "arguments",
    [
        ["fig1", "--alpha", "0"],
        ["fig1", "--g0", "0"],
        ["fig2", "--g0", "0"],
        ["teleport", "--seed", "-1"],
        ["teleport", "--seed", str(2**64)],
        ["teleport", "--g0", "-1"],
    ],
)
def test_degenerate_parameters_exit_with_an_error(tmp_path, capsys, arguments):
    """Verify exit status 2 and an error message for a zero amplitude, coupling or bad seed"""
    out = tmp_path / "result.csv"
    assert main([*arguments, "--out", str(out)]) == 2
    assert "error:" in capsys.readouterr().err
    assert not out.exists()


def test_invalid_flags_exit_with_usage(capsys):
    """Verify that argparse errors end with a nonzero status and a usage message"""
    with pytest.raises(SystemExit) as raised:
        main(["fig2", "--points", "many", "--out", "x.csv"])
    assert raised.value.code != 0
    assert "usage:" in capsys.readouterr().err


def test_fig2_maximum_dominates_fixed_time(tmp_path):
    """Verify F_max ≥ F(fixed t) on every row"""
    out = tmp_path / "fig2.csv"
    arguments = ["fig2", "--alpha-min", "1", "--alpha-max", "3", "--points", "3"]
    assert main([*arguments, "--out", str(out)]) == 0
    for row in read_rows(out):
        assert float(row["F_even_max"]) >= float(row["F_even_fixed_t"])
        assert float(row["F_odd_max"]) >= float(row["F_odd_fixed_t"])


def test_fig3_is_byte_identical_for_a_seed(tmp_path):
    """Verify that two fig3 runs with the same seed write the same bytes"""
    arguments = ["fig3", "--alpha-min", "1", "--alpha-max", "2", "--points", "2"]
    arguments += ["--samples", "100", "--seed", "42"]
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main([*arguments, "--out", str(first)]) == 0
    assert main([*arguments, "--workers", "2", "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    rows = read_rows(first)
    assert [float(row["baseline"]) for row in rows] == [pytest.approx(5.0 / 6.0)] * 2


def test_fig3_needs_enough_samples(tmp_path):
    """Verify that fewer than 100 samples is an error"""
    assert main(["fig3", "--samples", "10", "--out", str(tmp_path / "f.csv")]) == 2


def test_pfail_columns(tmp_path):
    """Verify zeros for the odd cat and agreement for the even cat"""
    odd, even = tmp_path / "odd.csv", tmp_path / "even.csv"
    grid = ["--alpha-min", "0.5", "--alpha-max", "2", "--points", "4"]
    assert main(["pfail", *grid, "--theta", "0", "--out", str(odd)]) == 0
    assert main(["pfail", *grid, "--out", str(even)]) == 0
    for row in read_rows(odd):
        assert abs(float(row["p_fail_closed"])) < 1e-12
        assert abs(float(row["p_fail_simulated"])) < 1e-12
    closed = [float(row["p_fail_closed"]) for row in read_rows(even)]
    for row in read_rows(even):
        simulated, closed_value = float(row["p_fail_simulated"]), float(row["p_fail_closed"])
        assert simulated == pytest.approx(closed_value, abs=1e-10)
    assert closed == sorted(closed, reverse=True)


def test_teleport_report(tmp_path, capsys):
    """Verify five rows whose probabilities sum to one and an exact ZeroOdd fidelity"""
    out = tmp_path / "teleport.csv"
    assert main(["teleport", "--alpha", "2", "--theta", "1.0", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert [row["outcome"] for row in rows] == [
        "ZERO_ODD",
        "ODD_ZERO",
        "ZERO_EVEN",
        "EVEN_ZERO",
        "BOTH_ZERO",
    ]
    assert sum(float(row["probability"]) for row in rows) == pytest.approx(1.0, abs=1e-8)
    assert float(rows[0]["fidelity"]) == pytest.approx(1.0, abs=1e-10)
    assert "sampled outcome:" in capsys.readouterr().out


def test_teleport_without_output_prints_only(tmp_path, capsys):
    """Verify that `--out` is optional for a single scenario"""
    assert main(["teleport", "--alpha", "1.5", "--x-re", "1", "--y-re", "0"]) == 0
    assert "ZERO_ODD" in capsys.readouterr().out
    assert list(tmp_path.iterdir()) == []


def test_teleport_heralded_columns(tmp_path, capsys):
    """Verify that `--heralded` adds success probability and heralded fidelity to the JC rows"""
    out = tmp_path / "heralded.csv"
    arguments = ["teleport", "--alpha", "3", "--theta", "3.14159", "--heralded", "--out", str(out)]
    assert main(arguments) == 0
    rows = {row["outcome"]: row for row in read_rows(out)}
    for tag in ("ZERO_EVEN", "EVEN_ZERO"):
        assert 0.0 < float(rows[tag]["p_success"]) <= 1.0
        assert 0.0 <= float(rows[tag]["heralded_fidelity"]) <= 1.0
    assert rows["ZERO_ODD"]["p_success"] == ""
    assert "p_success" in capsys.readouterr().out


def test_feasibility_presets(capsys):
    """Verify the printed bounds for both presets and the unknown-preset error"""
    assert main(["feasibility", "--preset", "cesium"]) == 0
    assert "0.0066 << nbar << 64" in capsys.readouterr().out
    assert main(["feasibility", "--preset", "rydberg"]) == 0
    assert "8.7e+04" in capsys.readouterr().out
    assert main(["feasibility", "--preset", "sodium"]) == 2
    assert main(["feasibility", "--g0", "100"]) == 2


def test_replay_reproduces_the_checksum(tmp_path, capsys):
    """Verify that a manifest replays to the same bytes and that tampering is detected"""
    out = tmp_path / "pfail.csv"
    assert main(["--verbose", "pfail", "--points", "3", "--out", str(out)]) == 0
    assert main(["replay", "--manifest", str(manifest_path(out))]) == 0
    assert "checksum reproduced" in capsys.readouterr().out

    manifest = manifest_path(out)
    text = manifest.read_text(encoding="utf-8")
    manifest.write_text(text.replace('"--points",\n    "3"', '"--points",\n    "4"'), "utf-8")
    assert main(["replay", "--manifest", str(manifest)]) == 1
