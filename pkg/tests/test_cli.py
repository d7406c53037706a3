import json

import pytest

from darkstates import __version__
from darkstates.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_dim_table(capsys):
    code, out, _ = run(capsys, "dim", "--n-max", "8")
    assert code == 0
    doc = json.loads(out)
    assert doc["artifact_version"] == __version__ and doc["schema_version"] == 1
    assert doc["parameters"]["n_max"] == 8
    row = next(r for r in doc["result"] if (r["n"], r["k"]) == (4, 2))
    assert row["dark_dim"] == 2


def test_dark_basis_with_couplings(capsys):
    code, out, _ = run(capsys, "dark-basis", "--n", "2", "--k", "1", "--g", "3/1,5/1")
    assert code == 0
    assert json.loads(out)["result"]["vectors"] == [{"01": "-3/1", "10": "5/1"}]


def test_csv_output_has_header_block(capsys):
    code, out, _ = run(capsys, "matchings", "--n", "4", "--k", "2", "--format", "csv")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "# command: matchings" and f"# artifact_version: {__version__}" in lines
    assert lines[-3:] == ["matching", "(12)(34)", "(14)(23)"]


def test_output_file_and_determinism(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["quanta-check", "--state", "100:1/3,010:2/3,001:2/3", "--epsilon", "1/8,1/16",
                     "--seed", "3", "-o", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    doc = json.loads(paths[0].read_text())
    assert doc["parameters"]["seed"] == 3
    assert doc["result"]["halving_ratios"][0] == pytest.approx(0.5)


def test_witness_and_singlets(capsys):
    code, out, _ = run(capsys, "witness", "--n", "2", "--k", "1")
    assert json.loads(out)["result"]["witnesses"][0]["amplitudes"] == {"01": "1/2", "10": "1/2"}
    code, out, _ = run(capsys, "singlet-decompose", "--state", "0011:1,0110:-1,1001:-1,1100:1")
    assert code == 0 and json.loads(out)["result"]["coefficients"] == ["1/1", "1/1"]
    code, out, _ = run(capsys, "singlet-decompose", "--n", "6", "--k", "3", "--basis-index", "4")
    assert code == 0 and json.loads(out)["result"]["residual"] == "0/1"


def test_evolve_and_scan(capsys):
    code, out, _ = run(capsys, "evolve", "--n", "4", "--k", "2", "--T", "5", "--steps", "10", "--format", "csv")
    assert code == 0 and "time,photon_expectation,atomic_excitation" in out
    code, out, _ = run(capsys, "evolve", "--state", "00:1", "--model", "tc", "--T", "20", "--steps", "50")
    assert json.loads(out)["result"]["summary"]["max_leakage"] > 1e-4
    code, out, _ = run(capsys, "almost-dark-scan", "--T", "10", "--steps", "50")
    doc = json.loads(out)["result"]
    assert code == 0 and len(doc["points"]) == 3


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--n-max", "6")
    assert code == 0
    assert all(c["ok"] for c in json.loads(out)["result"]["checks"])


@pytest.mark.parametrize(
    "argv",
    [
        ["dark-basis", "--n", "2", "--k", "5"],
        ["dark-basis", "--n", "2", "--k", "1", "--g", "1/0,1"],
        ["witness", "--n", "3", "--k", "2", "--target", "10"],
        ["singlet-decompose", "--state", "01:1,10:1"],
        ["quanta-check", "--state", "100:1", "--epsilon", "4"],
        ["evolve", "--state", "11:1", "--steps", "0"],
        ["matchings", "--n", "3", "--k", "2"],
    ],
)
def test_validation_errors_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err.startswith("darkstates:")


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["dim", "--bogus"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 2
