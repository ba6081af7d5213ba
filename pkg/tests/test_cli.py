import json
import subprocess
import sys

import numpy as np
import pytest

from opschur import block_matrix as bm
from opschur import cli


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def table(out):
    lines = out.strip().splitlines()
    return {l.split(",")[0]: l.split(",")[1] for l in lines[1:]}


def test_identity_blocks_norm(tmp_path, capsys):
    f = write(tmp_path / "I.json", bm.opmatrix_to_dict(bm.block_identity(4, 2)))
    code, out, _ = run(["norms", f], capsys)
    assert code == 0
    assert float(table(out)["opnorm"]) == pytest.approx(1.0)


def test_row_rank_one_export_tilde_h2(tmp_path, capsys):
    m = str(tmp_path / "row.json")
    code, _, _ = run(["gallery", "row_rank_one", "--export-matrix", m], capsys)
    assert code == 0
    code, out, _ = run(["norms", m], capsys)
    from opschur.gallery import row_rank_one_matrix
    _, x = row_rank_one_matrix()
    assert float(table(out)["tilde_h2"]) == pytest.approx(np.linalg.norm(x) * np.sqrt(8), rel=1e-9)


def test_malformed_json_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, out, err = run(["norms", str(bad)], capsys)
    assert code == 2 and out == "" and "cannot parse" in err


def test_wrong_literal_exit_2(tmp_path, capsys):
    f = write(tmp_path / "m.json", {"type": "discrete"})
    assert run(["norms", f], capsys)[0] == 2


def test_bad_flag_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["norms"])
    assert exc.value.code == 2


def test_unknown_suite_exit_3(capsys):
    assert run(["verify", "nope"], capsys)[0] == 3


def test_verify_subset_exit_0(capsys):
    code, out, _ = run(["verify", "3,bilinear"], capsys)
    assert code == 0
    assert out.count("PASS") == 2


def test_toeplitz_monomial_ladder(tmp_path, capsys):
    f = write(tmp_path / "e.json", {"type": "density", "coeffs": {"1": [[[1, 0]]]}})
    code, out, _ = run(["toeplitz", f, "--ladder", "2,4,8"], capsys)
    rows = out.strip().splitlines()[1:]
    assert code == 0
    for r in rows[:3]:
        assert float(r.split(",")[1]) == pytest.approx(1.0)
    assert rows[3] == "vinf,1"


def test_multiplier_single_atom(tmp_path, capsys):
    W = [[[1, 0], [0, 2]], [[0.5, 0], [0, 0]]]
    f = write(tmp_path / "a.json", {"type": "discrete", "d": 2, "atoms": [{"t": 1.0, "W": W}]})
    code, out, _ = run(["multiplier", f, "--N", "3"], capsys)
    t = table(out)
    nW = np.linalg.norm(np.array([[1, 2], [0.5, 0]]), 2)
    assert code == 0
    assert float(t["upper_bound"]) == pytest.approx(nW)
    assert float(t["lower_bound_right"]) <= nW * (1 + 1e-9)
    assert float(t["lower_bound_left"]) <= nW * (1 + 1e-9)


def test_measure_json_output(tmp_path, capsys):
    f = write(tmp_path / "l.json", {"type": "lazy", "kind": "spectral", "d": 3})
    code, out, _ = run(["measure", f, "--format", "json"], capsys)
    assert code == 0
    assert json.loads(out) == [{"metric": "vinf", "value": 1.0}]


def test_product_and_save(tmp_path, capsys):
    rng = np.random.default_rng(1)
    A = rng.standard_normal((2, 2, 2, 2))
    B = rng.standard_normal((2, 2, 2, 2))
    fa = write(tmp_path / "A.json", bm.opmatrix_to_dict(A))
    fb = write(tmp_path / "B.json", bm.opmatrix_to_dict(B))
    saved = tmp_path / "C.json"
    code, out, _ = run(["product", fa, fb, "--save", str(saved)], capsys)
    assert code == 0 and table(out)["bound_holds"] == "true"
    C = bm.opmatrix_from_dict(json.loads(saved.read_text()))
    np.testing.assert_allclose(C, bm.schur_product(A, B))


def test_config_file(tmp_path, capsys):
    cfg = write(tmp_path / "cfg.json", {"seed": 7, "format": "json", "budget": 4})
    f = write(tmp_path / "a.json", {"type": "discrete", "d": 1, "atoms": [{"t": 0.0, "W": [[[2, 0]]]}]})
    code, out, _ = run(["--config", cfg, "multiplier", f], capsys)
    assert code == 0
    assert json.loads(out)[0] == {"metric": "upper_bound", "value": 2.0}


def test_config_unknown_field(tmp_path, capsys):
    cfg = write(tmp_path / "cfg.json", {"sed": 7})
    code, _, err = run(["--config", cfg, "verify", "4"], capsys)
    assert code == 2 and "sed" in err


def test_config_invalid_value(tmp_path, capsys):
    cfg = write(tmp_path / "cfg.json", {"budget": 0})
    assert run(["--config", cfg, "verify", "4"], capsys)[0] == 2


def test_out_file_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["gallery", "diag_rank_one", "--out", str(a)], capsys)
    run(["gallery", "diag_rank_one", "--out", str(b), "--threads", "1"], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_unknown_gallery_name(capsys):
    assert run(["gallery", "nope"], capsys)[0] == 2


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "opschur.cli", "verify", "bilinear"], capture_output=True, text=True)
    assert res.returncode == 0 and "PASS" in res.stdout
