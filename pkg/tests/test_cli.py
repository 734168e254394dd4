import csv

import pytest

from haloproj.cli import SpecError, execute, load_spec, main, parse_spec, read_trace_csv

MINIMAL = """
name = "c05"
dimension = 1
x0 = [1]

[operator]
kind = "contraction"
alpha = 0.5
"""


def test_parse_minimal_fills_defaults():
    spec = parse_spec(MINIMAL)
    assert spec.name == "c05" and spec.dimension == 1 and spec.x0 == (1.0,)
    assert spec.operator == {"kind": "contraction", "alpha": 0.5}
    assert (spec.tol_residual, spec.divergence_radius, spec.max_iter) == (1e-8, 1e6, 10000)
    assert spec.emit_baseline is False


@pytest.mark.parametrize("doc, key", [
    (MINIMAL.replace("alpha = 0.5", "alpha = 1.5"), "alpha"),
    (MINIMAL.replace("dimension = 1", "dimension = 3").replace("x0 = [1]", "x0 = [1, 2]"), "x0"),
    (MINIMAL.replace('"contraction"', '"resolvent"'), "operator.kind"),
    (MINIMAL.replace('"contraction"', '"subgradient_custom"'), "operator.kind"),
    (MINIMAL.replace("x0 = [1]", "x0 = [nan]"), "x0"),
    (MINIMAL.replace("x0 = [1]", "x0 = [1]\ntol_residual = inf"), "tol_residual"),
    (MINIMAL.replace("x0 = [1]", "x0 = [1]\nmax_iter = 0"), "max_iter"),
    (MINIMAL.replace("x0 = [1]", "x0 = [1]\ncolour = 3"), "colour"),
    (MINIMAL.replace('name = "c05"', 'name = "../c05"'), "name"),
    (MINIMAL.replace("dimension = 1\n", ""), "dimension"),
])
def test_parse_errors_name_the_key(doc, key):
    with pytest.raises(SpecError) as info:
        parse_spec(doc)
    assert info.value.key == key
    assert key in str(info.value)


def test_parse_translation_direction():
    doc = """
name = "t"
dimension = 2
x0 = [0, 0]
[operator]
kind = "translation"
alpha = 2
direction = [0.6, 0.8]
"""
    spec = parse_spec(doc)
    assert spec.operator["direction"] == (0.6, 0.8)
    with pytest.raises(SpecError, match="direction"):
        parse_spec(doc.replace("[0.6, 0.8]", "[1, 1]"))


def test_sign_requires_one_dimension():
    with pytest.raises(SpecError) as info:
        parse_spec('name="s"\ndimension=2\nx0=[0,0]\n[operator]\nkind="sign_paper_instance"\n')
    assert info.value.key == "dimension"


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def summary(path):
    return dict(line.split(": ", 1) for line in path.read_text().splitlines())


def test_execute_contraction(tmp_path, problems_dir):
    spec = load_spec(problems_dir / "c05.toml")
    assert execute(spec, tmp_path) == 0
    table = rows(tmp_path / "c05.trace.csv")
    assert table[0] == ["n", "residual", "dist_to_x0", "num_constraints", "qp_working_set_changes", "x0"]
    info = summary(tmp_path / "c05.summary.txt")
    assert info["run.status"] == "Converged"
    assert abs(float(info["run.final_point"])) <= 1e-6
    assert len(table) == int(info["run.iterations"]) + 2


def test_execute_sign(tmp_path, problems_dir):
    assert execute(load_spec(problems_dir / "sign.toml"), tmp_path) == 2
    info = summary(tmp_path / "sign.summary.txt")
    assert info["run.status"] == "Infeasible"
    assert info["run.infeasible_at"] == "2"


def test_execute_translation(tmp_path, problems_dir):
    assert execute(load_spec(problems_dir / "translation.toml"), tmp_path) == 3


def test_execute_max_iter(tmp_path):
    spec = parse_spec(MINIMAL.replace("x0 = [1]", "x0 = [1]\nmax_iter = 3"))
    assert execute(spec, tmp_path) == 4


def test_execute_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert execute(parse_spec(MINIMAL), blocker / "sub") == 1


def test_numbers_use_17_digits(tmp_path):
    execute(parse_spec(MINIMAL), tmp_path)
    table = rows(tmp_path / "c05.trace.csv")
    assert float(table[2][5]) == 0.75
    raw = (tmp_path / "c05.trace.csv").read_bytes()
    assert b"\r" not in raw
    x5 = read_trace_csv(tmp_path / "c05.trace.csv")[0][5, 0]
    assert x5 == 0.75**5


def test_large_dimension_omits_coordinates(tmp_path):
    doc = f'name="big"\ndimension=17\nx0={[1.0] * 17}\nmax_iter=3\n[operator]\nkind="contraction"\nalpha=0.5\n'
    execute(parse_spec(doc), tmp_path)
    assert rows(tmp_path / "big.trace.csv")[0] == ["n", "residual", "dist_to_x0", "num_constraints",
                                                   "qp_working_set_changes"]


def test_baseline_output(tmp_path, problems_dir):
    assert main(["run", str(problems_dir / "c05.toml"), "--out", str(tmp_path), "--baseline"]) == 0
    assert (tmp_path / "c05.baseline.trace.csv").exists()
    info = summary(tmp_path / "c05.summary.txt")
    assert info["baseline.status"] == "MaxIterReached"
    assert info["baseline.num_constraints"] == "0"


@pytest.mark.parametrize("name", ["c05", "translation", "sign", "ell2_e1e2"])
def test_rerun_is_byte_identical_and_verifies(tmp_path, problems_dir, name, capsys):
    spec_file = problems_dir / f"{name}.toml"
    main(["run", str(spec_file), "--out", str(tmp_path / "a")])
    main(["run", str(spec_file), "--out", str(tmp_path / "a2")])
    first = (tmp_path / "a" / f"{name}.trace.csv").read_bytes()
    assert first == (tmp_path / "a2" / f"{name}.trace.csv").read_bytes()
    assert main(["verify", str(tmp_path / "a" / f"{name}.trace.csv"), str(spec_file)]) == 0
    assert "0 violation(s)" in capsys.readouterr().out


def test_verify_detects_tampering(tmp_path, problems_dir, capsys):
    spec_file = problems_dir / "c05.toml"
    main(["run", str(spec_file), "--out", str(tmp_path)])
    path = tmp_path / "c05.trace.csv"
    table = rows(path)
    table[3][5] = "1"  # x_2 replaced by x0
    with open(path, "w", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(table)
    assert main(["verify", str(path), str(spec_file)]) == 1


def test_main_reports_bad_spec(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text(MINIMAL.replace("alpha = 0.5", "alpha = 1.5"))
    assert main(["run", str(bad), "--out", str(tmp_path)]) == 1
    assert "alpha" in capsys.readouterr().err
