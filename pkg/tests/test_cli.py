import csv
import json
import subprocess
import sys
import textwrap

import pytest

from darboux_mellin.cli import main
from darboux_mellin.config import bundled_config_path, load_config


def run(tmp_path, *args):
    return main(list(args) + ["--out", str(tmp_path)])


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def write(tmp_path, text, name="job.toml"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(text))
    return str(path)


@pytest.mark.parametrize("command", ["mellin", "expand", "eval", "verify", "zeros", "lie"])
def test_bundled_configs_succeed(tmp_path, command):
    assert run(tmp_path, command) == 0


def test_expand_rows(tmp_path):
    assert run(tmp_path, "expand", "--order", "3") == 0
    assert rows(tmp_path / "expand.csv") == [
        ["mu_num", "mu_den", "log_power", "coefficient"],
        ["1", "1", "0", "0.5"],
        ["3", "1", "0", "-0.5"],
    ]
    cert = json.loads((tmp_path / "tail_certificate.json").read_text())
    assert {"s_p", "rho", "C_total", "d"} <= set(cert)
    assert cert["C_total"] == 0
    assert run(tmp_path, "expand", "--order", "1") == 0
    assert rows(tmp_path / "expand.csv")[1:] == [["1", "1", "0", "0.5"]]


def test_mellin_rows(tmp_path):
    assert run(tmp_path, "mellin") == 0
    assert rows(tmp_path / "mellin.csv") == [
        ["pole", "multiplicity", "coefficient_num", "coefficient_den"],
        ["-1", "1", "-1", "1"],
        ["-1", "2", "1", "1"],
        ["-2", "1", "1", "1"],
    ]


def test_mellin_with_real_coefficients(tmp_path):
    cfg = write(tmp_path, """
        [chart]
        lambda1 = 1
        lambda2 = 1
        [[forms]]
        dx = [[3, 1, 0.25]]
        envelope = 16
    """)
    assert run(tmp_path, "mellin", "--config", cfg) == 0
    table = rows(tmp_path / "mellin.csv")
    assert table[0] == ["pole", "multiplicity", "coefficient"]
    assert table[1] == ["-1", "1", "0.125"]


def test_eval_columns_and_bounds(tmp_path):
    assert run(tmp_path, "eval", "--t", "0.2,0.5") == 0
    table = rows(tmp_path / "eval.csv")
    assert table[0] == ["t", "partial_sum", "tail_bound"]
    assert len(table) == 3
    assert all(float(r[2]) >= 0 for r in table[1:])


def test_rational_target_and_scale(tmp_path):
    cfg = write(tmp_path, """
        [chart]
        lambda1 = 1
        lambda2 = 1
        scale = 2.0
        [rational]
        numerator = [1]
        poles = [[-1, 1], [-3, 1]]
        [engine]
        order = 1
        t = [1.0]
    """)
    assert run(tmp_path, "eval", "--config", cfg) == 0
    t, partial, bound = rows(tmp_path / "eval.csv")[1]
    assert float(partial) == pytest.approx(0.25)  # level 1.0 / 2 = 0.5, t/2 at t = 0.5
    assert float(bound) >= 0.5 ** 3 / 2


def test_integral_combination_cancels(tmp_path):
    cfg = write(tmp_path, """
        [chart]
        lambda1 = 1
        lambda2 = 1
        [[forms]]
        dx = [[1, 0, 1]]
        [[forms]]
        dx = [[0, 1, 1]]
        [[integrals]]
        coefficient = 1
        forms = [0, 1]
        [[integrals]]
        coefficient = -1
        forms = [0, 1]
    """)
    assert run(tmp_path, "zeros", "--config", cfg) == 0
    assert json.loads((tmp_path / "zeros.json").read_text())["status"] == "zero_to_order"


def test_verify_on_forms_target(tmp_path):
    cfg = write(tmp_path, """
        [chart]
        lambda1 = 2
        lambda2 = 3
        M = 1
        [[forms]]
        dx = [[1, 1, 1], [2, 0, "1/2"]]
        dy = [[1, 1, -1]]
        [[forms]]
        dx = [[0, 2, 1]]
        [engine]
        t = [0.2, 0.6]
    """)
    assert run(tmp_path, "verify", "--config", cfg) == 0
    table = rows(tmp_path / "verify.csv")
    assert table[0] == ["t", "symbolic", "oracle", "abs_err", "rel_err", "pass"]
    assert all(r[5] == "true" for r in table[1:])


def test_verify_failure_exit_code(tmp_path):
    assert run(tmp_path, "verify", "--tol", "1e-30") == 1
    table = rows(tmp_path / "verify.csv")
    assert any(r[5] == "false" for r in table[1:])


def test_zeros_inconclusive_exit_code(tmp_path):
    cfg = write(tmp_path, """
        [chart]
        lambda1 = 1
        lambda2 = 1
        [[forms]]
        dx = [[1, 1, 1], [2, 1, 1]]
        truncation = 4
        complete = false
    """)
    assert run(tmp_path, "zeros", "--config", cfg) == 1
    report = json.loads((tmp_path / "zeros.json").read_text())
    assert report["status"] == "inconclusive" and report["envelope_estimated"]


def test_lie_non_quasi_unipotent(tmp_path):
    cfg = write(tmp_path, """
        [lie]
        generators = 2
        degree = 2
        matrix = [[2, 0], [0, 1]]
    """)
    assert run(tmp_path, "lie", "--config", cfg) == 1
    table = rows(tmp_path / "lie.csv")
    assert table[1] == ["1", "2", "false", "z - 2"]


def test_missing_config(tmp_path, capsys):
    assert run(tmp_path, "expand", "--config", str(tmp_path / "nope.toml")) == 2
    assert "config not found" in capsys.readouterr().err


def test_unknown_key_is_line_referenced(tmp_path, capsys):
    cfg = write(tmp_path, """
        [chart]
        lambda1 = 1
        lambda2 = 1

        [engine]
        order = 2
        colour = "blue"
    """)
    assert run(tmp_path, "expand", "--config", cfg) == 2
    err = capsys.readouterr().err
    assert f"{cfg}:8:" in err and "unknown key 'colour'" in err


def test_unknown_section_and_syntax_errors(tmp_path, capsys):
    assert run(tmp_path, "expand", "--config", write(tmp_path, "[extra]\na = 1\n")) == 2
    assert "unknown section" in capsys.readouterr().err
    assert run(tmp_path, "expand", "--config", write(tmp_path, "[chart\n")) == 2
    assert "line 1" in capsys.readouterr().err


def test_physical_constraints_rechecked(tmp_path, capsys):
    bad_envelope = write(tmp_path, """
        [chart]
        lambda1 = 1
        lambda2 = 1
        [[forms]]
        dx = [[4, 4, 3.0]]
        envelope = 4
    """)
    assert run(tmp_path, "mellin", "--config", bad_envelope) == 2
    assert "envelope violated" in capsys.readouterr().err
    low_index = write(tmp_path, """
        [chart]
        lambda1 = 1
        lambda2 = 1
        M = 1
        [[forms]]
        dx = [[-2, 0, 1]]
    """)
    assert run(tmp_path, "mellin", "--config", low_index) == 2
    assert "must exceed -M" in capsys.readouterr().err
    negative = write(tmp_path, """
        [chart]
        lambda1 = -1
        lambda2 = 1
    """)
    assert run(tmp_path, "mellin", "--config", negative) == 2


def test_bad_flags(tmp_path):
    assert run(tmp_path, "eval", "--t", "0.5,abc") == 2
    assert run(tmp_path, "eval", "--t", "1.5") == 2
    assert run(tmp_path, "expand", "--order", "0") == 2
    assert run(tmp_path, "eval", "--precision", "20") == 2


def test_outputs_are_byte_identical(tmp_path):
    for command in ("expand", "verify", "eval", "mellin", "zeros", "lie"):
        a, b = tmp_path / f"{command}-a", tmp_path / f"{command}-b"
        assert main([command, "--out", str(a)]) == main([command, "--out", str(b)])
        files = sorted(p.name for p in a.iterdir())
        assert files == sorted(p.name for p in b.iterdir())
        for name in files:
            assert (a / name).read_bytes() == (b / name).read_bytes()


def test_precision_flag_changes_nothing_visible(tmp_path):
    assert run(tmp_path / "a", "eval") == 0
    assert run(tmp_path / "b", "eval", "--precision", "256") == 0
    assert (tmp_path / "a" / "eval.csv").read_text() == (tmp_path / "b" / "eval.csv").read_text()


def test_bundled_configs_parse():
    for name in ("mellin", "expand", "eval", "verify", "zeros", "lie"):
        cfg = load_config(bundled_config_path(name))
        assert cfg.path.endswith(f"{name}.toml")


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "darboux_mellin", "expand", "--out", str(tmp_path)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert (tmp_path / "expand.csv").exists()
