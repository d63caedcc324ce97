import json

import pytest

from mbarnes.cli import main, parse_assignment, format_complex

B1 = "MB[z; Gamma(a1-z)*Gamma(a2-z)*Gamma(b1+z)*Gamma(b2+z)]"
ADD = "MB[z; phase(+1)*Gamma(a-z)*Gamma(b1+z)*Gamma(b2+z)/Gamma(g+z)]"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def assigns(**kw):
    out = []
    for k, v in kw.items():
        out += ["--assign", f"{k}={v}"]
    return out


def test_simplify_barnes1(capsys):
    code, out, _ = run(capsys, "simplify", B1)
    assert code == 0
    assert "Gamma(a1+b1)*Gamma(a1+b2)*Gamma(a2+b1)*Gamma(a2+b2)/Gamma(a1+a2+b1+b2)" in out
    assert out.count("NotNonpositiveInteger") == 4


def test_simplify_nomatch(capsys):
    code, _, err = run(capsys, "simplify", "MB[z; Gamma(a-z)]")
    assert code == 2
    assert "Barnes1" in err


def test_simplify_additional(capsys):
    code, out, _ = run(capsys, "simplify", ADD)
    assert code == 0
    assert "exp(I*pi*(a))" in out
    assert "PositiveRealPart(-a-b1-b2+g)" in out


def test_parse_error_exit(capsys):
    code, _, err = run(capsys, "simplify", "MB[z; Gamma(z+z)]")
    assert code == 2


def test_eval_barnes1(capsys):
    code, out, _ = run(capsys, "eval", B1, *assigns(a1=0.5, a2=0.5, b1=0.5, b2=0.5),
                       "--x0", "0", "--tol", "1e-10")
    assert (code, out.strip()) == (0, "1.0000000000+0.0000000000i")


def test_eval_additional(capsys):
    code, out, _ = run(capsys, "eval", ADD, *assigns(a=0.5, b1=0.5, b2=0.5, g=2))
    assert (code, out.strip()) == (0, "0.0000000000+2.2567583342i")


def test_eval_closed_form(capsys):
    code, out, _ = run(capsys, "eval", "Gamma(a)*Gamma(b)/Gamma(a+b)", *assigns(a=0.5, b=0.5))
    assert (code, out.strip()) == (0, "3.1415926536+0.0000000000i")


def test_eval_divergent(capsys):
    code, _, err = run(capsys, "eval", "MB[z; phase(+1)*pow(rho)*Gamma(-z)*Gamma(lam+z)]",
                       *assigns(rho=0.5, lam=0.5))
    assert code == 3
    assert "Divergent at z → −i∞" in err


def test_eval_missing_symbol(capsys):
    code, _, _ = run(capsys, "eval", B1, *assigns(a1=0.5))
    assert code == 1


def test_analyze(capsys):
    code, out, _ = run(capsys, "analyze", ADD, *assigns(a=0.5, b1=0.5, b2=0.5, g=2))
    assert code == 0
    assert "down: |Im z|^(-1.5) convergent" in out
    _, out, _ = run(capsys, "analyze", B1, *assigns(a1=0.5, a2=0.5, b1=0.5, b2=0.5))
    assert "exponential decay both directions" in out
    _, out, _ = run(capsys, "analyze", "MB[z; Gamma(a-z)*Gamma(b+z)]", *assigns(a=-0.3, b=0.1))
    assert out.strip() == "no straight contour: Re(a+b) = -0.2 ≤ 0"


def test_derive_b2(capsys):
    code, out, _ = run(capsys, "derive-b2",
                       "MB[z; Gamma(a1-z)*Gamma(a2-z)*Gamma(b1+z)*Gamma(b2+z)*Gamma(b3+z)"
                       "/Gamma(a1+a2+b1+b2+b3+z)]")
    assert code == 0
    assert out.strip().endswith("equal: yes")


def test_verify_empty(capsys):
    code, out, err = run(capsys, "verify", "--rule", "Barnes2", "--samples", "0")
    assert code == 0 and out == ""


def test_verify_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.jsonl", tmp_path / "b.jsonl", tmp_path / "c.jsonl"]
    for p, jobs in zip(paths, ("1", "1", "3")):
        code, _, _ = run(capsys, "verify", "--rule", "Additional", "--samples", "6",
                         "--seed", "5", "--jobs", jobs, "--out", str(p))
        assert code == 0
    texts = [p.read_text() for p in paths]
    assert texts[0] == texts[1] == texts[2]
    recs = [json.loads(line) for line in texts[0].splitlines()]
    assert len(recs) == 6 and all(r["pass"] for r in recs)
    assert {"integrand", "rule", "assignment", "closedValue", "quadValue", "absErr", "relErr",
            "pass", "quadMeta"} <= set(recs[0])


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 1
    code, _, _ = run(capsys, "eval", B1, "--assign", "a1=zz")
    assert code == 1


def test_parse_assignment():
    assert parse_assignment(["a=1.5-0.25i", "b=2", "c=-i", "d=0.5i"]) == {
        "a": 1.5 - 0.25j, "b": 2, "c": -1j, "d": 0.5j}


def test_format_complex():
    assert format_complex(-0.0 - 0.0j) == "0.0000000000+0.0000000000i"
    assert format_complex(1 - 2.5j) == "1.0000000000-2.5000000000i"
