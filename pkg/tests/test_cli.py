from __future__ import annotations

import json
import subprocess
import sys

import pytest

from strictcat.cli import main
from strictcat.fincat import delta_truncated, identity_functor, ordinal, product_cat, product_projection
from strictcat.generate import random_enriched
from strictcat.groth import SetFunctor
from strictcat.enriched import representable_functor
from strictcat.presheaf import PshMap, iter_maps, nerve, representable, spine
from strictcat.schema import load, save


@pytest.fixture
def files(tmp_path, rng):
    I = ordinal(1)
    up = I.find(0, 1, (0, 1))
    G, incl = spine(2, 2)
    F1 = representable(delta_truncated(2), 1)
    fold = next(PshMap(G, F1, c) for c in iter_maps(G, F1) if [F1.elems[0][v] for v in c[0]] == [(0,), (1,), (1,)])
    C = random_enriched(rng, ordinal(1))
    P = product_cat(ordinal(1), ordinal(1))
    values = {
        "interval": I,
        "identity": identity_functor(I),
        "square": product_projection(P, 0),
        "F": SetFunctor(I, [["a"], ["x", "y"]], [[0] if m == up else list(range([1, 2][I.src[m]])) for m in range(I.n_morphisms)]),
        "spine": G,
        "incl": incl,
        "fold": fold,
        "n1": nerve(I, 3),
        "enriched": C,
        "rep": representable_functor(C, C.objects[0]),
    }
    out = {}
    for k, v in values.items():
        out[k] = str(tmp_path / f"{k}.json")
        save(v, out[k])
    return out


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_grothendieck_example(capsys, files):
    code, rep = run(capsys, "grothendieck", "--input", files["F"])
    assert code == 0
    assert rep["verdict"] == "pass"
    assert rep["counts"] == {"objects": 3, "morphisms": 4}
    labels = [o["label"] for o in rep["result"]["total"]["objects"]]
    assert labels == [[0, "a"], [1, "x"], [1, "y"]]


def test_classify_identity(capsys, files):
    code, rep = run(capsys, "classify", "--input", files["identity"])
    assert code == 0
    assert rep["counts"]["fibres"] == [1, 1]


def test_classify_refusal_has_witness(capsys, files):
    code, rep = run(capsys, "classify", "--input", files["square"])
    assert code == 1
    assert rep["verdict"] == "refused"
    assert rep["witness"] == {"morphism": [0, 1], "source": 0, "object": [0, 0], "lifts": 2}


def test_segal_spine_fails_at_level_two(capsys, files):
    code, rep = run(capsys, "segal", "--input", files["spine"])
    assert code == 1
    assert rep["verdict"] == "fail"
    assert rep["witness"]["n"] == 2


def test_witness_revalidates(capsys, files):
    from strictcat.enriched import strict_segal_check

    _, rep = run(capsys, "segal", "--input", files["spine"])
    again = strict_segal_check(load(files["spine"]).value).witness
    assert json.loads(json.dumps(again)) == rep["witness"]


def test_rlp_and_budget(capsys, files):
    code, rep = run(capsys, "rlp", "-i", files["fold"], "-i", files["incl"])
    assert code == 1 and rep["witness"]["top"]
    code, rep = run(capsys, "rlp", "-i", files["fold"], "-i", files["incl"], "--budget", "1")
    assert code == 2 and rep["verdict"] == "budget"


def test_budget_from_environment(capsys, files, monkeypatch):
    monkeypatch.setenv("TOOL_BUDGET", "1")
    code, rep = run(capsys, "rlp", "-i", files["fold"], "-i", files["incl"])
    assert code == 2 and rep["verdict"] == "budget"


def test_usage_errors(capsys, files):
    assert main(["segal"]) == 2
    assert main(["segal", "-i", files["interval"]]) == 2
    assert main(["rlp", "-i", files["fold"]]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_each_command_runs(capsys, files, tmp_path):
    cases = [
        (["validate", "-i", files["interval"], "-i", files["spine"]], 0),
        (["nerve", "-i", files["interval"], "-k", "2"], 0),
        (["nerve", "-i", files["enriched"], "-k", "2"], 0),
        (["tw", "-i", files["n1"]], 0),
        (["tw", "-i", files["n1"], "--dual"], 0),
        (["slice", "-i", files["n1"], "--point", "[0, []]"], 0),
        (["slice", "-i", files["n1"], "--point", "[1, []]", "--direction", "over"], 0),
        (["theta", "-i", files["interval"]], 0),
        (["sint", "-i", files["rep"]], 0),
        (["grothendieck", "-i", files["rep"]], 0),
        (["fiber", "-i", files["fold"], "--point", "[1]"], 0),
        (["attach", "-i", files["fold"], "-i", files["incl"]], 0),
    ]
    for argv, expected in cases:
        code, rep = run(capsys, *argv)
        assert code == expected, (argv, rep)
        assert rep["command"] == argv[0]


def test_output_chains_into_kan(capsys, files, tmp_path):
    out = str(tmp_path / "dn.json")
    assert run(capsys, "nerve", "-i", files["enriched"], "-k", "2", "-o", out)[0] == 0
    code, rep = run(capsys, "kan", "--functor", "und:0", "-i", out)
    assert code == 0
    C = load(files["enriched"]).value
    assert rep["counts"]["sizes"][0] == C.n_objects


def test_reports_are_deterministic(capsys, files):
    a = run(capsys, "tw", "-i", files["n1"])
    b = run(capsys, "tw", "-i", files["n1"])
    assert a == b
    _, timed = run(capsys, "tw", "-i", files["n1"], "--timing")
    assert "timing" in timed and "timing" not in a[1]


def test_random_input_uses_seed(capsys):
    a = run(capsys, "nerve", "--random", "fincat", "--seed", "4", "-k", "1")
    b = run(capsys, "nerve", "--random", "fincat", "--seed", "4", "-k", "1")
    assert a == b and a[0] == 0


def test_pretty_output(capsys, files):
    main(["validate", "-i", files["interval"], "--pretty"])
    out = capsys.readouterr().out
    assert out.startswith("{\n")


def test_console_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "strictcat", "classify", "-i", files["identity"]],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "pass"
