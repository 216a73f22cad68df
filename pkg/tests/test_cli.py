import json

import pytest

from pseudorot.cli import main


@pytest.fixture
def maps(tmp_path):
    rot63 = tmp_path / "rot063.json"
    rot63.write_text(json.dumps({"family": "rotation", "params": {"alpha": 0.63}}))
    rot50 = tmp_path / "rot050.json"
    rot50.write_text(json.dumps({"family": "rotation", "params": {"alpha": 0.5}}))
    return rot63, rot50


def run(argv, capsys):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_farey_output(capsys):
    code, out = run(["farey", "--alpha", "0.63", "--min-denom-sum", "8"], capsys)
    data = json.loads(out.out)
    assert code == 0 and data["sigma"] == [5, 2, 7, 4, 1, 6, 3]
    assert data["interval"] == "3/5:2/3" and data["no_integer"]["ok"]


def test_rot_set(maps, capsys):
    code, out = run(["rot-set", "--map", maps[0], "--n", "20", "--grid", "8"], capsys)
    data = json.loads(out.out)
    assert code == 0 and data["lo"] == pytest.approx(0.63) and data["grid"] == 8


def test_find_arc_verify_render(maps, tmp_path, capsys):
    cert = tmp_path / "cert.json"
    svg = tmp_path / "cert.svg"
    code, _ = run(["find-arc", "--map", maps[0], "--interval", "3/5:2/3", "--out", cert,
                   "--svg", svg], capsys)
    assert code == 0
    data = json.loads(cert.read_text())
    assert len(data["iterates"]) + 1 == 8 and data["cyclic_order_matches_sigma"]
    assert svg.read_text().lstrip().startswith("<?xml")
    code, out = run(["verify", "--cert", cert], capsys)
    assert code == 0 and json.loads(out.out)["ok"]
    png = tmp_path / "again.png"
    assert run(["render", cert, "--out", png], capsys)[0] == 0 and png.stat().st_size > 0

    data["arc"] = {"vertices": [[0.0, 0.0], [0.0, 0.7], [0.8, 0.7], [0.8, 0.3], [1.6, 0.3],
                                [1.6, 1.0]]}
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert run(["verify", "--cert", bad], capsys)[0] == 3


def test_hypothesis_failure_exit_code(maps, capsys):
    code, out = run(["find-arc", "--map", maps[1], "--interval", "3/5:2/3"], capsys)
    assert code == 2 and "hypothesis" in out.err


def test_resolution_exhaustion_exit_code(maps, capsys, monkeypatch):
    from pseudorot import arc_finder
    monkeypatch.setattr(arc_finder, "check_arc", lambda *a, **k: {"ok": False,
                                                                  "min_pairwise_distance": 0})
    code, out = run(["find-arc", "--map", maps[0], "--interval", "3/5:2/3", "--eps", "0.2",
                     "--max-retries", "0"], capsys)
    assert code == 3 and "resolution" in out.err


@pytest.mark.parametrize("argv", [
    ["farey", "--interval", "1/2:1/3"],
    ["farey"],
    ["find-arc", "--map", "{not json", "--interval", "3/5:2/3"],
    ["find-arc", "--map", '{"family": "rotation", "params": {"alpha": 0.63}}', "--interval", "x"],
    ["tiling", "--interval", "3/5:2/3", "--alpha", "0.9"],
    ["bogus"],
    ["--threads", "0", "farey", "--alpha", "0.3"],
])
def test_malformed_input_exit_code(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 1


def test_tiling_and_factorize(tmp_path, capsys):
    svg = tmp_path / "tiling.svg"
    code, out = run(["tiling", "--interval", "3/5:2/3", "--alpha", "0.63", "--svg", svg,
                     "--samples", "20000"], capsys)
    data = json.loads(out.out)
    assert code == 0 and data["width_identity"] == "1" and svg.exists()
    spec = tmp_path / "disc.json"
    spec.write_text(json.dumps({"kind": "twist", "amp": 2.0, "radius": 0.9}))
    outp = tmp_path / "factors.json"
    code, _ = run(["factorize-disc", "--spec", spec, "--eps", "0.2", "--grid", "80",
                   "--out", outp], capsys)
    data = json.loads(outp.read_text())
    assert code == 0 and data["report"]["ok"] and len(data["factors"]) <= 24


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    text = capsys.readouterr().out
    for name in ("rot-set", "farey", "find-arc", "verify", "tiling", "factorize-disc", "render"):
        assert name in text
