import json

import pytest

from spinal.cli import main
from spinal.core import SpinalGroup
from spinal.errors import NotAdmissible, ParseError, ValidationError
from spinal.finite_algebra import validate_spinal_data
from spinal.growth import enumerate_ball
from spinal.presets import grigorchuk2, grigorchukP, holt
from spinal.specfile import (
    dump_spec,
    load_spec,
    load_spec_file,
    preset_dict,
    spec_from_dict,
    spec_hash,
    spec_to_dict,
)


def _gamma(data, omega, n=6):
    return enumerate_ball(SpinalGroup(data, omega), n, threads=1).gamma


@pytest.mark.parametrize("make", [lambda: grigorchuk2("012"), lambda: grigorchukP(3)])
@pytest.mark.parametrize("suffix", [".json", ".yaml"])
def test_round_trip(tmp_path, make, suffix):
    data, omega = make()
    path = tmp_path / f"spec{suffix}"
    dump_spec(spec_to_dict(data, omega), path)
    data2, omega2 = spec_from_dict(load_spec_file(path))
    assert omega2 == omega
    r1 = validate_spinal_data(data, raise_on_error=False)
    r2 = validate_spinal_data(data2, raise_on_error=False)
    assert r1.checks == r2.checks and r1.properties == r2.properties
    assert _gamma(data, omega) == _gamma(data2, omega2)


def test_functional_form_matches_preset():
    d = {
        "q": 3,
        "A_group": {"names": ["1", "a", "a2"], "permutations": [[1, 2, 3], [2, 3, 1], [3, 1, 2]]},
        "B_group": {"elementary_abelian": {"p": 3, "d": 2}},
        "epimorphisms": {"0": {"functional": [1, 0]}, "1": {"functional": [1, 1]},
                         "2": {"functional": [1, 2]}, "3": {"functional": [0, 1]}},
        "omega": {"prefix": "", "period": "0123"},
    }
    data, omega = spec_from_dict(d)
    assert _gamma(data, omega, 5) == _gamma(*grigorchukP(3), 5)


def test_map_form_identity_default():
    d = {
        "q": 2,
        "A_group": {"names": ["1", "a"], "permutations": [[1, 2], [2, 1]]},
        "B_group": {"elementary_abelian": {"p": 2, "d": 2}, "names": ["1", "b", "c", "d"]},
        "epimorphisms": {"0": {"map": {"b": "a", "c": "a", "d": "1"}},
                         "1": {"map": {"b": "a", "c": "1", "d": "a"}},
                         "2": {"map": {"b": "1", "c": "a", "d": "a"}}},
        "omega": "012",
    }
    data, omega = spec_from_dict(d)
    assert _gamma(data, omega) == _gamma(*grigorchuk2("012"))


def test_parse_errors(tmp_path):
    with pytest.raises(ParseError):
        spec_from_dict({"q": 2})
    with pytest.raises(ParseError):
        spec_from_dict({"preset": {"name": "nope"}})
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_spec_file(bad)
    with pytest.raises(ParseError):
        load_spec()


def test_not_admissible():
    with pytest.raises(NotAdmissible):
        load_spec(preset="grigorchuk2", omega="0")
    data, omega = spec_from_dict(preset_dict("grigorchuk2", "0"), check_admissible=False)
    assert str(omega)


def test_holt_preset_dict_and_size_guard():
    data, omega = spec_from_dict(preset_dict("holt"))
    assert data.q == 3 and data.level_group.order == 2916
    with pytest.raises(ValidationError):
        spec_to_dict(*holt())


def test_spec_hash_stable():
    assert spec_hash({"a": 1, "b": [1, 2]}) == spec_hash({"b": [1, 2], "a": 1})
    assert spec_hash(preset_dict("grigorchuk2", "012")) != spec_hash(preset_dict("grigorchuk2", "021"))


# -- CLI ----------------------------------------------------------------------

def run(capsys, *argv):
    rc = main(list(argv))
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_cli_order(capsys):
    rc, out, _ = run(capsys, "--threads", "1", "order", "abadac")
    assert rc == 0 and out.strip() == "16"


def test_cli_order_json(capsys):
    rc, out, _ = run(capsys, "--json", "order", "abadac", "--trace")
    assert rc == 0 and json.loads(out)["order"] == 16


def test_cli_bounds_table(capsys):
    rc, out, _ = run(capsys, "bounds", "--table2")
    lines = out.strip().splitlines()
    assert rc == 0 and lines[0].startswith("q,r=3") and len(lines) == 10


def test_cli_bounds_requires_args(capsys):
    rc, _, err = run(capsys, "bounds")
    assert rc == 2 and err.startswith("error[validation]")


def test_cli_decompose(capsys):
    rc, out, _ = run(capsys, "decompose", "abadacabadacabadacabadac", "--depth", "3")
    rows = [l.split(",") for l in out.splitlines() if l and not l.startswith("#")]
    assert rc == 0 and rows[0][:2] == ["level", "length"]
    assert [int(r[1]) for r in rows[1:]] == [24, 16, 16, 16]


def test_cli_growth_csv(tmp_path, capsys):
    path = tmp_path / "g.csv"
    rc, _, _ = run(capsys, "--threads", "1", "growth", "--n", "6", "--csv", str(path))
    lines = path.read_text().splitlines()
    assert rc == 0 and lines[0] == "radius,gamma,sphere"
    assert lines[1:4] == ["0,1,1", "1,5,4", "2,11,6"]


def test_cli_deterministic_across_threads(capsys):
    outs = [run(capsys, "--threads", str(t), "period", "--n", "7")[1] for t in (1, 1, 4)]
    assert outs[0] == outs[1] == outs[2]


def test_cli_cache(tmp_path, capsys):
    cache = tmp_path / "ball.json"
    a = run(capsys, "--cache", str(cache), "growth", "--n", "6")[1]
    assert cache.exists()
    b = run(capsys, "--cache", str(cache), "growth", "--n", "6")[1]
    assert a == b


def test_cli_spec_file(tmp_path, capsys):
    path = tmp_path / "g.yaml"
    dump_spec(spec_to_dict(*grigorchuk2("012")), path)
    rc, out, _ = run(capsys, "--spec", str(path), "order", "abadac")
    assert rc == 0 and out.strip() == "16"


def test_cli_exit_codes(capsys):
    assert run(capsys, "--omega", "0", "validate")[0] == 2
    assert run(capsys, "--omega", "0", "order", "ab")[0] == 2
    assert run(capsys, "order", "axb")[0] == 2
    rc, _, err = run(capsys, "--budget", "10", "growth", "--n", "8")
    assert rc == 3 and "error[budget]" in err
    rc, _, err = run(capsys, "order", "abadac", "--max-depth", "1")
    assert rc == 3


def test_cli_validate_holt(capsys):
    assert run(capsys, "--preset", "holt", "validate")[0] == 0


def test_cli_selftest(capsys):
    rc, out, _ = run(capsys, "--threads", "1", "selftest", "--n", "5")
    assert rc == 0 and "FAIL" not in out
