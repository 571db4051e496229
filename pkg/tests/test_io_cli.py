import csv
import io
import json

import numpy as np
import pytest

from conftest import random_coherent_mixture, random_pure
from twomode.cli import RunConfig, config_from_args, main, parse_time_grid, run
from twomode.entanglement import negativity_closed_form, negativity_trace_norm
from twomode.fock import ENERGY, FockDensityMatrix, ModeBipartition, change_bipartition
from twomode.io import (
    SUMMARY_COLUMNS,
    SWEEP_COLUMNS,
    StateFileError,
    csv_text,
    load_state,
    save_state,
    state_from_dict,
    state_to_dict,
)


def cli(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(config_from_args(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("bp", ["spatial", "energy", "custom"])
def test_state_round_trip_is_bit_exact(tmp_path, rng, bp):
    rho = random_coherent_mixture(rng, 5)
    if bp == "energy":
        rho = change_bipartition(rho, ENERGY)
    elif bp == "custom":
        th = 0.37
        rho = change_bipartition(rho, ModeBipartition([[np.cos(th), 1j * np.sin(th)], [1j * np.sin(th), np.cos(th)]]))
    path = tmp_path / "state.json"
    save_state(rho, path)
    back = load_state(path)
    np.testing.assert_array_equal(back.entries, rho.entries)
    assert back.bipartition.same_as(rho.bipartition)
    assert back.n_total == rho.n_total


def test_reader_rejects_bad_files(tmp_path):
    good = state_to_dict(FockDensityMatrix(1, np.eye(2) / 2))
    bad_cases = [
        [],
        {k: v for k, v in good.items() if k != "entries"},
        {**good, "n_total": 0},
        {**good, "n_total": True},
        {**good, "bipartition": "diagonal"},
        {**good, "bipartition": [[[1, 0], [1, 0]], [[0, 0], [1, 0]]]},
        {**good, "entries": [[[1, 0]]]},
        {**good, "entries": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]},
        {**good, "entries": [[[0.5, 0], [0, 1]], [[0, 0], [0.5, 0]]]},
        {**good, "entries": [[[1.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]]},
    ]
    for data in bad_cases:
        with pytest.raises(StateFileError):
            state_from_dict(data)
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(StateFileError):
        load_state(path)


def test_csv_text_uses_repr_floats():
    text = csv_text(("a", "b", "c"), [(0.1, 3, True)])
    assert text == "a,b,c\n0.1,3,true\n"
    val = 1 / 3
    assert float(csv_text(("x",), [(val,)]).splitlines()[1]) == val


def test_time_grid_parsing():
    assert parse_time_grid("0:2:5") == (0.0, 2.0, 5)
    cfg = RunConfig("evolve", n_total=2, fock=1, time_grid=(0.0, 2.0, 5))
    np.testing.assert_allclose(cfg.times(), [0, 0.5, 1, 1.5, 2])
    for bad in ("0:2", "a:b:c", "1:0:3", "0:1:0", "-1:1:3"):
        with pytest.raises(Exception):
            parse_time_grid(bad)


def test_negativity_command_json():
    code, out, _ = cli(["negativity", "--coherent", "0.5", "0", "--n", "4", "--bipartition", "both"])
    assert code == 0
    res = {r["bipartition"]: r for r in json.loads(out)["results"]}
    assert res["spatial"]["closed_form"] > 0.5
    assert res["energy"]["closed_form"] <= 1e-10 and res["energy"]["separable"]
    assert abs(res["spatial"]["closed_form"] - res["spatial"]["trace_norm"]) <= 1e-9


def test_evolve_csv_columns(tmp_path):
    out = tmp_path / "traj.csv"
    code, _, _ = cli(["evolve", "--coherent", "0.5", "0", "--n", "2", "--gamma", "1", "--t", "0:1:3", "--out", str(out)])
    assert code == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["t", "k", "l", "re", "im"]
    assert len(rows) == 1 + 3 * 9
    summary = list(csv.reader((tmp_path / "traj_summary.csv").open()))
    assert tuple(summary[0]) == SUMMARY_COLUMNS
    for t, ns, ne, bound in summary[1:]:
        assert float(ns) <= float(bound) + 1e-10


def test_scan_csv_columns(tmp_path):
    out = tmp_path / "sweep.csv"
    argv = ["scan", "--fock", "3", "--n", "3", "--gamma", "1", "--t", "0:1:3", "--out", str(out)]
    assert cli(argv)[0] == 0
    rows = list(csv.reader(out.open()))
    assert tuple(rows[0]) == SWEEP_COLUMNS
    assert len(rows) == 1 + 3 * 64
    assert all(float(r[3]) >= 1 - 1e-8 for r in rows[1:])
    assert (tmp_path / "sweep_premise.csv").exists()


def test_squeeze_with_explicit_axes():
    argv = ["squeeze", "--fock", "4", "--n", "4", "--n2", "1", "0", "0", "--n3", "0", "0", "1"]
    code, out, _ = cli(argv)
    assert code == 0
    rep = json.loads(out)["reports"][0]
    assert rep["xi_w_squared"] == pytest.approx(1.0, abs=1e-12)
    assert rep["delta_theta_squared"] == pytest.approx(0.25, abs=1e-12)


@pytest.mark.parametrize(
    "argv, code",
    [
        (["negativity", "--fock", "7", "--n", "4"], 2),
        (["negativity", "--n", "4"], 2),
        (["negativity", "--fock", "1"], 2),
        (["evolve", "--fock", "1", "--n", "2"], 2),
        (["negativity", "--fock", "1", "--n", "2", "--bipartition", "diagonal"], 2),
        (["negativity", "--fock", "1", "--n", "2", "--gamma", "-1"], 2),
        (["negativity", "--state", "/nonexistent/state.json"], 2),
        (["squeeze", "--fock", "2", "--n", "4", "--n2", "1", "0", "0", "--n3", "0", "0", "1"], 4),
        (["scan", "--random", "--seed", "1", "--n", "3", "--gamma", "1", "--t", "0:1:2"], None),
    ],
)
def test_exit_codes(argv, code):
    got = cli(argv)[0]
    if code is None:
        assert got in (0, 2)
    else:
        assert got == code


def test_invalid_state_file_exit_code(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n_total": 1, "bipartition": "spatial", "entries": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}))
    assert cli(["negativity", "--state", str(path)])[0] == 3


def test_squeezed_premise_exit_code(tmp_path):
    from twomode.fock import PureState

    rho = PureState.normalized(2, [-np.sin(np.pi / 8), 0, np.cos(np.pi / 8)]).density_matrix()
    path = tmp_path / "sq.json"
    save_state(rho, path)
    code, _, err = cli(["scan", "--state", str(path), "--gamma", "1", "--t", "0:1:2"])
    assert code == 2 and "squeezed" in err


def test_quadrature_failure_exit_code():
    argv = ["evolve", "--random", "--n", "8", "--gamma", "1", "--t", "0:5000:2", "--backend", "kraus_quadrature"]
    code, _, err = cli(argv)
    assert code == 4
    assert "residual=" in err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 2


def test_seeded_runs_are_byte_identical(tmp_path):
    argv = ["evolve", "--random", "--seed", "11", "--n", "5", "--gamma", "0.7", "--t", "0:2:5"]
    paths = []
    for i in range(2):
        p = tmp_path / f"run{i}.json"
        assert cli(argv + ["--out", str(p)])[0] == 0
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_saved_state_reproduces_negativity(tmp_path):
    saved = tmp_path / "s.json"
    a = cli(["negativity", "--random", "--seed", "4", "--n", "6", "--bipartition", "both", "--save-state", str(saved)])
    b = cli(["negativity", "--state", str(saved), "--bipartition", "both"])
    assert a[0] == b[0] == 0
    assert a[1] == b[1]


def test_output_is_written_atomically(tmp_path):
    out = tmp_path / "res.json"
    out.write_text("previous")
    assert cli(["negativity", "--fock", "1", "--n", "2", "--out", str(out)])[0] == 0
    json.loads(out.read_text())
    assert [p.name for p in tmp_path.iterdir()] == ["res.json"]
    # failed run leaves the previous output untouched
    assert cli(["squeeze", "--fock", "2", "--n", "4", "--n2", "1", "0", "0", "--n3", "0", "0", "1", "--out", str(out)])[0] == 4
    json.loads(out.read_text())


def test_negativity_after_round_trip_matches(tmp_path, rng):
    for n in range(1, 6):
        rho = random_pure(rng, n)
        path = tmp_path / f"s{n}.json"
        save_state(rho, path)
        back = load_state(path)
        assert negativity_closed_form(back).value == negativity_closed_form(rho).value
        assert negativity_trace_norm(back).value == negativity_trace_norm(rho).value
