import json

import numpy as np
import pytest
from hypothesis import given

import twopc.files as files
from conftest import structures
from twopc.catalog import kernels_2d, root_pair_1d, root_pair_2d
from twopc.files import (
    DerivationDatabase,
    apply_operation,
    dumps_structure,
    load_kernels,
    load_plan,
    load_structure,
    loads_structure,
    render_ppm,
    save_structure,
    structure_id,
)
from twopc.structure import Structure


@given(structures())
def test_json_round_trip(S):
    text = dumps_structure(S)
    T, meta = loads_structure(text)
    assert T == S and meta is None
    assert dumps_structure(T) == text


def test_canonical_layout():
    S = Structure.from_cells([[1, 2], [2, 2]])
    assert dumps_structure(S, {"note": "x"}) == '{"dims":[2,2],"phases":2,"cells":[1,2,2,2],"meta":{"note":"x"}}'


def test_bad_documents():
    with pytest.raises(ValueError):
        loads_structure('{"dims":[3],"phases":2,"cells":[1,2]}')
    with pytest.raises(ValueError):
        loads_structure('{"dims":[2],"phases":2,"cells":[1,3]}')


def test_file_round_trip(tmp_path):
    S = root_pair_2d()[0]
    save_structure(S, tmp_path / "s.json", meta={"name": "root"})
    assert load_structure(tmp_path / "s.json") == S


def test_raw_dump(tmp_path, monkeypatch):
    monkeypatch.setattr(files, "RAW_THRESHOLD", 10)
    S = root_pair_1d()[0]
    path = save_structure(S, tmp_path / "big.json")
    header = json.loads(path.read_text())
    assert header["raw"] == "big.u8" and "cells" not in header
    assert (tmp_path / "big.u8").stat().st_size == 12
    assert load_structure(path) == S


def test_kernels_and_plans(tmp_path):
    (tmp_path / "k.json").write_text(json.dumps({"dims": [2, 3], "kernels": [[1, 1, 1, 0, 1, 0], [1, 0, 0, 1, 1, 0]]}))
    assert load_kernels(tmp_path / "k.json") == kernels_2d()
    (tmp_path / "p.json").write_text('{"groups": [[1, 2], [3]]}')
    assert load_plan(tmp_path / "p.json").mapping == (1, 1, 2)
    (tmp_path / "q.json").write_text('{"mapping": [2, 1]}')
    assert load_plan(tmp_path / "q.json").mapping == (2, 1)


def test_apply_operation_unknown():
    with pytest.raises(ValueError):
        apply_operation("rotate", root_pair_1d()[0], {})


def test_database_replay(tmp_path):
    db = DerivationDatabase(tmp_path / "db")
    S = root_pair_2d()[0]
    child, rec = db.derive(S, "phase_extend", {"z": [2, 3]})
    K = kernels_2d()
    db.derive(child, "upsample", {"factor": [1, 2]})
    db.derive(S, "kernel_extend", {"dims": list(K.shape), "kernels": [k.ravel().tolist() for k in K.kernels]})
    db.derive(child, "coalesce", {"mapping": [1, 1, 2]})
    assert rec.parents == [structure_id(S)]
    assert db.get(structure_id(child)) == child
    reopened = DerivationDatabase(tmp_path / "db")
    assert len(reopened.records) == 4
    assert all(ok for _, ok in reopened.replay())
    # a tampered child is caught
    path = tmp_path / "db" / rec.child
    doc = json.loads(path.read_text())
    doc["cells"][0] = 3 - doc["cells"][0] if doc["cells"][0] < 3 else 1
    path.write_text(json.dumps(doc))
    assert not dict(reopened.replay())[rec.id]


def test_database_lock(tmp_path):
    db = DerivationDatabase(tmp_path)
    (tmp_path / ".lock").write_text("")
    with pytest.raises(RuntimeError):
        db.derive(root_pair_1d()[0], "upsample", {"factor": [2]})


def read_ppm(path):
    data = path.read_bytes()
    magic, dims, maxval, body = data.split(b"\n", 3)
    w, h = map(int, dims.split())
    assert magic == b"P6" and maxval == b"255"
    return np.frombuffer(body, dtype=np.uint8).reshape(h, w, 3)


def test_render_2d(tmp_path):
    S = Structure.from_cells([[1, 2, 3], [3, 3, 1]])
    img = read_ppm(render_ppm(S, tmp_path / "s.ppm", block=4))
    assert img.shape == (8, 12, 3)
    assert (img[0, 0] == files.PALETTE[0]).all()
    assert (img[0, 4] == files.PALETTE[1]).all()
    assert (img[4, 0] == 255).all()


def test_render_1d_3d(tmp_path):
    img = read_ppm(render_ppm(root_pair_1d()[0], tmp_path / "a.ppm", block=2))
    assert img.shape == (2, 24, 3)
    S = Structure(np.ones((2, 2, 3), dtype=int), 2)
    img = read_ppm(render_ppm(S, tmp_path / "b.ppm", block=1))
    assert img.shape == (2, 3 * 2 + 2, 3)
    with pytest.raises(ValueError):
        render_ppm(S, tmp_path / "c.ppm", block=0)
