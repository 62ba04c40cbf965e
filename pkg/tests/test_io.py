import json
import struct

import numpy as np
import pytest

from strichartz_lab.grid import ComplexField2D, Grid2D, Space, forward_transform, gaussian_field
from strichartz_lab.io import (StrzError, dumps_json, field_from_bytes, field_to_bytes, read_strz, to_jsonable,
                               write_csv, write_strz)


def test_strz_round_trip_is_byte_identical(tmp_path):
    g = Grid2D(32, 6.0)
    f = gaussian_field(g, -0.5 + 0.25j, (0.1, -0.3j))
    path = write_strz(tmp_path / "f.strz", f)
    back = read_strz(path)
    assert back.grid == g and back.space == Space.PHYSICAL
    assert np.array_equal(back.samples, f.samples)
    assert field_to_bytes(back) == path.read_bytes()
    fh = forward_transform(f)
    assert field_from_bytes(field_to_bytes(fh)).space == Space.FREQUENCY


def test_strz_rejects_damage():
    blob = field_to_bytes(gaussian_field(Grid2D(8, 3.0), -0.5))
    with pytest.raises(StrzError, match="magic"):
        field_from_bytes(b"XXXX" + blob[4:])
    with pytest.raises(StrzError, match="version"):
        field_from_bytes(blob[:4] + struct.pack("<I", 7) + blob[8:])
    with pytest.raises(StrzError):
        field_from_bytes(blob[:-16])
    with pytest.raises(StrzError):
        field_from_bytes(blob[:10])


def test_json_and_csv(tmp_path):
    obj = {"b": np.float64(1.5), "a": np.arange(3), "z": 1 + 2j, "g": Grid2D(8, 3.0)}
    text = dumps_json(obj)
    assert text == dumps_json(obj)
    data = json.loads(text)
    assert list(data) == sorted(data)
    assert data["a"] == [0, 1, 2]
    assert to_jsonable(np.int64(3)) == 3
    p = write_csv(tmp_path / "t.csv", ["k", "v"], [(1, 0.5), (2, 0.25)])
    assert p.read_text().splitlines() == ["k,v", "1,0.5", "2,0.25"]
