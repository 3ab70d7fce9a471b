"""Filename codec, manifest caching, and the render subprocess protocol."""
import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from fidyll.assets import (
    AssetError,
    AssetManifest,
    config_hash,
    decode_filename,
    encode_filename,
    encode_value,
    frame_grid,
    generate,
)
from fidyll.model import Configuration, GraphicRef
from fidyll.scalars import params_key

PNG_1PX = bytes.fromhex(
    "89504e470d0a1a0a0000000d49484452000000010000000108060000001f15c489"
    "0000000d49444154789c626001000000ffff03000006000557bfabd40000000049454e44ae426082"
)


def test_encode_sorts_keys():
    name = encode_filename("plot", {"b": 2, "a": 1})
    assert name == "plot__a=1__b=2.png"


def test_encode_scalar_spellings():
    name = encode_filename("g", {"b": True, "f": 2.5, "i": 7, "s": "word"})
    assert name == "g__b=true__f=2.5__i=7__s=word.png"


def test_encode_integral_float_collapses():
    assert encode_filename("g", {"x": 2.0}) == "g__x=2.png"


def test_encode_percent_escapes_unsafe_bytes():
    assert encode_value("a b") == "a%20b"
    assert encode_value("x=y") == "x%3Dy"
    assert encode_value("50%") == "50%25"
    assert encode_value("caf\u00e9") == "caf%C3%A9"
    assert encode_value("a/b") == "a%2Fb"


def test_decode_inverts_encode():
    params = {"rate": 0.7, "on": True, "label": "caf\u00e9 50%"}
    graphic, decoded = decode_filename(encode_filename("sim", params))
    assert graphic == "sim"
    assert decoded == params


def test_decode_rejects_non_png():
    with pytest.raises(AssetError):
        decode_filename("sim__x=1.jpg")


def test_decode_glues_separator_free_segments():
    # a value ending in a single underscore puts "__" in the stem; the
    # decoder reattaches the orphan segment to the previous key
    name = encode_filename("g", {"s": "a_"})
    if not name.startswith("g__h="):
        graphic, decoded = decode_filename(name)
        assert decoded == {"s": "a_"}


def test_long_values_fall_back_to_hash():
    params = {"text": "x" * 300}
    name = encode_filename("g", params)
    assert name.startswith("g__h=")
    assert len(name) <= 40


def test_string_masquerading_as_number_hashes():
    # "7" encoded plainly would decode as the integer 7
    assert encode_filename("g", {"s": "7"}).startswith("g__h=")
    assert encode_filename("g", {"s": "true"}).startswith("g__h=")


def test_key_containing_separator_hashes():
    # splitting on "__" could never recover such a key
    assert encode_filename("g", {"a__b": 1}).startswith("g__h=")


def test_graphic_with_separator_is_rejected():
    with pytest.raises(ValueError):
        encode_filename("a__b", {"x": 1})


def test_hash_names_need_a_resolver():
    name = encode_filename("g", {"s": "x" * 300})
    with pytest.raises(AssetError, match="manifest"):
        decode_filename(name)
    resolved = decode_filename(name, lambda n: ("g", {"s": "x" * 300}))
    assert resolved == ("g", {"s": "x" * 300})


def test_config_hash_is_stable_and_order_free():
    a = config_hash("g", {"x": 1, "y": 2})
    b = config_hash("g", {"y": 2, "x": 1})
    assert a == b
    assert len(a) == 16 and all(c in "0123456789abcdef" for c in a)
    assert config_hash("g", {"x": 1}) != a


printable_keys = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,6}", fullmatch=True)
scalar_strategy = st.one_of(
    st.booleans(),
    st.integers(min_value=-10**9, max_value=10**9),
    st.floats(allow_nan=False, allow_infinity=False),
    st.text(max_size=20),
)


@given(st.dictionaries(printable_keys, scalar_strategy, max_size=4))
@settings(max_examples=300)
def test_codec_round_trip_property(params):
    from fidyll.scalars import canonical_value

    canonical = {k: canonical_value(v) for k, v in params.items()}
    name = encode_filename("g", canonical)
    graphic, decoded = decode_filename(
        name, hash_resolver=lambda n: ("g", canonical)
    )
    assert graphic == "g"
    assert params_key(decoded) == params_key(canonical)


# frame grids


def test_frame_grid_layout():
    from fidyll.model import Animation

    anim = Animation(start=0, end=1, duration_ms=100, frames=3, columns=2)
    assets = [
        ("sim__on=true__rate=0.png", 0),
        ("sim__on=true__rate=0.5.png", 0.5),
        ("sim__on=true__rate=1.png", 1),
    ]
    grid = frame_grid(anim, assets, columns=2)
    assert grid.columns == 2
    assert grid.rows == 2
    assert [cell.path for cell in grid.cells] == [path for path, _ in assets]
    assert grid.cells[1].caption == "0.5"


# manifest


def test_manifest_round_trip(tmp_path):
    manifest = AssetManifest(tmp_path)
    (tmp_path / "g__x=1.png").write_bytes(PNG_1PX)
    manifest.record("g__x=1.png", "g", {"x": 1}, 100, 80, "key1")
    manifest.save()

    reloaded = AssetManifest(tmp_path)
    assert reloaded.valid_entry("g__x=1.png", "key1")
    assert not reloaded.valid_entry("g__x=1.png", "other-key")
    assert not reloaded.valid_entry("missing.png", "key1")


def test_manifest_detects_modified_file(tmp_path):
    manifest = AssetManifest(tmp_path)
    path = tmp_path / "g__x=1.png"
    path.write_bytes(PNG_1PX)
    manifest.record("g__x=1.png", "g", {"x": 1}, 100, 80, "key1")
    manifest.save()
    path.write_bytes(PNG_1PX + b"tampered")
    assert not AssetManifest(tmp_path).valid_entry("g__x=1.png", "key1")


def test_manifest_resolves_hash_names(tmp_path):
    params = {"s": "x" * 300}
    name = encode_filename("g", params)
    manifest = AssetManifest(tmp_path)
    (tmp_path / name).write_bytes(PNG_1PX)
    manifest.record(name, "g", params, 10, 10, "k")
    manifest.save()
    graphic, decoded = decode_filename(name, AssetManifest(tmp_path).resolve_hash)
    assert graphic == "g" and decoded == params


# subprocess rendering


RENDERER = """\
import json, sys
spec = json.load(sys.stdin)
png = bytes.fromhex(
    "89504e470d0a1a0a0000000d49484452000000010000000108060000001f15c489"
    "0000000d49444154789c626001000000ffff03000006000557bfabd4"
    "0000000049454e44ae426082"
)
with open(spec["output"], "wb") as fh:
    fh.write(png)
with open(spec["output"] + ".call", "w") as fh:
    json.dump(spec, fh)
"""


def write_renderer(tmp_path: Path, body: str = RENDERER) -> GraphicRef:
    script = tmp_path / "render.py"
    script.write_text(body, encoding="utf-8")
    return GraphicRef(kind="serverScript", name="g", command=f"python3 {script}")


def configs_for(values) -> list[Configuration]:
    ref = GraphicRef(kind="serverScript", name="g", command="unused")
    return [
        Configuration(scene_index=0, graphic=ref, params=(("x", v),))
        for v in values
    ]


def test_generate_invokes_protocol(tmp_path):
    graphic = write_renderer(tmp_path)
    out = tmp_path / "assets"
    generate(configs_for([1]), graphic, out, width=320, height=240)
    call = json.loads((out / "g__x=1.png.call").read_text())
    assert call["parameters"] == {"x": 1}
    assert call["width"] == 320 and call["height"] == 240
    assert call["output"].endswith("g__x=1.png")
    assert (out / "g__x=1.png").read_bytes() == PNG_1PX


def test_generate_skips_cached_entries(tmp_path):
    graphic = write_renderer(tmp_path)
    out = tmp_path / "assets"
    generate(configs_for([1, 2]), graphic, out, width=10, height=10)
    (out / "g__x=1.png.call").unlink()
    (out / "g__x=2.png.call").unlink()
    generate(configs_for([1, 2]), graphic, out, width=10, height=10)
    # warm run spawned no renderer processes at all
    assert not list(out.glob("*.call"))


def test_generate_size_change_invalidates_cache(tmp_path):
    graphic = write_renderer(tmp_path)
    out = tmp_path / "assets"
    generate(configs_for([1]), graphic, out, width=10, height=10)
    (out / "g__x=1.png.call").unlink()
    generate(configs_for([1]), graphic, out, width=20, height=10)
    assert (out / "g__x=1.png.call").exists()


def test_generate_saves_manifest_per_completion(tmp_path):
    graphic = write_renderer(tmp_path)
    out = tmp_path / "assets"
    generate(configs_for([1, 2, 3]), graphic, out, width=10, height=10, jobs=1)
    data = json.loads((out / "manifest.json").read_text())
    assert len(data["entries"]) == 3
    for entry in data["entries"].values():
        assert entry["graphic"] == "g"
        assert len(entry["sha256"]) == 64


def test_generate_failure_carries_stderr(tmp_path):
    graphic = write_renderer(
        tmp_path, "import sys; sys.stderr.write('boom\\n'); sys.exit(3)"
    )
    with pytest.raises(AssetError, match="exited 3.*boom"):
        generate(configs_for([1]), graphic, tmp_path / "a", width=10, height=10)


def test_generate_missing_output_is_an_error(tmp_path):
    graphic = write_renderer(tmp_path, "import sys; sys.stdin.read()")
    with pytest.raises(AssetError, match="wrote no output"):
        generate(configs_for([1]), graphic, tmp_path / "a", width=10, height=10)


def test_generate_unknown_command_is_an_error(tmp_path):
    graphic = GraphicRef(kind="serverScript", name="g", command="no-such-binary-xyz")
    with pytest.raises(AssetError, match="not found"):
        generate(configs_for([1]), graphic, tmp_path / "a", width=10, height=10)


def test_generate_timeout_is_an_error(tmp_path):
    graphic = write_renderer(tmp_path, "import time; time.sleep(60)")
    with pytest.raises(AssetError, match="timed out"):
        generate(
            configs_for([1]),
            graphic,
            tmp_path / "a",
            width=10,
            height=10,
            timeout_s=0.5,
        )


def test_generate_component_graphic_is_an_error(tmp_path):
    graphic = GraphicRef(kind="clientComponent", name="Chart")
    with pytest.raises(AssetError, match="command"):
        generate(configs_for([1]), graphic, tmp_path / "a", width=10, height=10)


def test_generate_runs_in_given_cwd(tmp_path):
    body = (
        "import json, sys, os\n"
        "spec = json.load(sys.stdin)\n"
        "open(spec['output'], 'wb').write(b'\\x89PNG')\n"
        "open(spec['output'] + '.cwd', 'w').write(os.getcwd())\n"
    )
    graphic = write_renderer(tmp_path, body)
    project = tmp_path / "project"
    project.mkdir()
    out = tmp_path / "assets"
    generate(configs_for([1]), graphic, out, width=10, height=10, cwd=project)
    assert (out / "g__x=1.png.cwd").read_text() == str(project)
