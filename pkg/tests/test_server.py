"""Preview rebuild/reload behavior and the presenter sync relay."""
import json
import time
from pathlib import Path

import pytest
from starlette.testclient import TestClient
from starlette.websockets import WebSocketDisconnect

from fidyll.config import BuildOptions
from fidyll.model import Format
from fidyll.server import (
    BuildFailure,
    POLL_INTERVAL_S,
    SyncHub,
    build_site,
    create_present_app,
    create_preview_app,
)

ARTICLE = (
    "---\n"
    "title: Served\n"
    "---\n\n"
    "Intro.\n\n"
    "{scene}\n"
    "graphic:\n"
    "  name: dot\n"
    "  command: python3 dot.py\n"
    "width: 8\n"
    "height: 8\n"
    "parameters:\n"
    "  x: 1\n\n"
    "Original stage text.\n"
)

DOT_RENDERER = """\
import json, sys
spec = json.load(sys.stdin)
png = bytes.fromhex(
    "89504e470d0a1a0a0000000d49484452000000010000000108060000001f15c489"
    "0000000d49444154789c626001000000ffff03000006000557bfabd4"
    "0000000049454e44ae426082"
)
open(spec["output"], "wb").write(png)
"""


@pytest.fixture()
def project(tmp_path) -> Path:
    (tmp_path / "article.fid").write_text(ARTICLE, encoding="utf-8")
    (tmp_path / "dot.py").write_text(DOT_RENDERER, encoding="utf-8")
    return tmp_path


def options_for(project: Path) -> BuildOptions:
    return BuildOptions(input=project / "article.fid", out_dir=project / "out")


def wait_for(predicate, deadline_s: float = 10.0, step_s: float = 0.02):
    end = time.monotonic() + deadline_s
    while time.monotonic() < end:
        if predicate():
            return True
        time.sleep(step_s)
    return False


def test_default_poll_interval():
    assert POLL_INTERVAL_S == 0.25


def test_build_site_returns_file_tree(project):
    site = build_site(options_for(project), Format.SCROLLER)
    assert "index.html" in site
    assert "manifest.json" in site
    assert "assets/dot__x=1.png" in site
    assert json.loads(site["manifest.json"])["schemaVersion"] == 1


def test_build_site_failure_lists_diagnostics(project):
    (project / "article.fid").write_text("{scene}\n\nNo graphic.\n")
    with pytest.raises(BuildFailure) as info:
        build_site(options_for(project), Format.SCROLLER)
    assert info.value.messages


def test_preview_serves_and_404s(project):
    app = create_preview_app(options_for(project), Format.SCROLLER)
    with TestClient(app) as client:
        page = client.get("/")
        assert page.status_code == 200
        assert "Original stage text." in page.text
        assert client.get("/index.html").status_code == 200
        assert client.get("/style.css").status_code == 200
        assert client.get("/missing.png").status_code == 404


def test_preview_initial_build_failure_raises(project):
    (project / "article.fid").write_text("{scene}\n\nNo graphic.\n")
    with pytest.raises(BuildFailure):
        create_preview_app(options_for(project), Format.SCROLLER)


def test_preview_rebuilds_and_pushes_reload(project):
    app = create_preview_app(
        options_for(project), Format.SCROLLER, poll_interval=0.05
    )
    with TestClient(app) as client:
        with client.websocket_connect("/reload") as socket:
            (project / "article.fid").write_text(
                ARTICLE.replace("Original stage text.", "Edited stage text.")
            )
            assert wait_for(lambda: app.state.build_id >= 2)
            message = json.loads(socket.receive_text())
            assert message == {"kind": "reload", "buildId": 2}
            assert "Edited stage text." in client.get("/").text


def test_preview_keeps_last_good_site_on_broken_edit(project):
    app = create_preview_app(
        options_for(project), Format.SCROLLER, poll_interval=0.05
    )
    with TestClient(app) as client:
        source = project / "article.fid"
        source.write_text("{scene}\n\nNow broken: no graphic.\n")
        # give the watcher several polls to notice and fail the rebuild
        time.sleep(0.5)
        assert app.state.build_id == 1
        assert "Original stage text." in client.get("/").text

        source.write_text(ARTICLE.replace("Original", "Repaired"))
        assert wait_for(lambda: app.state.build_id >= 2)
        assert "Repaired stage text." in client.get("/").text


# sync hub unit behavior


def test_hub_accepts_increasing_sequences():
    hub = SyncHub()
    assert hub.accept_message({"kind": "slideChange", "seq": 1, "index": 0})
    assert hub.accept_message({"kind": "stateUpdate", "seq": 2, "params": {}})
    assert hub.last_seq == 2


def test_hub_drops_stale_and_malformed():
    hub = SyncHub()
    assert hub.accept_message({"kind": "slideChange", "seq": 5})
    assert not hub.accept_message({"kind": "slideChange", "seq": 5})
    assert not hub.accept_message({"kind": "slideChange", "seq": 4})
    assert not hub.accept_message({"kind": "applause", "seq": 6})
    assert not hub.accept_message({"kind": "slideChange", "seq": "7"})
    assert not hub.accept_message({"kind": "slideChange"})
    assert hub.last_seq == 5


def test_hub_replay_orders_slide_before_state():
    hub = SyncHub()
    hub.accept_message({"kind": "stateUpdate", "seq": 1, "params": {"x": 2}})
    hub.accept_message({"kind": "slideChange", "seq": 2, "index": 3})
    replay = hub.replay()
    assert [m["kind"] for m in replay] == ["slideChange", "stateUpdate"]
    assert hub.replay()[0]["index"] == 3


def test_hub_replay_empty_before_any_message():
    assert SyncHub().replay() == []


# presenter relay integration


def test_present_pages_and_relay(project):
    app = create_present_app(options_for(project))
    with TestClient(app) as client:
        assert "Served" in client.get("/").text
        assert client.get("/presenter").status_code == 200

        with client.websocket_connect("/sync") as presenter:
            presenter.send_json({"role": "presenter"})
            assert presenter.receive_json() == {
                "kind": "hello",
                "role": "presenter",
            }
            with client.websocket_connect("/sync") as audience:
                audience.send_json({"role": "audience"})
                assert audience.receive_json()["role"] == "audience"

                presenter.send_json({"kind": "slideChange", "seq": 1, "index": 2})
                forwarded = audience.receive_json()
                assert forwarded == {"kind": "slideChange", "seq": 1, "index": 2}

                update = {"kind": "stateUpdate", "seq": 2, "params": {"x": 9}}
                presenter.send_json(update)
                assert audience.receive_json() == update


def test_present_replays_state_to_late_joiners(project):
    app = create_present_app(options_for(project))
    with TestClient(app) as client:
        with client.websocket_connect("/sync") as presenter:
            presenter.send_json({"role": "presenter"})
            presenter.receive_json()
            presenter.send_json({"kind": "stateUpdate", "seq": 1, "params": {"x": 1}})
            presenter.send_json({"kind": "slideChange", "seq": 2, "index": 4})
            # replay must reflect both messages for anyone joining now
            assert wait_for(lambda: app.state.hub.last_seq == 2)

            with client.websocket_connect("/sync") as audience:
                audience.send_json({"role": "audience"})
                assert audience.receive_json()["kind"] == "hello"
                assert audience.receive_json() == {
                    "kind": "slideChange",
                    "seq": 2,
                    "index": 4,
                }
                assert audience.receive_json() == {
                    "kind": "stateUpdate",
                    "seq": 1,
                    "params": {"x": 1},
                }


def test_present_refuses_second_presenter(project):
    app = create_present_app(options_for(project))
    with TestClient(app) as client:
        with client.websocket_connect("/sync") as first:
            first.send_json({"role": "presenter"})
            first.receive_json()
            with client.websocket_connect("/sync") as second:
                second.send_json({"role": "presenter"})
                refusal = second.receive_json()
                assert refusal["kind"] == "error"
                with pytest.raises(WebSocketDisconnect) as info:
                    second.receive_json()
                assert info.value.code == 1008
        # the seat frees up once the first presenter leaves
        with client.websocket_connect("/sync") as third:
            third.send_json({"role": "presenter"})
            assert third.receive_json()["role"] == "presenter"


def test_present_drops_stale_frames_in_flight(project):
    app = create_present_app(options_for(project))
    with TestClient(app) as client:
        with client.websocket_connect("/sync") as presenter:
            presenter.send_json({"role": "presenter"})
            presenter.receive_json()
            with client.websocket_connect("/sync") as audience:
                audience.send_json({"role": "audience"})
                audience.receive_json()

                presenter.send_json({"kind": "slideChange", "seq": 3, "index": 1})
                presenter.send_json({"kind": "slideChange", "seq": 3, "index": 99})
                presenter.send_json({"kind": "slideChange", "seq": 4, "index": 2})
                assert audience.receive_json()["index"] == 1
                # the duplicate seq never reaches the audience
                assert audience.receive_json()["index"] == 2


def test_present_ignores_unparseable_frames(project):
    app = create_present_app(options_for(project))
    with TestClient(app) as client:
        with client.websocket_connect("/sync") as presenter:
            presenter.send_json({"role": "presenter"})
            presenter.receive_json()
            with client.websocket_connect("/sync") as audience:
                audience.send_json({"role": "audience"})
                audience.receive_json()

                presenter.send_text("this is not json")
                presenter.send_json({"kind": "slideChange", "seq": 1, "index": 0})
                assert audience.receive_json()["seq"] == 1
