"""HTTP service contract: degradation, feedback capture, concurrency."""
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest
from fastapi.testclient import TestClient

from librec.service import create_app, summarize_feedback_log


@pytest.fixture()
def client(small_synthetic_bundle, tmp_path):
    app = create_app(small_synthetic_bundle, feedback_log=tmp_path / "feedback.jsonl")
    with TestClient(app) as c:
        c.feedback_log = tmp_path / "feedback.jsonl"
        yield c


def test_recommend_known_import(client, small_synthetic_bundle):
    name = small_synthetic_bundle.vocab.packages[0]
    resp = client.post("/v1/recommend", json={"code": f"import {name}\n"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["imports_detected"] == [name]
    assert len(body["complementary"]) == 5
    assert body["complementary"][0]["kind"] == "complementary"
    assert body["request_id"]


def test_recommend_empty_code(client):
    resp = client.post("/v1/recommend", json={"code": ""})
    assert resp.status_code == 200
    body = resp.json()
    assert body["complementary"] == []
    assert body["warnings"]


def test_recommend_unknown_imports_degrade(client):
    resp = client.post("/v1/recommend", json={"code": "import totally_unknown_pkg\n"})
    assert resp.status_code == 200
    body = resp.json()
    assert body["complementary"] == []
    assert any("no known imports" in w for w in body["warnings"])


def test_recommend_filters_already_imported(client, small_synthetic_bundle):
    name = small_synthetic_bundle.vocab.packages[0]
    code = f'import {name}\n"""library {name} utilities"""\n'
    resp = client.post("/v1/recommend", json={"code": code})
    assert resp.status_code == 200
    alt = resp.json()["alternative"]
    assert name not in [r["package"] for r in alt]


def test_recommend_k_parameters(client, small_synthetic_bundle):
    name = small_synthetic_bundle.vocab.packages[0]
    resp = client.post("/v1/recommend", json={
        "code": f"import {name}\n", "top_k_complementary": 2, "top_k_alternative": 1})
    body = resp.json()
    assert len(body["complementary"]) == 2
    assert len(body["alternative"]) <= 1


def test_malformed_json_is_400(client):
    resp = client.post("/v1/recommend", content=b"{not json",
                       headers={"Content-Type": "application/json"})
    assert resp.status_code == 400


def test_missing_code_field_is_400(client):
    resp = client.post("/v1/recommend", json={"top_k_complementary": 3})
    assert resp.status_code == 400


def test_model_not_loaded_is_503(tmp_path):
    app = create_app(None, feedback_log=tmp_path / "f.jsonl")
    with TestClient(app) as c:
        resp = c.post("/v1/recommend", json={"code": "import os"})
        assert resp.status_code == 503


def test_health(client, small_synthetic_bundle):
    resp = client.get("/v1/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok",
                           "model_version": small_synthetic_bundle.format_version}


def test_feedback_appends_log(client):
    resp = client.post("/v1/feedback", json={
        "request_id": "r1", "package": "numpy", "verdict": "yes"})
    assert resp.status_code == 204
    lines = client.feedback_log.read_text().strip().split("\n")
    assert len(lines) == 1
    event = json.loads(lines[0])
    assert event["package"] == "numpy"
    assert event["verdict"] == "yes"
    assert "timestamp" in event


def test_feedback_unknown_verdict_is_400(client):
    resp = client.post("/v1/feedback", json={
        "request_id": "r1", "package": "numpy", "verdict": "maybe"})
    assert resp.status_code == 400


def test_concurrent_identical_requests_identical_lists(client, small_synthetic_bundle):
    name = small_synthetic_bundle.vocab.packages[3]
    payload = {"code": f"import {name}\n"}

    def call(_):
        r = client.post("/v1/recommend", json=payload)
        assert r.status_code == 200
        body = r.json()
        return (json.dumps(body["complementary"]), json.dumps(body["alternative"]),
                body["request_id"])

    with ThreadPoolExecutor(max_workers=16) as pool:
        results = list(pool.map(call, range(50)))
    assert len({r[0] for r in results}) == 1
    assert len({r[1] for r in results}) == 1
    assert len({r[2] for r in results}) == 50  # ids unique


def test_concurrent_feedback_no_lost_writes(client):
    def call(i):
        r = client.post("/v1/feedback", json={
            "request_id": f"r{i}", "package": "pkg", "verdict": "not_relevant"})
        assert r.status_code == 204

    with ThreadPoolExecutor(max_workers=16) as pool:
        list(pool.map(call, range(50)))
    lines = client.feedback_log.read_text().strip().split("\n")
    assert len(lines) == 50
    assert all(json.loads(line)["verdict"] == "not_relevant" for line in lines)


def test_feedback_log_summary(client):
    for verdict in ("yes", "yes", "relevant_not_required", "not_relevant"):
        client.post("/v1/feedback", json={
            "request_id": "r", "package": "p", "verdict": verdict})
    summary = summarize_feedback_log(client.feedback_log)
    assert summary["total"] == 4
    assert summary["counts"]["yes"] == 2
    assert summary["shares"]["yes"] == 0.5


def test_bundle_hot_swap(small_synthetic_bundle, tmp_path):
    app = create_app(None, feedback_log=tmp_path / "f.jsonl")
    with TestClient(app) as c:
        assert c.post("/v1/recommend", json={"code": "import os"}).status_code == 503
        app.state.bundle = small_synthetic_bundle
        assert c.post("/v1/recommend", json={"code": "import os"}).status_code == 200


# ---------------------------------------------------------------------------
# Remote summarizer wiring
# ---------------------------------------------------------------------------

class _Summarizer(BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        json.loads(self.rfile.read(length))
        if self.server.mode == "ok":
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.end_headers()
            self.wfile.write(json.dumps({"summary": "charting utilities"}).encode())
        else:
            self.send_response(500)
            self.end_headers()

    def log_message(self, *args):
        pass


@pytest.fixture()
def summarizer_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _Summarizer)
    server.mode = "ok"
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield server, f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()


def test_remote_summarizer_used(small_synthetic_bundle, tmp_path, summarizer_server):
    _, url = summarizer_server
    app = create_app(small_synthetic_bundle, feedback_log=tmp_path / "f.jsonl",
                     summarizer_url=url)
    with TestClient(app) as c:
        resp = c.post("/v1/recommend", json={"code": "x = 1"})
        assert resp.status_code == 200
        alt = resp.json()["alternative"]
        assert alt, "summary should retrieve charting packages"


def test_remote_summarizer_fallback_warns(small_synthetic_bundle, tmp_path,
                                          summarizer_server):
    server, url = summarizer_server
    server.mode = "fail"
    app = create_app(small_synthetic_bundle, feedback_log=tmp_path / "f.jsonl",
                     summarizer_url=url, summarizer_fallback=True)
    with TestClient(app) as c:
        resp = c.post("/v1/recommend", json={"code": "import os"})
        assert resp.status_code == 200
        assert any("summarizer unavailable" in w for w in resp.json()["warnings"])


def test_remote_summarizer_no_fallback_503(small_synthetic_bundle, tmp_path,
                                           summarizer_server):
    server, url = summarizer_server
    server.mode = "fail"
    app = create_app(small_synthetic_bundle, feedback_log=tmp_path / "f.jsonl",
                     summarizer_url=url, summarizer_fallback=False)
    with TestClient(app) as c:
        resp = c.post("/v1/recommend", json={"code": "import os"})
        assert resp.status_code == 503
