import struct
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
import requests

from core.errors import DimensionError, IndexFormatError, VectorStoreError
from database.search_client import HttpSearchClient
from database.vector_store import VectorIndex
from models.dataset_models import EmbeddingVector, VectorEntry


def entry(entry_id, values, persona="agent", call_id=None, text="texto"):
    return VectorEntry(
        entry_id=entry_id,
        text=text,
        persona=persona,
        call_id=call_id or entry_id.split(":")[0],
        embedding=EmbeddingVector(values=[float(v) for v in values], model_tag="test"),
    )


def random_index(n, dim, seed=0):
    rng = np.random.default_rng(seed)
    index = VectorIndex(dim)
    vectors = rng.standard_normal((n, dim)).astype(np.float32)
    for i, row in enumerate(vectors):
        persona = "agent" if i % 2 else "customer"
        index.insert(entry(f"call_{i:04d}:{persona[0]}", row, persona=persona, call_id=f"call_{i:04d}"))
    return index, vectors


def cosine_oracle(vectors, ids, query, k):
    stored = vectors.astype(np.float64)
    q = np.asarray(query, dtype=np.float64)
    scores = []
    for row, entry_id in zip(stored, ids):
        denominator = np.linalg.norm(row) * np.linalg.norm(q)
        scores.append((float(row @ q / denominator) if denominator > 0 else 0.0, entry_id))
    scores.sort(key=lambda s: (-s[0], s[1]))
    return [entry_id for _, entry_id in scores[:k]]


# --- insert ---

def test_self_similarity_ranks_first():
    index = VectorIndex(4)
    index.insert(entry("a:r0", [1, 2, 3, 4]))
    index.insert(entry("b:r0", [4, 3, 2, 1]))
    (hit, *_) = index.search([1, 2, 3, 4], k=2)
    assert hit.entry_id == "a:r0"
    assert hit.rank == 1
    assert hit.score == pytest.approx(1.0, abs=1e-6)


def test_duplicate_entry_id():
    index = VectorIndex(2)
    index.insert(entry("a:r0", [1, 0]))
    with pytest.raises(VectorStoreError):
        index.insert(entry("a:r0", [0, 1]))


def test_dimension_mismatch_on_insert_and_search():
    index = VectorIndex(3)
    with pytest.raises(DimensionError):
        index.insert(entry("a:r0", [1, 0]))
    with pytest.raises(DimensionError):
        index.search([1.0, 0.0], k=1)


def test_thousand_inserts_counted():
    index, _ = random_index(1000, 8)
    assert index.count() == 1000


def test_concurrent_inserts_all_visible():
    index = VectorIndex(4)
    rng = np.random.default_rng(1)
    entries = [entry(f"c{i}:r0", rng.standard_normal(4)) for i in range(200)]
    with ThreadPoolExecutor(max_workers=8) as pool:
        list(pool.map(index.insert, entries))
    assert index.count() == 200
    assert len(index.search(rng.standard_normal(4), k=500)) == 200


def test_get_returns_stored_entry():
    index = VectorIndex(2)
    index.insert(entry("a:r0", [0.5, -0.5], persona="agent", call_id="a", text="Resposta."))
    stored = index.get("a:r0")
    assert (stored.text, stored.persona, stored.call_id) == ("Resposta.", "agent", "a")
    assert stored.embedding.values == [0.5, -0.5]
    with pytest.raises(VectorStoreError):
        index.get("missing")


# --- search ---

def test_k_larger_than_index_returns_everything_sorted():
    index = VectorIndex(2)
    index.insert(entry("a:r0", [1, 0]))
    index.insert(entry("b:r0", [1, 1]))
    index.insert(entry("c:r0", [0, 1]))
    hits = index.search([1, 0.1], k=10)
    assert [h.entry_id for h in hits] == ["a:r0", "b:r0", "c:r0"]
    assert [h.rank for h in hits] == [1, 2, 3]
    assert all(a.score >= b.score for a, b in zip(hits, hits[1:]))


def test_orthogonal_query_scores_zero():
    index = VectorIndex(3)
    index.insert(entry("a:r0", [1, 0, 0]))
    (hit,) = index.search([0, 1, 0], k=1)
    assert hit.score == 0.0


def test_zero_norm_vectors_score_zero():
    index = VectorIndex(2)
    index.insert(entry("a:r0", [0, 0]))
    assert index.search([1, 0], k=1)[0].score == 0.0
    assert index.search([0, 0], k=1)[0].score == 0.0


def test_ties_break_by_entry_id():
    index = VectorIndex(2)
    for entry_id in ("c:r0", "a:r0", "b:r0"):
        index.insert(entry(entry_id, [1, 1]))
    assert [h.entry_id for h in index.search([2, 2], k=3)] == ["a:r0", "b:r0", "c:r0"]


def test_persona_filter_and_call_exclusion():
    index, _ = random_index(50, 6)
    rng = np.random.default_rng(3)
    hits = index.search(rng.standard_normal(6), k=50, persona_filter="agent")
    assert len(hits) == 25
    assert all(h.entry_id.endswith(":a") for h in hits)

    query = index.get("call_0001:a").embedding
    excluded = index.search(query, k=5, persona_filter="agent", exclude_call_id="call_0001")
    assert "call_0001:a" not in [h.entry_id for h in excluded]


def test_search_matches_exhaustive_oracle():
    dim = 1536
    index, vectors = random_index(1000, dim, seed=42)
    ids = [f"call_{i:04d}:{'a' if i % 2 else 'c'}" for i in range(1000)]
    rng = np.random.default_rng(43)
    for _ in range(100):
        query = rng.standard_normal(dim)
        hits = index.search(query, k=10)
        assert [h.entry_id for h in hits] == cosine_oracle(vectors, ids, query, 10)
        assert [h.rank for h in hits] == list(range(1, 11))


def test_cosine_is_scale_invariant():
    index, _ = random_index(300, 32, seed=5)
    rng = np.random.default_rng(6)
    for _ in range(20):
        query = rng.standard_normal(32)
        plain = [(h.entry_id, h.rank) for h in index.search(query, k=10)]
        scaled = [(h.entry_id, h.rank) for h in index.search(3.0 * query, k=10)]
        assert plain == scaled


def test_search_is_deterministic():
    index, _ = random_index(100, 16, seed=8)
    query = np.random.default_rng(9).standard_normal(16)
    assert index.search(query, k=7) == index.search(query, k=7)


# --- persistence ---

def test_empty_index_round_trip(tmp_path):
    path = VectorIndex(8).persist(tmp_path / "vectors.idx")
    loaded = VectorIndex.load(path)
    assert loaded.dim == 8
    assert loaded.count() == 0


def test_round_trip_answers_identically(tmp_path):
    index, _ = random_index(500, 64, seed=11)
    loaded = VectorIndex.load(index.persist(tmp_path / "vectors.idx"), expected_dim=64)
    assert loaded.count() == 500
    rng = np.random.default_rng(12)
    for _ in range(20):
        query = rng.standard_normal(64)
        assert loaded.search(query, k=10) == index.search(query, k=10)
    assert loaded.get("call_0007:a") == index.get("call_0007:a")


def test_wrong_magic_bytes(tmp_path):
    path = VectorIndex(4).persist(tmp_path / "vectors.idx")
    path.write_bytes(b"NOPE" + path.read_bytes()[4:])
    with pytest.raises(IndexFormatError):
        VectorIndex.load(path)


def test_unsupported_version(tmp_path):
    path = tmp_path / "vectors.idx"
    path.write_bytes(struct.pack("<4sHII", b"QAVI", 99, 4, 0))
    with pytest.raises(IndexFormatError):
        VectorIndex.load(path)


def test_truncated_file(tmp_path):
    index, _ = random_index(5, 4)
    path = index.persist(tmp_path / "vectors.idx")
    path.write_bytes(path.read_bytes()[:-3])
    with pytest.raises(IndexFormatError):
        VectorIndex.load(path)


def test_dimension_differs_from_config(tmp_path):
    path = VectorIndex(4).persist(tmp_path / "vectors.idx")
    with pytest.raises(DimensionError):
        VectorIndex.load(path, expected_dim=1536)


# --- external search service ---

class FakeResponse:
    def __init__(self, payload, status_code=200):
        self.payload = payload
        self.status_code = status_code

    def raise_for_status(self):
        if self.status_code != 200:
            raise requests.HTTPError(f"HTTP {self.status_code}")

    def json(self):
        return self.payload


def test_http_search_client_contract(monkeypatch):
    seen = {}

    def fake_post(url, json, headers, timeout):
        seen.update(json)
        return FakeResponse({"hits": [
            {"entry_id": "b:r0", "score": 0.5},
            {"entry_id": "a:r0", "score": 0.9},
            {"entry_id": "c:r0", "score": 0.5},
        ]})

    monkeypatch.setattr(requests, "post", fake_post)
    client = HttpSearchClient("http://search.local", dim=3)
    hits = client.search([1.0, 0.0, 0.0], k=2, persona_filter="agent", exclude_call_id="x")
    assert seen == {"vector": [1.0, 0.0, 0.0], "k": 2, "filter": {"persona": "agent", "exclude_call_id": "x"}}
    assert [(h.entry_id, h.rank) for h in hits] == [("a:r0", 1), ("b:r0", 2)]


def test_http_search_client_failure(monkeypatch):
    monkeypatch.setattr(requests, "post", lambda *a, **k: FakeResponse({}, status_code=500))
    with pytest.raises(VectorStoreError):
        HttpSearchClient("http://search.local", dim=2).search([1.0, 0.0], k=1)
