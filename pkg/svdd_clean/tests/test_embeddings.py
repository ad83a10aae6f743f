import asyncio

import numpy as np
import pytest
from aiohttp import web
from aiohttp.test_utils import TestServer

from ..embeddings import (
    EmbeddingProviderConfig,
    embed_hashing,
    embed_precomputed,
    embed_records,
    embed_remote_async,
    hash_text,
)
from ..errors import EmbeddingError, ProtocolError, ShapeError, TransportError
from .conftest import records_for, write_jsonl


def test_precomputed_reorders_by_record_id(tmp_path):
    path = write_jsonl(
        tmp_path / "emb.jsonl",
        [{"id": "a", "vector": [1, 0]}, {"id": "b", "vector": [0, 1]}],
    )
    config = EmbeddingProviderConfig(kind="precomputed", dim=2, path=path)
    records = records_for([0, 0])
    records = [records[0].model_copy(update={"id": "b"}), records[1].model_copy(update={"id": "a"})]
    np.testing.assert_array_equal(embed_precomputed(config, records), [[0, 1], [1, 0]])


def test_precomputed_empty_records(tmp_path):
    config = EmbeddingProviderConfig(kind="precomputed", dim=2, path=tmp_path / "none.jsonl")
    assert embed_precomputed(config, []).shape == (0, 2)


def test_precomputed_dimension_mismatch(tmp_path):
    path = write_jsonl(tmp_path / "emb.jsonl", [{"id": "0", "vector": [1, 2, 3]}])
    config = EmbeddingProviderConfig(kind="precomputed", dim=384, path=path)
    with pytest.raises(ShapeError, match="expected 384"):
        embed_precomputed(config, records_for([0]))


def test_precomputed_lists_at_most_ten_missing_ids(tmp_path):
    path = write_jsonl(tmp_path / "emb.jsonl", [{"id": "0", "vector": [1, 2]}])
    config = EmbeddingProviderConfig(kind="precomputed", dim=2, path=path)
    with pytest.raises(EmbeddingError) as info:
        embed_precomputed(config, records_for([0] * 15))
    message = str(info.value)
    assert "14 record(s)" in message
    assert "'10'" in message
    assert "'11'" not in message
    assert "4 more" in message


def test_precomputed_needs_a_path():
    with pytest.raises(ValueError):
        EmbeddingProviderConfig(kind="precomputed")


def test_hashing_is_deterministic():
    a = hash_text("the quick brown fox", 64, 0, r"[a-z0-9]+")
    b = hash_text("the quick brown fox", 64, 0, r"[a-z0-9]+")
    np.testing.assert_array_equal(a, b)
    assert np.linalg.norm(a) == pytest.approx(1.0)


def test_hashing_empty_text_is_zero():
    assert not hash_text("", 64, 0, r"[a-z0-9]+").any()


def test_hashing_ignores_token_order():
    np.testing.assert_array_equal(
        hash_text("aa bb", 64, 0, r"[a-z0-9]+"), hash_text("bb aa", 64, 0, r"[a-z0-9]+")
    )


def test_hashing_seed_changes_buckets():
    text = "one two three four five six seven"
    assert not np.array_equal(
        hash_text(text, 1024, 0, r"[a-z0-9]+"), hash_text(text, 1024, 1, r"[a-z0-9]+")
    )


def test_embed_records_dispatches_to_hashing():
    config = EmbeddingProviderConfig(kind="hashing", dim=16)
    records = records_for([0, 1, 2])
    np.testing.assert_array_equal(embed_records(config, records), embed_hashing(config, records))


class _FakeEmbeddingService:
    """In-process ``POST /embed`` endpoint with scripted failures."""

    def __init__(self, dim=3, fail_first=0, short_by=0):
        self.dim = dim
        self.fail_first = fail_first
        self.short_by = short_by
        self.requests = 0

    async def embed(self, request):
        self.requests += 1
        if self.requests <= self.fail_first:
            return web.Response(status=503)
        texts = (await request.json())["texts"]
        count = len(texts) - self.short_by
        return web.json_response(
            {"embeddings": [[float(len(t))] * self.dim for t in texts[:count]]}
        )

    def app(self):
        app = web.Application()
        app.router.add_post("/embed", self.embed)
        return app


def _run_against(service, records, **config):
    async def run():
        server = TestServer(service.app())
        await server.start_server()
        try:
            provider = EmbeddingProviderConfig(
                kind="remote",
                dim=service.dim,
                base_url=str(server.make_url("/")),
                backoff=0,
                **config,
            )
            return await embed_remote_async(provider, records)
        finally:
            await server.close()

    return asyncio.run(run())


def test_remote_batches_requests():
    service = _FakeEmbeddingService()
    vectors = _run_against(service, records_for([0] * 5), batch_size=2)
    assert service.requests == 3
    assert vectors.shape == (5, 3)
    # Input order survives concurrent batches
    np.testing.assert_array_equal(vectors[:, 0], [len(f"text {i}") for i in range(5)])


def test_remote_wrong_arity_is_protocol_error():
    service = _FakeEmbeddingService(short_by=1)
    with pytest.raises(ProtocolError, match="4 vectors for 5 texts"):
        _run_against(service, records_for([0] * 5), batch_size=10)


def test_remote_wrong_dimension_is_protocol_error():
    service = _FakeEmbeddingService(dim=3)

    async def run():
        server = TestServer(service.app())
        await server.start_server()
        try:
            provider = EmbeddingProviderConfig(
                kind="remote", dim=4, base_url=str(server.make_url("/")), backoff=0
            )
            return await embed_remote_async(provider, records_for([0]))
        finally:
            await server.close()

    with pytest.raises(ProtocolError):
        asyncio.run(run())


def test_remote_retries_unavailable_service():
    service = _FakeEmbeddingService(fail_first=2)
    vectors = _run_against(service, records_for([0]), retries=2)
    assert service.requests == 3
    assert vectors.shape == (1, 3)


def test_remote_gives_up_after_retries():
    service = _FakeEmbeddingService(fail_first=10)
    with pytest.raises(TransportError, match="3 attempt"):
        _run_against(service, records_for([0]), retries=2)
    assert service.requests == 3
