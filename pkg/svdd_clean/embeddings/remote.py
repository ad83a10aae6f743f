import asyncio
import logging
from typing import List, Optional, Sequence

import aiohttp
import numpy as np

from ..constants import JsonDict, embed_url_override
from ..data import DatasetRecord
from ..errors import ProtocolError, TransportError
from .config import EmbeddingProviderConfig

_ENDPOINT_EMBED = "/embed"

_TOO_MANY_REQUESTS = 429

logger = logging.getLogger(__name__)


class _RetryableFailure(Exception):
    pass


class EmbeddingServiceClient:
    """Client for a minimal embedding service: ``POST /embed {"texts": [...]}``
    answered with ``{"embeddings": [[...], ...]}`` in input order."""

    def __init__(
        self,
        base_url: str,
        dim: int,
        timeout: float = 30.0,
        retries: int = 3,
        backoff: float = 0.5,
        max_in_flight: int = 4,
        aiohttp_session: Optional[aiohttp.ClientSession] = None,
    ):
        self._base_url = base_url.rstrip("/")
        self._dim = dim
        self._timeout = aiohttp.ClientTimeout(total=timeout)
        self._retries = retries
        self._backoff = backoff
        self._in_flight = asyncio.Semaphore(max_in_flight)
        self._aiohttp_session = aiohttp_session
        self._owns_session = aiohttp_session is None
        self.requests_sent = 0

    @classmethod
    def from_config(cls, config: EmbeddingProviderConfig, **kwargs):
        return cls(
            base_url=embed_url_override() or config.base_url,
            dim=config.dim,
            timeout=config.timeout,
            retries=config.retries,
            backoff=config.backoff,
            max_in_flight=config.max_in_flight,
            **kwargs,
        )

    async def __aenter__(self):
        if self._aiohttp_session is None:
            self._aiohttp_session = aiohttp.ClientSession(timeout=self._timeout)
        return self

    async def __aexit__(self, *exc_info):
        await self.close()

    async def close(self):
        if self._owns_session and self._aiohttp_session is not None:
            await self._aiohttp_session.close()
            self._aiohttp_session = None

    def _url_with_endpoint(self, endpoint) -> str:
        return f"{self._base_url}{endpoint}"

    async def _post_json(self, endpoint, data: JsonDict) -> JsonDict:
        self.requests_sent += 1
        try:
            async with self._aiohttp_session.post(
                self._url_with_endpoint(endpoint), json=data, timeout=self._timeout
            ) as response:
                if response.status == _TOO_MANY_REQUESTS or response.status >= 500:
                    raise _RetryableFailure(f"HTTP {response.status}")
                if response.status != 200:
                    raise TransportError(
                        f"Embedding service answered HTTP {response.status}"
                    )
                try:
                    return await response.json(content_type=None)
                except ValueError:
                    raise ProtocolError("Embedding service returned invalid JSON")
        except (aiohttp.ClientError, asyncio.TimeoutError) as e:
            raise _RetryableFailure(f"{type(e).__name__}: {e}") from e

    async def _post_with_retries(self, endpoint, data: JsonDict) -> JsonDict:
        attempt = 0
        while True:
            try:
                return await self._post_json(endpoint, data)
            except _RetryableFailure as e:
                if attempt >= self._retries:
                    raise TransportError(
                        f"Embedding request failed after {attempt + 1} attempt(s): {e}"
                    ) from None
                delay = self._backoff * 2**attempt
                logger.warning(f"Embedding request failed ({e}), retrying in {delay:.2f}s")
                await asyncio.sleep(delay)
                attempt += 1

    async def embed_batch(self, texts: List[str]) -> np.ndarray:
        async with self._in_flight:
            body = await self._post_with_retries(_ENDPOINT_EMBED, {"texts": texts})

        embeddings = body.get("embeddings") if isinstance(body, dict) else None
        if not isinstance(embeddings, list) or len(embeddings) != len(texts):
            got = len(embeddings) if isinstance(embeddings, list) else "no"
            raise ProtocolError(
                f"Embedding service returned {got} vectors for {len(texts)} texts"
            )
        try:
            vectors = np.asarray(embeddings, dtype=np.float64)
        except (TypeError, ValueError):
            raise ProtocolError("Embedding service returned ragged or non-numeric vectors")
        if vectors.ndim != 2 or vectors.shape[1] != self._dim:
            raise ProtocolError(
                f"Embedding service returned vectors of shape {vectors.shape}, "
                f"expected dimension {self._dim}"
            )
        if not np.all(np.isfinite(vectors)):
            raise ProtocolError("Embedding service returned non-finite values")
        return vectors

    async def embed(self, texts: Sequence[str], batch_size: int) -> np.ndarray:
        if not texts:
            return np.zeros((0, self._dim))

        batches = [
            list(texts[start : start + batch_size])
            for start in range(0, len(texts), batch_size)
        ]
        tasks = [asyncio.ensure_future(self.embed_batch(batch)) for batch in batches]
        try:
            results = await asyncio.gather(*tasks)
        except BaseException:
            # One failed batch fails the whole call
            for task in tasks:
                task.cancel()
            await asyncio.gather(*tasks, return_exceptions=True)
            raise

        logger.debug(f"Embedded {len(texts)} texts in {len(batches)} request batch(es)")
        return np.vstack(results)


async def embed_remote_async(
    config: EmbeddingProviderConfig,
    records: Sequence[DatasetRecord],
    aiohttp_session: Optional[aiohttp.ClientSession] = None,
) -> np.ndarray:
    async with EmbeddingServiceClient.from_config(
        config, aiohttp_session=aiohttp_session
    ) as client:
        return await client.embed([r.text for r in records], config.batch_size)


def embed_remote(
    config: EmbeddingProviderConfig, records: Sequence[DatasetRecord]
) -> np.ndarray:
    return asyncio.run(embed_remote_async(config, records))
