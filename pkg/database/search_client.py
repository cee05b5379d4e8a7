import logging
from typing import Dict, List, Optional

import numpy as np
import requests

from core.errors import DimensionError, VectorStoreError
from database.vector_store import QueryVector
from models.dataset_models import EmbeddingVector, SearchHit

logger = logging.getLogger(__name__)


class HttpSearchClient:
    """External search service with the local index's search contract.

    POST {vector, k, filter: {persona, exclude_call_id}} -> {hits: [{entry_id, score}]}
    """

    def __init__(self, endpoint: str, dim: int, timeout_s: float = 30.0, headers: Optional[Dict[str, str]] = None):
        self.endpoint = endpoint
        self.dim = dim
        self.timeout_s = timeout_s
        self.headers = headers or {}

    def search(
        self,
        query: QueryVector,
        k: int,
        persona_filter: Optional[str] = None,
        exclude_call_id: Optional[str] = None,
    ) -> List[SearchHit]:
        values = query.values if isinstance(query, EmbeddingVector) else np.asarray(query).tolist()
        if len(values) != self.dim:
            raise DimensionError(self.dim, len(values))
        if k < 1:
            raise ValueError("k must be >= 1")

        payload = {
            "vector": [float(v) for v in values],
            "k": k,
            "filter": {"persona": persona_filter, "exclude_call_id": exclude_call_id},
        }
        try:
            response = requests.post(self.endpoint, json=payload, headers=self.headers, timeout=self.timeout_s)
            response.raise_for_status()
            raw_hits = response.json()["hits"]
        except (requests.RequestException, ValueError, KeyError, TypeError) as e:
            logger.error(f"❌ Search service call failed: {e}")
            raise VectorStoreError(f"Search service at {self.endpoint} failed: {e}")

        hits = sorted(
            ((float(h["score"]), str(h["entry_id"])) for h in raw_hits),
            key=lambda h: (-h[0], h[1]),
        )[:k]
        return [SearchHit(entry_id=entry_id, score=score, rank=rank) for rank, (score, entry_id) in enumerate(hits, start=1)]
