import json
import logging
import struct
import threading
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from core.errors import DimensionError, IndexFormatError, VectorStoreError
from models.dataset_models import EmbeddingVector, SearchHit, VectorEntry
from utils.helpers import atomic_write_bytes

logger = logging.getLogger(__name__)

INDEX_MAGIC = b"QAVI"
INDEX_VERSION = 1
_HEADER = struct.Struct("<4sHII")
_LENGTH = struct.Struct("<I")

QueryVector = Union[EmbeddingVector, Sequence[float], np.ndarray]


class VectorIndex:
    """Exact cosine index over demand/response embeddings.

    Inserts take an exclusive lock; searches scan every stored vector.
    """

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self._lock = threading.RLock()
        self._entries: List[Dict[str, str]] = []
        self._positions: Dict[str, int] = {}
        self._rows: List[np.ndarray] = []
        self._matrix: Optional[np.ndarray] = None

    def count(self) -> int:
        return len(self._entries)

    def insert(self, entry: VectorEntry) -> str:
        vector = np.asarray(entry.embedding.values, dtype=np.float32)
        if vector.shape != (self.dim,):
            raise DimensionError(self.dim, int(vector.size))
        with self._lock:
            if entry.entry_id in self._positions:
                raise VectorStoreError(f"Duplicate entry_id '{entry.entry_id}'")
            self._positions[entry.entry_id] = len(self._entries)
            self._entries.append(
                {
                    "entry_id": entry.entry_id,
                    "text": entry.text,
                    "persona": entry.persona,
                    "call_id": entry.call_id,
                    "model_tag": entry.embedding.model_tag,
                }
            )
            self._rows.append(vector)
            self._matrix = None
        return entry.entry_id

    def _snapshot(self):
        with self._lock:
            if self._matrix is None:
                self._matrix = np.vstack(self._rows) if self._rows else np.zeros((0, self.dim), dtype=np.float32)
            return self._matrix, list(self._entries)

    def get(self, entry_id: str) -> VectorEntry:
        with self._lock:
            if entry_id not in self._positions:
                raise VectorStoreError(f"Unknown entry_id '{entry_id}'")
            position = self._positions[entry_id]
            meta = self._entries[position]
            values = self._rows[position].astype(np.float64).tolist()
        return VectorEntry(
            entry_id=meta["entry_id"],
            text=meta["text"],
            persona=meta["persona"],
            call_id=meta["call_id"],
            embedding=EmbeddingVector(values=values, model_tag=meta["model_tag"]),
        )

    def search(
        self,
        query: QueryVector,
        k: int,
        persona_filter: Optional[str] = None,
        exclude_call_id: Optional[str] = None,
    ) -> List[SearchHit]:
        """Top-k by cosine similarity; ties broken by ascending entry_id.

        Zero-norm vectors (query or stored) score 0.
        """
        values = query.values if isinstance(query, EmbeddingVector) else query
        q = np.asarray(values, dtype=np.float64)
        if q.shape != (self.dim,):
            raise DimensionError(self.dim, int(q.size))
        if k < 1:
            raise ValueError("k must be >= 1")

        matrix, entries = self._snapshot()
        if not entries:
            return []
        stored = matrix.astype(np.float64)
        norms = np.linalg.norm(stored, axis=1) * np.linalg.norm(q)
        dots = stored @ q
        scores = np.divide(dots, norms, out=np.zeros(len(entries)), where=norms > 0)
        scores = np.clip(scores, -1.0, 1.0)

        candidates = [
            (float(scores[i]), meta["entry_id"])
            for i, meta in enumerate(entries)
            if (persona_filter is None or meta["persona"] == persona_filter)
            and (exclude_call_id is None or meta["call_id"] != exclude_call_id)
        ]
        candidates.sort(key=lambda c: (-c[0], c[1]))
        return [
            SearchHit(entry_id=entry_id, score=score, rank=rank)
            for rank, (score, entry_id) in enumerate(candidates[:k], start=1)
        ]

    def persist(self, path: Union[str, Path]) -> Path:
        """Binary layout: header {magic, version, dim, count}, then per entry a
        length-prefixed JSON metadata block followed by dim float32 values."""
        matrix, entries = self._snapshot()
        chunks = [_HEADER.pack(INDEX_MAGIC, INDEX_VERSION, self.dim, len(entries))]
        for meta, row in zip(entries, matrix):
            blob = json.dumps(meta, ensure_ascii=False, sort_keys=True).encode("utf-8")
            chunks.append(_LENGTH.pack(len(blob)))
            chunks.append(blob)
            chunks.append(row.astype("<f4").tobytes())
        path = atomic_write_bytes(path, b"".join(chunks))
        logger.info(f"💾 Persisted {len(entries)} vector(s) to {path}")
        return path

    @classmethod
    def load(cls, path: Union[str, Path], expected_dim: Optional[int] = None) -> "VectorIndex":
        data = Path(path).read_bytes()
        if len(data) < _HEADER.size:
            raise IndexFormatError(f"{path}: file too short for an index header")
        magic, version, dim, count = _HEADER.unpack_from(data, 0)
        if magic != INDEX_MAGIC:
            raise IndexFormatError(f"{path}: bad magic bytes {magic!r}")
        if version != INDEX_VERSION:
            raise IndexFormatError(f"{path}: unsupported index version {version}")
        if expected_dim is not None and dim != expected_dim:
            raise DimensionError(expected_dim, dim)

        index = cls(dim)
        offset = _HEADER.size
        row_bytes = 4 * dim
        try:
            for _ in range(count):
                (length,) = _LENGTH.unpack_from(data, offset)
                offset += _LENGTH.size
                meta = json.loads(data[offset:offset + length].decode("utf-8"))
                offset += length
                if offset + row_bytes > len(data):
                    raise IndexFormatError(f"{path}: truncated vector data")
                row = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).astype(np.float32)
                offset += row_bytes
                index._positions[meta["entry_id"]] = len(index._entries)
                index._entries.append(meta)
                index._rows.append(row)
        except (struct.error, ValueError, KeyError) as e:
            raise IndexFormatError(f"{path}: corrupt entry data: {e}")
        if offset != len(data):
            raise IndexFormatError(f"{path}: {len(data) - offset} trailing byte(s)")
        return index
