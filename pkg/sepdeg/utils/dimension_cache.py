import hashlib
import json
import logging
import threading
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)


class DimensionCache:
    """On-disk memo of (descriptor, field, degree) -> dim F[V]^G_d, one JSON file per key."""

    def __init__(self, cache_dir: str):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    @staticmethod
    def make_key(descriptor: dict, field: dict, degree: int) -> str:
        payload = json.dumps({'descriptor': descriptor, 'field': field, 'degree': degree},
                             sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()

    def _path(self, key: str) -> Path:
        return self.cache_dir / f"{key}.json"

    def get(self, key: str) -> Optional[int]:
        path = self._path(key)
        if not path.exists():
            return None
        try:
            with open(path, 'r') as f:
                return int(json.load(f)['dimension'])
        except (OSError, ValueError, KeyError) as e:
            logger.warning(f"Ignoring unreadable cache entry {path.name}: {e}")
            return None

    def put(self, key: str, dimension: int):
        path = self._path(key)
        tmp = path.with_suffix('.tmp')
        with self._lock:
            try:
                with open(tmp, 'w') as f:
                    json.dump({'dimension': int(dimension)}, f)
                tmp.replace(path)
            except OSError as e:
                logger.warning(f"Could not write cache entry {path.name}: {e}")
