"""
Cache de ações resolvidas por nó (y, t).
Evita refazer o tiro quando diagnósticos por diferenças finitas revisitam os mesmos nós.
"""
import logging
from collections import OrderedDict
from typing import Hashable, Iterable, Optional, Tuple

import numpy as np

logger = logging.getLogger("chord_wkb_cache")


class ActionCache:
    """Mapa (rótulo da ação inicial, y_p, y_q, t) → (S, deco, 𝒦), com descarte do mais antigo."""

    def __init__(self, max_size: int = 200_000):
        self.max_size = max_size
        self._entries: "OrderedDict[Hashable, Tuple[complex, complex, complex]]" = OrderedDict()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(label: Hashable, y: Iterable[float], t: float) -> Hashable:
        yp, yq = (float(v) for v in np.real(np.asarray(y)))
        return (label, yp, yq, float(t))

    def get(self, key: Hashable) -> Optional[Tuple[complex, complex, complex]]:
        entry = self._entries.get(key)
        if entry is None:
            self.misses += 1
        else:
            self.hits += 1
        return entry

    def put(self, key: Hashable, value: Tuple[complex, complex, complex]) -> None:
        if key in self._entries:
            self._entries.move_to_end(key)
        self._entries[key] = value
        while len(self._entries) > self.max_size:
            self._entries.popitem(last=False)

    def clear(self) -> None:
        self._entries.clear()
        logger.debug("Cache de ações limpo")

    def __len__(self) -> int:
        return len(self._entries)
