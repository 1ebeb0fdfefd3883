"""Bounded in-process record channel: one producer, one consumer.

Replaces an external message bus: the producer blocks when the buffer is
full (backpressure) and receives ChannelClosed if the consumer hangs up.
"""

from __future__ import annotations

import threading
from collections import deque
from typing import Iterator, Optional

from .errors import ChannelClosed


class BoundedChannel:
    def __init__(self, capacity: int = 64):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self._capacity = capacity
        self._items: deque = deque()
        self._lock = threading.Lock()
        self._not_full = threading.Condition(self._lock)
        self._not_empty = threading.Condition(self._lock)
        self._closed = False

    def put(self, item, timeout: Optional[float] = None) -> None:
        with self._not_full:
            while len(self._items) >= self._capacity and not self._closed:
                if not self._not_full.wait(timeout=timeout):
                    raise TimeoutError("channel put timed out")
            if self._closed:
                raise ChannelClosed("channel closed by consumer")
            self._items.append(item)
            self._not_empty.notify()

    def get(self, timeout: Optional[float] = None):
        with self._not_empty:
            while not self._items and not self._closed:
                if not self._not_empty.wait(timeout=timeout):
                    raise TimeoutError("channel get timed out")
            if self._items:
                item = self._items.popleft()
                self._not_full.notify()
                return item
            raise ChannelClosed("channel drained and closed")

    def close(self) -> None:
        with self._lock:
            self._closed = True
            self._not_full.notify_all()
            self._not_empty.notify_all()

    @property
    def closed(self) -> bool:
        with self._lock:
            return self._closed

    def __iter__(self) -> Iterator:
        while True:
            try:
                yield self.get()
            except ChannelClosed:
                return
