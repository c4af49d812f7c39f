"""Rate-limited JSON-over-HTTP transport with retries."""

from __future__ import annotations

import logging
import threading
import time
from typing import Any, Callable

import requests

logger = logging.getLogger(__name__)

RETRY_STATUS = {429, 500, 502, 503, 504}


class ProviderError(RuntimeError):
    pass


class TokenBucket:
    """Blocking token bucket; ``rate`` tokens per second up to ``capacity``."""

    def __init__(
        self,
        rate: float = 1.0,
        capacity: float = 1.0,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if rate <= 0 or capacity <= 0:
            raise ValueError("rate and capacity must be positive")
        self.rate = rate
        self.capacity = capacity
        self._clock = clock
        self._sleep = sleep
        self._tokens = capacity
        self._last = clock()
        self._lock = threading.Lock()

    def acquire(self) -> float:
        """Take one token, sleeping as needed; returns the time waited."""
        with self._lock:
            now = self._clock()
            self._tokens = min(self.capacity, self._tokens + (now - self._last) * self.rate)
            self._last = now
            wait = 0.0
            if self._tokens < 1.0:
                wait = (1.0 - self._tokens) / self.rate
                self._sleep(wait)
                self._last = self._clock()
                self._tokens = 1.0
            self._tokens -= 1.0
            return wait


class JsonTransport:
    def __init__(
        self,
        session: Any = None,
        limiter: TokenBucket | None = None,
        retries: int = 3,
        backoff: float = 0.5,
        timeout: float = 30.0,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.session = session if session is not None else requests.Session()
        self.limiter = limiter or TokenBucket()
        self.retries = retries
        self.backoff = backoff
        self.timeout = timeout
        self._sleep = sleep

    def get_json(self, url: str, params: dict | None = None, headers: dict | None = None) -> Any | None:
        """GET ``url``; None on 404, ProviderError once retries are exhausted."""
        last_error: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                self._sleep(self.backoff * 2 ** (attempt - 1))
            self.limiter.acquire()
            try:
                resp = self.session.get(url, params=params, headers=headers, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                logger.debug("GET %s failed (%s), attempt %d", url, exc, attempt + 1)
                continue
            if resp.status_code == 404:
                return None
            if resp.status_code in RETRY_STATUS:
                last_error = ProviderError(f"HTTP {resp.status_code} from {url}")
                continue
            if resp.status_code >= 400:
                raise ProviderError(f"HTTP {resp.status_code} from {url}")
            return resp.json()
        raise ProviderError(f"giving up on {url} after {self.retries + 1} attempts: {last_error}")
