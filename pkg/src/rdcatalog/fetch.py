"""On-demand retrieval of remote data files with a disk LRU cache.

The catalog stores only URLs; bytes are pulled when a download or
conversion actually needs them, subject to per-file limits, and kept in
a size-capped cache directory keyed by the SHA-256 of the URL.  Cache
hits touch the file's mtime, eviction removes the stalest files first.
Fetches stream to a temp file and publish it with an atomic rename, so
readers never observe partial content.
"""

from __future__ import annotations

import hashlib
import os
import threading
import uuid
from dataclasses import dataclass
from pathlib import Path
from urllib.parse import urlsplit
from urllib.request import url2pathname

import httpx

_CHUNK = 64 * 1024


class FetchError(Exception):
    pass


class UpstreamFetchFailed(FetchError):
    def __init__(self, url: str, reason: str):
        super().__init__(f"failed to fetch {url}: {reason}")
        self.url = url
        self.reason = reason


class FileTooLarge(UpstreamFetchFailed):
    def __init__(self, url: str, limit: int):
        super().__init__(url, f"exceeds the {limit}-byte per-file limit")


class TooManyFiles(FetchError):
    def __init__(self, count: int, limit: int):
        super().__init__(f"selection has {count} files, limit is {limit}")
        self.count = count
        self.limit = limit


@dataclass(frozen=True)
class FetchPolicy:
    timeout: float = 30.0
    max_file_size: int = 256 * 1024 * 1024
    max_files: int = 200
    max_cache_size: int = 1024 * 1024 * 1024

    def __post_init__(self):
        if self.timeout <= 0 or self.max_file_size <= 0 or self.max_files <= 0:
            raise ValueError("fetch limits must be strictly positive")
        if self.max_cache_size <= 0:
            raise ValueError("cache size must be strictly positive")


class FileCache:
    """Content cache on disk; keys are sha256(url), eviction is LRU by mtime."""

    def __init__(self, directory, max_size: int):
        if max_size <= 0:
            raise ValueError("cache size must be strictly positive")
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.max_size = max_size
        self._lock = threading.Lock()

    @staticmethod
    def key_for(url: str) -> str:
        return hashlib.sha256(url.encode("utf-8")).hexdigest()

    def _path_for(self, url: str) -> Path:
        return self.directory / f"{self.key_for(url)}.bin"

    def get(self, url: str) -> Path | None:
        path = self._path_for(url)
        with self._lock:
            if not path.is_file():
                return None
            os.utime(path)
            return path

    def put_stream(self, url: str, chunks) -> Path:
        """Write chunks to a temp file, then atomically publish under the key."""
        final = self._path_for(url)
        tmp = self.directory / f".tmp-{uuid.uuid4().hex}"
        try:
            with open(tmp, "wb") as fh:
                for chunk in chunks:
                    fh.write(chunk)
            os.replace(tmp, final)
        finally:
            tmp.unlink(missing_ok=True)
        self._evict()
        return final

    def _evict(self) -> None:
        with self._lock:
            entries = []
            for p in self.directory.iterdir():
                if not p.is_file() or p.name.startswith(".tmp-"):
                    continue
                try:
                    st = p.stat()
                except OSError:
                    continue
                entries.append((st.st_mtime, st.st_size, p))
            total = sum(size for _, size, _ in entries)
            entries.sort(key=lambda e: (e[0], e[2].name))
            # stalest first; the most recent entry always survives
            while total > self.max_size and len(entries) > 1:
                _, size, victim = entries.pop(0)
                total -= size
                victim.unlink(missing_ok=True)


def _fetch_local(url: str, policy: FetchPolicy, cache: FileCache) -> Path:
    source = Path(url2pathname(urlsplit(url).path))
    try:
        size = source.stat().st_size
    except OSError as exc:
        raise UpstreamFetchFailed(url, str(exc)) from exc
    if size > policy.max_file_size:
        raise FileTooLarge(url, policy.max_file_size)

    def chunks():
        with open(source, "rb") as fh:
            while block := fh.read(_CHUNK):
                yield block

    try:
        return cache.put_stream(url, chunks())
    except OSError as exc:
        raise UpstreamFetchFailed(url, str(exc)) from exc


def _fetch_http(url: str, policy: FetchPolicy, cache: FileCache) -> Path:
    def chunks():
        with httpx.Client(timeout=policy.timeout, follow_redirects=True) as client:
            with client.stream("GET", url) as response:
                response.raise_for_status()
                declared = response.headers.get("content-length")
                if declared and int(declared) > policy.max_file_size:
                    raise FileTooLarge(url, policy.max_file_size)
                received = 0
                for chunk in response.iter_bytes(_CHUNK):
                    received += len(chunk)
                    if received > policy.max_file_size:
                        raise FileTooLarge(url, policy.max_file_size)
                    yield chunk

    try:
        return cache.put_stream(url, chunks())
    except FetchError:
        raise
    except httpx.HTTPError as exc:
        raise UpstreamFetchFailed(url, str(exc)) from exc
    except OSError as exc:
        raise UpstreamFetchFailed(url, str(exc)) from exc


def fetch_file(url: str, policy: FetchPolicy, cache: FileCache) -> Path:
    """Path of the cached content for a URL, fetching on a cache miss."""
    cached = cache.get(url)
    if cached is not None:
        return cached
    scheme = urlsplit(url).scheme
    if scheme == "file":
        return _fetch_local(url, policy, cache)
    if scheme in ("http", "https"):
        return _fetch_http(url, policy, cache)
    raise UpstreamFetchFailed(url, f"unsupported URL scheme {scheme!r}")
