import hashlib
import os

import pytest

from rdcatalog.fetch import (
    FetchPolicy,
    FileCache,
    FileTooLarge,
    TooManyFiles,
    UpstreamFetchFailed,
    fetch_file,
)


def test_cache_key_is_url_digest():
    url = "https://example.org/data/file.nc"
    assert FileCache.key_for(url) == hashlib.sha256(url.encode()).hexdigest()


def test_cache_miss_then_hit(tmp_path):
    cache = FileCache(tmp_path, max_size=1024)
    url = "https://example.org/a"
    assert cache.get(url) is None
    stored = cache.put_stream(url, [b"hello ", b"world"])
    assert stored.read_bytes() == b"hello world"
    assert cache.get(url) == stored


def test_cache_leaves_no_temp_files(tmp_path):
    cache = FileCache(tmp_path, max_size=1024)
    cache.put_stream("u1", [b"x" * 10])

    with pytest.raises(RuntimeError):
        def exploding():
            yield b"partial"
            raise RuntimeError("stream died")
        cache.put_stream("u2", exploding())

    leftovers = [p.name for p in tmp_path.iterdir() if p.name.startswith(".tmp-")]
    assert leftovers == []
    assert cache.get("u2") is None  # failed stream never published


def test_cache_evicts_stalest_first(tmp_path):
    cache = FileCache(tmp_path, max_size=100)
    old = cache.put_stream("old", [b"x" * 60])
    os.utime(old, (1_000_000, 1_000_000))
    fresh = cache.put_stream("fresh", [b"y" * 60])
    assert cache.get("old") is None
    assert cache.get("fresh") == fresh


def test_cache_keeps_most_recent_even_when_oversized(tmp_path):
    cache = FileCache(tmp_path, max_size=10)
    stored = cache.put_stream("big", [b"z" * 100])
    assert stored.is_file()


def test_cache_rejects_bad_size(tmp_path):
    with pytest.raises(ValueError):
        FileCache(tmp_path, max_size=0)


def test_policy_validation():
    with pytest.raises(ValueError):
        FetchPolicy(timeout=0)
    with pytest.raises(ValueError):
        FetchPolicy(max_files=0)
    with pytest.raises(ValueError):
        FetchPolicy(max_cache_size=-1)


def test_too_many_files_carries_counts():
    err = TooManyFiles(250, 200)
    assert err.count == 250 and err.limit == 200


# -- local files -----------------------------------------------------------------


def test_fetch_local_file_and_cache_hit(tmp_path):
    source = tmp_path / "source.bin"
    source.write_bytes(b"granule payload")
    cache = FileCache(tmp_path / "cache", max_size=1024)
    url = source.as_uri()

    got = fetch_file(url, FetchPolicy(), cache)
    assert got.read_bytes() == b"granule payload"

    source.unlink()  # second call must come from the cache
    again = fetch_file(url, FetchPolicy(), cache)
    assert again == got
    assert again.read_bytes() == b"granule payload"


def test_fetch_local_missing_file(tmp_path):
    cache = FileCache(tmp_path / "cache", max_size=1024)
    with pytest.raises(UpstreamFetchFailed):
        fetch_file((tmp_path / "absent.nc").as_uri(), FetchPolicy(), cache)


def test_fetch_local_file_too_large(tmp_path):
    source = tmp_path / "big.bin"
    source.write_bytes(b"x" * 100)
    cache = FileCache(tmp_path / "cache", max_size=1024)
    policy = FetchPolicy(max_file_size=10)
    with pytest.raises(FileTooLarge) as exc_info:
        fetch_file(source.as_uri(), policy, cache)
    assert isinstance(exc_info.value, UpstreamFetchFailed)


def test_fetch_unsupported_scheme(tmp_path):
    cache = FileCache(tmp_path, max_size=1024)
    with pytest.raises(UpstreamFetchFailed):
        fetch_file("ftp://example.org/file", FetchPolicy(), cache)


# -- http ------------------------------------------------------------------------------


def test_fetch_http_counts_one_upstream_hit(tmp_path, file_server):
    url = file_server.add("data.nc", b"remote bytes")
    cache = FileCache(tmp_path, max_size=1024)
    before = file_server.total_hits()

    first = fetch_file(url, FetchPolicy(), cache)
    assert first.read_bytes() == b"remote bytes"
    assert file_server.total_hits() == before + 1

    second = fetch_file(url, FetchPolicy(), cache)
    assert second == first
    assert file_server.total_hits() == before + 1  # cache absorbed the repeat


def test_fetch_http_404(tmp_path, file_server):
    cache = FileCache(tmp_path, max_size=1024)
    with pytest.raises(UpstreamFetchFailed):
        fetch_file(f"{file_server.url}/no-such-file", FetchPolicy(), cache)


def test_fetch_http_too_large(tmp_path, file_server):
    url = file_server.add("huge.bin", b"q" * 4096)
    cache = FileCache(tmp_path, max_size=1 << 20)
    with pytest.raises(FileTooLarge):
        fetch_file(url, FetchPolicy(max_file_size=100), cache)
    assert cache.get(url) is None  # nothing published for the oversized body
