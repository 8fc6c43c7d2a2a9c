"""Pay-level domain (pld) and public suffix (tld) extraction.

Registrable domains are computed against the public suffix list snapshot
shipped in ``markup_infer/data``.  If that file is missing the code falls
back to a last-two-labels guess and warns, since results then differ.
"""

from __future__ import annotations

import ipaddress
import logging
import warnings
from functools import lru_cache
from importlib import resources
from typing import NamedTuple, Optional
from urllib.parse import urlsplit

from publicsuffixlist import PublicSuffixList

logger = logging.getLogger(__name__)

PSL_FILENAME = "public_suffix_list.dat"


class DomainParts(NamedTuple):
    pld: str
    tld: str
    flagged: bool = False


class SuffixSnapshot(NamedTuple):
    psl: Optional[PublicSuffixList]
    version: str


def _read_version(text: str) -> str:
    for line in text.splitlines()[:40]:
        if line.startswith("// VERSION:"):
            return line.split(":", 1)[1].strip()
    return "unknown"


@lru_cache(maxsize=None)
def load_suffix_snapshot(path: Optional[str] = None) -> SuffixSnapshot:
    try:
        if path is None:
            text = resources.files("markup_infer.data").joinpath(PSL_FILENAME).read_text("utf-8")
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except (FileNotFoundError, OSError):
        warnings.warn(
            "public suffix snapshot not found; falling back to the last-two-labels "
            "heuristic (pld/tld values will differ from snapshot-based runs)",
            RuntimeWarning,
            stacklevel=2,
        )
        return SuffixSnapshot(None, "fallback-last-two-labels")
    psl = PublicSuffixList(text.splitlines(), accept_unknown=False)
    return SuffixSnapshot(psl, _read_version(text))


def suffix_list_version() -> str:
    return load_suffix_snapshot().version


def _is_ip(host: str) -> bool:
    try:
        ipaddress.ip_address(host.strip("[]"))
    except ValueError:
        return False
    return True


@lru_cache(maxsize=65536)
def split_host(host: str, snapshot: Optional[SuffixSnapshot] = None) -> DomainParts:
    host = host.lower().rstrip(".")
    if not host or _is_ip(host):
        return DomainParts(host, "", True)
    snap = snapshot or load_suffix_snapshot()
    if snap.psl is None:
        labels = host.split(".")
        if len(labels) < 2:
            return DomainParts(host, "", True)
        return DomainParts(".".join(labels[-2:]), "." + labels[-1])
    suffix = snap.psl.publicsuffix(host)
    pld = snap.psl.privatesuffix(host)
    if suffix is None or pld is None:
        return DomainParts(host, "", True)
    return DomainParts(pld, "." + suffix)


def extract_pld_tld(url: str) -> DomainParts:
    """Return ``(pld, tld, flagged)`` for an absolute URL.

    >>> extract_pld_tld("http://www.touristlink.com/india/cat/events.html")[:2]
    ('touristlink.com', '.com')

    IP hosts and hosts without a known public suffix come back as
    ``(host, "", True)``.
    """
    host = urlsplit(url).hostname
    if not host:
        raise ValueError(f"URL has no host: {url!r}")
    return split_host(host)
