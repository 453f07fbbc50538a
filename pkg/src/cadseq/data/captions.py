"""Caption requests for multi-view renders and pluggable captioning clients."""
from __future__ import annotations

import configparser
import hashlib
import json
import logging
import os
import time
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Protocol, Sequence, Tuple

import numpy as np

from ..errors import ClientUnavailable, PrefixViolation, TooFewViews

log = logging.getLogger(__name__)

CAPTION_PROMPT = (
    "These are the rendering images from 4 views of a CAD model. Please describe these "
    "images with one caption, and mainly focus on the shape and appearance of the "
    "foreground while ignoring the details of the background."
)
REQUIRED_PREFIX = "Generate a CAD design with "
N_CAPTION_VIEWS = 4
API_KEY_ENV = "CADSEQ_CAPTION_API_KEY"


@dataclass(frozen=True)
class CaptionRequest:
    image_refs: Tuple[str, ...]
    prompt: str = CAPTION_PROMPT
    required_prefix: str = REQUIRED_PREFIX
    record_id: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "image_refs", tuple(self.image_refs))
        if len(self.image_refs) != N_CAPTION_VIEWS:
            raise TooFewViews(f"a request carries exactly {N_CAPTION_VIEWS} views")

    def as_dict(self) -> dict:
        return {"record_id": self.record_id, "prompt": self.prompt,
                "image_refs": list(self.image_refs), "required_prefix": self.required_prefix}


def build_caption_request(view_ids: Sequence[str], seed: int = 0,
                          record_id: Optional[str] = None) -> CaptionRequest:
    """Pick four distinct views at random (fixed by ``seed``), kept in input order."""
    view_ids = list(view_ids)
    if len(set(view_ids)) < N_CAPTION_VIEWS:
        raise TooFewViews(f"need {N_CAPTION_VIEWS} distinct views, got {len(set(view_ids))}")
    uniq = list(dict.fromkeys(view_ids))
    pick = np.sort(np.random.default_rng(seed).choice(len(uniq), N_CAPTION_VIEWS, replace=False))
    return CaptionRequest(tuple(uniq[i] for i in pick), record_id=record_id)


class CaptioningClient(Protocol):
    max_retries: int

    def caption(self, request: CaptionRequest) -> str: ...


class StubCaptionClient:
    """Offline client: a templated caption chosen by hashing the request."""

    max_retries = 0
    _shapes = ("a rectangular plate", "a cylindrical boss", "an L-shaped bracket",
               "a hollow ring", "a stepped block", "a slotted flange")
    _details = ("two through holes", "a central bore", "rounded ends", "a raised rim",
                "a flat base", "a chamfer-free profile")

    def caption(self, request: CaptionRequest) -> str:
        key = request.record_id or "|".join(request.image_refs)
        h = hashlib.sha256(key.encode()).digest()
        shape = self._shapes[h[0] % len(self._shapes)]
        detail = self._details[h[1] % len(self._details)]
        return f"{request.required_prefix}{shape} featuring {detail}."


@dataclass
class HttpCaptionClient:
    """POSTs ``{"prompt", "images", "required_prefix"}``; expects ``{"caption": ...}`` back."""

    endpoint: str
    api_key: Optional[str] = None
    timeout: float = 60.0
    max_retries: int = 3
    backoff: float = 1.0

    def caption(self, request: CaptionRequest) -> str:
        body = json.dumps({"prompt": request.prompt, "images": list(request.image_refs),
                           "required_prefix": request.required_prefix}).encode()
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        req = urllib.request.Request(self.endpoint, data=body, headers=headers, method="POST")
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode())
        except (urllib.error.URLError, OSError, TimeoutError) as exc:
            raise ConnectionError(str(exc)) from exc
        return str(payload["caption"])


@dataclass
class CaptionConfig:
    endpoint: Optional[str] = None
    api_key: Optional[str] = None
    retries: int = 3
    concurrency: int = 4
    timeout: float = 60.0


def load_caption_config(path=None, environ=None) -> CaptionConfig:
    """Read ``key = value`` settings (an optional ``[caption]`` section is allowed).

    The API key from the environment variable ``CADSEQ_CAPTION_API_KEY``
    overrides the file.
    """
    environ = os.environ if environ is None else environ
    cfg = CaptionConfig()
    if path is not None:
        text = open(path).read()
        parser = configparser.ConfigParser()
        if not text.lstrip().startswith("["):
            text = "[caption]\n" + text
        parser.read_string(text)
        sec = parser["caption"] if parser.has_section("caption") else parser[parser.sections()[0]]
        cfg.endpoint = sec.get("endpoint", cfg.endpoint)
        cfg.api_key = sec.get("api_key", cfg.api_key)
        cfg.retries = sec.getint("retries", cfg.retries)
        cfg.concurrency = sec.getint("concurrency", cfg.concurrency)
        cfg.timeout = sec.getfloat("timeout", cfg.timeout)
    if environ.get(API_KEY_ENV):
        cfg.api_key = environ[API_KEY_ENV]
    return cfg


def client_from_config(cfg: CaptionConfig):
    if not cfg.endpoint:
        return StubCaptionClient()
    return HttpCaptionClient(cfg.endpoint, cfg.api_key, cfg.timeout, cfg.retries)


def caption_with_client(req: CaptionRequest, client, retries: Optional[int] = None,
                        backoff: Optional[float] = None) -> str:
    """Ask ``client`` for a caption, retrying connection failures, and check its prefix."""
    attempts = 1 + (getattr(client, "max_retries", 0) if retries is None else retries)
    delay = getattr(client, "backoff", 0.0) if backoff is None else backoff
    last = None
    for k in range(attempts):
        try:
            text = client.caption(req)
            break
        except (ConnectionError, TimeoutError, OSError, ClientUnavailable) as exc:
            last = exc
            log.info("caption attempt %d/%d failed: %s", k + 1, attempts, exc)
            if delay and k + 1 < attempts:
                time.sleep(delay * 2 ** k)
    else:
        raise ClientUnavailable(f"no caption after {attempts} attempts: {last}")
    if not text.startswith(req.required_prefix):
        raise PrefixViolation(f"caption does not begin with {req.required_prefix!r}: {text[:60]!r}")
    return text


def caption_batch(requests: Sequence[CaptionRequest], client, concurrency: int = 4) -> List[str]:
    """Caption many requests with at most ``concurrency`` in flight; order is preserved."""
    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        return list(pool.map(lambda r: caption_with_client(r, client), requests))
