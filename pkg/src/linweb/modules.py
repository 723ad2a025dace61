"""URL-keyed clause modules.

A module is a program file, optionally headed by ``mod("url").``. Loading a
url resolves it through registered mappings (longest prefix wins), then the
directories in ``LINWEB_PATH``, then plain HTTP GET. Each url is fetched and
parsed at most once per registry.
"""
from __future__ import annotations

import logging
import os
import threading
import urllib.error
import urllib.request
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .formulas import DFormula, GAssume, GFormula, SourceModule
from .syntax import ParseError, parse_program

log = logging.getLogger(__name__)

FETCH_TIMEOUT = 10.0
MAX_BYTES = 1 << 20
MAX_REDIRECTS = 5


class ModuleError(Exception):
    pass


class ResolutionError(ModuleError):
    pass


class FetchError(ModuleError):
    pass


class ModuleParseError(ModuleError):
    def __init__(self, url: str, err: ParseError):
        super().__init__(f"{url}:{err}")
        self.url = url
        self.parse_error = err


class DeclarationMismatch(ModuleError):
    pass


def _is_remote(locator: str) -> bool:
    return locator.startswith(("http://", "https://"))


def read_file(path: str) -> str:
    try:
        with open(path, "rb") as fh:
            data = fh.read(MAX_BYTES + 1)
    except OSError as exc:
        raise FetchError(f"cannot read {path}: {exc}") from exc
    if len(data) > MAX_BYTES:
        raise FetchError(f"{path} is larger than {MAX_BYTES} bytes")
    return data.decode("utf-8")


class _LimitedRedirects(urllib.request.HTTPRedirectHandler):
    max_redirections = MAX_REDIRECTS


_opener = urllib.request.build_opener(_LimitedRedirects)


def http_get(url: str) -> str:
    req = urllib.request.Request(url, headers={"Accept": "text/plain"})
    try:
        with _opener.open(req, timeout=FETCH_TIMEOUT) as resp:
            data = resp.read(MAX_BYTES + 1)
    except urllib.error.HTTPError as exc:
        raise FetchError(f"GET {url}: HTTP {exc.code}") from exc
    except (urllib.error.URLError, OSError) as exc:
        raise FetchError(f"GET {url}: {exc}") from exc
    if len(data) > MAX_BYTES:
        raise FetchError(f"GET {url}: response larger than {MAX_BYTES} bytes")
    return data.decode("utf-8")


class ModuleRegistry:
    def __init__(
        self,
        mappings: Sequence[Tuple[str, str]] = (),
        search_path: Optional[Sequence[str]] = None,
        http: bool = True,
        http_get: Callable[[str], str] = http_get,
    ):
        self.mappings: List[Tuple[str, str]] = []
        if search_path is None:
            env = os.environ.get("LINWEB_PATH", "")
            search_path = [p for p in env.split(os.pathsep) if p]
        self.search_path = list(search_path)
        self.http = http
        self._http_get = http_get
        self.cache: Dict[str, SourceModule] = {}
        self.fetches = 0
        self._lock = threading.Lock()
        self._url_locks: Dict[str, threading.Lock] = {}
        for pattern, locator in mappings:
            self.register_mapping(pattern, locator)

    def register_mapping(self, pattern: str, locator: str) -> None:
        if not pattern:
            raise ValueError("empty url pattern")
        with self._lock:
            self.mappings.append((pattern, str(locator)))

    def resolve(self, url: str) -> str:
        """Locator (file path or http url) for ``url``."""
        best = None
        with self._lock:
            mappings = list(self.mappings)
        for pattern, locator in mappings:
            if url == pattern:
                rest = ""
            elif url.startswith(pattern.rstrip("/") + "/"):
                rest = url[len(pattern.rstrip("/")) + 1 :]
            else:
                continue
            # later registrations shadow earlier ones of equal length
            if best is None or len(pattern) >= len(best[0]):
                best = (pattern, locator, rest)
        if best is not None:
            _, locator, rest = best
            if not rest:
                return locator
            if _is_remote(locator):
                return locator.rstrip("/") + "/" + rest
            return str(Path(locator) / rest)
        for directory in self.search_path:
            for candidate in (Path(directory) / url, Path(directory) / (url + ".lw")):
                if candidate.is_file():
                    return str(candidate)
        if self.http:
            return url if _is_remote(url) else "http://" + url
        raise ResolutionError(f"cannot resolve module {url!r}")

    def fetch(self, locator: str) -> str:
        self.fetches += 1
        if _is_remote(locator):
            return self._http_get(locator)
        return read_file(locator)

    def load(self, url: str) -> SourceModule:
        if not url:
            raise ValueError("empty module url")
        with self._lock:
            cached = self.cache.get(url)
            if cached is not None:
                return cached
            url_lock = self._url_locks.setdefault(url, threading.Lock())
        with url_lock:
            with self._lock:
                cached = self.cache.get(url)
            if cached is not None:
                return cached
            text = self.fetch(self.resolve(url))
            try:
                module = parse_program(text)
            except ParseError as exc:
                raise ModuleParseError(url, exc) from exc
            if module.url is None:
                log.warning("module %s has no mod declaration", url)
                module = SourceModule(url, module.clauses)
            elif module.url != url:
                raise DeclarationMismatch(f"requested {url!r} but file declares {module.url!r}")
            with self._lock:
                self.cache[url] = module
            return module

    def load_module(self, url: str) -> List[DFormula]:
        return list(self.load(url).clauses)


def load_module(registry: ModuleRegistry, url: str) -> List[DFormula]:
    return registry.load_module(url)


def elaborate(clauses: Sequence[DFormula], goal: GFormula) -> GFormula:
    """Wrap ``goal`` in one assumption per clause.

    The first clause ends up innermost, i.e. pushed last, so the engine's
    most-recent-first scan visits the clauses in source order.
    """
    for d in clauses:
        goal = GAssume(d, goal)
    return goal


def elaborate_load(url: str, goal: GFormula, registry: ModuleRegistry) -> GFormula:
    return elaborate(registry.load_module(url), goal)


def read_map_file(path: str) -> List[Tuple[str, str]]:
    """``url<TAB>path`` lines; relative paths are taken from the map file's directory."""
    base = Path(path).parent
    out = []
    for lineno, line in enumerate(read_file(path).splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "\t" not in line:
            raise ValueError(f"{path}:{lineno}: expected url<TAB>path")
        url, loc = (part.strip() for part in line.split("\t", 1))
        if not _is_remote(loc) and not os.path.isabs(loc):
            loc = str(base / loc)
        out.append((url, loc))
    return out
