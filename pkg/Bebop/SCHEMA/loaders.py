"""
Import loaders.

A loader maps an import path, seen from the importing file, to a
canonical key and the file's bytes. Both loaders fall back to the bundled
`bebop/...` library so `import "bebop/decorators.bop"` always works.
"""

import posixpath
from abc import ABC, abstractmethod
from importlib import resources
from pathlib import Path
from typing import Dict, Iterable, Optional, Tuple, Union

from Bebop.Utils.Log import get_logger

logger = get_logger(__name__)

BUNDLED_PREFIX = "bebop/"


def load_bundled(path: str) -> Optional[bytes]:
    """Read a file shipped under `Bebop/SCHEMA/stdlib`, or None."""
    if not path.startswith(BUNDLED_PREFIX) or ".." in path.split("/"):
        return None
    resource = resources.files("Bebop.SCHEMA").joinpath("stdlib", *path.split("/"))
    if not resource.is_file():
        return None
    return resource.read_bytes()


class SchemaLoader(ABC):
    """Resolves import paths to file contents."""

    @abstractmethod
    def load(self, path: str, importer: Optional[str] = None) -> Tuple[str, bytes]:
        """
        Load one schema file.

        Args:
            path: Path as written in the import statement (or given on the command line)
            importer: Canonical key of the importing file, None for root files

        Returns:
            (canonical key, raw bytes)

        Raises:
            FileNotFoundError: If no candidate location holds the file
        """


class FileSystemLoader(SchemaLoader):
    """Looks next to the importer first, then in each search path, then in the bundled library."""

    def __init__(self, search_paths: Iterable[Union[str, Path]] = ()):
        self.search_paths = [Path(p) for p in search_paths]

    def load(self, path: str, importer: Optional[str] = None) -> Tuple[str, bytes]:
        candidates = []
        if importer is None:
            candidates.append(Path(path))
        elif not importer.startswith(BUNDLED_PREFIX):
            candidates.append(Path(importer).parent / path)
        candidates.extend(base / path for base in self.search_paths)

        for candidate in candidates:
            if candidate.is_file():
                logger.debug(f"Loaded schema {candidate}")
                return str(candidate.resolve()), candidate.read_bytes()

        bundled = load_bundled(path)
        if bundled is not None:
            return path, bundled
        raise FileNotFoundError(path)


class MemoryLoader(SchemaLoader):
    """Serves files from a dict keyed by posix path; used by tests and embedded schemas."""

    def __init__(self, files: Dict[str, Union[str, bytes]]):
        self.files = {posixpath.normpath(k): (v.encode("utf-8") if isinstance(v, str) else v) for k, v in files.items()}

    def load(self, path: str, importer: Optional[str] = None) -> Tuple[str, bytes]:
        candidates = []
        if importer is not None and not importer.startswith(BUNDLED_PREFIX):
            candidates.append(posixpath.normpath(posixpath.join(posixpath.dirname(importer), path)))
        candidates.append(posixpath.normpath(path))
        for key in candidates:
            if key in self.files:
                return key, self.files[key]

        bundled = load_bundled(path)
        if bundled is not None:
            return path, bundled
        raise FileNotFoundError(path)
