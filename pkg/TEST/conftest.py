"""Fixtures shared across the Bebop test suite."""

import os
import random
import stat
import sys
from pathlib import Path

import pytest
import pytest_asyncio

from support import loopback_client, make_server

PLUGIN_SCRIPT = Path(__file__).parent / "plugins" / "echo_plugin.py"
REPO_ROOT = Path(__file__).resolve().parent.parent


@pytest.fixture
def rng():
    """Seeded generator; every randomized test is reproducible."""
    return random.Random(0xB0B0)


@pytest.fixture
def schema_dir(tmp_path):
    """Write `.bop` files under a temporary directory: `schema_dir(name, text)` returns the path."""

    def write(name: str, text: str) -> Path:
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        return path

    write.root = tmp_path
    return write


@pytest.fixture
def echo_plugin(tmp_path, monkeypatch):
    """Install `bebopc-gen-echo` on PATH; it reports what it was asked to generate."""
    if sys.platform.startswith("win"):
        pytest.skip("plugin wrapper is a POSIX shell script")
    bin_dir = tmp_path / "bin"
    bin_dir.mkdir()
    wrapper = bin_dir / "bebopc-gen-echo"
    wrapper.write_text(
        "#!/bin/sh\n"
        f'PYTHONPATH="{REPO_ROOT}" exec "{sys.executable}" "{PLUGIN_SCRIPT}" "$@"\n'
    )
    wrapper.chmod(wrapper.stat().st_mode | stat.S_IXUSR | stat.S_IXGRP | stat.S_IXOTH)
    monkeypatch.setenv("PATH", f"{bin_dir}{os.pathsep}{os.environ.get('PATH', '')}")
    return wrapper


@pytest.fixture
def server():
    return make_server()


@pytest_asyncio.fixture
async def client(server):
    """RpcClient over a zero-latency loopback link to `server`."""
    async with loopback_client(server) as connected:
        yield connected
    await server.close()
