"""Subprocess plumbing shared by the external-tool hooks."""
from __future__ import annotations

import os
import shlex
import subprocess
import tempfile

from .errors import ExternalToolError


def workdir() -> tempfile.TemporaryDirectory:
    """Fresh temporary directory for one hook invocation.

    Honors OAIR_TMPDIR as the parent directory when set; each invocation gets
    its own directory so concurrent hooks never share files.
    """
    base = os.environ.get("OAIR_TMPDIR") or None
    return tempfile.TemporaryDirectory(prefix="retargetkit-", dir=base)


def run_tool(command: str, args: list[str]) -> str:
    """Run `command <args...>`, returning captured stdout.

    Raises ExternalToolError on a nonzero exit, with the tail of stderr
    included for diagnosis.
    """
    argv = shlex.split(command) + [str(a) for a in args]
    try:
        proc = subprocess.run(argv, capture_output=True, text=True)
    except OSError as exc:
        raise ExternalToolError(f"cannot launch {argv[0]!r}: {exc}") from exc
    if proc.returncode != 0:
        detail = proc.stderr.strip().splitlines()[-3:]
        raise ExternalToolError(
            f"{argv[0]!r} exited with status {proc.returncode}: " + " | ".join(detail)
        )
    return proc.stdout
