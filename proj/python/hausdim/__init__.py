"""Spectral dimension bounds for measures with arithmetically restricted spectrum."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import __version__, run as _run


def run(command, **options):
    """Run a CLI command in-process.

    Options use the report's config keys (q, B, a, K, N, p, suite, q_lo, ...).
    Returns (exit_code, stdout, stderr).
    """
    options["command"] = command
    return _run(_json.dumps(options))


def report(command, **options):
    """Run a command and parse its JSON report. Raises RuntimeError on usage or resource errors."""
    options.setdefault("format", "json")
    code, out, err = run(command, **options)
    if code not in (0, 1):
        raise RuntimeError(f"hausdim {command} exited with {code}: {err.strip()}")
    return _json.loads(out)
