"""Seeded simulation through the command-line front end, replayed twice.

The same seed and flags give a byte-identical transcript; a new seed changes
the random permutations and with them the transcript.
"""

from __future__ import annotations

import hashlib
import tempfile
from pathlib import Path

from codedpir.cli import main as cli


def run(seed: int, path: Path) -> str:
    cli(["simulate", "--code", "C1", "--protocol", "a", "--files", "2", "--seed", str(seed), "--transcript", str(path)])
    return hashlib.sha256(path.read_bytes()).hexdigest()[:16]


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        a = run(42, Path(tmp) / "a.json")
        b = run(42, Path(tmp) / "b.json")
        c = run(43, Path(tmp) / "c.json")
    print(f"\nseed 42 twice: {a} {b} identical={a == b}; seed 43: {c}")


if __name__ == "__main__":
    main()
