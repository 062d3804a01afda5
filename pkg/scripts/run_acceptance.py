"""Run the acceptance suite and print one PASS/FAIL line per criterion."""

from __future__ import annotations

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", str(ROOT / "tests" / "test_acceptance.py")],
        capture_output=True, text=True, cwd=ROOT,
    )
    lines = [ln for ln in proc.stdout.splitlines() if ln.startswith("CRITERION")]
    print("\n".join(lines) if lines else proc.stdout)
    return proc.returncode


if __name__ == "__main__":
    sys.exit(main())
