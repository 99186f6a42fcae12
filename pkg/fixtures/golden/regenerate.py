"""Rewrite the expected outputs after an intentional format change.

Run from anywhere; commands execute with the fixtures directory as cwd.
"""
import io
import json
import os
from pathlib import Path

from quitgame.cli import run

HERE = Path(__file__).resolve().parent

if __name__ == "__main__":
    os.chdir(HERE.parent)
    for case in json.loads((HERE / "cases.json").read_text()):
        out = io.StringIO()
        code = run(case["argv"], out=out, err=io.StringIO())
        assert code == 0, case["name"]
        (HERE / f"{case['name']}.json").write_text(out.getvalue())
        print("wrote", case["name"])
