#!/usr/bin/env python3
"""Retrain the shipped family-selector model with a fixed seed.

Writes src/mdcomp/data/selector.json; rerunning reproduces the same file.
"""

import json
from pathlib import Path

from mdcomp.selector_training import train_default_selector

OUT = Path(__file__).resolve().parent.parent / "src" / "mdcomp" / "data" / "selector.json"


def main():
    obj, accuracy = train_default_selector(seed=7, per_family=120)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(obj, indent=1))
    print(f"training accuracy {accuracy:.3f}")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
