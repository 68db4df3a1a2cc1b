"""Regenerate tests/golden/<preset>.csv. Run only when a preset is changed on purpose."""

import sys
from pathlib import Path

from rlchallenges.experiments import PRESETS, aggregate, curves_to_csv, preset, run_experiment

GOLDEN = Path(__file__).parent / "golden"


def main(names):
    GOLDEN.mkdir(exist_ok=True)
    for name in names or PRESETS:
        cfg = preset(name)
        text = curves_to_csv(aggregate(run_experiment(cfg)))
        (GOLDEN / f"{name}.csv").write_text(text)
        print(f"wrote {name}.csv")


if __name__ == "__main__":
    main(sys.argv[1:])
