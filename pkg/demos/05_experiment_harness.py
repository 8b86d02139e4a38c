"""The experiment harness end to end: JSON spec in, CSV rows out.

Runs a compare-mode experiment (five seeded replications next to the
analytical prediction) through the same code path the ``mtoa`` CLI uses,
then prints the emitted artifact. The sibling ``configs/`` directory
holds ready-made specs for each CLI subcommand.
"""

import json
import tempfile
from pathlib import Path

from mtoa import parse_config, run_experiment
from mtoa.cli import main

spec = parse_config(json.dumps({
    "mode": "compare",
    "scheme": "mtoa-g",
    "n": 50,
    "L": 49,
    "m_window": 100,
    "T": 200_000,
    "seed": 1,
    "replications": 5,
}))

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "compare.csv"
    rows, summary = run_experiment(spec, out_path=str(out))
    print("=== emitted CSV ===")
    print(out.read_text(encoding="utf-8"))
    print("=== summary ===")
    print(json.dumps(summary, indent=2, sort_keys=True))

    # the CLI wraps exactly this; exit code 0 on success
    cfg_path = Path(tmp) / "spec.json"
    cfg_path.write_text(json.dumps({
        "mode": "recommend", "scheme": "mtoa-g", "n": 100,
        "T": 10_000_000, "j_min": 0.99,
    }), encoding="utf-8")
    code = main(["recommend", "--config", str(cfg_path),
                 "--out", str(Path(tmp) / "rec.csv")])
    print(f"\nCLI recommend exit code: {code}")
    print((Path(tmp) / "rec.csv").read_text(encoding="utf-8"))
