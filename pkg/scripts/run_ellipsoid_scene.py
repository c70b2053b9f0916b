"""Run the ellipsoid-in-sphere scene end to end and print the report.

    python3 scripts/run_ellipsoid_scene.py [apex_count]
"""

import dataclasses
import json
import sys
import time

sys.path.insert(0, "src")

from conekit.harness import load_scene, report_to_dict, verify_scene


def main() -> None:
    scene = load_scene("scenes/ellipsoid_211_R5.json")
    if len(sys.argv) > 1:
        scene = dataclasses.replace(scene, count=int(sys.argv[1]))
    t0 = time.perf_counter()
    report = verify_scene(scene)
    elapsed = time.perf_counter() - t0
    print(json.dumps(report_to_dict(report), indent=2, sort_keys=True))
    print(f"# verdict={report.verdict} max={report.matrix_max:.3e} "
          f"pair={report.witness_pair} elapsed={elapsed:.1f}s", file=sys.stderr)


if __name__ == "__main__":
    main()
