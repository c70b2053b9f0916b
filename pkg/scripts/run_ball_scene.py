"""Run the ball-in-sphere scene end to end and print the report.

    python3 scripts/run_ball_scene.py [apex_count]
"""

import json
import sys
import time

sys.path.insert(0, "src")

from conekit.harness import load_scene, report_to_dict, verify_scene


def main() -> None:
    import dataclasses

    scene = load_scene("scenes/ball_r1_R3.json")
    if len(sys.argv) > 1:
        scene = dataclasses.replace(scene, count=int(sys.argv[1]))
    t0 = time.perf_counter()
    report = verify_scene(scene)
    elapsed = time.perf_counter() - t0
    print(json.dumps(report_to_dict(report), indent=2, sort_keys=True))
    print(f"# verdict={report.verdict} max={report.matrix_max:.3e} elapsed={elapsed:.1f}s",
          file=sys.stderr)


if __name__ == "__main__":
    main()
