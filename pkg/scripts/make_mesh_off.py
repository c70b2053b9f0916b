"""Write an icosphere OFF file for the hairy-ball CLI.

    python3 scripts/make_mesh_off.py FREQUENCY OUT.off [--aligned]

By default the sphere is tilted by a fixed generic rotation so that no
vertex lands on the coordinate axes; the built-in census fields vanish on
those axes, and the index computation needs zeros inside faces, not at
vertices.  Pass --aligned to keep the symmetric orientation.
"""

import sys

sys.path.insert(0, "src")

import numpy as np

from conekit.geom import rotation_matrix, unit
from conekit.topology import icosphere

GENERIC_TILT = rotation_matrix(unit([0.3, 0.5, 0.81]), 0.4321)


def main() -> None:
    args = [a for a in sys.argv[1:] if a != "--aligned"]
    aligned = "--aligned" in sys.argv[1:]
    freq = int(args[0]) if args else 8
    out = args[1] if len(args) > 1 else f"icosphere_f{freq}.off"
    mesh = icosphere(freq, rotate=None if aligned else GENERIC_TILT)
    mesh.write_off(out)
    print(f"wrote {out}: {len(mesh.vertices)} vertices, {len(mesh.triangles)} triangles")


if __name__ == "__main__":
    main()
