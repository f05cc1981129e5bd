#!/usr/bin/env python3
"""One landmark set, three kernels, three very different vector fields.

The field spanned by kernel translates, v(x) = sum_b k(x - q_b) alpha_b,
inherits the kernel's character: scalar kernels push isotropically,
curl-free kernels make sources and sinks, divergence-free kernels make
vortices.  This renders the same three-landmark configuration under all
three and writes one quiver SVG per kernel into demos/out/.
"""

import math
from pathlib import Path

import numpy as np

from trikernels import (
    LandmarkConfig, MomentaSet, family_example1, family_example2, field_zero,
    gaussian_kernel, snapshot_field,
)
from trikernels import svg

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

landmarks = LandmarkConfig(np.array([[-1.0, 0.0], [-0.5, 1.0], [1.0, 0.0]]))
momenta = MomentaSet(np.array([
    [1 / math.sqrt(2), 1 / math.sqrt(2)],
    [-2 / math.sqrt(5), 1 / math.sqrt(5)],
    [-2 / math.sqrt(5), -1 / math.sqrt(5)],
]))

kernels = {
    "scalar": gaussian_kernel(1.0, 2),
    "curl_free": family_example2(2.0, 1.0, 1.0, 2),   # a = 2bc boundary
    "div_free": family_example1(2.0, 1.0, 1.0, 2),    # a = 2bc boundary, d = 2
}

lo, hi = (-2.6, -2.0), (2.6, 2.6)
xs = np.linspace(lo[0], hi[0], 27)
ys = np.linspace(lo[1], hi[1], 24)
grid = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1).reshape(-1, 2)

for name, k in kernels.items():
    field = snapshot_field(k, landmarks, momenta)
    vals = field(grid)
    proj = svg.Projector(lo, hi)
    els = svg.quiver(grid, vals, proj, arrow_scale=0.35)
    els += svg.dots(landmarks.points, proj, color="#c0392b", radius=4)
    els += svg.quiver(landmarks.points, momenta.vectors, proj, 0.35, color="#c0392b")
    path = OUT / f"field_{name}.svg"
    path.write_text(svg.document(els, proj, {"arrow-scale": 0.35, "kernel": name}))
    print(f"{name:>10}: wrote {path}")

# the div-free family's single-center field with momentum e1 has a pair of
# stagnation points ("vortices") on the transverse axis at +-sqrt(b/a)
k = kernels["div_free"]
e1 = np.array([1.0, 0.0])
for sign in (1.0, -1.0):
    z = field_zero(k, e1, np.array([0.05, sign * 0.6]))
    print(f"vortex located at ({z[0]: .6f}, {z[1]: .6f}), "
          f"expected (0, {sign * math.sqrt(0.5):.6f})")
