"""ASCII legacy-VTK STRUCTURED_POINTS output."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .assembly import ExtendedState
from .discrete_ops import GridField
from .geometry import MINUS, PLUS, Grid


def _full(grid: Grid, f: GridField) -> np.ndarray:
    """Node values on the full grid; Γ nodes take the plus-side slot."""
    extra = f.plus.shape[1:]
    out = np.zeros((grid.n_nodes,) + extra, dtype=complex)
    out[grid.side_nodes[MINUS]] = f.minus
    out[grid.side_nodes[PLUS]] = f.plus
    return out


def _vtk_order(grid: Grid, values: np.ndarray) -> np.ndarray:
    # VTK wants x varying fastest; our flat index has z fastest
    arr = values.reshape(grid.shape + values.shape[1:])
    return np.transpose(arr, (2, 1, 0) + tuple(range(3, arr.ndim))).reshape(values.shape)


def write_structured_points(path, grid: Grid, state: ExtendedState, title: str = "extended state"):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [
        "# vtk DataFile Version 3.0",
        title.replace("\n", " ")[:255],
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        "DIMENSIONS %d %d %d" % grid.shape,
        "ORIGIN %.17g %.17g %.17g" % tuple(grid.lower),
        "SPACING %.17g %.17g %.17g" % tuple(grid.h),
        f"POINT_DATA {grid.n_nodes}",
    ]
    for name, field in (("E", state.E), ("H", state.H)):
        vals = _vtk_order(grid, _full(grid, field))
        for part, arr in (("real", vals.real), ("imag", vals.imag)):
            lines.append(f"VECTORS {name}_{part} double")
            lines.extend("%.12e %.12e %.12e" % tuple(v) for v in arr)
    for name, field in (("alpha", state.alpha), ("beta", state.beta)):
        vals = _vtk_order(grid, _full(grid, field))
        for part, arr in (("real", vals.real), ("imag", vals.imag)):
            lines.append(f"SCALARS {name}_{part} double 1")
            lines.append("LOOKUP_TABLE default")
            lines.extend("%.12e" % v for v in arr)
    lines.append("SCALARS node_class int 1")
    lines.append("LOOKUP_TABLE default")
    lines.extend(str(int(c)) for c in _vtk_order(grid, grid.node_class.ravel()))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_structured_points(path) -> dict:
    """Minimal reader for files written above (used by tests)."""
    tokens = Path(path).read_text().split("\n")
    header = {}
    data = {}
    i = 0
    npts = None
    while i < len(tokens):
        line = tokens[i].strip()
        if line.startswith("DIMENSIONS"):
            header["dimensions"] = tuple(int(v) for v in line.split()[1:])
        elif line.startswith("ORIGIN"):
            header["origin"] = tuple(float(v) for v in line.split()[1:])
        elif line.startswith("SPACING"):
            header["spacing"] = tuple(float(v) for v in line.split()[1:])
        elif line.startswith("POINT_DATA"):
            npts = int(line.split()[1])
        elif line.startswith("VECTORS"):
            name = line.split()[1]
            rows = [list(map(float, tokens[i + 1 + k].split())) for k in range(npts)]
            data[name] = np.array(rows)
            i += npts
        elif line.startswith("SCALARS"):
            name = line.split()[1]
            rows = [float(tokens[i + 2 + k]) for k in range(npts)]
            data[name] = np.array(rows)
            i += npts + 1
        i += 1
    header["data"] = data
    return header
