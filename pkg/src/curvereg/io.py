"""File handling: ASCII PLY surfaces, XYZ polyline curves, transform JSON.

Formats kept deliberately small:

* surfaces: ASCII PLY with ``x y z`` vertex properties and optional
  ``nx ny nz`` normals (other elements and properties are skipped);
* curves: whitespace-separated ``x y z`` lines, blank lines separating
  segments, ``#`` comments;
* transforms: JSON with ``R`` (9 reals, row-major) and ``t`` (3 reals), plus
  optional registration metadata.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .differential import Curve, SurfaceSamples
from .exceptions import ParseError
from .geometry import RigidTransform

__all__ = [
    "load_model",
    "load_curve",
    "save_curve",
    "write_ply",
    "save_transform",
    "load_transform",
]


def _read_lines(path):
    if not os.path.exists(path):
        raise ParseError("file not found", path=str(path))
    with open(path, "r", errors="replace") as f:
        return f.read().splitlines()


def _parse_ply(path, lines) -> SurfaceSamples:
    if not lines or lines[0].strip() != "ply":
        raise ParseError("missing 'ply' magic", path=str(path), line=1)

    elements = []            # (name, count, [property names])
    fmt = None
    ln = 1
    for ln, raw in enumerate(lines[1:], start=2):
        tok = raw.split()
        if not tok or tok[0] == "comment":
            continue
        if tok[0] == "format":
            fmt = tok[1] if len(tok) > 1 else None
        elif tok[0] == "element":
            try:
                elements.append([tok[1], int(tok[2]), []])
            except (IndexError, ValueError):
                raise ParseError("malformed element line", path=str(path), line=ln)
        elif tok[0] == "property":
            if not elements:
                raise ParseError("property before any element", path=str(path), line=ln)
            # scalar: "property <type> <name>"; list: "property list <a> <b> <name>"
            elements[-1][2].append(tok[-1] if len(tok) >= 3 else "")
        elif tok[0] == "end_header":
            break
    else:
        raise ParseError("missing end_header", path=str(path))
    if fmt != "ascii":
        raise ParseError(f"unsupported PLY format '{fmt}' (ASCII only)",
                         path=str(path), line=1)

    body = lines[ln:]
    cursor = 0
    points = normals = None
    for name, count, props in elements:
        if name == "vertex":
            try:
                ix, iy, iz = props.index("x"), props.index("y"), props.index("z")
            except ValueError:
                raise ParseError("vertex element lacks x/y/z properties",
                                 path=str(path))
            has_n = all(p in props for p in ("nx", "ny", "nz"))
            cols = [ix, iy, iz]
            if has_n:
                cols += [props.index("nx"), props.index("ny"), props.index("nz")]
            data = np.empty((count, len(cols)))
            for r in range(count):
                if cursor + r >= len(body):
                    raise ParseError("unexpected end of vertex data", path=str(path),
                                     line=ln + cursor + r + 1)
                tok = body[cursor + r].split()
                try:
                    data[r] = [float(tok[c]) for c in cols]
                except (IndexError, ValueError):
                    raise ParseError("malformed vertex line", path=str(path),
                                     line=ln + cursor + r + 1)
            points = data[:, :3]
            normals = data[:, 3:6] if has_n else None
        cursor += count
    if points is None:
        raise ParseError("no vertex element", path=str(path))
    return SurfaceSamples(points, normals)


def _parse_xyz_points(path, lines):
    rows = []
    for ln, raw in enumerate(lines, start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            continue
        tok = s.split()
        if len(tok) < 3:
            raise ParseError("expected at least 3 columns", path=str(path), line=ln)
        try:
            rows.append([float(v) for v in tok[:6]])
        except ValueError:
            raise ParseError("non-numeric coordinate", path=str(path), line=ln)
    if not rows:
        raise ParseError("no points found", path=str(path))
    width = min(len(r) for r in rows)
    arr = np.array([r[:width] for r in rows])
    normals = arr[:, 3:6] if width >= 6 else None
    return SurfaceSamples(arr[:, :3], normals)


def load_model(path) -> SurfaceSamples:
    """Load a surface point set (.ply ASCII or .xyz), normals if present."""
    lines = _read_lines(path)
    if str(path).lower().endswith(".ply"):
        return _parse_ply(path, lines)
    return _parse_xyz_points(path, lines)


def write_ply(path, points, normals=None) -> None:
    """Write points (and optional normals) as an ASCII PLY vertex cloud."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    with open(path, "w") as f:
        f.write("ply\nformat ascii 1.0\n")
        f.write(f"element vertex {len(pts)}\n")
        f.write("property float x\nproperty float y\nproperty float z\n")
        if normals is not None:
            f.write("property float nx\nproperty float ny\nproperty float nz\n")
        f.write("end_header\n")
        if normals is None:
            for p in pts:
                f.write(f"{p[0]:.10g} {p[1]:.10g} {p[2]:.10g}\n")
        else:
            nrm = np.asarray(normals, dtype=float).reshape(-1, 3)
            for p, n in zip(pts, nrm):
                f.write(f"{p[0]:.10g} {p[1]:.10g} {p[2]:.10g} "
                        f"{n[0]:.10g} {n[1]:.10g} {n[2]:.10g}\n")


def load_curve(path) -> Curve:
    """Load a polyline curve: xyz rows, blank-line separated segments."""
    lines = _read_lines(path)
    segments = []
    current = []
    for ln, raw in enumerate(lines, start=1):
        s = raw.split("#", 1)[0].strip()
        if not s:
            if current:
                segments.append(np.array(current))
                current = []
            continue
        tok = s.split()
        if len(tok) < 3:
            raise ParseError("expected 3 columns", path=str(path), line=ln)
        try:
            current.append([float(v) for v in tok[:3]])
        except ValueError:
            raise ParseError("non-numeric coordinate", path=str(path), line=ln)
    if current:
        segments.append(np.array(current))
    if not segments:
        raise ParseError("no curve points found", path=str(path))
    try:
        return Curve(segments)
    except Exception as e:
        raise ParseError(str(e), path=str(path)) from e


def save_curve(path, curve: Curve) -> None:
    with open(path, "w") as f:
        for k, seg in enumerate(curve.segments):
            if k:
                f.write("\n")
            for p in seg:
                f.write(f"{p[0]:.10g} {p[1]:.10g} {p[2]:.10g}\n")


def save_transform(path, transform: RigidTransform, extra: dict | None = None) -> None:
    """Write a transform as JSON (row-major ``R``, ``t``; extra fields merged)."""
    obj = {
        "R": [float(v) for v in np.asarray(transform.R).ravel()],
        "t": [float(v) for v in np.asarray(transform.t)],
    }
    if extra:
        obj.update(extra)
    with open(path, "w") as f:
        json.dump(obj, f, indent=2)
        f.write("\n")


def load_transform(path):
    """Read a transform JSON; returns ``(RigidTransform, metadata dict)``."""
    try:
        with open(path) as f:
            obj = json.load(f)
    except FileNotFoundError:
        raise ParseError("file not found", path=str(path))
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e.msg}", path=str(path), line=e.lineno)
    try:
        R = np.array(obj["R"], dtype=float).reshape(3, 3)
        t = np.array(obj["t"], dtype=float)
        transform = RigidTransform(R, t)
    except (KeyError, ValueError) as e:
        raise ParseError(f"invalid transform payload: {e}", path=str(path)) from e
    meta = {k: v for k, v in obj.items() if k not in ("R", "t")}
    return transform, meta
