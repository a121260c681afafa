"""Readers and writers for model matrices, graphs, signals and group data."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .cayley import FiniteGroup, Irrep, IrrepSet, is_cayley_function
from .graphon import Graph, StepGraphon, uniform_measures


def _lines(path):
    text = Path(path).read_text()
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def _floats(line: str, where: str) -> list[float]:
    try:
        return [float(x) for x in line.split(",")]
    except ValueError as exc:
        raise ValueError(f"{where}: cannot parse {line!r}") from exc


# -- model matrix ------------------------------------------------------------

def read_model(path) -> StepGraphon:
    """k rows of k comma separated values, optionally preceded by ``measures: m1,...,mk``."""
    lines = _lines(path)
    measures = None
    if lines and lines[0].lower().startswith("measures:"):
        measures = np.array(_floats(lines[0].split(":", 1)[1], str(path)))
        lines = lines[1:]
    rows = [_floats(ln, str(path)) for ln in lines]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValueError(f"{path}: model matrix must be square")
    values = np.array(rows)
    if measures is None:
        measures = uniform_measures(len(rows))
    elif len(measures) != len(rows):
        raise ValueError(f"{path}: {len(measures)} measures for {len(rows)} cells")
    return StepGraphon(values, measures)


def write_model(w: StepGraphon, path, with_measures=True):
    out = []
    if with_measures:
        out.append("measures: " + ",".join(repr(float(m)) for m in w.cell_measures))
    out += [",".join(repr(float(v)) for v in row) for row in w.values]
    Path(path).write_text("\n".join(out) + "\n")


# -- graphs ------------------------------------------------------------------

def read_edge_list(path) -> Graph:
    """Header ``n <count>`` then one 0-based ``u v`` pair per line."""
    lines = _lines(path)
    if not lines or not lines[0].startswith("n "):
        raise ValueError(f"{path}: missing 'n <count>' header")
    n = int(lines[0].split()[1])
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"{path}: bad edge line {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Graph.from_edges(n, edges)


def write_edge_list(graph: Graph, path):
    out = [f"n {graph.n}"] + [f"{u} {v}" for u, v in graph.edges()]
    Path(path).write_text("\n".join(out) + "\n")


# -- signals -----------------------------------------------------------------

def read_signal(path) -> np.ndarray:
    """One value per line, ``re`` or ``re,im``."""
    vals = []
    for ln in _lines(path):
        parts = _floats(ln, str(path))
        if len(parts) == 1:
            vals.append(complex(parts[0], 0.0))
        elif len(parts) == 2:
            vals.append(complex(parts[0], parts[1]))
        else:
            raise ValueError(f"{path}: bad signal line {ln!r}")
    return np.array(vals, dtype=complex)


def write_signal(values, path):
    values = np.asarray(values, dtype=complex)
    out = [repr(float(v.real)) if v.imag == 0 else f"{float(v.real)!r},{float(v.imag)!r}"
           for v in values]
    Path(path).write_text("\n".join(out) + "\n")


# -- groups ------------------------------------------------------------------

def read_group(path) -> FiniteGroup:
    """JSON ``{"names": [...], "table": [[...]], "classes": [[...]]}``; classes optional."""
    data = json.loads(Path(path).read_text())
    names = data["names"]
    classes = data.get("classes")
    if classes is not None:
        classes = [tuple(names.index(c) if isinstance(c, str) else int(c) for c in cls)
                   for cls in classes]
    return FiniteGroup(tuple(names), np.array(data["table"], dtype=int), classes)


def write_group(group: FiniteGroup, path):
    data = {"names": list(group.names), "table": group.table.tolist(),
            "classes": [list(c) for c in group.classes]}
    Path(path).write_text(json.dumps(data, indent=1))


def _decode_matrix(rows, d):
    m = np.array(rows, dtype=float)
    if m.shape != (d, d, 2):
        raise ValueError(f"matrix entries must be [re, im] pairs in a {d}x{d} layout")
    return m[..., 0] + 1j * m[..., 1]


def read_irreps(path, group: FiniteGroup, validate=True) -> IrrepSet:
    """JSON list of ``{"label", "dimension", "matrices"}``.

    ``matrices`` is either a list in group element order or an object keyed
    by element name; each matrix is row-major with ``[re, im]`` entries.
    """
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("irreps", [data])
    irreps = []
    for item in data:
        d = int(item["dimension"])
        mats = item["matrices"]
        if isinstance(mats, dict):
            mats = [mats[name] for name in group.names]
        irreps.append(Irrep(item["label"], np.array([_decode_matrix(m, d) for m in mats])))
    out = IrrepSet(group, tuple(irreps))
    if validate:
        out.validate()
    return out


def write_irreps(irreps: IrrepSet, path):
    data = [{
        "label": pi.label,
        "dimension": pi.dim,
        "matrices": np.stack([pi.matrices.real, pi.matrices.imag], axis=-1).tolist(),
    } for pi in irreps]
    Path(path).write_text(json.dumps(data, indent=1))


def read_cayley_function(path, group: FiniteGroup) -> np.ndarray:
    """JSON object mapping element name to value; missing elements are 0."""
    data = json.loads(Path(path).read_text())
    unknown = set(data) - set(group.names)
    if unknown:
        raise ValueError(f"unknown group elements {sorted(unknown)}")
    gamma = np.array([float(data.get(name, 0.0)) for name in group.names])
    if not is_cayley_function(group, gamma):
        raise ValueError("gamma(g) != gamma(g^-1): not a Cayley function")
    return gamma


def write_cayley_function(group: FiniteGroup, gamma, path):
    data = {name: float(v) for name, v in zip(group.names, gamma)}
    Path(path).write_text(json.dumps(data, indent=1))
