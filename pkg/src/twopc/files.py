"""File formats: structure JSON, raw cell dumps, kernels, plans, derivation records, PPM images."""

from __future__ import annotations

import hashlib
import json
import os
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .derive import CoalescencePlan, KernelList, coalesce, kernel_extend, phase_extend, upsample
from .structure import Structure

__all__ = [
    "DerivationDatabase",
    "DerivationRecord",
    "PALETTE",
    "RAW_THRESHOLD",
    "apply_operation",
    "dumps_structure",
    "load_kernels",
    "load_plan",
    "load_structure",
    "loads_structure",
    "render_ppm",
    "save_structure",
    "structure_id",
]

# Structures with more cells than this are written as raw u8 + JSON header.
RAW_THRESHOLD = 10**6

# RGB per phase for phases 1..n-1; phase n is always white.
PALETTE = [
    (31, 119, 180),
    (255, 127, 14),
    (44, 160, 44),
    (214, 39, 40),
    (148, 103, 189),
    (140, 86, 75),
    (227, 119, 194),
    (127, 127, 127),
    (188, 189, 34),
    (23, 190, 207),
]
WHITE = (255, 255, 255)


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def dumps_structure(S: Structure, meta: dict | None = None) -> str:
    """Canonical JSON: keys ``dims, phases, cells[, meta]``, no whitespace."""
    doc = {"dims": list(S.dims), "phases": S.phases, "cells": S.cells.ravel().tolist()}
    if meta is not None:
        doc["meta"] = meta
    return _dumps(doc)


def _from_doc(doc: dict) -> Structure:
    dims = tuple(int(d) for d in doc["dims"])
    cells = np.asarray(doc["cells"], dtype=np.int64)
    if cells.size != int(np.prod(dims)):
        raise ValueError(f"{cells.size} cells do not fill dims {dims}")
    return Structure(cells.reshape(dims), int(doc["phases"]))


def loads_structure(text: str) -> tuple[Structure, dict | None]:
    doc = json.loads(text)
    return _from_doc(doc), doc.get("meta")


def save_structure(S: Structure, path, meta: dict | None = None) -> Path:
    """Write ``S``; above :data:`RAW_THRESHOLD` cells a raw ``.u8`` dump is added."""
    path = Path(path)
    if S.size > RAW_THRESHOLD:
        if S.phases > 255:
            raise ValueError("raw dumps hold at most 255 phases")
        raw = path.with_suffix(".u8")
        raw.write_bytes(S.cells.astype("<u1").tobytes())
        header = {"dims": list(S.dims), "phases": S.phases, "raw": raw.name, "format": "u8"}
        if meta is not None:
            header["meta"] = meta
        path.write_text(_dumps(header))
    else:
        path.write_text(dumps_structure(S, meta))
    return path


def load_structure(path) -> Structure:
    path = Path(path)
    doc = json.loads(path.read_text())
    if "raw" in doc:
        data = np.frombuffer((path.parent / doc["raw"]).read_bytes(), dtype="<u1")
        dims = tuple(int(d) for d in doc["dims"])
        return Structure(data.astype(np.int64).reshape(dims), int(doc["phases"]))
    return _from_doc(doc)


def load_kernels(path) -> KernelList:
    """Kernel list JSON: ``{"dims": [...], "kernels": [[row-major 0/1], ...]}``."""
    doc = json.loads(Path(path).read_text())
    dims = tuple(int(d) for d in doc["dims"])
    return KernelList(tuple(np.asarray(k, dtype=np.int64).reshape(dims) for k in doc["kernels"]))


def load_plan(path) -> CoalescencePlan:
    """Plan JSON: ``{"mapping": [...]}`` or ``{"groups": [[...], ...]}``."""
    doc = json.loads(Path(path).read_text())
    if "groups" in doc:
        return CoalescencePlan.from_groups(doc["groups"])
    return CoalescencePlan(tuple(doc["mapping"]))


def structure_id(S: Structure) -> str:
    """Content address: first 16 hex digits of the SHA-256 of the canonical JSON."""
    return hashlib.sha256(dumps_structure(S).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# derivation records

OPERATIONS = ("phase_extend", "kernel_extend", "coalesce", "upsample")


def apply_operation(operation: str, parent: Structure, params: dict) -> Structure:
    """Apply a named derivation with JSON-style parameters."""
    if operation == "phase_extend":
        return phase_extend(parent, params["z"])
    if operation == "kernel_extend":
        dims = tuple(params["dims"])
        kernels = tuple(np.asarray(k).reshape(dims) for k in params["kernels"])
        return kernel_extend(parent, KernelList(kernels))
    if operation == "coalesce":
        return coalesce(parent, CoalescencePlan(tuple(params["mapping"])))
    if operation == "upsample":
        return upsample(parent, params["factor"])
    raise ValueError(f"unknown operation {operation!r}; expected one of {OPERATIONS}")


@dataclass
class DerivationRecord:
    id: str
    parents: list
    operation: str
    params: dict
    child: str

    def to_json(self) -> str:
        return _dumps(
            {"id": self.id, "parents": self.parents, "operation": self.operation,
             "params": self.params, "child": self.child}
        )


@dataclass
class DerivationDatabase:
    """Directory of content-addressed structures plus a JSON-lines record log.

    Layout::

        root/structures/<id>.json
        root/records.jsonl
    """

    root: Path
    records: list = field(default_factory=list)

    def __post_init__(self):
        self.root = Path(self.root)
        (self.root / "structures").mkdir(parents=True, exist_ok=True)
        log = self.root / "records.jsonl"
        if log.exists():
            for line in log.read_text().splitlines():
                if line.strip():
                    self.records.append(DerivationRecord(**json.loads(line)))

    @contextmanager
    def _locked(self):
        lock = self.root / ".lock"
        try:
            fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise RuntimeError(f"database {self.root} is locked by another writer") from None
        try:
            yield
        finally:
            os.close(fd)
            lock.unlink()

    def path_of(self, sid: str) -> Path:
        return self.root / "structures" / f"{sid}.json"

    def add_structure(self, S: Structure, meta: dict | None = None) -> str:
        sid = structure_id(S)
        path = self.path_of(sid)
        if not path.exists():
            save_structure(S, path, meta)
        return sid

    def get(self, sid: str) -> Structure:
        return load_structure(self.path_of(sid))

    def derive(self, parent: Structure, operation: str, params: dict) -> tuple[Structure, DerivationRecord]:
        child = apply_operation(operation, parent, params)
        with self._locked():
            pid = self.add_structure(parent)
            cid = self.add_structure(child)
            record = DerivationRecord(
                id=f"{pid}-{operation}-{cid}", parents=[pid], operation=operation,
                params=params, child=f"structures/{cid}.json",
            )
            if all(r.id != record.id for r in self.records):
                self.records.append(record)
                with open(self.root / "records.jsonl", "a") as fh:
                    fh.write(record.to_json() + "\n")
        return child, record

    def replay(self) -> list[tuple[str, bool]]:
        """Re-apply every record; report whether each child is reproduced bit-exactly."""
        out = []
        for r in self.records:
            parent = self.get(r.parents[0])
            child = apply_operation(r.operation, parent, r.params)
            stored = load_structure(self.root / r.child)
            out.append((r.id, child == stored))
        return out


# ---------------------------------------------------------------------------
# raster export


def _color_grid(S: Structure) -> np.ndarray:
    colors = np.array([PALETTE[i % len(PALETTE)] for i in range(S.phases)], dtype=np.uint8)
    colors[S.phases - 1] = WHITE
    if S.ndim == 1:
        cells = S.cells[None, :]
    elif S.ndim == 2:
        cells = S.cells
    elif S.ndim == 3:
        # slices along axis 2 side by side, separated by one white column
        blocks = []
        for k in range(S.dims[2]):
            blocks.append(S.cells[:, :, k])
            blocks.append(np.full((S.dims[0], 1), 0))
        cells = np.concatenate(blocks[:-1], axis=1)
    else:
        raise ValueError("only 1D, 2D and 3D structures can be rendered")
    rgb = np.empty(cells.shape + (3,), dtype=np.uint8)
    rgb[cells == 0] = WHITE
    for a in range(1, S.phases + 1):
        rgb[cells == a] = colors[a - 1]
    return rgb


def render_ppm(S: Structure, path, block: int = 32) -> Path:
    """Binary PPM (P6), one ``block x block`` square per cell, axis 0 downward."""
    if block < 1:
        raise ValueError("block size must be >= 1")
    rgb = _color_grid(S)
    rgb = np.repeat(np.repeat(rgb, block, axis=0), block, axis=1)
    h, w = rgb.shape[:2]
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())
    return path
