"""Interchange bundle format.

A bundle is a directory holding one test sample:

    header.json     version, dims, temperature, class names, set count
    views.f32       n_views x dim float32, little-endian, row-major
    classes_00.f32  n_classes x dim float32 (one file per class-embedding set)
    classes_01.f32  ...

Raw file sizes must match the declared dims exactly. Matrices are widened to
float64 and re-normalized on load. Multiple class sets support the
multi-prompt-set majority vote without the core knowing about prompts.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .embeddings import (
    DEFAULT_TEMPERATURE,
    ClassEmbeddings,
    EmbeddingSet,
)
from .errors import FormatError, NonFinite, SizeMismatch

MAGIC = "mta-bundle"
VERSION = 1
HEADER_NAME = "header.json"
VIEWS_NAME = "views.f32"

_F32 = np.dtype("<f4")


def _class_file(index: int) -> str:
    return f"classes_{index:02d}.f32"


def _read_matrix(path: Path, rows: int, cols: int) -> np.ndarray:
    expected = rows * cols * 4
    try:
        raw = path.read_bytes()
    except FileNotFoundError:
        raise SizeMismatch(f"{path.name}: missing (expected {expected} bytes)") from None
    if len(raw) != expected:
        raise SizeMismatch(f"{path.name}: expected {expected} bytes, found {len(raw)}")
    arr = np.frombuffer(raw, dtype=_F32).reshape(rows, cols).astype(np.float64)
    if not np.isfinite(arr).all():
        raise NonFinite(f"{path.name}: contains NaN or infinite entries")
    return arr


def read_bundle(path) -> tuple[EmbeddingSet, list[ClassEmbeddings], dict]:
    """Load one sample bundle; returns (views, class sets, header metadata)."""
    root = Path(path)
    header_path = root / HEADER_NAME
    if not header_path.is_file():
        raise FormatError(f"{root}: no {HEADER_NAME}")
    try:
        header = json.loads(header_path.read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{header_path}: invalid JSON ({exc})") from None

    if header.get("format") != MAGIC:
        raise FormatError(f"{header_path}: bad magic {header.get('format')!r}")
    version = header.get("version")
    if version != VERSION:
        raise FormatError(
            f"{header_path}: bundle version {version!r} is not supported by this "
            f"reader (expected {VERSION}); upgrade the package to read newer bundles"
        )

    try:
        n_views = int(header["n_views"])
        dim = int(header["dim"])
        n_classes = int(header["n_classes"])
        class_sets = int(header.get("class_sets", 1))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{header_path}: missing or malformed dims ({exc})") from None
    if n_views < 1 or dim < 1 or n_classes < 2 or class_sets < 1:
        raise FormatError(f"{header_path}: dims out of range")

    temperature = float(header.get("temperature") or DEFAULT_TEMPERATURE)
    names = tuple(header.get("class_names") or ())
    original_index = int(header.get("original_index", 0))

    try:
        views = EmbeddingSet(
            _read_matrix(root / VIEWS_NAME, n_views, dim), original_index=original_index
        )
        class_embeddings = [
            ClassEmbeddings(
                _read_matrix(root / _class_file(i), n_classes, dim),
                temperature=temperature,
                class_names=names,
            )
            for i in range(class_sets)
        ]
    except ValueError as exc:
        raise FormatError(f"{root}: {exc}") from None
    return views, class_embeddings, header


def write_bundle(
    views: EmbeddingSet,
    class_sets: list[ClassEmbeddings],
    path,
    metadata: dict | None = None,
) -> Path:
    """Write one sample bundle; byte output is deterministic."""
    if not class_sets:
        raise ValueError("need at least one class-embedding set")
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)

    header = {
        "format": MAGIC,
        "version": VERSION,
        "n_views": views.n_views,
        "dim": views.dim,
        "n_classes": class_sets[0].n_classes,
        "class_sets": len(class_sets),
        "temperature": class_sets[0].temperature,
        "class_names": list(class_sets[0].class_names),
        "original_index": views.original_index,
    }
    if metadata:
        header["meta"] = metadata
    (root / HEADER_NAME).write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")

    (root / VIEWS_NAME).write_bytes(np.ascontiguousarray(views.views, dtype=_F32).tobytes())
    for i, cs in enumerate(class_sets):
        if cs.n_classes != class_sets[0].n_classes:
            raise ValueError("all class sets must have the same class count")
        (root / _class_file(i)).write_bytes(
            np.ascontiguousarray(cs.classes, dtype=_F32).tobytes()
        )
    return root


def is_bundle(path) -> bool:
    return (Path(path) / HEADER_NAME).is_file()
