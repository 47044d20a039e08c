"""Plain-text checkpoint codec.

File layout (UTF-8)::

    #checkpoint<TAB>1
    key<TAB>json-value            one line per manifest entry, keys sorted
    #tensors
    name<TAB>d0,d1,...<TAB>v v v  one line per tensor, names sorted

Values are written with ``repr(float)`` which round-trips float64 exactly, so a
model restored from a checkpoint reproduces forward outputs bitwise. Saving
the same manifest and tensors twice produces byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import structlog

from ..exceptions import ParseError, ValidationError

logger = structlog.get_logger(__name__)

FORMAT_VERSION = 1
HEADER = "#checkpoint"
TENSOR_MARKER = "#tensors"


@dataclass
class Checkpoint:
    manifest: dict[str, Any] = field(default_factory=dict)
    tensors: dict[str, np.ndarray] = field(default_factory=dict)

    def require(self, key: str) -> Any:
        try:
            return self.manifest[key]
        except KeyError:
            raise ValidationError(f"Checkpoint manifest has no {key!r}", {"key": key}) from None


def _format_tensor(name: str, array: np.ndarray) -> str:
    if "\t" in name or not name:
        raise ValidationError(f"Invalid tensor name {name!r}")
    shape = ",".join(str(d) for d in array.shape)
    values = " ".join(repr(v) for v in np.asarray(array, dtype=np.float64).ravel().tolist())
    return f"{name}\t{shape}\t{values}"


def save_checkpoint(path: str | Path, manifest: dict[str, Any], tensors: dict[str, np.ndarray]) -> None:
    lines = [f"{HEADER}\t{FORMAT_VERSION}"]
    for key in sorted(manifest):
        lines.append(f"{key}\t{json.dumps(manifest[key], sort_keys=True)}")
    lines.append(TENSOR_MARKER)
    for name in sorted(tensors):
        lines.append(_format_tensor(name, tensors[name]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info("checkpoint_saved", path=str(path), tensors=len(tensors))


def load_checkpoint(path: str | Path) -> Checkpoint:
    """Read a checkpoint written by ``save_checkpoint``.

    Raises:
        ParseError: On a malformed line (with its line number)
    """
    path_str = str(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"Cannot read checkpoint: {e}", path_str) from e

    lines = text.splitlines()
    if not lines or lines[0] != f"{HEADER}\t{FORMAT_VERSION}":
        raise ParseError("Missing or unsupported checkpoint header", path_str, 1)

    checkpoint = Checkpoint()
    in_tensors = False
    for line_number, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        if line == TENSOR_MARKER:
            in_tensors = True
            continue
        if not in_tensors:
            key, sep, raw = line.partition("\t")
            if not sep:
                raise ParseError("Manifest line needs key<TAB>value", path_str, line_number)
            try:
                checkpoint.manifest[key] = json.loads(raw)
            except json.JSONDecodeError as e:
                raise ParseError(f"Bad manifest value for {key!r}: {e}", path_str, line_number) from e
            continue

        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError("Tensor line needs name<TAB>shape<TAB>values", path_str, line_number)
        name, raw_shape, raw_values = parts
        try:
            shape = tuple(int(d) for d in raw_shape.split(",")) if raw_shape else ()
            values = [float(v) for v in raw_values.split()]
        except ValueError as e:
            raise ParseError(f"Bad tensor {name!r}: {e}", path_str, line_number) from e
        if len(values) != int(np.prod(shape)):
            raise ParseError(
                f"Tensor {name!r} has {len(values)} values for shape {shape}", path_str, line_number
            )
        if not np.isfinite(values).all():
            raise ParseError(f"Tensor {name!r} has a non-finite value", path_str, line_number)
        checkpoint.tensors[name] = np.array(values, dtype=np.float64).reshape(shape)

    if not in_tensors:
        raise ParseError("Checkpoint has no tensor section", path_str, len(lines))
    logger.info("checkpoint_loaded", path=path_str, tensors=len(checkpoint.tensors))
    return checkpoint
