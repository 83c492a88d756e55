"""On-disk formats for augmented datasets.

Augmented data is JSON-lines: a header record, then one record per
example. Matrices travel as base64-encoded little-endian float32 with an
explicit shape, so files are platform-independent and byte-identical
across repeated runs with the same seed.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from typing import Sequence, TextIO, Union

import numpy as np

from .corpus import Span
from .mixer import MixedExample, MixedRESample, Provenance

FORMAT_NAME = "segmix-augmented"
FORMAT_VERSION = 1


def encode_array(array: np.ndarray) -> dict:
    """Base64 little-endian float32 payload with explicit shape."""
    data = np.ascontiguousarray(array, dtype="<f4")
    return {
        "shape": list(data.shape),
        "data": base64.b64encode(data.tobytes()).decode("ascii"),
    }


def decode_array(blob: dict) -> np.ndarray:
    raw = base64.b64decode(blob["data"])
    array = np.frombuffer(raw, dtype="<f4").reshape(blob["shape"])
    return array.astype(np.float64)


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass
class AugmentedFile:
    """Parsed contents of an augmented JSONL file."""

    task: str
    label_vocab: tuple[str, ...]
    dim: int
    examples: list
    meta: dict


def save_augmented(
    stream: TextIO,
    examples: Sequence[Union[MixedExample, MixedRESample]],
    label_vocab: Sequence[str],
    task: str,
    meta: dict | None = None,
) -> None:
    """Write header + one record per example. ``task`` is "ner" or "re"."""
    if task not in ("ner", "re"):
        raise ValueError(f"task must be 'ner' or 're', got {task!r}")
    dim = int(examples[0].embeddings.shape[1]) if examples else 0
    header = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "task": task,
        "label_vocab": list(label_vocab),
        "dim": dim,
        "count": len(examples),
        "meta": meta or {},
    }
    stream.write(_dump(header) + "\n")
    for example in examples:
        record = {
            "embeddings": encode_array(example.embeddings),
            "provenance": example.provenance.to_json(),
        }
        if task == "ner":
            record["soft_labels"] = encode_array(example.soft_labels)
        else:
            record["soft_relation"] = encode_array(example.soft_relation)
            record["e1"] = [example.e1.start, example.e1.end]
            record["e2"] = [example.e2.start, example.e2.end]
        stream.write(_dump(record) + "\n")


def load_augmented(stream: TextIO) -> AugmentedFile:
    """Read a file written by :func:`save_augmented`."""
    header_line = stream.readline()
    if not header_line.strip():
        raise ValueError("empty augmented file")
    header = json.loads(header_line)
    if header.get("format") != FORMAT_NAME:
        raise ValueError(f"not a {FORMAT_NAME} file")
    if header.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported version {header.get('version')}")
    task = header["task"]
    examples = []
    for line in stream:
        if not line.strip():
            continue
        record = json.loads(line)
        provenance = Provenance.from_json(record["provenance"])
        embeddings = decode_array(record["embeddings"])
        if task == "ner":
            examples.append(
                MixedExample(embeddings, decode_array(record["soft_labels"]), provenance)
            )
        else:
            examples.append(
                MixedRESample(
                    embeddings,
                    decode_array(record["soft_relation"]),
                    Span(*record["e1"]),
                    Span(*record["e2"]),
                    provenance,
                )
            )
    if len(examples) != header["count"]:
        raise ValueError(
            f"header says {header['count']} examples, file has {len(examples)}"
        )
    return AugmentedFile(
        task=task,
        label_vocab=tuple(header["label_vocab"]),
        dim=header["dim"],
        examples=examples,
        meta=header.get("meta", {}),
    )
