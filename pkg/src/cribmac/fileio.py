"""JSON inputs, CSV/JSON outputs, and atomic file replacement."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import tempfile
from pathlib import Path

from . import __version__
from .channel import ChannelError, MacChannel, canonical_form, channel_from_dict
from .region import FactorizedLaw, SizeMismatch


class InputError(ValueError):
    """A user-supplied file could not be used; the message is user-facing."""


def read_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None


def load_channel(path) -> MacChannel:
    d = read_json(path)
    if not isinstance(d, dict):
        raise InputError(f"{path}: channel file must hold a JSON object")
    try:
        return channel_from_dict(d)
    except ChannelError as exc:
        raise InputError(f"{path}: {exc}") from None


def load_law(path, witness_id=None) -> FactorizedLaw:
    """A law file is either one law object or a witness sidecar ``{"witnesses": {id: law}}``.

    Without ``witness_id`` the sidecar's ``default`` entry is used, else the lowest id.
    """
    d = read_json(path)
    if isinstance(d, dict) and "witnesses" in d:
        table = d["witnesses"]
        if not table:
            raise InputError(f"{path}: witness file is empty")
        if witness_id is None:
            witness_id = d.get("default")
        key = str(witness_id) if witness_id is not None else min(table, key=int)
        if key not in table:
            raise InputError(f"{path}: no witness with id {key}")
        d = table[key]
    if not isinstance(d, dict) or "mode" not in d:
        raise InputError(f"{path}: law object needs a 'mode' field")
    try:
        return FactorizedLaw.from_dict(d)
    except (KeyError, ValueError, TypeError, SizeMismatch) as exc:
        raise InputError(f"{path}: malformed law: {exc}") from None


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def header_line(config: dict, seed) -> str:
    return f"# cribmac {__version__} config={config_hash(config)} seed={seed}"


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def write_csv(path, header: str, columns, rows) -> None:
    buf = io.StringIO()
    buf.write(header + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    atomic_write_text(path, buf.getvalue())


def write_json(path, obj, header: str | None = None) -> None:
    if header is not None:
        obj = {"_header": header.lstrip("# "), **obj}
    atomic_write_text(path, json.dumps(obj, indent=1, sort_keys=False) + "\n")


def csv_body(path) -> str:
    """File content without the provenance comment lines."""
    with open(path, encoding="utf-8") as fh:
        return "".join(line for line in fh if not line.startswith("#"))


def dump_channel(path, c: MacChannel) -> None:
    write_json(path, canonical_form(c))


__all__ = [
    "InputError", "read_json", "load_channel", "load_law", "config_hash", "header_line",
    "atomic_write_text", "write_csv", "write_json", "csv_body", "dump_channel",
]
