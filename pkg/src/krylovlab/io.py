"""Result tables, their CSV/JSON serialization, and flat key = value config files."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidArgument


def format_value(v) -> str:
    """Lossless text form: 17 significant digits for floats."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % float(v)
    return str(v)


def parse_value(s: str):
    s = s.strip()
    if s in ("true", "false"):
        return s == "true"
    for kind in (int, float):
        try:
            return kind(s)
        except ValueError:
            pass
    return s


@dataclass
class ResultTable:
    """Named equal-length numeric columns plus a flat metadata block."""

    columns: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        cols = {}
        for k, v in self.columns.items():
            cols[str(k)] = np.asarray(v, dtype=float).ravel()
        lengths = {len(v) for v in cols.values()}
        if len(lengths) > 1:
            raise InvalidArgument(f"columns differ in length: {sorted(lengths)}")
        self.columns = cols

    def __len__(self):
        return len(next(iter(self.columns.values()), ()))

    def column(self, name: str) -> np.ndarray:
        return self.columns[name]

    # --- CSV -----------------------------------------------------------
    def to_csv(self) -> str:
        lines = [f"# {k} = {format_value(v)}" for k, v in self.metadata.items()]
        names = list(self.columns)
        lines.append(",".join(names))
        data = np.column_stack([self.columns[n] for n in names]) if names else np.empty((0, 0))
        for row in data:
            lines.append(",".join("%.17g" % v for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "ResultTable":
        meta, rows, header = {}, [], None
        for line in text.splitlines():
            if not line.strip():
                continue
            if line.startswith("#"):
                key, _, val = line[1:].partition("=")
                meta[key.strip()] = parse_value(val)
            elif header is None:
                header = line.split(",")
            else:
                rows.append([float(v) for v in line.split(",")])
        if header is None:
            raise InvalidArgument("CSV text has no header row")
        data = np.array(rows, dtype=float).reshape(len(rows), len(header))
        return cls({h: data[:, i] for i, h in enumerate(header)}, meta)

    # --- JSON ----------------------------------------------------------
    def to_json(self) -> str:
        meta = {k: (v.item() if isinstance(v, np.generic) else v) for k, v in self.metadata.items()}
        cols = {k: [float(x) for x in v] for k, v in self.columns.items()}
        return json.dumps({"metadata": meta, "columns": cols}, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ResultTable":
        obj = json.loads(text)
        return cls(obj["columns"], obj.get("metadata", {}))

    def write(self, path, fmt: str = "csv") -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv() if fmt == "csv" else self.to_json())
        return path

    @classmethod
    def read(cls, path) -> "ResultTable":
        path = Path(path)
        text = path.read_text()
        return cls.from_json(text) if path.suffix == ".json" else cls.from_csv(text)


def read_config_file(path) -> dict:
    """Parse a flat ``key = value`` file; blank lines and ``#`` comments are skipped.

    Keys use the long flag names with dashes or underscores (``max-n`` or ``max_n``).
    """
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidArgument(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep or not key.strip():
            raise InvalidArgument(f"{path}:{lineno}: expected 'key = value'")
        out[key.strip().replace("-", "_")] = val.strip()
    return out
