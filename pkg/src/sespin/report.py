"""Machine-readable result records emitted by every CLI subcommand.

Text form: one `key = value # unit ± uncertainty` line per numeric result,
preceded by plain `key = value` header, note, and warning lines.  The
`--json` flag switches to a single structured object with the same fields.
Reports carry no timestamps, so identical inputs give byte-identical
output.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .units import Quantity


@dataclass
class ReportEntry:
    name: str
    value: float
    uncertainty: float
    unit: str
    provenance: str = ""


@dataclass
class Report:
    subcommand: str
    version: str
    inputs: dict = field(default_factory=dict)  # path -> sha256
    entries: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def add(self, name: str, value, unit: str = "", provenance: str = "") -> None:
        if isinstance(value, Quantity):
            unit = unit or value.unit
            self.entries.append(
                ReportEntry(name, float(value.value), float(value.uncertainty), unit, provenance)
            )
        else:
            self.entries.append(ReportEntry(name, float(value), 0.0, unit, provenance))

    def note(self, key: str, value) -> None:
        self.notes[key] = str(value)

    def warn(self, message: str) -> None:
        self.warnings.append(str(message))

    def add_input(self, path) -> None:
        self.inputs[str(path)] = digest_file(path)

    def to_text(self) -> str:
        lines = [f"subcommand = {self.subcommand}", f"version = {self.version}"]
        for path, digest in self.inputs.items():
            lines.append(f"input.{path} = sha256:{digest}")
        for key, value in self.notes.items():
            lines.append(f"note.{key} = {value}")
        for e in self.entries:
            unit = e.unit if e.unit else "1"
            lines.append(f"{e.name} = {_fmt(e.value)} # {unit} ± {_fmt(e.uncertainty)}")
        for w in self.warnings:
            lines.append(f"warning = {w}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        obj = {
            "subcommand": self.subcommand,
            "version": self.version,
            "inputs": {path: f"sha256:{digest}" for path, digest in self.inputs.items()},
            "results": [
                {
                    "name": e.name,
                    "value": e.value,
                    "uncertainty": e.uncertainty,
                    "unit": e.unit,
                    "provenance": e.provenance,
                }
                for e in self.entries
            ],
            "notes": dict(self.notes),
            "warnings": list(self.warnings),
        }
        return json.dumps(obj, indent=2) + "\n"

    def get(self, name: str) -> ReportEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def digest_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_plot_data(path, columns: dict) -> None:
    """Delimited plot data: a header comment then aligned numeric columns."""
    names = list(columns)
    arrays = [columns[n] for n in names]
    length = len(arrays[0])
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# " + " ".join(names) + "\n")
        for i in range(length):
            fh.write(" ".join(_fmt(float(a[i])) for a in arrays) + "\n")
