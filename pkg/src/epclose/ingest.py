"""Reading background/target files into an :class:`~epclose.model.EncodedDatasetPair`.

Two input layouts are supported:

* **Delimited records** (CSV-like), one record per line, interpreted through a
  :class:`SchemaConfig`.  Each column is ``continuous:k`` (equal-frequency
  bins, fitted jointly on both files), ``categorical``, ``flag``
  (presence/absence: a true cell contributes the bare column name),
  ``label:v1,v2`` (attack iff the cell is one of the values; never mined) or
  ``ignore``.
* **Baskets**: one transaction per line as whitespace-separated items, with
  an optional ``,label=attack|normal`` suffix.  A *dump* is the same with a
  leading ``B`` or ``T`` field naming the side, which is what
  :func:`write_dump` produces.

Schema files are INI-style::

    [options]
    delimiter = ,
    header = yes
    default = categorical

    [columns]
    duration = continuous:5
    protocol = categorical
    label = label:attack,anomaly
    row_id = ignore

Column keys are header names, or 0-based indices when there is no header.
"""

from __future__ import annotations

import configparser
import csv
import logging
import math
from dataclasses import dataclass, field

from .discretize import MISSING, BinBoundaries, fit_equal_frequency_bins
from .exceptions import IngestError, InvalidDatasetError
from .model import EncodedDatasetPair, Label

logger = logging.getLogger(__name__)

KINDS = ("continuous", "categorical", "flag", "label", "ignore")

#: Cell values read as missing in continuous and categorical columns.
MISSING_TOKENS = frozenset({"", "na", "nan", "?", "null", "none"})
TRUE_TOKENS = frozenset({"1", "true", "t", "yes", "y", "x"})
FALSE_TOKENS = frozenset({"0", "false", "f", "no", "n", ""})

#: How many offending row numbers an error message lists.
MAX_REPORTED_ROWS = 10


@dataclass(frozen=True)
class Directive:
    kind: str
    bins: int | None = None
    attack_values: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown column directive {self.kind!r}; expected one of {KINDS}")
        if self.kind == "continuous" and (self.bins is None or self.bins < 2):
            raise ValueError(f"continuous columns need at least 2 bins, got {self.bins}")
        if self.kind == "label" and not self.attack_values:
            raise ValueError("a label column needs at least one attack value")

    @classmethod
    def parse(cls, text: str) -> Directive:
        """``continuous:5``, ``categorical``, ``flag``, ``label:a,b`` or ``ignore``."""
        kind, _, arg = text.strip().partition(":")
        kind = kind.strip().lower()
        if kind == "continuous":
            try:
                return cls(kind, bins=int(arg))
            except ValueError:
                raise ValueError(f"bad bin count in directive {text!r}") from None
        if kind == "label":
            values = frozenset(v.strip() for v in arg.split(",") if v.strip())
            return cls(kind, attack_values=values)
        if arg:
            raise ValueError(f"directive {kind!r} takes no argument: {text!r}")
        return cls(kind)

    def __str__(self):
        if self.kind == "continuous":
            return f"continuous:{self.bins}"
        if self.kind == "label":
            return "label:" + ",".join(sorted(self.attack_values))
        return self.kind


@dataclass(frozen=True)
class SchemaConfig:
    """How to turn delimited records into items."""

    columns: dict = field(default_factory=dict)
    delimiter: str = ","
    has_header: bool = True
    default: Directive = Directive("categorical")

    def __post_init__(self):
        if len(self.delimiter) != 1:
            raise ValueError(f"delimiter must be one character, got {self.delimiter!r}")
        labels = [k for k, d in self.columns.items() if d.kind == "label"]
        if len(labels) > 1 or (labels and self.default.kind == "label"):
            raise ValueError(f"at most one label column is allowed, got {labels}")

    @classmethod
    def from_file(cls, path) -> SchemaConfig:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str  # column names are case-sensitive
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except configparser.Error as exc:
            raise IngestError(f"{path}: malformed schema file: {exc}") from None
        options = parser["options"] if parser.has_section("options") else {}
        try:
            columns = {}
            if parser.has_section("columns"):
                columns = {key: Directive.parse(v) for key, v in parser["columns"].items()}
            return cls(
                columns=columns,
                delimiter=_unescape(options.get("delimiter", ",")),
                has_header=_parse_bool(options.get("header", "yes")),
                default=Directive.parse(options.get("default", "categorical")),
            )
        except ValueError as exc:
            raise IngestError(f"{path}: {exc}") from None

    def with_label(self, column: str, attack_values) -> SchemaConfig:
        """Copy with ``column`` as the (only) label column."""
        columns = {k: d for k, d in self.columns.items() if d.kind != "label"}
        columns[column] = Directive("label", attack_values=frozenset(attack_values))
        return SchemaConfig(columns, self.delimiter, self.has_header, self.default)

    def resolve(self, names: list) -> list:
        """Directive per column position, given the column names."""
        known = set(names) | {str(i) for i in range(len(names))}
        unknown = sorted(set(self.columns) - known)
        if unknown:
            raise IngestError(f"schema names columns that are not in the file: {unknown}")
        out = []
        for i, name in enumerate(names):
            directive = self.columns.get(name, self.columns.get(str(i), self.default))
            out.append(directive)
        if not any(d.kind not in ("ignore", "label") for d in out):
            raise IngestError("the schema leaves no feature column to mine")
        return out

    def describe(self) -> dict:
        return {
            "delimiter": self.delimiter,
            "header": self.has_header,
            "default": str(self.default),
            "columns": {k: str(v) for k, v in sorted(self.columns.items())},
        }


def _unescape(text: str) -> str:
    return {"\\t": "\t", "tab": "\t", "space": " "}.get(text, text)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in TRUE_TOKENS:
        return True
    if lowered in FALSE_TOKENS - {""}:
        return False
    raise ValueError(f"not a yes/no value: {text!r}")


@dataclass
class RawTable:
    """Cells of one delimited file plus the file line number of each record."""

    path: str
    names: list
    rows: list
    line_numbers: list


def read_table(path, schema: SchemaConfig) -> RawTable:
    """Parse a delimited file; blank lines are skipped."""
    path = str(path)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh, delimiter=schema.delimiter)
            records = []
            for cells in reader:
                if cells and any(c.strip() for c in cells):
                    records.append((reader.line_num, [c.strip() for c in cells]))
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc.strerror}") from None
    except csv.Error as exc:
        raise IngestError(f"{path}: malformed delimited text: {exc}") from None
    if schema.has_header:
        if not records:
            raise IngestError(f"{path}: file is empty")
        _, names = records.pop(0)
    else:
        names = [str(i) for i in range(len(records[0][1]))] if records else []
    if not records:
        raise IngestError(f"{path}: file has no records")
    width = len(names)
    bad = [line for line, cells in records if len(cells) != width]
    if bad:
        raise IngestError(f"{path}: expected {width} columns on rows "
                          f"{_show_rows(bad)}", rows=bad)
    return RawTable(path, names, [cells for _, cells in records],
                    [line for line, _ in records])


def _show_rows(rows) -> str:
    shown = ", ".join(map(str, rows[:MAX_REPORTED_ROWS]))
    return shown + (f" (and {len(rows) - MAX_REPORTED_ROWS} more)" if len(rows) > MAX_REPORTED_ROWS else "")


def _numeric_column(table: RawTable, j: int) -> list:
    values, bad = [], []
    for line, cells in zip(table.line_numbers, table.rows):
        cell = cells[j]
        if cell.lower() in MISSING_TOKENS:
            values.append(math.nan)
            continue
        try:
            value = float(cell)
        except ValueError:
            bad.append(line)
            continue
        if math.isnan(value):
            bad.append(line)
        values.append(value)
    if bad:
        raise IngestError(f"{table.path}: non-numeric value in continuous column "
                          f"{table.names[j]!r} on rows {_show_rows(bad)}", rows=bad)
    return values


@dataclass(frozen=True)
class EncodedRows:
    """Item display strings per record, plus labels when a label column exists."""

    items: list
    labels: list | None


def _token(cell: str) -> str:
    return "_".join(cell.split())


def fit_bins(tables, directives) -> dict:
    """Equal-frequency bins per continuous column, fitted on all tables together."""
    bins = {}
    for j, directive in enumerate(directives):
        if directive.kind == "continuous":
            values = [v for table in tables for v in _numeric_column(table, j)]
            name = tables[0].names[j]
            if all(math.isnan(v) for v in values):
                logger.warning("continuous column %r has no values; every row is %s",
                               name, MISSING)
                bins[j] = BinBoundaries(name, ())
            else:
                bins[j] = fit_equal_frequency_bins(values, directive.bins, name)
    return bins


def encode_table(table: RawTable, directives, bins: dict) -> EncodedRows:
    """Items of every record of ``table``; records left without items are errors."""
    numeric = {j: b.assign(_numeric_column(table, j)) for j, b in bins.items()}
    label_col = next((j for j, d in enumerate(directives) if d.kind == "label"), None)
    items, labels, empty, bad_flags = [], [], [], []
    for r, (line, cells) in enumerate(zip(table.line_numbers, table.rows)):
        row = []
        for j, directive in enumerate(directives):
            name, cell = table.names[j], cells[j]
            if directive.kind == "continuous":
                row.append(bins[j].item_name(int(numeric[j][r])))
            elif directive.kind == "categorical":
                token = MISSING if cell.lower() in MISSING_TOKENS else _token(cell)
                row.append(f"{name}={token}")
            elif directive.kind == "flag":
                lowered = cell.lower()
                if lowered in TRUE_TOKENS:
                    row.append(_token(name))
                elif lowered not in FALSE_TOKENS:
                    bad_flags.append(line)
        if not row:
            empty.append(line)
        items.append(row)
        if label_col is not None:
            attack = cells[label_col] in directives[label_col].attack_values
            labels.append(Label.ATTACK if attack else Label.NORMAL)
    if bad_flags:
        raise IngestError(f"{table.path}: flag columns need yes/no values; bad rows "
                          f"{_show_rows(bad_flags)}", rows=bad_flags)
    if empty:
        raise IngestError(f"{table.path}: rows {_show_rows(empty)} produce no items", rows=empty)
    return EncodedRows(items, labels if label_col is not None else None)


def encode_dataset_pair(background_file, target_file, schema: SchemaConfig) -> EncodedDatasetPair:
    """Read, discretize and encode a background/target pair of delimited files.

    Labels, when the schema has a label column, are attached to target
    transactions only.
    """
    background = read_table(background_file, schema)
    target = read_table(target_file, schema)
    if background.names != target.names:
        if schema.has_header:
            raise IngestError(f"{background_file} and {target_file} have different headers")
        raise IngestError(f"{background_file} has {len(background.names)} columns but "
                          f"{target_file} has {len(target.names)}")
    directives = schema.resolve(background.names)
    bins = fit_bins([background, target], directives)
    b_rows = encode_table(background, directives, bins)
    t_rows = encode_table(target, directives, bins)
    return EncodedDatasetPair.from_itemsets(b_rows.items, t_rows.items, t_rows.labels)


# -- basket and dump layouts --------------------------------------------------

LABEL_SUFFIX = ",label="


def _split_label(text: str, where: str):
    body, sep, label = text.rpartition(LABEL_SUFFIX)
    if not sep:
        return text, None
    try:
        return body, Label(label.strip())
    except ValueError:
        raise IngestError(f"{where}: unknown label {label.strip()!r} "
                          f"(expected 'attack' or 'normal')") from None


def _content_lines(path):
    try:
        with open(path, encoding="utf-8") as fh:
            for number, line in enumerate(fh, start=1):
                text = line.strip()
                if text and not text.startswith("#"):
                    yield number, text
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc.strerror}") from None


def read_baskets(path) -> EncodedRows:
    """Whitespace-separated items per line; ``#`` lines and blank lines are skipped."""
    items, labels = [], []
    for number, text in _content_lines(path):
        body, label = _split_label(text, f"{path}:{number}")
        row = body.split()
        if not row:
            raise IngestError(f"{path}: row {number} has no items", rows=[number])
        items.append(row)
        labels.append(label)
    if not items:
        raise IngestError(f"{path}: file has no transactions")
    return EncodedRows(items, labels if any(lab is not None for lab in labels) else None)


def read_basket_pair(background_file, target_file) -> EncodedDatasetPair:
    """A pair from two basket files; labels on the background side are dropped."""
    background = read_baskets(background_file)
    target = read_baskets(target_file)
    if target.labels is not None and None in target.labels:
        logger.warning("%s: %d target rows carry no label", target_file,
                       target.labels.count(None))
    return EncodedDatasetPair.from_itemsets(background.items, target.items, target.labels)


def write_dump(pair: EncodedDatasetPair, fh):
    """One line per transaction: ``B``/``T``, the item display strings, optional label."""
    for t in pair.transactions:
        line = t.origin.value + " " + " ".join(pair.symbols[i] for i in t.items)
        if t.label is not None:
            line += LABEL_SUFFIX + t.label.value
        fh.write(line + "\n")


def read_dump(path) -> EncodedDatasetPair:
    """Inverse of :func:`write_dump` (item ids may be renumbered)."""
    sides = {"B": ([], []), "T": ([], [])}
    for number, text in _content_lines(path):
        where = f"{path}:{number}"
        side, _, rest = text.partition(" ")
        if side not in sides:
            raise IngestError(f"{where}: lines must start with B or T", rows=[number])
        body, label = _split_label(rest, where)
        row = body.split()
        if not row:
            raise IngestError(f"{where}: transaction has no items", rows=[number])
        sides[side][0].append(row)
        sides[side][1].append(label)
    labels = sides["T"][1]
    try:
        return EncodedDatasetPair.from_itemsets(
            sides["B"][0], sides["T"][0],
            labels if any(lab is not None for lab in labels) else None)
    except InvalidDatasetError as exc:
        raise IngestError(f"{path}: {exc}") from None


def load_pair(background_file, target_file, schema: SchemaConfig | None = None,
              input_format: str = "auto") -> EncodedDatasetPair:
    """Dispatch on ``input_format``: ``csv`` (needs ``schema``), ``basket``, or ``auto``.

    ``auto`` means ``csv`` when a schema is given, ``basket`` otherwise.
    """
    if input_format == "auto":
        input_format = "csv" if schema is not None else "basket"
    if input_format == "csv":
        return encode_dataset_pair(background_file, target_file, schema or SchemaConfig())
    if input_format == "basket":
        try:
            return read_basket_pair(background_file, target_file)
        except InvalidDatasetError as exc:
            raise IngestError(str(exc)) from None
    raise ValueError(f"unknown input format {input_format!r}")

