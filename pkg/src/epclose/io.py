"""CCP output files (csv, jsonl, text), reading them back, and run manifests.

Counts are the authoritative fields of every record.  Supports and growth
rates are derived from them and printed as exact decimals rounded half-up to
six places; an infinite growth rate is written ``inf``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from fractions import Fraction
from pathlib import Path

from .exceptions import IngestError
from .model import CCP, DualCount, format_fraction, format_growth_rate

FORMATS = ("csv", "jsonl", "text")
CSV_COLUMNS = ("items", "count_t", "count_b", "supp_t", "supp_b", "growth_rate")
ITEM_SEPARATOR = ";"

#: Identifiers of the ordering policies a manifest records.
POLICIES = {
    "flist_order": "join-count-desc/item-id-asc",
    "header_order": "least-frequent-first",
    "output_order": "growth-desc(inf-first)/count_t-desc/items-asc",
    "bin_ties": "lower-bin",
}


def ccp_record(ccp: CCP, symbols, n_b: int, n_t: int) -> dict:
    counts = ccp.counts
    return {
        "items": [symbols[i] for i in ccp.items],
        "count_t": counts.count_t,
        "count_b": counts.count_b,
        "supp_t": format_fraction(Fraction(counts.count_t, n_t)),
        "supp_b": format_fraction(Fraction(counts.count_b, n_b)),
        "growth_rate": format_growth_rate(ccp.growth_rate),
    }


def write_ccps(ccps, symbols, n_b: int, n_t: int, fh, fmt: str = "csv"):
    """Write CCPs in the given order to an open text stream."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown output format {fmt!r}; expected one of {FORMATS}")
    records = (ccp_record(c, symbols, n_b, n_t) for c in ccps)
    if fmt == "csv":
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([ITEM_SEPARATOR.join(r["items"])] + [r[k] for k in CSV_COLUMNS[1:]])
    elif fmt == "jsonl":
        for r in records:
            fh.write(json.dumps(r, ensure_ascii=False) + "\n")
    else:
        for r in records:
            fh.write(f"{{{', '.join(r['items'])}}}({r['count_t']}:{r['count_b']}) "
                     f"gr={r['growth_rate']}\n")


def format_ccps(ccps, symbols, n_b: int, n_t: int, fmt: str = "csv") -> str:
    buf = io.StringIO()
    write_ccps(ccps, symbols, n_b, n_t, buf, fmt)
    return buf.getvalue()


def parse_growth_rate(text: str):
    text = text.strip()
    if text == "inf":
        return math.inf
    return Fraction(text)


def read_ccps(path) -> list:
    """Read a csv or jsonl CCP file back as ``(item strings, DualCount, growth rate)``.

    The format is taken from the first non-blank character: ``{`` means jsonl.
    Growth rates come back as the six-place decimals that were written.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc.strerror}") from None
    out = []
    try:
        if text.lstrip().startswith("{"):
            for number, line in enumerate(text.splitlines(), start=1):
                if line.strip():
                    r = json.loads(line)
                    out.append((tuple(r["items"]), DualCount(int(r["count_b"]), int(r["count_t"])),
                                parse_growth_rate(str(r["growth_rate"]))))
        elif text.strip():
            reader = csv.DictReader(io.StringIO(text))
            missing = set(CSV_COLUMNS) - set(reader.fieldnames or ())
            if missing:
                raise IngestError(f"{path}: missing columns {sorted(missing)}")
            for r in reader:
                out.append((tuple(r["items"].split(ITEM_SEPARATOR)),
                            DualCount(int(r["count_b"]), int(r["count_t"])),
                            parse_growth_rate(r["growth_rate"])))
    except (KeyError, ValueError, TypeError) as exc:
        raise IngestError(f"{path}: malformed CCP record: {exc}") from None
    return out


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def build_manifest(inputs: dict, *, sigma, rho, output=None, schema=None,
                   duration_s=None, extra=None) -> dict:
    """Everything needed to rerun a mining call: inputs with digests, thresholds, policies."""
    from . import __version__

    manifest = {
        "tool": "epclose",
        "version": __version__,
        "inputs": {role: {"path": str(p), "sha256": file_digest(p)}
                   for role, p in inputs.items() if p is not None},
        "schema": schema,
        "min_support": str(sigma),
        "min_growth_rate": str(rho),
        "policies": dict(POLICIES),
    }
    if output is not None:
        manifest["output"] = {"path": str(output), "sha256": file_digest(output)}
    if duration_s is not None:
        manifest["duration_s"] = round(duration_s, 6)
    if extra:
        manifest.update(extra)
    return manifest


def write_json(obj, path):
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")
