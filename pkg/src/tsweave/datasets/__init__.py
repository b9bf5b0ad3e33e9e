"""Bundled example daily traffic patterns.

Each record holds 24 hourly means; loading one gives a series on
``x = 0, 1, ..., 23`` hours where the value at ``x=h`` is the mean over
``[h, h+1)``. ``load_<name>()`` shortcuts exist for every bundled record,
e.g. ``load_tiktok()``.
"""

from __future__ import annotations

import difflib
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Union

import numpy as np

from ..core import TimeSeries
from ..errors import ValidationError

HOURS = 24
NAME_PATTERN = re.compile(r"^[a-z][a-z0-9_]*$")

DESCRIPTIONS = {
    "amazon_prime": "on-demand video, single evening peak",
    "disney_plus": "family video, early evening peak with small morning bump",
    "facebook": "social network, midday plateau and evening peak",
    "google_meet": "video conferencing, working hours",
    "hulu": "on-demand video, late evening peak",
    "instagram": "social media, lunch and late evening peaks",
    "microsoft_teams": "collaboration, morning and afternoon working peaks",
    "netflix": "on-demand video, late evening peak",
    "playstation": "console gaming, long evening peak",
    "snapchat": "messaging, afternoon rise to late evening peak",
    "spotify": "music streaming, commute peaks",
    "steam": "PC gaming, broad evening peak",
    "tiktok": "short video, lunchtime shoulder and evening peak",
    "twitch": "live streaming, late night peak",
    "twitter": "microblogging, morning and evening peaks",
    "whatsapp": "messaging, daytime plateau",
    "xbox_live": "console gaming, evening peak",
    "youtube": "video, afternoon rise to evening peak",
    "zoom": "video conferencing, working hours",
}

SOURCE_NOTE = "illustrative shape, not measured data"


class UnknownDatasetError(ValidationError, LookupError):
    pass


@dataclass(frozen=True)
class DatasetRecord:
    name: str
    values: tuple
    description: str = ""
    source: str = SOURCE_NOTE

    def __post_init__(self):
        if not NAME_PATTERN.match(self.name):
            raise ValidationError(f"dataset name {self.name!r} is not a lowercase snake token")
        values = tuple(float(v) for v in self.values)
        if len(values) != HOURS:
            raise ValidationError(f"dataset {self.name!r} has {len(values)} values, expected {HOURS}")
        arr = np.array(values)
        bad = np.flatnonzero(~np.isfinite(arr) | (arr < 0))
        if bad.size:
            raise ValidationError(f"dataset {self.name!r}: value at hour {bad[0]} is negative or non-finite",
                                  index=int(bad[0]))
        object.__setattr__(self, "values", values)

    def to_series(self) -> TimeSeries:
        return TimeSeries(np.arange(HOURS, dtype=float), np.array(self.values))


def parse_records(text: str, origin: str = "<text>") -> list:
    """Parse ``name,v0,...,v23`` lines; blank lines and ``#`` comments are skipped."""
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        name, *fields = [f.strip() for f in line.split(",")]
        try:
            values = [float(f) for f in fields]
        except ValueError:
            raise ValidationError(f"{origin}:{lineno}: non-numeric value in dataset {name!r}") from None
        try:
            records.append(DatasetRecord(name, values, DESCRIPTIONS.get(name, "")))
        except ValidationError as exc:
            raise ValidationError(f"{origin}:{lineno}: {exc}") from None
    return records


class Registry(Mapping):
    """Immutable name -> :class:`DatasetRecord` mapping."""

    def __init__(self, records: Iterable[DatasetRecord]):
        table = {}
        for rec in records:
            if rec.name in table:
                raise ValidationError(f"duplicate dataset name {rec.name!r}")
            table[rec.name] = rec
        self._records = dict(sorted(table.items()))

    def __getitem__(self, name):
        try:
            return self._records[name]
        except KeyError:
            close = difflib.get_close_matches(str(name), list(self._records), n=3)
            hint = f"; did you mean {', '.join(close)}?" if close else ""
            raise UnknownDatasetError(f"unknown dataset {name!r}{hint}") from None

    def __contains__(self, name):
        return name in self._records

    def __iter__(self):
        return iter(self._records)

    def __len__(self):
        return len(self._records)

    def names(self) -> list:
        return list(self._records)

    def load(self, name: str) -> TimeSeries:
        return self[name].to_series()

    def extended(self, path: Union[str, Path]) -> "Registry":
        """New registry with the records of ``path`` added; names may not clash."""
        path = Path(path)
        extra = parse_records(path.read_text(encoding="utf-8"), origin=str(path))
        return Registry([*self._records.values(), *extra])


def _builtin() -> Registry:
    text = resources.files(__name__).joinpath("patterns.csv").read_text(encoding="utf-8")
    return Registry(parse_records(text, origin="patterns.csv"))


BUILTIN = _builtin()


def list_datasets() -> list:
    return BUILTIN.names()


def load_dataset(name: str) -> TimeSeries:
    return BUILTIN.load(name)


def __getattr__(attr):
    if attr.startswith("load_") and attr[5:] in BUILTIN:
        name = attr[5:]
        return lambda: load_dataset(name)
    raise AttributeError(f"module {__name__!r} has no attribute {attr!r}")
