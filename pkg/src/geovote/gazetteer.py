"""GeoNames gazetteer: loading, exact-name candidate lookup, the
largest-population baseline resolver and place categorisation."""
from __future__ import annotations

import enum
import logging
import string
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .geodesy import GeoPoint
from .predictions import Prediction

logger = logging.getLogger(__name__)

# Column indices in the GeoNames main export (allCountries.txt and friends).
COL_ID, COL_NAME, COL_ASCII, COL_ALT, COL_LAT, COL_LON, COL_FCLASS, COL_FCODE = range(8)
COL_POPULATION = 14


class PlaceCategory(str, enum.Enum):
    ADMIN_UNIT = "AdminUnit"
    POI = "POI"
    NATURAL_FEATURE = "NaturalFeature"
    TRAFFIC_WAY = "TrafficWay"
    UNKNOWN = "Unknown"

    def __str__(self):
        return self.value


FEATURE_CLASS_CATEGORY = {
    "A": PlaceCategory.ADMIN_UNIT,
    "P": PlaceCategory.ADMIN_UNIT,
    "L": PlaceCategory.POI,
    "S": PlaceCategory.POI,
    "H": PlaceCategory.NATURAL_FEATURE,
    "T": PlaceCategory.NATURAL_FEATURE,
    "U": PlaceCategory.NATURAL_FEATURE,
    "V": PlaceCategory.NATURAL_FEATURE,
    "R": PlaceCategory.TRAFFIC_WAY,
}

# Checked in this order; the first list with a whole-token hit wins.
KEYWORD_RULES = (
    (PlaceCategory.TRAFFIC_WAY, frozenset({
        "street", "road", "roads", "railroad", "highway", "way", "drive", "hwy", "bridge", "trail",
    })),
    (PlaceCategory.NATURAL_FEATURE, frozenset({"river", "creek"})),
    (PlaceCategory.POI, frozenset({"church", "hospital", "school", "university", "park"})),
)


@dataclass(frozen=True)
class GazetteerEntry:
    geonames_id: int
    name: str
    ascii_name: str
    point: GeoPoint
    feature_class: str = ""
    feature_code: str = ""
    population: int = 0
    alternate_names: tuple[str, ...] = ()

    def names(self) -> Iterable[str]:
        yield self.name
        yield self.ascii_name
        yield from self.alternate_names


def _key(name: str) -> str:
    return name.strip().casefold()


@dataclass
class Gazetteer:
    entries: dict[int, GazetteerEntry] = field(default_factory=dict)
    _index: dict[str, set[int]] = field(default_factory=dict, repr=False)

    @classmethod
    def from_entries(cls, entries: Iterable[GazetteerEntry]) -> "Gazetteer":
        gaz = cls()
        for e in entries:
            gaz.add(e)
        return gaz

    def add(self, entry: GazetteerEntry) -> None:
        old = self.entries.get(entry.geonames_id)
        if old is not None:
            logger.warning("duplicate geonames_id %d; keeping the later row", entry.geonames_id)
            for n in old.names():
                self._index.get(_key(n), set()).discard(old.geonames_id)
        self.entries[entry.geonames_id] = entry
        for n in entry.names():
            k = _key(n)
            if k:
                self._index.setdefault(k, set()).add(entry.geonames_id)

    def get(self, geonames_id: Optional[int]) -> Optional[GazetteerEntry]:
        if geonames_id is None:
            return None
        return self.entries.get(geonames_id)

    def __len__(self):
        return len(self.entries)


def load_geonames_tsv(path) -> Gazetteer:
    gaz = Gazetteer()
    with open(path, encoding="utf-8", newline="\n") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            try:
                if len(cols) < 8:
                    raise ValueError(f"{len(cols)} columns")
                pop = cols[COL_POPULATION].strip() if len(cols) > COL_POPULATION else ""
                entry = GazetteerEntry(
                    geonames_id=int(cols[COL_ID]),
                    name=cols[COL_NAME],
                    ascii_name=cols[COL_ASCII],
                    point=GeoPoint(float(cols[COL_LAT]), float(cols[COL_LON])),
                    feature_class=cols[COL_FCLASS].strip(),
                    feature_code=cols[COL_FCODE].strip(),
                    population=int(pop) if pop else 0,
                    alternate_names=tuple(a for a in cols[COL_ALT].split(",") if a),
                )
            except ValueError as exc:
                logger.warning("%s:%d: malformed GeoNames row skipped (%s)", path, lineno, exc)
                continue
            gaz.add(entry)
    return gaz


def lookup_candidates(gaz: Gazetteer, surface: str) -> list[GazetteerEntry]:
    """Exact (case-folded) name matches, most populous first, then by id."""
    ids = gaz._index.get(_key(surface), ())
    found = [gaz.entries[i] for i in ids]
    found.sort(key=lambda e: (-e.population, e.geonames_id))
    return found


def population_resolve(gaz: Gazetteer, surface: str, mention_id: str = "") -> Prediction:
    """Baseline resolver: the most populous candidate, or invalid if none."""
    candidates = lookup_candidates(gaz, surface)
    if not candidates:
        return Prediction(mention_id)
    best = candidates[0].point
    if best.lat == 0.0 and best.lon == 0.0:
        return Prediction(mention_id)
    return Prediction(mention_id, best)


def categorize_entry(entry: GazetteerEntry) -> PlaceCategory:
    return FEATURE_CLASS_CATEGORY.get(entry.feature_class.strip().upper(), PlaceCategory.UNKNOWN)


def categorize_surface(surface: str) -> PlaceCategory:
    tokens = {t.strip(string.punctuation).casefold() for t in surface.split()}
    for category, words in KEYWORD_RULES:
        if tokens & words:
            return category
    return PlaceCategory.UNKNOWN


def categorize_mention(mention, gaz: Optional[Gazetteer] = None) -> PlaceCategory:
    """Category from the linked GeoNames entry when available, else keyword rules."""
    entry = gaz.get(mention.gazetteer_id) if gaz is not None else None
    if entry is not None:
        return categorize_entry(entry)
    return categorize_surface(mention.surface)
