"""Gold-annotated toponym corpora.

Two input formats are supported: the XML family used by the public
geoparsing test sets (read through small per-dataset *profiles* that map
field names to element paths) and a normalised JSON-lines interchange
format. Offsets are Unicode code-point offsets into the document text.
"""
from __future__ import annotations

import json
import logging
import os
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from importlib import resources
from typing import Mapping, Optional

from .geodesy import GeoPoint

logger = logging.getLogger(__name__)

# Frequent country/continent-level names whose Wikipedia and GeoNames
# coordinates disagree; scoring them would measure gazetteer drift, not
# disambiguation. Kept verbatim (the leading space of " Americans" is
# harmless because matching trims).
MISALIGNED_TOPONYMS = (
    "China", "Chinese", "Russia", "Russian", "Russians", "Australia",
    "Canada", "Canadians", "Canadian", "United States", "American", "USA",
    "America", "U.S.", "U.S", "United States of America", " Americans",
    "North America", "South America", "India", "Algeria", "Europe",
    "European", "Western Europe", "Asia", "Africa", "West Africa",
    "North Africa", "Middle East",
)
_MISALIGNED_KEYS = frozenset(s.strip().casefold() for s in MISALIGNED_TOPONYMS)

JSONL_REQUIRED = ("mention_id", "doc_id", "surface", "start", "end", "lat", "lon")


class CorpusFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Mention:
    mention_id: str
    doc_id: str
    surface: str
    start: int
    end: int
    gold: GeoPoint
    gazetteer_id: Optional[int] = None
    context: Optional[str] = None

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(f"mention {self.mention_id}: start {self.start} >= end {self.end}")


@dataclass
class Corpus:
    name: str
    mentions: list[Mention] = field(default_factory=list)
    documents: dict[str, str] = field(default_factory=dict)
    skipped: int = 0

    def __post_init__(self):
        seen = set()
        for m in self.mentions:
            if m.mention_id in seen:
                raise CorpusFormatError(f"{self.name}: duplicate mention_id {m.mention_id!r}")
            seen.add(m.mention_id)

    def __len__(self):
        return len(self.mentions)

    def __iter__(self):
        return iter(self.mentions)


def is_misaligned(surface: str) -> bool:
    return surface.strip().casefold() in _MISALIGNED_KEYS


def filter_misaligned(corpus: Corpus) -> tuple[Corpus, int]:
    """Drop mentions whose surface form is on the misaligned-toponym list.

    Returns the filtered corpus and the number of mentions removed.
    """
    kept = [m for m in corpus.mentions if not is_misaligned(m.surface)]
    return replace(corpus, mentions=kept), len(corpus.mentions) - len(kept)


# --- JSON lines -------------------------------------------------------------

def mention_record(m: Mention) -> dict:
    rec = {
        "mention_id": m.mention_id,
        "doc_id": m.doc_id,
        "surface": m.surface,
        "start": m.start,
        "end": m.end,
        "lat": m.gold.lat,
        "lon": m.gold.lon,
    }
    if m.gazetteer_id is not None:
        rec["geonames_id"] = m.gazetteer_id
    if m.context is not None:
        rec["context"] = m.context
    return rec


def write_mentions_jsonl(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for m in corpus.mentions:
            fh.write(json.dumps(mention_record(m), ensure_ascii=False) + "\n")


def parse_mentions_jsonl(path, name: Optional[str] = None) -> Corpus:
    name = name or _stem(path)
    mentions = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
            for key in JSONL_REQUIRED:
                if key not in rec or rec[key] is None:
                    raise CorpusFormatError(f"{path}:{lineno}: missing field {key!r}")
            try:
                gid = rec.get("geonames_id")
                mentions.append(Mention(
                    mention_id=str(rec["mention_id"]),
                    doc_id=str(rec["doc_id"]),
                    surface=rec["surface"],
                    start=int(rec["start"]),
                    end=int(rec["end"]),
                    gold=GeoPoint(rec["lat"], rec["lon"]),
                    gazetteer_id=None if gid is None else int(gid),
                    context=rec.get("context"),
                ))
            except (TypeError, ValueError) as exc:
                raise CorpusFormatError(f"{path}:{lineno}: {exc}") from None
    return Corpus(name, mentions)


# --- annotated XML ----------------------------------------------------------

@dataclass(frozen=True)
class XmlProfile:
    """Where each field lives in one dataset's XML.

    Paths are ElementTree paths relative to a toponym element, optionally
    ending in ``@attr``. A ``article:`` prefix resolves the path against the
    enclosing article instead (for corpora annotating one place per article).
    """
    name: str
    article: str = ".//article"
    toponym: str = "toponyms/toponym"
    text: Optional[str] = "text"
    doc_id: Optional[str] = None
    surface: Optional[str] = "phrase"
    start: str = "start"
    end: str = "end"
    lat: str = "lat"
    lon: str = "lon"
    geonames_id: Optional[str] = None
    offset_unit: str = "codepoint"

    @classmethod
    def from_dict(cls, doc: Mapping) -> "XmlProfile":
        known = set(cls.__dataclass_fields__)
        extra = set(doc) - known
        if extra:
            raise CorpusFormatError(f"unknown profile keys: {sorted(extra)}")
        profile = cls(**doc)
        if profile.offset_unit not in ("codepoint", "byte"):
            raise CorpusFormatError(f"offset_unit must be codepoint or byte, got {profile.offset_unit!r}")
        return profile


def bundled_profiles() -> list[str]:
    root = resources.files("geovote").joinpath("data/profiles")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_profile(name_or_path) -> XmlProfile:
    """Load a bundled profile by name (``lgl``) or a profile JSON file by path."""
    if os.path.exists(str(name_or_path)):
        with open(name_or_path, encoding="utf-8") as fh:
            return XmlProfile.from_dict(json.load(fh))
    res = resources.files("geovote").joinpath(f"data/profiles/{name_or_path}.json")
    if not res.is_file():
        raise CorpusFormatError(
            f"unknown profile {name_or_path!r}; bundled: {', '.join(bundled_profiles())}"
        )
    return XmlProfile.from_dict(json.loads(res.read_text("utf-8")))


def _extract(toponym, article, selector: Optional[str], strip: bool = True) -> Optional[str]:
    if not selector:
        return None
    node = toponym
    if selector.startswith("article:"):
        node, selector = article, selector[len("article:"):]
    path, _, attr = selector.partition("@")
    if path:
        node = node.find(path)
        if node is None:
            return None
    if attr:
        value = node.get(attr)
    else:
        value = node.text
    if value is None:
        return None
    return value.strip() if strip else value


def _byte_to_codepoint(text: str, offset: int) -> int:
    return len(text.encode("utf-8")[:offset].decode("utf-8", errors="ignore"))


def parse_annotated_xml(path, profile="lgl", name: Optional[str] = None) -> Corpus:
    """Read an annotated XML corpus into mentions.

    Toponyms with missing or out-of-range coordinates or offsets are skipped
    and counted in ``Corpus.skipped``.
    """
    if not isinstance(profile, XmlProfile):
        profile = load_profile(profile)
    name = name or _stem(path)
    try:
        root = ET.parse(path).getroot()
    except ET.ParseError as exc:
        line, col = exc.position
        raise CorpusFormatError(f"{path}: malformed XML at line {line}, column {col}") from None

    articles = [root] if root.tag == profile.article.split("/")[-1] else root.findall(profile.article)
    mentions: list[Mention] = []
    documents: dict[str, str] = {}
    skipped = mismatched = 0
    used_doc_ids: set[str] = set()
    for a_idx, article in enumerate(articles):
        doc_id = _extract(article, article, profile.doc_id) or f"doc{a_idx}"
        if doc_id in used_doc_ids:
            doc_id = f"{doc_id}#{a_idx}"
        used_doc_ids.add(doc_id)
        text = _extract(article, article, profile.text, strip=False)
        if text is not None:
            documents[doc_id] = text
        for t_idx, top in enumerate(article.findall(profile.toponym)):
            raw = {k: _extract(top, article, getattr(profile, k))
                   for k in ("surface", "start", "end", "lat", "lon", "geonames_id")}
            try:
                start, end = int(raw["start"]), int(raw["end"])
                lat, lon = float(raw["lat"]), float(raw["lon"])
            except (TypeError, ValueError):
                skipped += 1
                continue
            if not GeoPoint.in_range(lat, lon):
                logger.warning("%s: %s toponym %d has out-of-range coordinates (%s, %s); skipped",
                               name, doc_id, t_idx, lat, lon)
                skipped += 1
                continue
            if profile.offset_unit == "byte" and text is not None:
                start, end = _byte_to_codepoint(text, start), _byte_to_codepoint(text, end)
            if start >= end:
                skipped += 1
                continue
            surface = raw["surface"]
            if text is not None:
                span_text = text[start:end]
                if surface is None:
                    surface = span_text
                elif span_text != surface:
                    mismatched += 1
            if surface is None:
                skipped += 1
                continue
            try:
                gid = int(raw["geonames_id"]) if raw["geonames_id"] else None
            except ValueError:
                gid = None
            mentions.append(Mention(f"{doc_id}-{t_idx}", doc_id, surface, start, end,
                                    GeoPoint(lat, lon), gid))
    if mismatched:
        logger.warning("%s: %d mentions whose surface differs from the text span", name, mismatched)
    if skipped:
        logger.info("%s: skipped %d toponym records without usable coordinates/offsets", name, skipped)
    return Corpus(name, mentions, documents, skipped)


def load_corpus(path, profile=None, name: Optional[str] = None) -> Corpus:
    """Dispatch on extension: ``.jsonl`` -> interchange format, otherwise XML."""
    if str(path).endswith(".jsonl"):
        return parse_mentions_jsonl(path, name)
    return parse_annotated_xml(path, profile or "lgl", name)


def _stem(path) -> str:
    base = os.path.basename(str(path))
    return base.rsplit(".", 1)[0] if "." in base else base
