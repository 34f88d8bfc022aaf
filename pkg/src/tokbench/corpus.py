"""Corpus ingestion: parse wiki-style dumps, strip markup, normalize, sample.

The cleaning contract is strict: a cleaned document contains only letters
(any script), digits, and single spaces, case-folded per the language rule.
"""

from __future__ import annotations

import json
import random
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

from .errors import ConfigurationError, DumpEncodingError, DumpParseError

DUMP_FORMATS = ("wiki-xml", "json-lines", "plain-lines")


@dataclass
class RawArticle:
    id: str
    title: str
    body: str
    namespace: int = 0


@dataclass
class CleanDocument:
    id: str
    text: str


@dataclass
class CorpusSampleConfig:
    sample_size: int = 10000
    seed: int = 0

    def __post_init__(self):
        if self.sample_size < 1:
            raise ConfigurationError(f"sample_size must be >= 1, got {self.sample_size}")


# ---------------------------------------------------------------------------
# Dump parsing
# ---------------------------------------------------------------------------


def parse_dump(stream: IO[bytes], format: str, encoding: str = "utf-8") -> Iterator[RawArticle]:
    """Yield RawArticles from a byte stream in one of DUMP_FORMATS, in stream order."""
    if format == "wiki-xml":
        return _iter_wiki_xml(stream)
    if format == "json-lines":
        return _iter_json_lines(stream, encoding)
    if format == "plain-lines":
        return _iter_plain_lines(stream, encoding)
    raise ConfigurationError(f"unknown dump format {format!r}; expected one of {DUMP_FORMATS}")


def _local(tag: str) -> str:
    # MediaWiki exports use a default xmlns; compare on the local tag name.
    return tag.rsplit("}", 1)[-1]


def _page_to_article(page: ET.Element) -> RawArticle:
    title, ns, page_id, body = "", 0, None, ""
    for child in page:
        name = _local(child.tag)
        if name == "title":
            title = child.text or ""
        elif name == "ns":
            ns = int((child.text or "0").strip() or "0")
        elif name == "id" and page_id is None:
            page_id = (child.text or "").strip()
        elif name == "text":
            body = child.text or ""
        elif name == "revision":
            for sub in child:
                if _local(sub.tag) == "text":
                    body = sub.text or ""
    return RawArticle(id=page_id or title or "?", title=title, body=body, namespace=ns)


def _iter_wiki_xml(stream: IO[bytes]) -> Iterator[RawArticle]:
    parser = ET.XMLPullParser(events=("start", "end"))
    root = None
    fed = 0  # bytes fed so far; error offsets are chunk-granular

    def drain() -> Iterator[RawArticle]:
        nonlocal root
        try:
            events = list(parser.read_events())
        except ET.ParseError as exc:
            raise DumpParseError(f"malformed wiki-xml ({exc}) near byte {fed}", offset=fed) from exc
        for event, elem in events:
            if event == "start":
                if root is None:
                    root = elem
            elif _local(elem.tag) == "page":
                yield _page_to_article(elem)
                if root is not None:
                    root.clear()

    while True:
        chunk = stream.read(1 << 16)
        if not chunk:
            break
        try:
            parser.feed(chunk)
        except ET.ParseError as exc:
            raise DumpParseError(f"malformed wiki-xml ({exc}) near byte {fed}", offset=fed) from exc
        fed += len(chunk)
        yield from drain()
    if fed == 0:
        return
    try:
        parser.close()
    except ET.ParseError as exc:
        raise DumpParseError(f"truncated wiki-xml ({exc}) at byte {fed}", offset=fed) from exc
    yield from drain()


def _iter_json_lines(stream: IO[bytes], encoding: str) -> Iterator[RawArticle]:
    offset = 0
    for lineno, raw in enumerate(stream, start=1):
        if raw.strip():
            try:
                line = raw.decode(encoding)
            except UnicodeDecodeError as exc:
                raise DumpEncodingError(
                    f"line {lineno} does not decode as {encoding}", offset=offset + exc.start
                ) from exc
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                byte_pos = offset + len(line[: exc.pos].encode(encoding))
                raise DumpParseError(
                    f"line {lineno}: {exc.msg} at byte {byte_pos}", offset=byte_pos
                ) from exc
            yield RawArticle(
                id=str(obj.get("id", lineno)),
                title=str(obj.get("title", "")),
                body=str(obj.get("text", "")),
                namespace=int(obj.get("ns", 0)),
            )
        offset += len(raw)


def _iter_plain_lines(stream: IO[bytes], encoding: str) -> Iterator[RawArticle]:
    offset = 0
    for lineno, raw in enumerate(stream, start=1):
        if raw.strip():
            try:
                line = raw.decode(encoding)
            except UnicodeDecodeError as exc:
                raise DumpEncodingError(
                    f"line {lineno} does not decode as {encoding}", offset=offset + exc.start
                ) from exc
            yield RawArticle(id=str(lineno), title="", body=line.rstrip("\r\n"), namespace=0)
        offset += len(raw)


# ---------------------------------------------------------------------------
# Boilerplate filtering
# ---------------------------------------------------------------------------

# Localized redirect keywords for the study's languages, compared case-folded.
_REDIRECT_PREFIXES = tuple(p.casefold() for p in ("#redirect", "#yönlendirme", "#ohjaus"))


def filter_boilerplate(articles: Iterable[RawArticle], min_length: int = 200) -> Iterator[RawArticle]:
    """Keep namespace-0, non-redirect articles with body length >= min_length."""
    for article in articles:
        if article.namespace != 0:
            continue
        head = article.body.lstrip()[:32].casefold()
        if head.startswith(_REDIRECT_PREFIXES):
            continue
        if len(article.body) < min_length:
            continue
        yield article


# ---------------------------------------------------------------------------
# Wikitext stripping
# ---------------------------------------------------------------------------

_COMMENT_RE = re.compile(r"<!--.*?-->", re.DOTALL)
_REF_RE = re.compile(r"<ref\b[^<>]*/\s*>|<ref\b[^<>]*>.*?</ref\s*>", re.DOTALL | re.IGNORECASE)
_TABLE_RE = re.compile(r"\{\|.*?\|\}", re.DOTALL)
_TAG_RE = re.compile(r"</?[A-Za-z][^<>]*>")
_LINK_RE = re.compile(r"\[\[([^\[\]]*)\]\]")
_EXTLINK_RE = re.compile(r"\[(?:[a-z][a-z0-9+.-]*://|mailto:)[^\]\s]*([^\]]*)\]")
_QUOTES_RE = re.compile(r"'{2,}")
_HEADING_RE = re.compile(r"={2,}")

# Link namespaces dropped wholesale (media/category), incl. tr/fi localizations.
_DROP_LINK_PREFIXES = frozenset(
    {"file", "image", "category", "dosya", "kategori", "tiedosto", "luokka"}
)


def _drop_templates(text: str) -> str:
    """Remove {{...}} blocks, nesting-aware.

    An opener with no matching close is dropped up to the end of its paragraph
    (next blank line) so a noisy template never eats the whole document.
    """
    out: list[str] = []
    pos = 0
    while True:
        open_idx = text.find("{{", pos)
        if open_idx == -1:
            out.append(text[pos:])
            break
        out.append(text[pos:open_idx])
        depth, i, end = 0, open_idx, -1
        while i < len(text):
            if text.startswith("{{", i):
                depth += 1
                i += 2
            elif text.startswith("}}", i):
                depth -= 1
                i += 2
                if depth == 0:
                    end = i
                    break
            else:
                i += 1
        if end == -1:
            para = text.find("\n\n", open_idx)
            pos = len(text) if para == -1 else para
        else:
            pos = end
    return "".join(out)


def _replace_link(match: re.Match) -> str:
    inner = match.group(1)
    target, _, label = inner.partition("|")
    prefix, colon, _ = target.partition(":")
    if colon and prefix.strip().casefold() in _DROP_LINK_PREFIXES:
        return ""
    return label if label else target


def strip_markup(body: str) -> str:
    """Strip wikitext markup, keeping display text. Identity on plain text."""
    text = _drop_templates(body)
    text = _COMMENT_RE.sub("", text)
    text = _REF_RE.sub("", text)
    text = _TABLE_RE.sub("", text)
    text = _TAG_RE.sub("", text)
    # Wikilinks may nest (e.g. captions inside file links); resolve inside-out.
    for _ in range(10):
        replaced = _LINK_RE.sub(_replace_link, text)
        if replaced == text:
            break
        text = replaced
    text = _EXTLINK_RE.sub(lambda m: m.group(1).lstrip(), text)
    text = _QUOTES_RE.sub("", text)
    text = _HEADING_RE.sub("", text)
    return text


# ---------------------------------------------------------------------------
# Normalization and sampling
# ---------------------------------------------------------------------------

# Turkish dotted/dotless i must be mapped before casefold(), which would
# otherwise turn 'İ' into 'i' + combining dot.
_TR_FOLD = str.maketrans({"I": "ı", "İ": "i"})


def normalize(text: str, language: str = "other") -> str:
    """Case-fold and reduce text to letters, digits, and single spaces."""
    if language == "tr":
        text = text.translate(_TR_FOLD)
    text = text.casefold()
    kept = [c if (c.isalpha() or c.isdigit()) else " " for c in text]
    return " ".join("".join(kept).split())


def clean_article(article: RawArticle, language: str = "other") -> CleanDocument:
    return CleanDocument(id=article.id, text=normalize(strip_markup(article.body), language))


def sample(documents: Iterable[CleanDocument], config: CorpusSampleConfig) -> list[CleanDocument]:
    """Uniform sample without replacement; returns all input when undersized.

    Pure function of (input order, config): a fixed seed always yields the
    same output sequence, in sampled order.
    """
    pool = list(documents)
    if len(pool) <= config.sample_size:
        return pool
    return random.Random(config.seed).sample(pool, config.sample_size)


def write_corpus(documents: Iterable[CleanDocument], path) -> int:
    """Write one document per line (LF, UTF-8); returns number of lines."""
    count = 0
    with open(path, "w", encoding="utf-8", newline="\n") as sink:
        for doc in documents:
            sink.write(doc.text)
            sink.write("\n")
            count += 1
    return count


def read_corpus(path) -> list[str]:
    with open(path, encoding="utf-8") as source:
        return [line.rstrip("\n") for line in source]
