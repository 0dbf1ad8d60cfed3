"""Tweet text cleaning: URL/noise removal, mention/hashtag stripping,
tokenization and stopword removal.

The stages compose in this order: noise removal works on the raw string,
mention/hashtag stripping on whitespace-delimited tokens, then tokenization
and stopword filtering. Stopword matching operates on tokens, so stripping
happens before it even though either order gives the same result for the
shipped stopword lists (none contain "#" or "@" forms).
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .corpus import Language
from .errors import UsageError

# Schemes plus bare "www." prefixes, consumed to the next whitespace. Matched
# anywhere, not just at token starts: cleaned tokens must never contain a URL
# substring, and that also keeps clean() idempotent on inputs like "(www.a.b)".
_URL_RE = re.compile(r"(?:https?://|www\.)\S*", re.IGNORECASE)

# Cc controls that separate words; replaced by a space instead of deleted.
_SPACING_CONTROLS = {"\t", "\n", "\r", "\x0b", "\x0c"}

# Edge punctuation/symbols stripped from tokens (categories P* and S*).
_STRIP_CATEGORIES = ("P", "S")


def _is_invisible(ch: str) -> bool:
    return unicodedata.category(ch) in ("Cc", "Cf")


def _is_strippable(ch: str) -> bool:
    return unicodedata.category(ch)[0] in _STRIP_CATEGORIES


@dataclass(frozen=True)
class PreprocessConfig:
    """Cleaning flags, all on by default to match the full pipeline."""

    language: Language
    remove_urls: bool = True
    remove_invisible: bool = True
    strip_mentions: bool = True
    strip_hashtag_sign: bool = True
    remove_stopwords: bool = True
    lowercase: bool = True
    stopword_list: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.remove_stopwords and not self.stopword_list:
            raise UsageError("remove_stopwords is set but stopword_list is empty")

    @classmethod
    def for_language(cls, language: Language, **overrides) -> "PreprocessConfig":
        """Config with the bundled stopword list for the given language."""
        if overrides.get("remove_stopwords", True) and "stopword_list" not in overrides:
            overrides["stopword_list"] = load_stopwords(language)
        return cls(language=language, **overrides)


def load_stopwords(source: Language | str | Path) -> frozenset[str]:
    """Read a stopword list: one token per line, "#" comment lines ignored.

    Accepts a Language (bundled list) or a path to a custom file.
    """
    if isinstance(source, Language):
        ref = resources.files("checkworthy").joinpath(
            f"data/stopwords/{source.value}.txt"
        )
        text = ref.read_text(encoding="utf-8")
    else:
        text = Path(source).read_text(encoding="utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line)
    return frozenset(words)


def remove_urls_and_noise(
    text: str, remove_urls: bool = True, remove_invisible: bool = True
) -> str:
    """Delete URLs and invisible characters from a raw string.

    Invisible means Unicode categories Cc and Cf: format characters (ZWJ,
    ZWSP, ...) and non-spacing controls are deleted outright, while controls
    that act as word separators (\\t \\n \\r \\x0b \\x0c) become a space so
    adjacent words do not fuse.
    """
    if remove_urls:
        text = _URL_RE.sub("", text)
    if remove_invisible:
        out = []
        for ch in text:
            if ch in _SPACING_CONTROLS:
                out.append(" ")
            elif not _is_invisible(ch):
                out.append(ch)
        text = "".join(out)
    return text


def strip_mentions_and_hashtags(
    text: str, strip_mentions: bool = True, strip_hashtag_sign: bool = True
) -> str:
    """Drop whole @-initial tokens, delete "#" signs but keep hashtag words.

    Tokens are whitespace-delimited, so embedded addresses like "a@b.c"
    survive. Output tokens are rejoined with single spaces.
    """
    kept = []
    for token in text.split():
        if strip_mentions and token.startswith("@"):
            continue
        if strip_hashtag_sign:
            token = token.replace("#", "")
        if token:
            kept.append(token)
    return " ".join(kept)


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    """Whitespace split, then strip punctuation/symbols off token edges.

    Internal characters are never touched, so hyphenated and numeric forms
    like "covid-19" stay whole. Tokens that become empty are dropped.
    """
    tokens = []
    for raw in text.split():
        start, end = 0, len(raw)
        while start < end and _is_strippable(raw[start]):
            start += 1
        while end > start and _is_strippable(raw[end - 1]):
            end -= 1
        token = raw[start:end]
        if token:
            tokens.append(token.lower() if lowercase else token)
    return tokens


def remove_stopwords(tokens: list[str], config: PreprocessConfig) -> list[str]:
    """Filter stopword-list members out, preserving relative order."""
    return [t for t in tokens if t not in config.stopword_list]


def clean(text: str, config: PreprocessConfig) -> list[str]:
    """Full cleaning pipeline from raw tweet text to token list."""
    text = remove_urls_and_noise(
        text, remove_urls=config.remove_urls, remove_invisible=config.remove_invisible
    )
    if config.strip_mentions or config.strip_hashtag_sign:
        text = strip_mentions_and_hashtags(
            text,
            strip_mentions=config.strip_mentions,
            strip_hashtag_sign=config.strip_hashtag_sign,
        )
    tokens = tokenize(text, lowercase=config.lowercase)
    if config.remove_stopwords:
        tokens = remove_stopwords(tokens, config)
    return tokens
