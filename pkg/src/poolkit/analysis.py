"""Text analysis: Unicode normalization and tokenization for indexing and search.

Handles mixed Arabic/Latin text. Latin is lowercased; Arabic is normalized by
stripping tatweel and diacritics and (optionally) folding alef variants and
taa marbuta. Tokens are maximal runs of letters/digits.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

# Letters and digits only; excludes underscore, which \w would keep.
_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)

_ALEF_VARIANTS = str.maketrans({"أ": "ا", "إ": "ا", "آ": "ا"})
# Tatweel (kashida) plus the harakat/diacritic range carry no lexical content.
_STRIP = re.compile(r"[ـً-ٰٕ]")


@dataclass(frozen=True)
class AnalyzerConfig:
    fold_alef: bool = True
    fold_taa_marbuta: bool = False  # off by default: keeps المادة distinct from الماده


DEFAULT_ANALYZER = AnalyzerConfig()


def analyze(text: str, cfg: AnalyzerConfig = DEFAULT_ANALYZER) -> list[str]:
    """Lowercase, Arabic-normalize, and split ``text`` into index terms."""
    text = text.lower()
    text = _STRIP.sub("", text)
    if cfg.fold_alef:
        text = text.translate(_ALEF_VARIANTS)
    if cfg.fold_taa_marbuta:
        text = text.replace("ة", "ه")
    return _TOKEN.findall(text)
