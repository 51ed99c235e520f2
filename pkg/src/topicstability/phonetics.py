"""Double Metaphone encoding and the phonetic replacement index.

The encoder follows Lawrence Philips' Double Metaphone rules as published in
the reference C++ release, with codes truncated to four symbols.
"""
from __future__ import annotations

import logging
import re
from collections import defaultdict
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Mapping, NamedTuple

from ._validation import DataError
from .corpus import tokenize

logger = logging.getLogger(__name__)

CODE_LENGTH = 4
_VOWELS = frozenset("AEIOUY")


class MetaphoneCodes(NamedTuple):
    primary: str
    alternate: str | None


class _Encoder:
    """One-shot state for encoding a single word."""

    def __init__(self, word: str):
        self.word = word.upper()
        self.length = len(self.word)
        self.last = self.length - 1
        # lookahead past the end sees blanks, as in the reference code
        self.padded = self.word + "     "
        self.primary: list[str] = []
        self.secondary: list[str] = []
        w = self.word
        self.slavo_germanic = "W" in w or "K" in w or "CZ" in w or "WITZ" in w

    def at(self, i):
        return self.word[i] if 0 <= i < self.length else ""

    def vowel(self, i):
        return 0 <= i < self.length and self.word[i] in _VOWELS

    def match(self, start, length, *options):
        if start < 0 or start >= len(self.padded):
            return False
        return self.padded[start:start + length] in options

    def add(self, main, alt=None):
        if main:
            self.primary.append(main)
        alt = main if alt is None else alt
        if alt:
            self.secondary.append(alt)

    def _size(self, parts):
        return sum(len(p) for p in parts)

    def encode(self) -> MetaphoneCodes:
        cur = 0
        if self.match(0, 2, "GN", "KN", "PN", "WR", "PS"):
            cur += 1
        if self.at(0) == "X":
            self.add("S")
            cur += 1

        handlers = {
            "B": self._b, "C": self._c, "D": self._d, "G": self._g, "H": self._h,
            "J": self._j, "L": self._l, "M": self._m, "P": self._p, "R": self._r,
            "S": self._s, "T": self._t, "W": self._w, "X": self._x, "Z": self._z,
            "Ç": self._c_cedilla,
        }
        simple = {"F": "F", "K": "K", "N": "N", "Q": "K", "V": "F"}

        while self._size(self.primary) < CODE_LENGTH or self._size(self.secondary) < CODE_LENGTH:
            if cur >= self.length:
                break
            ch = self.word[cur]
            if ch in _VOWELS:
                if cur == 0:
                    self.add("A")
                cur += 1
            elif ch in simple:
                self.add(simple[ch])
                cur += 2 if self.at(cur + 1) == ch else 1
            elif ch == "Ñ":
                self.add("N")
                cur += 1
            elif ch in handlers:
                cur = handlers[ch](cur)
            else:
                cur += 1

        primary = "".join(self.primary)[:CODE_LENGTH]
        secondary = "".join(self.secondary)[:CODE_LENGTH]
        return MetaphoneCodes(primary, secondary if secondary and secondary != primary else None)

    # -- letter rules; each returns the next position ------------------------

    def _b(self, cur):
        self.add("P")
        return cur + (2 if self.at(cur + 1) == "B" else 1)

    def _c_cedilla(self, cur):
        self.add("S")
        return cur + 1

    def _c(self, cur):
        m = self.match
        # germanic "ach", e.g. "bacher", "macher"
        if (cur > 1 and not self.vowel(cur - 2) and m(cur - 1, 3, "ACH")
                and self.at(cur + 2) != "I"
                and (self.at(cur + 2) != "E" or m(cur - 2, 6, "BACHER", "MACHER"))):
            self.add("K")
            return cur + 2
        if cur == 0 and m(cur, 6, "CAESAR"):
            self.add("S")
            return cur + 2
        if m(cur, 4, "CHIA"):
            self.add("K")
            return cur + 2
        if m(cur, 2, "CH"):
            if cur > 0 and m(cur, 4, "CHAE"):
                self.add("K", "X")
                return cur + 2
            # greek roots: "chemistry", "chorus"
            if (cur == 0
                    and (m(cur + 1, 5, "HARAC", "HARIS") or m(cur + 1, 3, "HOR", "HYM", "HIA", "HEM"))
                    and not m(0, 5, "CHORE")):
                self.add("K")
                return cur + 2
            if (m(0, 4, "VAN ", "VON ") or m(0, 3, "SCH")
                    or m(cur - 2, 6, "ORCHES", "ARCHIT", "ORCHID")
                    or m(cur + 2, 1, "T", "S")
                    or ((m(cur - 1, 1, "A", "O", "U", "E") or cur == 0)
                        and m(cur + 2, 1, "L", "R", "N", "M", "B", "H", "F", "V", "W", " "))):
                self.add("K")
            elif cur > 0:
                if m(0, 2, "MC"):
                    self.add("K")
                else:
                    self.add("X", "K")
            else:
                self.add("X")
            return cur + 2
        if m(cur, 2, "CZ") and not m(cur - 2, 4, "WICZ"):
            self.add("S", "X")
            return cur + 2
        if m(cur + 1, 3, "CIA"):
            self.add("X")
            return cur + 3
        if m(cur, 2, "CC") and not (cur == 1 and self.at(0) == "M"):
            if m(cur + 2, 1, "I", "E", "H") and not m(cur + 2, 2, "HU"):
                # "accident", "succeed" vs italian "bacci"
                if (cur == 1 and self.at(cur - 1) == "A") or m(cur - 1, 5, "UCCEE", "UCCES"):
                    self.add("KS")
                else:
                    self.add("X")
                return cur + 3
            self.add("K")
            return cur + 2
        if m(cur, 2, "CK", "CG", "CQ"):
            self.add("K")
            return cur + 2
        if m(cur, 2, "CI", "CE", "CY"):
            if m(cur, 3, "CIO", "CIE", "CIA"):
                self.add("S", "X")
            else:
                self.add("S")
            return cur + 2
        self.add("K")
        if m(cur + 1, 2, " C", " Q", " G"):
            return cur + 3
        if m(cur + 1, 1, "C", "K", "Q") and not m(cur + 1, 2, "CE", "CI"):
            return cur + 2
        return cur + 1

    def _d(self, cur):
        m = self.match
        if m(cur, 2, "DG"):
            if m(cur + 2, 1, "I", "E", "Y"):
                self.add("J")
                return cur + 3
            self.add("TK")
            return cur + 2
        self.add("T")
        return cur + (2 if m(cur, 2, "DT", "DD") else 1)

    def _g(self, cur):
        m, at = self.match, self.at
        if at(cur + 1) == "H":
            if cur > 0 and not self.vowel(cur - 1):
                self.add("K")
                return cur + 2
            if cur == 0:
                self.add("J" if at(cur + 2) == "I" else "K")
                return cur + 2
            # Parker's rule: "hugh", "bough", "broughton"
            if ((cur > 1 and m(cur - 2, 1, "B", "H", "D"))
                    or (cur > 2 and m(cur - 3, 1, "B", "H", "D"))
                    or (cur > 3 and m(cur - 4, 1, "B", "H"))):
                return cur + 2
            if cur > 2 and at(cur - 1) == "U" and m(cur - 3, 1, "C", "G", "L", "R", "T"):
                self.add("F")
            elif cur > 0 and at(cur - 1) != "I":
                self.add("K")
            return cur + 2
        if at(cur + 1) == "N":
            if cur == 1 and self.vowel(0) and not self.slavo_germanic:
                self.add("KN", "N")
            elif not m(cur + 2, 2, "EY") and at(cur + 1) != "Y" and not self.slavo_germanic:
                self.add("N", "KN")
            else:
                self.add("KN")
            return cur + 2
        if m(cur + 1, 2, "LI") and not self.slavo_germanic:
            self.add("KL", "L")
            return cur + 2
        if cur == 0 and (at(cur + 1) == "Y" or m(cur + 1, 2, "ES", "EP", "EB", "EL", "EY", "IB",
                                                      "IL", "IN", "IE", "EI", "ER")):
            self.add("K", "J")
            return cur + 2
        if ((m(cur + 1, 2, "ER") or at(cur + 1) == "Y")
                and not m(0, 6, "DANGER", "RANGER", "MANGER")
                and not m(cur - 1, 1, "E", "I")
                and not m(cur - 1, 3, "RGY", "OGY")):
            self.add("K", "J")
            return cur + 2
        if m(cur + 1, 1, "E", "I", "Y") or m(cur - 1, 4, "AGGI", "OGGI"):
            if m(0, 4, "VAN ", "VON ") or m(0, 3, "SCH") or m(cur + 1, 2, "ET"):
                self.add("K")
            elif m(cur + 1, 4, "IER "):
                self.add("J")
            else:
                self.add("J", "K")
            return cur + 2
        self.add("K")
        return cur + (2 if at(cur + 1) == "G" else 1)

    def _h(self, cur):
        if (cur == 0 or self.vowel(cur - 1)) and self.vowel(cur + 1):
            self.add("H")
            return cur + 2
        return cur + 1

    def _j(self, cur):
        m, at = self.match, self.at
        if m(cur, 4, "JOSE") or m(0, 4, "SAN "):
            if (cur == 0 and at(cur + 4) == "") or m(0, 4, "SAN "):
                self.add("H")
            else:
                self.add("J", "H")
            return cur + 1
        if cur == 0 and not m(cur, 4, "JOSE"):
            self.add("J", "A")
        elif self.vowel(cur - 1) and not self.slavo_germanic and at(cur + 1) in ("A", "O"):
            self.add("J", "H")
        elif cur == self.last:
            self.add("J", "")
        elif (not m(cur + 1, 1, "L", "T", "K", "S", "N", "M", "B", "Z")
              and not m(cur - 1, 1, "S", "K", "L")):
            self.add("J")
        return cur + (2 if at(cur + 1) == "J" else 1)

    def _l(self, cur):
        m = self.match
        if self.at(cur + 1) == "L":
            # spanish "cabrillo", "gallegos"
            if ((cur == self.length - 3 and m(cur - 1, 4, "ILLO", "ILLA", "ALLE"))
                    or ((m(self.last - 1, 2, "AS", "OS") or m(self.last, 1, "A", "O"))
                        and m(cur - 1, 4, "ALLE"))):
                self.add("L", "")
                return cur + 2
            self.add("L")
            return cur + 2
        self.add("L")
        return cur + 1

    def _m(self, cur):
        self.add("M")
        if ((self.match(cur - 1, 3, "UMB") and (cur + 1 == self.last or self.match(cur + 2, 2, "ER")))
                or self.at(cur + 1) == "M"):
            return cur + 2
        return cur + 1

    def _p(self, cur):
        if self.at(cur + 1) == "H":
            self.add("F")
            return cur + 2
        self.add("P")
        return cur + (2 if self.match(cur + 1, 1, "P", "B") else 1)

    def _r(self, cur):
        m = self.match
        if (cur == self.last and not self.slavo_germanic and m(cur - 2, 2, "IE")
                and not m(cur - 4, 2, "ME", "MA")):
            self.add("", "R")
        else:
            self.add("R")
        return cur + (2 if self.at(cur + 1) == "R" else 1)

    def _s(self, cur):
        m, at = self.match, self.at
        if m(cur - 1, 3, "ISL", "YSL"):
            return cur + 1
        if cur == 0 and m(cur, 5, "SUGAR"):
            self.add("X", "S")
            return cur + 1
        if m(cur, 2, "SH"):
            self.add("S" if m(cur + 1, 4, "HEIM", "HOEK", "HOLM", "HOLZ") else "X")
            return cur + 2
        if m(cur, 3, "SIO", "SIA") or m(cur, 4, "SIAN"):
            if self.slavo_germanic:
                self.add("S")
            else:
                self.add("S", "X")
            return cur + 3
        if (cur == 0 and m(cur + 1, 1, "M", "N", "L", "W")) or m(cur + 1, 1, "Z"):
            self.add("S", "X")
            return cur + (2 if m(cur + 1, 1, "Z") else 1)
        if m(cur, 2, "SC"):
            if at(cur + 2) == "H":
                if m(cur + 3, 2, "OO", "ER", "EN", "UY", "ED", "EM"):
                    if m(cur + 3, 2, "ER", "EN"):
                        self.add("X", "SK")
                    else:
                        self.add("SK")
                    return cur + 3
                if cur == 0 and not self.vowel(3) and at(3) != "W":
                    self.add("X", "S")
                else:
                    self.add("X")
                return cur + 3
            if m(cur + 2, 1, "I", "E", "Y"):
                self.add("S")
                return cur + 3
            self.add("SK")
            return cur + 3
        if cur == self.last and m(cur - 2, 2, "AI", "OI"):
            self.add("", "S")
        else:
            self.add("S")
        return cur + (2 if m(cur + 1, 1, "S", "Z") else 1)

    def _t(self, cur):
        m = self.match
        if m(cur, 4, "TION"):
            self.add("X")
            return cur + 3
        if m(cur, 3, "TIA", "TCH"):
            self.add("X")
            return cur + 3
        if m(cur, 2, "TH") or m(cur, 3, "TTH"):
            if m(cur + 2, 2, "OM", "AM") or m(0, 4, "VAN ", "VON ") or m(0, 3, "SCH"):
                self.add("T")
            else:
                self.add("0", "T")
            return cur + 2
        self.add("T")
        return cur + (2 if m(cur + 1, 1, "T", "D") else 1)

    def _w(self, cur):
        m = self.match
        if m(cur, 2, "WR"):
            self.add("R")
            return cur + 2
        if cur == 0 and (self.vowel(cur + 1) or m(cur, 2, "WH")):
            if self.vowel(cur + 1):
                self.add("A", "F")
            else:
                self.add("A")
        if ((cur == self.last and self.vowel(cur - 1))
                or m(cur - 1, 5, "EWSKI", "EWSKY", "OWSKI", "OWSKY")
                or m(0, 3, "SCH")):
            self.add("", "F")
            return cur + 1
        if m(cur, 4, "WICZ", "WITZ"):
            self.add("TS", "FX")
            return cur + 4
        return cur + 1

    def _x(self, cur):
        m = self.match
        # silent in french endings such as "breaux"
        if not (cur == self.last and (m(cur - 3, 3, "IAU", "EAU") or m(cur - 2, 2, "AU", "OU"))):
            self.add("KS")
        return cur + (2 if m(cur + 1, 1, "C", "X") else 1)

    def _z(self, cur):
        m, at = self.match, self.at
        if at(cur + 1) == "H":
            self.add("J")
            return cur + 2
        if m(cur + 1, 2, "ZO", "ZI", "ZA") or (self.slavo_germanic and cur > 0 and at(cur - 1) != "T"):
            self.add("S", "TS")
        else:
            self.add("S")
        return cur + (2 if at(cur + 1) == "Z" else 1)


def double_metaphone(word: str) -> MetaphoneCodes:
    """Primary and alternate Double Metaphone codes of ``word``.

    ``alternate`` is ``None`` when the rules never branch. An empty word gives
    an empty primary code, which callers treat as "not encodable".
    """
    if not word:
        return MetaphoneCodes("", None)
    return _Encoder(word).encode()


def primary_code(word: str) -> str:
    return double_metaphone(word).primary


# -- frequency list -----------------------------------------------------------

_INT = re.compile(r"^\d+$")


@dataclass(frozen=True)
class FrequencyList:
    entries: tuple[tuple[str, int], ...]
    source: str = ""
    skipped_lines: int = 0

    def __post_init__(self):
        entries = tuple((str(t), int(f)) for t, f in self.entries)
        if len({t for t, _ in entries}) != len(entries):
            raise DataError("frequency list terms must be distinct")
        if any(f <= 0 for _, f in entries):
            raise DataError("frequency list counts must be positive")
        object.__setattr__(self, "entries", entries)

    def __len__(self):
        return len(self.entries)

    @property
    def terms(self):
        return [t for t, _ in self.entries]

    @property
    def frequencies(self):
        return [f for _, f in self.entries]

    @classmethod
    def from_counts(cls, counts: Mapping[str, int], source="") -> "FrequencyList":
        """Normalize and merge ``counts``; order by descending count then term."""
        merged: dict[str, int] = defaultdict(int)
        for term, freq in counts.items():
            for tok in tokenize(term):
                merged[tok] += int(freq)
        ordered = sorted(merged.items(), key=lambda kv: (-kv[1], kv[0]))
        return cls(tuple(ordered), source)


def load_frequency_list(path, column: int | None = None) -> FrequencyList:
    """Parse a word-frequency file.

    The word is the first whitespace-separated field; the count is taken from
    ``column`` (0-based) or, by default, the last integer field. Lines starting
    with ``#`` are ignored, malformed lines are skipped and counted, duplicate
    words are merged by summing.
    """
    merged: dict[str, int] = defaultdict(int)
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            words = tokenize(fields[0])
            try:
                if column is not None:
                    freq = int(fields[column])
                else:
                    freq = int(next(f for f in reversed(fields[1:]) if _INT.match(f)))
            except (IndexError, ValueError, StopIteration):
                skipped += 1
                continue
            if len(words) != 1 or freq <= 0:
                skipped += 1
                continue
            merged[words[0]] += freq
    if skipped:
        logger.warning("%s: skipped %d malformed lines", path, skipped)
    if not merged:
        raise DataError(f"frequency list {path} has no valid entries")
    ordered = sorted(merged.items(), key=lambda kv: (-kv[1], kv[0]))
    return FrequencyList(tuple(ordered), str(path), skipped)


def bundled_frequency_list() -> FrequencyList:
    """The 7726-entry English list shipped with the package."""
    ref = resources.files("topicstability") / "data" / "english_frequency.tsv"
    with resources.as_file(ref) as p:
        return load_frequency_list(p)


# -- metaphone index ----------------------------------------------------------


class MetaphoneIndex(Mapping):
    """Primary code -> ``[(term, frequency), ...]`` sorted by descending frequency."""

    def __init__(self, buckets: Mapping[str, Iterable[tuple[str, int]]]):
        self._buckets = {
            code: tuple(sorted(((t, int(f)) for t, f in items), key=lambda tf: (-tf[1], tf[0])))
            for code, items in buckets.items()
        }
        self._code_of = {t: code for code, items in self._buckets.items() for t, _ in items}

    def __getitem__(self, code):
        return self._buckets[code]

    def __iter__(self):
        return iter(self._buckets)

    def __len__(self):
        return len(self._buckets)

    @property
    def n_terms(self):
        return len(self._code_of)

    def candidates(self, term: str) -> tuple[tuple[str, int], ...]:
        """Bucket entries sharing ``term``'s primary code, ``term`` excluded."""
        code = self._code_of.get(term) or primary_code(term)
        return tuple((t, f) for t, f in self._buckets.get(code, ()) if t != term)

    def __repr__(self):
        return f"MetaphoneIndex({len(self)} codes, {self.n_terms} terms)"


def build_metaphone_index(freq_list: FrequencyList) -> MetaphoneIndex:
    """Bucket every alphabetic term of ``freq_list`` under its primary code."""
    if len(freq_list) == 0:
        raise DataError("cannot index an empty frequency list")
    buckets: dict[str, list] = defaultdict(list)
    for term, freq in freq_list.entries:
        if not term.isalpha():
            continue
        # words like "wwe" encode to "" and get a bucket of their own
        buckets[primary_code(term)].append((term, freq))
    return MetaphoneIndex(buckets)
