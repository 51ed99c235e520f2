"""Regenerate the bundled English word-frequency list.

The original experiments sampled from a 7726-entry list of frequent British
English words. That list is not redistributable here, so a list of the same
size is derived from the ``wordfreq`` package (data under CC-BY-SA 4.0).

    pip install wordfreq
    python scripts/make_frequency_list.py src/topicstability/data/english_frequency.tsv
"""
import re
import sys

import wordfreq

N_ENTRIES = 7726
ALPHA = re.compile(r"^[a-z]{2,}$")


def main(out_path):
    entries = []
    for word in wordfreq.iter_wordlist("en"):
        if not ALPHA.match(word):
            continue
        count = round(wordfreq.word_frequency(word, "en") * 1e9)
        if count <= 0:
            break
        entries.append((word, count))
        if len(entries) == N_ENTRIES:
            break
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(f"# derived from wordfreq (CC-BY-SA 4.0); "
                 "columns: word, occurrences per billion words\n")
        for word, count in entries:
            fh.write(f"{word}\t{count}\n")


if __name__ == "__main__":
    main(sys.argv[1])
