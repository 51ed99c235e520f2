from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from topicstability._validation import DataError
from topicstability.phonetics import (
    FrequencyList,
    build_metaphone_index,
    double_metaphone,
    load_frequency_list,
    primary_code,
)

REFERENCE = Path(__file__).parent / "data" / "double_metaphone_reference.tsv"


def reference_rows():
    rows = []
    for line in REFERENCE.read_text().splitlines():
        if line.startswith("#"):
            continue
        word, primary, alternate = line.split("\t")
        rows.append((word, primary, alternate or None))
    return rows


def test_reference_vector_is_large():
    assert len(reference_rows()) >= 100


@pytest.mark.parametrize("word,primary,alternate", reference_rows())
def test_frozen_reference(word, primary, alternate):
    assert double_metaphone(word) == (primary, alternate)


def test_live_cross_check_against_abydos(freq_list):
    abydos = pytest.importorskip("abydos.phonetic")
    dm = abydos.DoubleMetaphone(max_length=4)
    for w in freq_list.terms:
        p, a = dm.encode(w)
        assert double_metaphone(w) == (p, a or None), w


@pytest.mark.parametrize("word", ["industry", "units", "induced"])
def test_ants_group(word):
    assert primary_code(word) == "ANTS"


@pytest.mark.parametrize("word", ["grateful", "creative", "Cardiff", "CARDIFF"])
def test_krtf_group(word):
    assert primary_code(word) == "KRTF"


def test_empty_word():
    assert double_metaphone("") == ("", None)


@given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=15))
def test_codes_are_short_and_deterministic(word):
    codes = double_metaphone(word)
    assert len(codes.primary) <= 4
    assert codes.alternate is None or 0 < len(codes.alternate) <= 4
    assert codes == double_metaphone(word.upper())
    assert set(codes.primary) <= set("AFHJKLMNPRSTX0")


def write(tmp_path, text, name="f.txt"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_frequency_list_basic(tmp_path):
    fl = load_frequency_list(write(tmp_path, "the 61847\nof 29391\n"))
    assert fl.entries == (("the", 61847), ("of", 29391))


def test_frequency_list_merges_and_skips(tmp_path):
    text = "# header\nbank 10\nBank\t5\nrow without number\n\nx 3\n123 4\nriver 7 extra 12\n"
    fl = load_frequency_list(write(tmp_path, text))
    assert dict(fl.entries) == {"bank": 15, "river": 12}
    assert fl.skipped_lines == 3


def test_frequency_list_column(tmp_path):
    fl = load_frequency_list(write(tmp_path, "cat 5 100\ndog 9 1\n"), column=1)
    assert fl.entries == (("dog", 9), ("cat", 5))


def test_frequency_list_empty_error(tmp_path):
    with pytest.raises(DataError):
        load_frequency_list(write(tmp_path, "# nothing\nfoo bar\n"))


def test_frequency_list_invariants():
    with pytest.raises(DataError):
        FrequencyList((("a", 1), ("a", 2)))
    with pytest.raises(DataError):
        FrequencyList((("a", 0),))
    assert FrequencyList.from_counts({"Bank": 3, "bank": 2, "dog": 9}).entries == (("dog", 9), ("bank", 5))


def test_bundled_list(freq_list):
    assert len(freq_list) == 7726
    assert freq_list.skipped_lines == 0
    freqs = freq_list.frequencies
    assert freqs == sorted(freqs, reverse=True)


def test_index_examples():
    idx = build_metaphone_index(FrequencyList((("industry", 50), ("induced", 20))))
    assert dict(idx) == {"ANTS": (("industry", 50), ("induced", 20))}
    idx = build_metaphone_index(FrequencyList((("cat", 5),)))
    assert list(idx) == [primary_code("cat")]
    assert idx.candidates("cat") == ()


def test_index_partition_and_order(freq_list, metaphone_index):
    seen = [t for code in metaphone_index for t, _ in metaphone_index[code]]
    assert len(seen) == len(set(seen)) == len(freq_list)
    for code, bucket in metaphone_index.items():
        assert all(primary_code(t) == code for t, _ in bucket)
        keys = [(-f, t) for t, f in bucket]
        assert keys == sorted(keys)


def test_index_skips_non_alphabetic():
    fl = FrequencyList((("abc", 3), ("x1", 2)))
    assert build_metaphone_index(fl).n_terms == 1


def test_candidates_exclude_term(metaphone_index):
    cands = [t for t, _ in metaphone_index.candidates("creative")]
    assert "creative" not in cands
    assert {"grateful", "creativity"} <= set(cands)
