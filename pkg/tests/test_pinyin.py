import pytest
from hypothesis import given, strategies as st

from pinasr import assets
from pinasr.pinyin import (
    InvalidSyllable,
    InvalidTone,
    PronunciationLexicon,
    Syllable,
    SyllableInventory,
    UnknownCharacter,
    hanzi_to_pinyin,
    parse_syllable,
    parse_toneless,
    split_segment,
    strip_tone,
)


@pytest.fixture(scope="module")
def inventory():
    return assets.default_inventory()


@pytest.fixture(scope="module")
def lexicon():
    return assets.default_lexicon()


def test_parse_zhong1(inventory):
    s = parse_syllable("zhong1", inventory)
    assert (s.initial, s.final, s.tone) == ("zh", "ong", 1)
    assert str(s) == "zhong1"


def test_parse_zero_onset(inventory):
    s = parse_syllable("e4", inventory)
    assert (s.initial, s.final, s.tone) == ("", "e", 4)


def test_parse_rejects_nonsense(inventory):
    with pytest.raises(InvalidSyllable):
        parse_syllable("xyz1", inventory)


def test_parse_rejects_bad_tone(inventory):
    with pytest.raises(InvalidTone):
        parse_syllable("zhong9", inventory)
    with pytest.raises(InvalidTone):
        parse_syllable("zhong", inventory)  # tonal parser needs a digit
    with pytest.raises(InvalidSyllable):
        parse_syllable("", inventory)
    with pytest.raises(InvalidSyllable):
        parse_syllable("zhōng1", inventory)  # non-ASCII


def test_parse_is_case_insensitive(inventory):
    assert parse_syllable("ZHONG1", inventory) == parse_syllable("zhong1", inventory)


def test_parse_toneless(inventory):
    assert parse_toneless("zhong", inventory) == "zhong"
    with pytest.raises(InvalidSyllable):
        parse_toneless("zhong1", inventory)
    with pytest.raises(InvalidSyllable):
        parse_toneless("xyz", inventory)


def test_strip_tone_basics(inventory):
    assert strip_tone(parse_syllable("zhong1", inventory)) == "zhong"
    assert strip_tone(parse_syllable("ma5", inventory)) == "ma"


def test_strip_preserves_length(inventory, lexicon):
    pinyin = hanzi_to_pinyin("中国人民", lexicon)
    assert len([strip_tone(s) for s in pinyin]) == len(pinyin)


def test_round_trip_whole_inventory(inventory):
    # Exhaustive: canonical rendering must parse back to the same syllable.
    for unit in inventory.tonal_units:
        s = parse_syllable(unit, inventory)
        assert str(s) == unit
        assert parse_syllable(str(s), inventory) == s


def test_strip_is_surjective_onto_toneless(inventory):
    stripped = {u[:-1] for u in inventory.tonal_units}
    assert stripped == set(inventory.toneless_units)


def test_split_segment_prefers_long_onsets():
    assert split_segment("zhong") == ("zh", "ong")
    assert split_segment("zong") == ("z", "ong")
    assert split_segment("ai") == ("", "ai")


@given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz12345", min_size=1, max_size=8))
def test_parser_never_crashes_on_ascii(inventory, text):
    try:
        s = parse_syllable(text, inventory)
    except (InvalidSyllable, InvalidTone):
        return
    assert str(s) == text.lower()


def test_inventory_from_units_rejects_malformed():
    with pytest.raises(InvalidSyllable):
        SyllableInventory.from_units(["zhong"])  # no tone digit
    with pytest.raises(InvalidSyllable):
        SyllableInventory.from_units(["zhong6"])


def test_hanzi_to_pinyin_fixture(lexicon):
    assert [str(s) for s in hanzi_to_pinyin("中国", lexicon)] == ["zhong1", "guo2"]
    assert hanzi_to_pinyin("", lexicon) == []


def test_hanzi_to_pinyin_unknown_character(lexicon):
    with pytest.raises(UnknownCharacter) as err:
        hanzi_to_pinyin("中X国", lexicon)
    assert err.value.char == "X"
    assert err.value.position == 1


def test_hanzi_to_pinyin_length(lexicon):
    sentence = "他说明天早上要去学校"
    assert len(hanzi_to_pinyin(sentence, lexicon)) == len(sentence)


def test_heteronym_takes_highest_weight(lexicon):
    # 中 carries both zhong1 and zhong4; zhong1 is the dominant reading.
    readings = lexicon.readings("中")
    assert str(readings[0][0]) == "zhong1"
    assert [str(hanzi_to_pinyin("中", lexicon)[0])] == ["zhong1"]


def test_lexicon_readings_sorted_descending(lexicon):
    for char in lexicon.characters:
        weights = [w for _, w in lexicon.readings(char)]
        assert weights == sorted(weights, reverse=True)
        assert all(w > 0 for w in weights)


def test_lexicon_units_are_inventory_valid(inventory, lexicon):
    assert lexicon.all_units() <= inventory.tonal_units


def test_heteronym_tie_breaks_by_unit_string(inventory):
    lex = PronunciationLexicon(
        {"同": [(parse_syllable("tong2", inventory), 5.0), (parse_syllable("dong1", inventory), 5.0)]}
    )
    assert str(lex.readings("同")[0][0]) == "dong1"  # equal weight, lexicographic order


def test_homophones_normalized_per_character(lexicon):
    for unit in ("shi4", "zhong1", "ma5"):
        for char, p in lexicon.homophones(unit, tonal=True):
            assert 0 < p <= 1
    # toneless candidates are a superset at every stripped key
    tonal = {c for c, _ in lexicon.homophones("zhong1", tonal=True)}
    toneless = {c for c, _ in lexicon.homophones("zhong", tonal=False)}
    assert tonal <= toneless
