import string

from hypothesis import given, strategies as st

from kgqa.text import join_tokens, tokenize


def test_question_with_trailing_punctuation():
    assert tokenize("Where was Sasha Vujacic born?") == [
        "where", "was", "sasha", "vujacic", "born", "?"]


def test_contraction_split():
    assert tokenize("don't") == ["do", "n't"]
    assert tokenize("can't") == ["ca", "n't"]
    assert tokenize("Smith's") == ["smith", "'s"]
    assert tokenize("they're we've you'll I'd I'm") == [
        "they", "'re", "we", "'ve", "you", "'ll", "i", "'d", "i", "'m"]


def test_empty_input():
    assert tokenize("") == []
    assert tokenize("   \t\n") == []


def test_punctuation_detached_from_both_ends():
    assert tokenize('"quoted"') == ['"', "quoted", '"']
    assert tokenize("(it's),") == ["(", "it", "'s", ")", ","]
    assert tokenize("u.s.'s") == ["u.s", ".", "'s"]


def test_internal_punctuation_kept():
    assert tokenize("a,b") == ["a,b"]
    assert tokenize("semi-final") == ["semi-final"]


def test_suffix_only_words_not_split():
    assert tokenize("n't 's 'll") == ["n't", "'s", "'ll"]


def test_stacked_contractions():
    assert tokenize("they'd've") == ["they", "'d", "'ve"]


_text = st.text(
    alphabet=string.ascii_letters + string.digits + ".,?!;:\"()[]'- \t",
    max_size=60,
)


@given(_text)
def test_idempotent(raw):
    tokens = tokenize(raw)
    assert tokenize(join_tokens(tokens)) == tokens


@given(_text)
def test_tokens_lowercase_and_nonempty(raw):
    for token in tokenize(raw):
        assert token
        assert token == token.lower()
        assert not any(ch.isspace() for ch in token)
