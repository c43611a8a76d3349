import pytest

from hncf import exceptions
from hncf.encoders import CLS, PAD, UNK, Vocabulary, build_vocab, read_vocab, write_vocab

import _common


def test_reserved_ids():
    vocab = Vocabulary(['space'])

    assert (PAD, UNK, CLS) == (0, 1, 2)
    assert [vocab.token(i) for i in range(4)] == ['[PAD]', '[UNK]', '[CLS]', 'space']
    assert '[PAD]' not in vocab
    assert vocab.id('[PAD]') == UNK


def test_duplicate_tokens():
    with pytest.raises(exceptions.InvalidConfig, match=r'unique'):
        Vocabulary(['a', 'b', 'a'])


def test_equality_and_hash():
    assert Vocabulary(['a', 'b']) == Vocabulary(('a', 'b'))
    assert Vocabulary(['a', 'b']) != Vocabulary(['b', 'a'])
    assert len({Vocabulary(['a']), Vocabulary(['a'])}) == 1


def test_build_vocab_truncates_by_frequency_then_token():
    corpus = ['drama drama comedy', 'action comedy western', 'drama thriller']

    vocab = build_vocab(corpus, max_vocab=6)

    assert vocab.tokens == ('drama', 'comedy', 'action')
    assert len(vocab) == 6
    assert vocab.id('western') == UNK


def test_build_vocab_empty_corpus():
    with pytest.raises(exceptions.EmptyCorpus):
        build_vocab([])


def test_build_vocab_blank_strings():
    assert build_vocab(['', '  ']).tokens == ()


def test_build_vocab_invalid_max_vocab():
    with pytest.raises(exceptions.InvalidParam, match=r'max_vocab'):
        build_vocab(['a'], max_vocab=2)


def test_write_vocab(tmp_path):
    path = write_vocab(Vocabulary(['zeta', 'alpha']), tmp_path / 'sub' / 'vocab.txt')

    assert (tmp_path / 'sub' / 'vocab.txt').read_text(
        encoding=_common.EXPECTED_DEFAULT_ENCODING) == 'zeta\nalpha\n'
    assert read_vocab(path) == Vocabulary(['zeta', 'alpha'])
