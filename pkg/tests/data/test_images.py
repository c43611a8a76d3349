import numpy as np
import pytest

from hncf import exceptions
from hncf.data import ImageStore, preprocess_image, read_ppm, write_ppm


@pytest.fixture
def pixels(rng):
    return rng.integers(0, 256, size=(4, 6, 3)).astype(np.uint8)


def test_write_ppm(tmp_path, pixels):
    path = write_ppm(tmp_path / 'sub' / 'poster.ppm', pixels)

    data = (tmp_path / 'sub' / 'poster.ppm').read_bytes()
    assert data.startswith(b'P6\n6 4\n255\n')
    assert len(data) == len(b'P6\n6 4\n255\n') + pixels.size
    np.testing.assert_array_equal(read_ppm(path), pixels)


def test_read_ppm_header_comments(tmp_path):
    path = tmp_path / 'comment.ppm'
    path.write_bytes(b'P6\n# made by hand\n1 1\n255\n' + bytes([10, 20, 30]))

    assert read_ppm(path).tolist() == [[[10, 20, 30]]]


@pytest.mark.parametrize('data, match', [
    (b'P3\n1 1\n255\n0 0 0\n', r'P6'),
    (b'P6\n1 x\n255\n\x00\x00\x00', r'header'),
    (b'P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00', r'maxval'),
    (b'P6\n2 2\n255\n\x00\x00\x00', r'truncated'),
    (b'', r'P6'),
])
def test_read_ppm_invalid(tmp_path, data, match):
    path = tmp_path / 'broken.ppm'
    path.write_bytes(data)
    with pytest.raises(exceptions.DecodeError, match=match):
        read_ppm(path)


def test_read_ppm_missing(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_ppm(tmp_path / 'nonfile.ppm')


def test_write_ppm_invalid(tmp_path):
    with pytest.raises(exceptions.ShapeMismatch):
        write_ppm(tmp_path / 'gray.ppm', np.zeros((2, 2), dtype=np.uint8))


def test_preprocess_image_resizes_and_scales(tmp_path, pixels):
    path = write_ppm(tmp_path / 'poster.ppm', pixels)

    image = preprocess_image(path, (8, 8, 3))

    assert image.shape == (8, 8, 3)
    assert 0.0 <= image.values.min() and image.values.max() <= 1.0
    assert image.values[0, 0].tolist() == (pixels[0, 0] / 255).tolist()


def test_preprocess_image_needs_rgb(tmp_path, pixels):
    with pytest.raises(exceptions.InvalidParam, match=r'3 channels'):
        preprocess_image(write_ppm(tmp_path / 'p.ppm', pixels), (8, 8, 1))


def test_image_store_caches_by_resolved_path(tmp_path, pixels, mocker):
    write_ppm(tmp_path / 'images' / 'a.ppm', pixels)
    store = ImageStore(tmp_path, target_shape=(8, 8, 3))
    spy = mocker.spy(store, 'resolve')

    first = store.load('images/a.ppm')
    second = store.load(tmp_path / 'images' / 'a.ppm')

    assert first is second
    assert len(store) == 1
    assert spy.call_count == 2
