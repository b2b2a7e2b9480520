import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import mean_filter
from qcosamp.errors import RangeError, ValidationError
from qcosamp.imaging import (GrayImage, WindowSpec, angle_to_intensity, decode_angles,
                             decode_image, encode_image, intensity_to_angle, kernel_values,
                             mean_kernel_angles, mean_kernel_filter, random_image, read_pgm,
                             render_window, similarity_formula, window_centers,
                             window_similarity, write_pgm)
from qcosamp.spec import Direct, single


def test_encode_decode_round_trip():
    img = random_image(np.random.default_rng(0), (4, 8))
    back = decode_image(encode_image(img), (4, 8), img.imax)
    np.testing.assert_array_equal(back.pixels, img.pixels)


def test_pad_to_power_of_two():
    img = GrayImage(np.full((3, 5), 7), 15)
    st_ = encode_image(img, pad=True)
    assert st_.qubit_count == 5
    with pytest.raises(ValidationError):
        encode_image(img)


@given(st.integers(0, 255))
def test_angle_intensity_inverse(i):
    assert angle_to_intensity(intensity_to_angle(i, 255), 255) == i


def test_image_validation():
    with pytest.raises(ValidationError):
        GrayImage(np.array([[300]]), 255)
    with pytest.raises(ValidationError):
        GrayImage(np.zeros(4))
    with pytest.raises(ValidationError):
        WindowSpec(3, 2)


@pytest.mark.parametrize("size,w,shift,expect", [
    (8, 2, 1, [1, 2, 3, 4, 5, 6, 7]),
    (8, 4, 2, [2, 4, 6]),
    (4, 4, 1, [2]),
])
def test_window_centers(size, w, shift, expect):
    assert window_centers(size, w, shift) == expect


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("win", [WindowSpec(2, 2), WindowSpec(4, 4), WindowSpec(2, 4, 2, 1)])
def test_filter_matches_classical_mean(seed, win):
    img = random_image(np.random.default_rng(seed), (8, 8))
    got = mean_kernel_angles(img, win)
    want = mean_filter(img.angles(), win.height, win.width, win.shift_down, win.shift_right)
    np.testing.assert_allclose(got, want, atol=1e-9)


def test_filter_intensity_output():
    img = GrayImage(np.array([[0, 4], [8, 12]]), 15)
    out = mean_kernel_filter(img, WindowSpec(2, 2))
    assert out.pixels[1, 1] == 6
    np.testing.assert_array_equal(out.pixels[0], [0, 4])


def test_window_that_does_not_fit():
    with pytest.raises(RangeError):
        mean_kernel_filter(GrayImage(np.zeros((2, 2), int)), WindowSpec(4, 4))


def _kernel():
    return single(1, 0.3, -0.5), single(2, 1.0, 0.2)


def test_kernel_values_product():
    win = WindowSpec(4, 2)
    mu = kernel_values(_kernel(), win)
    assert mu.shape == (2, 4)
    from qcosamp.fourier import fcosamp_eval
    xr = -np.pi + 2 * np.pi * np.arange(2) / 2
    xc = -np.pi + 2 * np.pi * np.arange(4) / 4
    a, b = _kernel()
    want = np.outer(fcosamp_eval(a.with_argument(Direct(0.0)), xr),
                    fcosamp_eval(b.with_argument(Direct(0.0)), xc))
    np.testing.assert_allclose(mu, want, atol=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_similarity_circuit_matches_formula(seed):
    img = random_image(np.random.default_rng(seed), (8, 8))
    win = WindowSpec(2, 2)
    c, f = window_similarity(img, (3, 5), _kernel(), win)
    assert c == pytest.approx(f, abs=1e-9)
    assert 0 <= f <= 0.5


def test_similarity_zero_on_rendered_kernel():
    win = WindowSpec(4, 4)
    mu = kernel_values(_kernel(), win)
    img = render_window(random_image(np.random.default_rng(9), (8, 8)), (4, 4), mu)
    c, f = window_similarity(img, (4, 4), _kernel(), win)
    assert f == pytest.approx(0, abs=1e-12)
    assert c == pytest.approx(0, abs=1e-12)
    assert similarity_formula(np.array([np.pi]), np.array([0.0])) == pytest.approx(0.5)


def test_similarity_window_outside_image():
    with pytest.raises(RangeError):
        window_similarity(random_image(np.random.default_rng(0), (4, 4)), (0, 0), _kernel(),
                          WindowSpec(2, 2))


@pytest.mark.parametrize("binary", [False, True])
@pytest.mark.parametrize("imax", [255, 1023])
def test_pgm_round_trip(tmp_path, binary, imax):
    img = random_image(np.random.default_rng(imax), (3, 5), imax)
    p = tmp_path / "a.pgm"
    write_pgm(img, str(p), binary)
    back = read_pgm(str(p))
    np.testing.assert_array_equal(back.pixels, img.pixels)
    assert back.imax == imax


def test_pgm_comments_and_errors(tmp_path):
    p = tmp_path / "c.pgm"
    p.write_text("P2\n# made by hand\n2 1\n# max\n9\n1 9\n")
    np.testing.assert_array_equal(read_pgm(str(p)).pixels, [[1, 9]])
    p.write_text("P3\n1 1\n255\n0 0 0\n")
    with pytest.raises(ValidationError):
        read_pgm(str(p))
    p.write_text("P2\n2 2\n255\n1 2\n")
    with pytest.raises(ValidationError):
        read_pgm(str(p))


def test_decode_angles_wraps():
    img = GrayImage(np.array([[0, 255]]), 255)
    ang = decode_angles(encode_image(img), (1, 2))
    assert ang[0, 1] == pytest.approx(np.pi)
    assert 0 <= ang.min() and ang.max() < 2 * np.pi
