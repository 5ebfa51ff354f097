import numpy as np
import pytest

from paratorus import (Grid, TorusField, forward_transform, heat_semigroup,
                       inverse_laplacian, laplacian, multiply, read_field,
                       write_field)
from paratorus.estimates import rough_field
from paratorus.grid import is_hermitian

from oracles import direct_convolution


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(7)
    with pytest.raises(ValueError):
        Grid(6)
    assert Grid(8).spacing == pytest.approx(2 * np.pi / 8)


def test_constant_field_spectrum(grid16):
    f = TorusField.constant(grid16, 3.5)
    spec = f.spectral
    assert spec[0, 0] == 3.5
    assert np.abs(spec).sum() == pytest.approx(3.5)


def test_single_mode_cosine(grid32):
    x1, _ = grid32.x
    f = TorusField.from_physical(grid32, np.cos(x1))
    spec = f.spectral
    assert spec[grid32.mode_index((1, 0))] == pytest.approx(0.5, abs=1e-14)
    assert spec[grid32.mode_index((-1, 0))] == pytest.approx(0.5, abs=1e-14)
    rest = np.abs(spec).sum() - np.abs(spec[1, 0]) - np.abs(spec[-1, 0])
    assert rest < 1e-13


@pytest.mark.parametrize("n", [64, 128, 256])
def test_transform_round_trip(n):
    rng = np.random.default_rng(n)
    grid = Grid(n)
    values = rng.standard_normal((100, n, n))
    spec = np.fft.fft2(values, axes=(-2, -1)) / n**2
    back = np.real(np.fft.ifft2(spec, axes=(-2, -1))) * n**2
    scale = np.abs(values).max()
    assert np.abs(back - values).max() <= 1e-12 * scale


def test_forward_transform_materializes(grid16, rng):
    f = TorusField.from_physical(grid16, rng.standard_normal((16, 16)))
    assert not f.has_spectral
    out = forward_transform(f)
    assert out.has_spectral
    back = np.real(np.fft.ifft2(out.spectral)) * 16**2
    assert np.abs(back - f.physical).max() <= 1e-12 * np.abs(f.physical).max()


def test_multiply_matches_direct_convolution(grid16, rng):
    u = rough_field(grid16, 0.4, rng)
    v = rough_field(grid16, 0.6, rng)
    prod = multiply(u, v)
    expected = direct_convolution(grid16, u.spectral, v.spectral)
    assert np.abs(prod.spectral - expected).max() < 1e-12
    assert prod.real


def test_multiply_grid_mismatch(grid16, grid32):
    with pytest.raises(ValueError):
        multiply(TorusField.constant(grid16, 1.0),
                 TorusField.constant(grid32, 1.0))


def test_field_scalar_arithmetic(grid16, rng):
    u = rough_field(grid16, 0.5, rng)
    v = 2.0 * u - u
    assert np.abs(v.spectral - u.spectral).max() < 1e-14
    with pytest.raises(TypeError):
        u * u


def test_hermitian_detection(grid16, rng):
    u = rough_field(grid16, 0.5, rng)
    assert is_hermitian(u.spectral)
    bad = u.spectral.copy()
    bad[2, 3] += 1.0
    assert not is_hermitian(bad)


def test_heat_semigroup_identity_and_eigenfunction(grid32):
    spec = np.zeros((32, 32), complex)
    spec[grid32.mode_index((3, 2))] = 1.0
    f = TorusField.from_spectral(grid32, spec)
    assert heat_semigroup(f, 0.0) is f
    out = heat_semigroup(f, 0.1)
    expected = np.exp(-0.1 * 13.0)
    assert out.spectral[grid32.mode_index((3, 2))] == pytest.approx(expected)
    with pytest.raises(ValueError):
        heat_semigroup(f, -1.0)


def test_heat_semigroup_difference_scaling(grid64, rng):
    # ||e^{t Lap} u - u||_inf <= C t^{alpha/2} ||u||_{C^alpha}: the ratio is
    # roughly flat across the scaling range; a genuine violation of the
    # bound would tilt it like t^{-c} with c of order (alpha'-alpha)/2
    from paratorus import besov_norm
    alpha = 0.9
    ts = [2.0 ** -k for k in range(2, 11)]
    for _ in range(10):
        u = rough_field(grid64, alpha, rng)
        denom = besov_norm(u, alpha)
        ratios = [(heat_semigroup(u, t) - u).sup_norm() / (t ** (alpha / 2) * denom)
                  for t in ts]
        slope = np.polyfit(np.log(ts), np.log(ratios), 1)[0]
        assert slope >= -0.15
        assert np.isfinite(max(ratios))


def test_inverse_laplacian(grid32, rng):
    spec = np.zeros((32, 32), complex)
    spec[grid32.mode_index((2, -1))] = 4.0
    f = TorusField.from_spectral(grid32, spec)
    out = inverse_laplacian(f)
    assert out.spectral[grid32.mode_index((2, -1))] == pytest.approx(4.0 / 5.0)

    c = TorusField.constant(grid32, 7.0)
    assert inverse_laplacian(c).sup_norm() == 0.0

    u = rough_field(grid32, 0.3, rng)
    recovered = -1.0 * laplacian(inverse_laplacian(u))
    target = u - TorusField.constant(grid32, u.mean())
    assert np.abs(recovered.spectral - target.spectral).max() < 1e-10


def test_snapshot_roundtrip(tmp_path, grid16, rng):
    u = rough_field(grid16, 0.5, rng)
    path = tmp_path / "field.bin"
    write_field(path, u)
    back = read_field(path)
    assert back.grid == grid16
    assert np.array_equal(back.physical, u.physical)

    write_field(path, u, representation="spectral")
    back = read_field(path)
    assert np.array_equal(back.spectral, u.spectral)

    z = TorusField.from_physical(grid16, u.physical + 1j * u.physical,
                                 real=False)
    write_field(path, z, representation="physical")
    back = read_field(path)
    assert np.array_equal(back.physical, z.physical)


def test_snapshot_rejects_garbage(tmp_path):
    path = tmp_path / "junk.bin"
    path.write_bytes(b"not a field at all")
    with pytest.raises(ValueError):
        read_field(path)
