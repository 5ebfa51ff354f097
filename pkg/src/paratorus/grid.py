"""Discrete 2-torus fields with dual physical/spectral representation.

The torus is ``[0, 2*pi)^2`` sampled on an n-by-n grid (n even, n >= 8), so
Fourier modes are integer vectors ``k in {-n/2, ..., n/2-1}^2`` kept in FFT
layout.  The transform convention is

    u(x) = sum_k  uhat(k) exp(i k . x),

i.e. ``uhat = fft2(u) / n**2``.  Fields are immutable after construction;
whichever representation is missing is computed lazily and cached, so both
views always agree through the transform pair.

Pointwise products of band-limited fields are computed on a 3/2 zero-padded
grid (:func:`multiply`), which makes every retained Fourier coefficient of
the product exact; this is what keeps the Bony reconstruction identity exact
at grid scale.
"""

from dataclasses import dataclass
from functools import cached_property
import struct

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "TorusField",
    "Trajectory",
    "forward_transform",
    "multiply",
    "heat_semigroup",
    "inverse_laplacian",
    "laplacian",
    "write_field",
    "read_field",
]


@dataclass(frozen=True)
class Grid:
    """Uniform n-by-n discretization of the 2-torus, spacing 2*pi/n."""

    n: int

    def __post_init__(self):
        if self.n % 2 != 0 or self.n < 8:
            raise ValueError("grid size must be even and >= 8, got n=%d" % self.n)

    @cached_property
    def modes(self):
        """Integer mode values along one axis, FFT layout."""
        return sfft.fftfreq(self.n, 1.0 / self.n).astype(int)

    @cached_property
    def k1(self):
        return np.meshgrid(self.modes, self.modes, indexing="ij")[0]

    @cached_property
    def k2(self):
        return np.meshgrid(self.modes, self.modes, indexing="ij")[1]

    @cached_property
    def ksq(self):
        return (self.k1.astype(float) ** 2 + self.k2.astype(float) ** 2)

    @cached_property
    def knorm(self):
        return np.sqrt(self.ksq)

    @cached_property
    def x(self):
        """Physical coordinates (x1, x2) as two n-by-n arrays."""
        ax = 2.0 * np.pi * np.arange(self.n) / self.n
        return np.meshgrid(ax, ax, indexing="ij")

    @property
    def spacing(self):
        return 2.0 * np.pi / self.n

    def mode_index(self, k):
        """Array index of integer mode vector ``k = (k1, k2)``."""
        k1, k2 = int(k[0]), int(k[1])
        half = self.n // 2
        if not (-half <= k1 < half and -half <= k2 < half):
            raise ValueError("mode %s outside grid of size %d" % ((k1, k2), self.n))
        return (k1 % self.n, k2 % self.n)


def _require_same_grid(*fields):
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise ValueError("fields live on different grids: n=%d vs n=%d"
                             % (g.n, f.grid.n))
    return g


class TorusField:
    """A scalar field on the discrete torus, physical and/or spectral.

    Construct through :meth:`from_physical` or :meth:`from_spectral`.  The
    ``real`` flag records whether the field is real-valued; real fields keep
    Hermitian-symmetric spectra and their ``physical`` view is a float array.
    """

    __slots__ = ("grid", "real", "_phys", "_spec")

    def __init__(self, grid, physical=None, spectral=None, real=None):
        if physical is None and spectral is None:
            raise ValueError("need at least one representation")
        self.grid = grid
        self._phys = None
        self._spec = None
        if physical is not None:
            physical = np.asarray(physical)
            if physical.shape != (grid.n, grid.n):
                raise ValueError("physical array has shape %s, expected %s"
                                 % (physical.shape, (grid.n, grid.n)))
            if real is None:
                real = not np.iscomplexobj(physical)
            self._phys = (np.real(physical).astype(float) if real
                          else physical.astype(complex))
            self._phys.setflags(write=False)
        if spectral is not None:
            spectral = np.asarray(spectral, dtype=complex)
            if spectral.shape != (grid.n, grid.n):
                raise ValueError("spectral array has shape %s, expected %s"
                                 % (spectral.shape, (grid.n, grid.n)))
            if real is None:
                real = is_hermitian(spectral)
            self._spec = spectral
            self._spec.setflags(write=False)
        self.real = bool(real)

    @classmethod
    def from_physical(cls, grid, values, real=None):
        return cls(grid, physical=values, real=real)

    @classmethod
    def from_spectral(cls, grid, coeffs, real=None):
        return cls(grid, spectral=coeffs, real=real)

    @classmethod
    def zero(cls, grid, real=True):
        return cls(grid, spectral=np.zeros((grid.n, grid.n), complex), real=real)

    @classmethod
    def constant(cls, grid, value):
        spec = np.zeros((grid.n, grid.n), complex)
        spec[0, 0] = value
        return cls(grid, spectral=spec, real=not np.iscomplexobj(np.asarray(value)))

    @property
    def physical(self):
        if self._phys is None:
            phys = sfft.ifft2(self._spec) * self.grid.n ** 2
            phys = phys.real if self.real else phys
            self._phys = phys
            self._phys.setflags(write=False)
        return self._phys

    @property
    def spectral(self):
        if self._spec is None:
            self._spec = sfft.fft2(np.asarray(self._phys, dtype=complex)) / self.grid.n ** 2
            self._spec.setflags(write=False)
        return self._spec

    @property
    def has_physical(self):
        return self._phys is not None

    @property
    def has_spectral(self):
        return self._spec is not None

    def mean(self):
        m = self.spectral[0, 0]
        return m.real if self.real else m

    def sup_norm(self):
        return float(np.abs(self.physical).max())

    def __add__(self, other):
        if not isinstance(other, TorusField):
            return NotImplemented
        _require_same_grid(self, other)
        return TorusField.from_spectral(self.grid, self.spectral + other.spectral,
                                        real=self.real and other.real)

    def __sub__(self, other):
        if not isinstance(other, TorusField):
            return NotImplemented
        _require_same_grid(self, other)
        return TorusField.from_spectral(self.grid, self.spectral - other.spectral,
                                        real=self.real and other.real)

    def __mul__(self, scalar):
        if isinstance(scalar, TorusField):
            raise TypeError("use multiply(f, g) for field products "
                            "(pointwise products need dealiasing)")
        real = self.real and not np.iscomplexobj(np.asarray(scalar))
        return TorusField.from_spectral(self.grid, self.spectral * scalar, real=real)

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def __repr__(self):
        kind = "real" if self.real else "complex"
        return "<TorusField n=%d %s>" % (self.grid.n, kind)


def is_hermitian(spec, tol=1e-12):
    """True when ``spec`` is the spectrum of a real field."""
    flipped = np.conj(np.roll(spec[::-1, ::-1], (1, 1), axis=(0, 1)))
    scale = np.abs(spec).max()
    if scale == 0.0:
        return True
    return bool(np.abs(spec - flipped).max() <= tol * scale)


def forward_transform(f):
    """Materialize the spectral representation of ``f`` and return it.

    The inverse transform of the result reproduces the physical values to
    machine precision; fields are immutable so this is a pure cache fill.
    """
    f.spectral
    return f


# ----------------------------------------------------------------------
# dealiased products

def _pad_modes(spec, m):
    """Embed FFT-layout spectra (..., n, n) into an m-by-m mode grid."""
    n = spec.shape[-1]
    lo = (m - n) // 2
    out = np.zeros(spec.shape[:-2] + (m, m), dtype=complex)
    out[..., lo:lo + n, lo:lo + n] = np.fft.fftshift(spec, axes=(-2, -1))
    return np.fft.ifftshift(out, axes=(-2, -1))


def _truncate_modes(spec, n):
    """Restrict FFT-layout spectra (..., m, m) to the centered n-by-n modes."""
    m = spec.shape[-1]
    lo = (m - n) // 2
    shifted = np.fft.fftshift(spec, axes=(-2, -1))[..., lo:lo + n, lo:lo + n]
    return np.fft.ifftshift(shifted, axes=(-2, -1))


def padded_size(n):
    """3/2-rule padded grid size (rounded up to even)."""
    m = 3 * n // 2
    return m + (m % 2)


def _padded_physical(spec, m):
    return sfft.ifft2(_pad_modes(spec, m), axes=(-2, -1)) * m * m


def _physical_to_truncated(phys_big, n):
    m = phys_big.shape[-1]
    return _truncate_modes(sfft.fft2(phys_big, axes=(-2, -1)) / (m * m), n)


def multiply(f, g):
    """Pointwise product of two fields, dealiased by the 3/2 rule.

    For factors band-limited to the grid every retained coefficient of the
    result equals the exact convolution of the factor spectra.
    """
    grid = _require_same_grid(f, g)
    m = padded_size(grid.n)
    pf = _padded_physical(f.spectral, m)
    pg = _padded_physical(g.spectral, m)
    spec = _physical_to_truncated(pf * pg, grid.n)
    return TorusField.from_spectral(grid, spec, real=f.real and g.real)


# ----------------------------------------------------------------------
# constant-coefficient operators, diagonal in frequency

def heat_semigroup(f, t):
    """Heat flow ``exp(t*Laplacian)``: multiply the spectrum by exp(-t|k|^2)."""
    if t < 0:
        raise ValueError("heat semigroup needs t >= 0, got %g" % t)
    if t == 0:
        return f
    spec = f.spectral * np.exp(-t * f.grid.ksq)
    return TorusField.from_spectral(f.grid, spec, real=f.real)


def inverse_laplacian(f):
    """Zero-mean Green operator of ``-Laplacian``: uhat(k)/|k|^2, zero mode 0."""
    grid = f.grid
    spec = np.zeros_like(f.spectral)
    mask = grid.ksq > 0
    spec[mask] = f.spectral[mask] / grid.ksq[mask]
    return TorusField.from_spectral(grid, spec, real=f.real)


def laplacian(f):
    return TorusField.from_spectral(f.grid, -f.grid.ksq * f.spectral, real=f.real)


# ----------------------------------------------------------------------
# trajectories

class Trajectory:
    """Uniformly time-sampled sequence of fields on one grid."""

    __slots__ = ("grid", "dt", "fields")

    def __init__(self, fields, dt):
        fields = tuple(fields)
        if not fields:
            raise ValueError("trajectory needs at least one field")
        if dt <= 0:
            raise ValueError("time step must be positive")
        grid = fields[0].grid
        for f in fields[1:]:
            if f.grid != grid:
                raise ValueError("all trajectory fields must share one grid")
        self.grid = grid
        self.dt = float(dt)
        self.fields = fields

    def __len__(self):
        return len(self.fields)

    def __getitem__(self, i):
        return self.fields[i]

    @property
    def times(self):
        return self.dt * np.arange(len(self.fields))

    @property
    def t_final(self):
        return self.dt * (len(self.fields) - 1)

    def __sub__(self, other):
        if len(other) != len(self) or other.dt != self.dt:
            raise ValueError("trajectories are not aligned")
        return Trajectory([a - b for a, b in zip(self.fields, other.fields)], self.dt)

    def at_time(self, t):
        """Field at time t, clamped to [0, T], linearly interpolated."""
        t = min(max(t, 0.0), self.t_final)
        s = t / self.dt
        i = int(np.floor(s))
        if i >= len(self.fields) - 1:
            return self.fields[-1]
        w = s - i
        if w == 0.0:
            return self.fields[i]
        return (1.0 - w) * self.fields[i] + w * self.fields[i + 1]


# ----------------------------------------------------------------------
# field snapshot files: header (magic, endianness, kind, n) + float64 payload

_MAGIC = b"PTF1"
_KIND_REAL = 0
_KIND_COMPLEX = 1
_KIND_SPECTRAL = 2


def write_field(path, field, representation="auto"):
    """Write a field snapshot: header (n, kind, endianness) + row-major f64.

    ``representation`` selects "physical" or "spectral"; "auto" stores real
    fields physically and complex fields spectrally.
    """
    if representation == "auto":
        representation = "physical" if field.real else "spectral"
    if representation == "physical":
        data = field.physical
        kind = _KIND_REAL if field.real else _KIND_COMPLEX
    elif representation == "spectral":
        data = field.spectral
        kind = _KIND_SPECTRAL
    else:
        raise ValueError("unknown representation %r" % representation)
    endian = "<" if np.little_endian else ">"
    header = struct.pack("=4sBBH", _MAGIC, ord(endian), kind, field.grid.n)
    if kind == _KIND_REAL:
        payload = np.ascontiguousarray(data, dtype=np.float64)
    else:
        payload = np.ascontiguousarray(data, dtype=np.complex128).view(np.float64)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes(order="C"))


def read_field(path):
    """Read a snapshot written by :func:`write_field`."""
    with open(path, "rb") as fh:
        header = fh.read(struct.calcsize("=4sBBH"))
        magic, endian_byte, kind, n = struct.unpack("=4sBBH", header)
        if magic != _MAGIC:
            raise ValueError("%s is not a field snapshot" % path)
        raw = np.frombuffer(fh.read(), dtype=np.float64)
    endian = chr(endian_byte)
    native = "<" if np.little_endian else ">"
    if endian != native:
        raw = raw.byteswap()
    grid = Grid(n)
    if kind == _KIND_REAL:
        return TorusField.from_physical(grid, raw.reshape(n, n), real=True)
    data = raw.view(np.complex128).reshape(n, n)
    if kind == _KIND_COMPLEX:
        return TorusField.from_physical(grid, data, real=False)
    if kind == _KIND_SPECTRAL:
        return TorusField.from_spectral(grid, data)
    raise ValueError("unknown field kind %d in %s" % (kind, path))
