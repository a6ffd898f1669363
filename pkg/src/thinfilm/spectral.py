"""Value-semantic real periodic fields on the torus, stored spectrally.

A field f(theta) = sum_{|n| <= N} a_n e^{i n theta} is kept as the dense
complex coefficient array a_{-N}..a_N with the conjugate-symmetry
constraint a_{-n} = conj(a_n) (so f is real valued).  All operations are
pure functions returning new fields; products are exact truncated
convolutions (no aliasing).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .kernels import conv_center

SNAPSHOT_MAGIC = b"TFLM"
SNAPSHOT_VERSION = 1

# Relative tolerance for the reality (conjugate-symmetry) invariant.
_REALITY_RTOL = 1e-12


def modes(n_max: int) -> np.ndarray:
    """Mode indices -n_max..n_max in storage order."""
    return np.arange(-n_max, n_max + 1)


@dataclass(frozen=True)
class SpectralField:
    """Immutable real 2*pi-periodic scalar field in coefficient form.

    coeffs[i] is the coefficient of e^{i n theta} with n = i - N.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 1 or c.size % 2 == 0:
            raise ValueError("coeffs must be a 1-D array of odd length 2N+1")
        scale = float(np.max(np.abs(c))) or 1.0
        asym = np.max(np.abs(c - np.conj(c[::-1])))
        if asym > 1e-8 * scale:
            raise ValueError(f"coefficients are not conjugate-symmetric ({asym:.3e})")
        # symmetrize exactly so the invariant survives long op chains
        c = 0.5 * (c + np.conj(c[::-1]))
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def n_max(self) -> int:
        return (self.coeffs.size - 1) // 2

    def coeff(self, n: int) -> complex:
        if abs(n) > self.n_max:
            return 0.0 + 0.0j
        return complex(self.coeffs[n + self.n_max])

    @property
    def mean(self) -> float:
        return float(self.coeffs[self.n_max].real)

    # ---- constructors -------------------------------------------------

    @staticmethod
    def zeros(n_max: int) -> "SpectralField":
        return SpectralField(np.zeros(2 * n_max + 1, np.complex128))

    @staticmethod
    def constant(value: float, n_max: int) -> "SpectralField":
        c = np.zeros(2 * n_max + 1, np.complex128)
        c[n_max] = value
        return SpectralField(c)

    @staticmethod
    def from_modes(n_max: int, amplitudes: dict[int, complex]) -> "SpectralField":
        """Build from {n: a_n} for n >= 0; negative modes are implied."""
        c = np.zeros(2 * n_max + 1, np.complex128)
        for n, a in amplitudes.items():
            if n < 0 or n > n_max:
                raise ValueError(f"mode {n} out of range 0..{n_max}")
            c[n_max + n] = a
            c[n_max - n] = np.conj(a)
        return SpectralField(c)

    @staticmethod
    def harmonic(n_max: int, mean: float = 0.0, *, cos: dict[int, float] | None = None,
                 sin: dict[int, float] | None = None) -> "SpectralField":
        """mean + sum_k cos[k]*cos(k theta) + sum_k sin[k]*sin(k theta)."""
        amp: dict[int, complex] = {0: mean}
        for k, a in (cos or {}).items():
            amp[k] = amp.get(k, 0.0) + a / 2.0
        for k, a in (sin or {}).items():
            amp[k] = amp.get(k, 0.0) - 1j * a / 2.0
        return SpectralField.from_modes(n_max, amp)

    @staticmethod
    def from_grid(values: np.ndarray, n_max: int) -> "SpectralField":
        """Least-squares band-limited interpolant of samples on a uniform grid."""
        values = np.asarray(values, dtype=np.float64)
        m = values.size
        if m < 2 * n_max + 1:
            raise ValueError("grid too coarse for requested truncation")
        spec = np.fft.fft(values) / m
        c = np.zeros(2 * n_max + 1, np.complex128)
        c[n_max:] = spec[: n_max + 1]
        c[:n_max] = spec[m - n_max :]
        return SpectralField(c)

    # ---- evaluation ---------------------------------------------------

    def grid_values(self, m: int | None = None) -> np.ndarray:
        """Real values on the uniform grid theta_k = 2 pi k / m."""
        n = self.n_max
        if m is None:
            m = max(4 * n, 16)
        if m < 2 * n + 1:
            raise ValueError("grid too coarse for this field")
        spec = np.zeros(m, np.complex128)
        spec[: n + 1] = self.coeffs[n:]
        spec[m - n :] = self.coeffs[:n]
        vals = np.fft.ifft(spec) * m
        scale = float(np.max(np.abs(vals))) or 1.0
        if np.max(np.abs(vals.imag)) > 1e-10 * scale:
            raise AssertionError("evaluation produced a non-real field")
        return vals.real

    def __call__(self, theta: np.ndarray | float) -> np.ndarray | float:
        theta = np.asarray(theta, dtype=np.float64)
        n = modes(self.n_max)
        vals = np.real(np.exp(1j * np.outer(theta, n)) @ self.coeffs)
        return vals if vals.size > 1 else float(vals[0])

    # ---- arithmetic ---------------------------------------------------

    def _check_same(self, other: "SpectralField"):
        if self.n_max != other.n_max:
            raise ValueError(
                f"truncation mismatch: N={self.n_max} vs N={other.n_max}"
            )

    def __add__(self, other):
        if isinstance(other, SpectralField):
            self._check_same(other)
            return SpectralField(self.coeffs + other.coeffs)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, SpectralField):
            self._check_same(other)
            return SpectralField(self.coeffs - other.coeffs)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, SpectralField):
            return multiply(self, other)
        if isinstance(other, (int, float)):
            return SpectralField(self.coeffs * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(-self.coeffs)

    def shift_mean(self, delta: float) -> "SpectralField":
        c = self.coeffs.copy()
        c[self.n_max] += delta
        return SpectralField(c)


# ---- operations --------------------------------------------------------


def derivative(f: SpectralField, order: int = 1) -> SpectralField:
    """order-th theta derivative; coefficient n maps to (i n)^order a_n."""
    if order < 1:
        raise ValueError("order must be >= 1")
    n = modes(f.n_max)
    return SpectralField((1j * n) ** order * f.coeffs)


def multiply(f: SpectralField, g: SpectralField) -> SpectralField:
    """Exact truncated convolution of two fields sharing the same N."""
    f._check_same(g)
    return SpectralField(conv_center(f.coeffs, g.coeffs, f.n_max))


def project_p0(f: SpectralField) -> SpectralField:
    """Projection onto span{cos(theta), sin(theta)} (modes n = +-1)."""
    c = np.zeros_like(f.coeffs)
    n = f.n_max
    c[n - 1] = f.coeffs[n - 1]
    c[n + 1] = f.coeffs[n + 1]
    return SpectralField(c)


def project_p1(f: SpectralField) -> SpectralField:
    """Complement of the mean and the first harmonic (zeroes n in {-1,0,1})."""
    c = f.coeffs.copy()
    n = f.n_max
    c[n - 1 : n + 2] = 0.0
    return SpectralField(c)


def sobolev_norm(f: SpectralField, k: int, homogeneous: bool = True) -> float:
    """Sobolev norm with the Parseval convention ||sin theta||_{L2} = sqrt(pi).

    homogeneous: sqrt(2 pi sum_{n != 0} n^{2k} |a_n|^2)
    full:        sqrt(2 pi sum_n (1 + n^2)^k |a_n|^2)
    """
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise ValueError("k must be a non-negative integer")
    if k > 2 * f.n_max:
        raise ValueError(f"norm order k={k} exceeds resolution 2N={2 * f.n_max}")
    n = modes(f.n_max)
    mag2 = np.abs(f.coeffs) ** 2
    if homogeneous:
        w = np.where(n == 0, 0.0, np.abs(n, dtype=float) ** (2 * k))
    else:
        w = (1.0 + n.astype(float) ** 2) ** k
    return float(np.sqrt(2.0 * np.pi * np.sum(w * mag2)))


def linear_symbol(n: int | np.ndarray, c: float) -> float | np.ndarray:
    """Fourier symbol -c^3 (n^4 - n^2) of the linearization around h = c."""
    n = np.asarray(n, dtype=float)
    out = -(c**3) * (n**4 - n**2)
    return out if out.ndim else float(out)


def reality_defect(f: SpectralField) -> float:
    """max |a_{-n} - conj(a_n)|; zero by construction, kept as a diagnostic."""
    return float(np.max(np.abs(f.coeffs - np.conj(f.coeffs[::-1]))))


# ---- snapshot I/O -------------------------------------------------------


def write_snapshot(f: SpectralField, path) -> None:
    """Binary snapshot: 'TFLM', u32 version, u32 N, then (re, im) f64 pairs."""
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<II", SNAPSHOT_VERSION, f.n_max))
        pairs = np.empty((f.coeffs.size, 2), np.float64)
        pairs[:, 0] = f.coeffs.real
        pairs[:, 1] = f.coeffs.imag
        fh.write(pairs.astype("<f8").tobytes())


def read_snapshot(path) -> SpectralField:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"bad snapshot magic {magic!r}")
        version, n_max = struct.unpack("<II", fh.read(8))
        if version != SNAPSHOT_VERSION:
            raise ValueError(f"unsupported snapshot version {version}")
        raw = np.frombuffer(fh.read(16 * (2 * n_max + 1)), dtype="<f8")
        pairs = raw.reshape(2 * n_max + 1, 2)
        return SpectralField(pairs[:, 0] + 1j * pairs[:, 1])


def write_coeffs_csv(f: SpectralField, path) -> None:
    """CSV export with columns n, re, im."""
    with open(path, "w") as fh:
        fh.write("n,re,im\n")
        for n, a in zip(modes(f.n_max), f.coeffs):
            fh.write(f"{n},{a.real:.17g},{a.imag:.17g}\n")
