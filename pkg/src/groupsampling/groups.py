"""Finite abelian groups: arithmetic, duality, Fourier analysis, convolution.

A group is an explicit product of cyclic factors Z_s1 x ... x Z_sd.  Elements
are coordinate tuples reduced modulo the factor orders and are enumerated in
mixed-radix row-major order (last coordinate fastest).  The dual group is
identified with the group itself through character indexing, so Fourier
transforms map sequences on the group to sequences on the same index set.

Conventions, fixed once for the whole package:
  - forward transform  x^(xi) = sum_h x(h) * conj(xi(h))   (no normalization)
  - inverse transform carries the 1/|H| factor
  - inner product      <x, y> = sum_h x(h) * conj(y(h))

Convolutions and inner products are evaluated with exactly rounded
(order-independent) summation so that algebraically equal regroupings of the
same sums agree bitwise.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .errors import GroupMismatchError

# Full subtraction tables are cached only below this order; larger groups
# recompute rows on the fly.
_SUB_TABLE_MAX_ORDER = 1024


def _fsum(values: np.ndarray) -> float:
    return math.fsum(values.tolist())


def exact_dot(a: np.ndarray, b: np.ndarray) -> complex:
    """Correctly rounded sum of a[k]*b[k], independent of summation order."""
    ar, ai = a.real, a.imag
    br, bi = b.real, b.imag
    re = math.fsum(np.concatenate([(ar * br).ravel(), (-(ai * bi)).ravel()]).tolist())
    im = math.fsum(np.concatenate([(ar * bi).ravel(), (ai * br).ravel()]).tolist())
    return complex(re, im)


def exact_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Correctly rounded sum of a[k]*conj(b[k])."""
    ar, ai = a.real, a.imag
    br, bi = b.real, b.imag
    re = math.fsum(np.concatenate([(ar * br).ravel(), (ai * bi).ravel()]).tolist())
    im = math.fsum(np.concatenate([(ai * br).ravel(), (-(ar * bi)).ravel()]).tolist())
    return complex(re, im)


def exact_norm_sq(a: np.ndarray) -> float:
    """Correctly rounded sum of |a[k]|^2."""
    ar, ai = a.real, a.imag
    return math.fsum(np.concatenate([(ar * ar).ravel(), (ai * ai).ravel()]).tolist())


@dataclass(frozen=True)
class GroupSpec:
    """A finite abelian group Z_s1 x ... x Z_sd given by its factor orders."""

    moduli: tuple[int, ...]

    def __post_init__(self) -> None:
        moduli = tuple(int(s) for s in self.moduli)
        if not moduli:
            raise ValueError("a group needs at least one cyclic factor")
        if any(s < 1 for s in moduli):
            raise ValueError(f"moduli must be >= 1, got {moduli}")
        object.__setattr__(self, "moduli", moduli)

    @cached_property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def ndim(self) -> int:
        return len(self.moduli)

    @cached_property
    def coords_array(self) -> np.ndarray:
        """(order, ndim) integer coordinates in mixed-radix row-major order."""
        grids = np.indices(self.moduli).reshape(self.ndim, -1)
        arr = np.ascontiguousarray(grids.T)
        arr.setflags(write=False)
        return arr

    def ravel(self, coords: np.ndarray) -> np.ndarray:
        """Indices of (possibly unreduced) coordinate rows."""
        reduced = np.mod(np.atleast_2d(coords), np.asarray(self.moduli))
        return np.ravel_multi_index(tuple(reduced.T), self.moduli)

    def element(self, coords: Sequence[int]) -> GroupElement:
        return GroupElement(self, tuple(coords))

    def identity(self) -> GroupElement:
        return GroupElement(self, (0,) * self.ndim)

    def element_at(self, index: int) -> GroupElement:
        return GroupElement(self, tuple(int(c) for c in self.coords_array[index]))

    def elements(self) -> Iterator[GroupElement]:
        for row in self.coords_array:
            yield GroupElement(self, tuple(int(c) for c in row))

    @cached_property
    def negation_perm(self) -> np.ndarray:
        perm = self.ravel(-self.coords_array)
        perm.setflags(write=False)
        return perm

    @cached_property
    def _subtraction_table(self) -> np.ndarray | None:
        if self.order > _SUB_TABLE_MAX_ORDER:
            return None
        diff = self.coords_array[:, None, :] - self.coords_array[None, :, :]
        table = self.ravel(diff.reshape(-1, self.ndim)).reshape(self.order, self.order)
        table.setflags(write=False)
        return table

    def subtraction_row(self, h: int) -> np.ndarray:
        """Indices of h - g for every g, in enumeration order."""
        table = self._subtraction_table
        if table is not None:
            return table[h]
        return self.ravel(self.coords_array[h] - self.coords_array)

    def translation_perm(self, t: int) -> np.ndarray:
        """Indices of g - t for every g; gathering with it implements T_t."""
        return self.ravel(self.coords_array - self.coords_array[t])


@dataclass(frozen=True)
class GroupElement:
    """An element of a :class:`GroupSpec`, stored with reduced coordinates."""

    group: GroupSpec
    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coords) != self.group.ndim:
            raise ValueError(
                f"expected {self.group.ndim} coordinates, got {len(self.coords)}")
        reduced = tuple(int(c) % s for c, s in zip(self.coords, self.group.moduli))
        object.__setattr__(self, "coords", reduced)

    @property
    def index(self) -> int:
        idx = 0
        for c, s in zip(self.coords, self.group.moduli):
            idx = idx * s + c
        return idx


def _same_group(a: GroupSpec, b: GroupSpec, what: str) -> None:
    if a != b:
        raise GroupMismatchError(f"{what}: {a.moduli} vs {b.moduli}")


def add(a: GroupElement, b: GroupElement) -> GroupElement:
    """Componentwise sum modulo the moduli."""
    _same_group(a.group, b.group, "cannot add elements of different groups")
    return GroupElement(a.group, tuple(x + y for x, y in zip(a.coords, b.coords)))


def neg(a: GroupElement) -> GroupElement:
    """Additive inverse."""
    return GroupElement(a.group, tuple(-x for x in a.coords))


def sub(a: GroupElement, b: GroupElement) -> GroupElement:
    _same_group(a.group, b.group, "cannot subtract elements of different groups")
    return GroupElement(a.group, tuple(x - y for x, y in zip(a.coords, b.coords)))


@dataclass(frozen=True)
class Character:
    """A character of a finite abelian group, indexed by a dual-group element."""

    index: GroupElement

    def __call__(self, h: GroupElement) -> complex:
        return character_value(self, h)


def character_value(xi: Character, h: GroupElement) -> complex:
    """Evaluate xi at h: exp(2*pi*i * sum_j h_j xi_j / s_j)."""
    _same_group(xi.index.group, h.group, "character and element on different groups")
    frac = 0.0
    for x, c, s in zip(xi.index.coords, h.coords, h.group.moduli):
        frac += ((x * c) % s) / s
    return cmath.exp(2j * cmath.pi * frac)


class GroupSequence:
    """A complex-valued function on a finite abelian group.

    Values are stored in the group's mixed-radix row-major enumeration order
    and are read-only after construction.
    """

    __slots__ = ("group", "values")

    def __init__(self, group: GroupSpec, values) -> None:
        arr = np.asarray(values, dtype=np.complex128).reshape(-1).copy()
        if arr.size != group.order:
            raise ValueError(
                f"expected {group.order} values for group {group.moduli}, got {arr.size}")
        arr.setflags(write=False)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name: str, value) -> None:
        raise AttributeError("GroupSequence is immutable")

    @classmethod
    def zeros(cls, group: GroupSpec) -> GroupSequence:
        return cls(group, np.zeros(group.order))

    @classmethod
    def delta(cls, group: GroupSpec, at: GroupElement | None = None) -> GroupSequence:
        values = np.zeros(group.order, dtype=np.complex128)
        values[(at or group.identity()).index] = 1.0
        return cls(group, values)

    def at(self, h: GroupElement) -> complex:
        _same_group(self.group, h.group, "evaluation point on a different group")
        return complex(self.values[h.index])

    def shift(self, t: GroupElement | int) -> GroupSequence:
        """Translate: (T_t x)(g) = x(g - t)."""
        idx = t if isinstance(t, int) else t.index
        return GroupSequence(self.group, self.values[self.group.translation_perm(idx)])

    def norm_sq(self) -> float:
        return exact_norm_sq(self.values)

    def norm(self) -> float:
        return math.sqrt(self.norm_sq())

    def inner(self, other: GroupSequence) -> complex:
        _same_group(self.group, other.group, "inner product across groups")
        return exact_inner(self.values, other.values)

    def __add__(self, other: GroupSequence) -> GroupSequence:
        _same_group(self.group, other.group, "cannot add sequences on different groups")
        return GroupSequence(self.group, self.values + other.values)

    def __sub__(self, other: GroupSequence) -> GroupSequence:
        _same_group(self.group, other.group, "cannot subtract sequences on different groups")
        return GroupSequence(self.group, self.values - other.values)

    def __mul__(self, scalar: complex) -> GroupSequence:
        return GroupSequence(self.group, self.values * scalar)

    __rmul__ = __mul__

    def to_json_dict(self) -> dict:
        return {
            "moduli": list(self.group.moduli),
            "re": self.values.real.tolist(),
            "im": self.values.imag.tolist(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> GroupSequence:
        group = GroupSpec(tuple(data["moduli"]))
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data.get("im", np.zeros_like(re)), dtype=float)
        return cls(group, re + 1j * im)

    def __repr__(self) -> str:
        return f"GroupSequence(moduli={self.group.moduli}, values={self.values!r})"


def dft(x: GroupSequence) -> GroupSequence:
    """Forward transform, unnormalized: x^(xi) = sum_h x(h) conj(xi(h))."""
    spread = np.fft.fftn(x.values.reshape(x.group.moduli))
    return GroupSequence(x.group, spread.reshape(-1))


def idft(x: GroupSequence) -> GroupSequence:
    """Inverse transform; carries the 1/|H| factor."""
    spread = np.fft.ifftn(x.values.reshape(x.group.moduli))
    return GroupSequence(x.group, spread.reshape(-1))


def convolve(a: GroupSequence, x: GroupSequence) -> GroupSequence:
    """(a * x)(h) = sum_{h'} a(h - h') x(h'), by exactly rounded brute force."""
    _same_group(a.group, x.group, "cannot convolve sequences on different groups")
    g = a.group
    out = np.empty(g.order, dtype=np.complex128)
    for h in range(g.order):
        out[h] = exact_dot(a.values[g.subtraction_row(h)], x.values)
    return GroupSequence(g, out)


def convolve_fft(a: GroupSequence, x: GroupSequence) -> GroupSequence:
    """Fourier-domain convolution; agrees with :func:`convolve` to round-off."""
    _same_group(a.group, x.group, "cannot convolve sequences on different groups")
    return idft(GroupSequence(a.group, dft(a).values * dft(x).values))


def involution(a: GroupSequence) -> GroupSequence:
    """a*(h) = conj(a(-h)); its transform is the conjugate of a's."""
    return GroupSequence(a.group, np.conj(a.values[a.group.negation_perm]))


@dataclass(frozen=True)
class ProductSubgroup:
    """A product-form (per-coordinate stride) subgroup d_1 Z_s1 x ... x d_d Z_sd.

    The abstract form of the subgroup is Z_{s1/d1} x ... x Z_{sd/dd}; the
    embedding multiplies each abstract coordinate by its stride.
    """

    parent: GroupSpec
    strides: tuple[int, ...]

    def __post_init__(self) -> None:
        strides = tuple(int(d) for d in self.strides)
        if len(strides) != self.parent.ndim:
            raise ValueError(
                f"expected {self.parent.ndim} strides, got {len(strides)}")
        for d, s in zip(strides, self.parent.moduli):
            if d < 1 or s % d != 0:
                raise ValueError(f"stride {d} does not divide modulus {s}")
        object.__setattr__(self, "strides", strides)

    @cached_property
    def index(self) -> int:
        """Number of cosets in the parent."""
        return math.prod(self.strides)

    @cached_property
    def abstract_group(self) -> GroupSpec:
        return GroupSpec(tuple(s // d for s, d in zip(self.parent.moduli, self.strides)))

    def embed(self, k: GroupElement) -> GroupElement:
        """Injective homomorphism from the abstract group into the parent."""
        _same_group(k.group, self.abstract_group, "element not in the abstract subgroup")
        return GroupElement(self.parent, tuple(d * c for d, c in zip(self.strides, k.coords)))

    @cached_property
    def embedding_indices(self) -> np.ndarray:
        """Parent index of the embedding of each abstract element, in order."""
        coords = self.abstract_group.coords_array * np.asarray(self.strides)
        idx = self.parent.ravel(coords)
        idx.setflags(write=False)
        return idx

    def refine(self, inner_strides: Sequence[int]) -> ProductSubgroup:
        """Subgroup of the parent whose abstract form is cut by further strides."""
        inner = tuple(int(e) for e in inner_strides)
        for e, s in zip(inner, self.abstract_group.moduli):
            if e < 1 or s % e != 0:
                raise ValueError(f"stride {e} does not divide abstract modulus {s}")
        return ProductSubgroup(self.parent, tuple(d * e for d, e in zip(self.strides, inner)))


def coset_representatives(sub: ProductSubgroup) -> list[GroupElement]:
    """One representative per coset, mixed-radix over residues 0..d_j-1."""
    residue_shape = GroupSpec(sub.strides)
    return [GroupElement(sub.parent, tuple(int(c) for c in row))
            for row in residue_shape.coords_array]
