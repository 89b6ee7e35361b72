"""Arithmetic in GF(p^k) for odd primes p.

Elements are coefficient vectors over GF(p) in the polynomial basis
1, x, ..., x^(k-1), reduced by a monic irreducible modulus. The integer
index of an element is sum(c_m * p^m), which is also galois' integer
representation; the MUB construction uses it as the computational-basis
label.
"""

import logging
from functools import lru_cache
from typing import Dict, Iterator, Tuple, Type

import galois
import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationInfo, field_validator, model_validator

from .errors import FieldMismatchError, UnsupportedDimensionError

logger = logging.getLogger(__name__)

# monic moduli, lowest coefficient first
DEFAULT_MODULI: Dict[int, Tuple[int, ...]] = {
    9: (1, 0, 1),  # x^2 + 1
    25: (2, 0, 1),  # x^2 + 2
}


def is_prime(n: int) -> bool:
    return n >= 2 and bool(galois.is_prime(n))


def _as_ints(values) -> np.ndarray:
    return np.asarray(values.view(np.ndarray), dtype=np.int64)


class FieldSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: int
    k: int
    modulus: Tuple[int, ...]

    @field_validator("p")
    @classmethod
    def _odd_prime(cls, p: int) -> int:
        if not is_prime(p) or p < 3:
            raise ValueError(f"characteristic must be an odd prime, got {p}")
        return p

    @model_validator(mode="after")
    def _irreducible(self):
        if self.k < 1:
            raise ValueError("extension degree must be at least 1")
        if len(self.modulus) != self.k + 1 or self.modulus[-1] % self.p != 1:
            raise ValueError(f"modulus must be monic of degree {self.k}")
        if not self.modulus_poly().is_irreducible():
            raise ValueError(f"modulus {self.modulus} is reducible over GF({self.p})")
        return self

    @property
    def order(self) -> int:
        return self.p**self.k

    def modulus_poly(self) -> galois.Poly:
        # galois lists coefficients highest degree first
        return galois.Poly([c % self.p for c in reversed(self.modulus)], field=galois.GF(self.p))

    def field(self) -> Type[galois.FieldArray]:
        return _field_class(self)

    def element(self, coeffs) -> "FieldElement":
        return FieldElement(spec=self, coeffs=tuple(coeffs))

    def from_index(self, index: int) -> "FieldElement":
        coeffs = []
        for _ in range(self.k):
            index, c = divmod(index, self.p)
            coeffs.append(c)
        return self.element(coeffs)

    def zero(self) -> "FieldElement":
        return self.element((0,) * self.k)

    def one(self) -> "FieldElement":
        return self.element((1,) + (0,) * (self.k - 1))

    def elements(self) -> Iterator["FieldElement"]:
        for index in range(self.order):
            yield self.from_index(index)

    def all_values(self) -> galois.FieldArray:
        """Every element as one galois array, in index order."""
        return self.field()(np.arange(self.order))


@lru_cache(maxsize=None)
def _field_class(spec: FieldSpec) -> Type[galois.FieldArray]:
    if spec.k == 1:
        return galois.GF(spec.p)
    logger.debug(f"Building GF({spec.p}^{spec.k}) with modulus {spec.modulus}")
    return galois.GF(spec.order, irreducible_poly=spec.modulus_poly())


class FieldElement(BaseModel):
    model_config = ConfigDict(frozen=True)

    spec: FieldSpec
    coeffs: Tuple[int, ...]

    @field_validator("coeffs", mode="before")
    @classmethod
    def _reduce_mod_p(cls, value, info: ValidationInfo):
        spec = info.data.get("spec")
        if spec is None:
            return value
        return tuple(int(c) % spec.p for c in value)

    @model_validator(mode="after")
    def _coefficient_count(self):
        if len(self.coeffs) != self.spec.k:
            raise ValueError(f"expected {self.spec.k} coefficients, got {len(self.coeffs)}")
        return self

    @property
    def index(self) -> int:
        return sum(c * self.spec.p**m for m, c in enumerate(self.coeffs))

    @property
    def value(self) -> galois.FieldArray:
        return self.spec.field()(self.index)

    def _wrap(self, value: galois.FieldArray) -> "FieldElement":
        return self.spec.from_index(int(value))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _check(self, other: "FieldElement") -> None:
        if self.spec != other.spec:
            raise FieldMismatchError(
                f"GF({self.spec.p}^{self.spec.k}) element combined with "
                f"GF({other.spec.p}^{other.spec.k}) element"
            )

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return self._wrap(self.value + other.value)

    def __neg__(self) -> "FieldElement":
        return self._wrap(-self.value)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return self._wrap(self.value - other.value)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        return self._wrap(self.value * other.value)

    def __pow__(self, exponent: int) -> "FieldElement":
        return self._wrap(self.value**exponent)

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroDivisionError("zero has no multiplicative inverse")
        return self._wrap(np.reciprocal(self.value))

    def frobenius(self) -> "FieldElement":
        return self**self.spec.p


def gf_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def gf_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def gf_trace(a: FieldElement) -> int:
    """Absolute trace a + a^p + ... + a^(p^(k-1)), an element of GF(p)."""
    return int(a.value.field_trace())


def field_for_dimension(d: int) -> FieldSpec:
    """Default field of order ``d`` (an odd prime or an odd prime power with a tabulated modulus)."""
    if is_prime(d) and d >= 3:
        return FieldSpec(p=d, k=1, modulus=(0, 1))
    if d in DEFAULT_MODULI:
        modulus = DEFAULT_MODULI[d]
        k = len(modulus) - 1
        return FieldSpec(p=round(d ** (1 / k)), k=k, modulus=modulus)
    supported = sorted({q for q in range(3, 26) if is_prime(q)} | set(DEFAULT_MODULI))
    raise UnsupportedDimensionError(d, supported)


class FieldTables(BaseModel):
    """Integer lookup tables indexed by element index."""

    model_config = ConfigDict(frozen=True)

    spec: FieldSpec
    mul: Tuple[Tuple[int, ...], ...]
    trace: Tuple[int, ...]


def build_tables(spec: FieldSpec) -> FieldTables:
    x = spec.all_values()
    mul = _as_ints(x[:, np.newaxis] * x[np.newaxis, :])
    trace = _as_ints(x.field_trace())
    logger.debug(f"Built GF({spec.p}^{spec.k}) tables with {spec.order} elements")
    return FieldTables(
        spec=spec,
        mul=tuple(tuple(row) for row in mul.tolist()),
        trace=tuple(trace.tolist()),
    )


def is_field(spec: FieldSpec) -> bool:
    """Exhaustive check that every nonzero element has an inverse."""
    nonzero = spec.all_values()[1:]
    products = _as_ints(nonzero[:, np.newaxis] * nonzero[np.newaxis, :])
    return bool(np.all(np.any(products == 1, axis=1)))


def frobenius_is_automorphism(spec: FieldSpec) -> bool:
    x = spec.all_values()
    p = spec.p
    if len(np.unique(_as_ints(x**p))) != spec.order:
        return False
    a, b = x[:, np.newaxis], x[np.newaxis, :]
    additive = (a + b) ** p == a**p + b**p
    multiplicative = (a * b) ** p == a**p * b**p
    return bool(np.all(additive) and np.all(multiplicative))
