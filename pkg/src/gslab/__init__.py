"""Exact construction and p-adic verification of Gross-Stark units over
real quadratic fields."""

from .quadfield import (
    FieldElem,
    Ideal,
    QuadField,
    RayClassGroup,
    UnitData,
    choose_pi,
    find_good_eta,
    is_totally_positive,
    make_field,
    primes_above,
    ray_class_group,
    unit_data,
)

__all__ = [
    "FieldElem",
    "Ideal",
    "QuadField",
    "RayClassGroup",
    "UnitData",
    "choose_pi",
    "find_good_eta",
    "is_totally_positive",
    "make_field",
    "primes_above",
    "ray_class_group",
    "unit_data",
]

__version__ = "0.1.0"
