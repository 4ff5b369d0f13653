"""
Pydantic models for the JSON input/output formats.

PointSet:  {"n": 2, "points": [[x, y], ...]}
FiniteFn:  {"n": 2, "terms": [{"p": [x, y], "c": "num/den"}, ...]}
Polygon:   {"vertices": [["x", "y"], ...]}   (ints or "num/den" strings)

Rationals travel as "num/den" strings ("3" for integers), never floats.
"""

from typing import List, Union

from pydantic import BaseModel, Field, field_validator, model_validator

from app.errors import InputError
from app.utils.finite_functions import FiniteFn, PointSet, finite_fn, point_set
from app.utils.lattice_geometry import Polygon, convex_hull
from app.utils.linear_algebra import format_rat, to_rat

RatText = Union[int, str]


def _check_rational(value: RatText) -> RatText:
    if isinstance(value, float):
        raise ValueError("rationals must be ints or 'num/den' strings, not floats")
    try:
        to_rat(value)
    except InputError as e:
        raise ValueError(str(e)) from e
    return value


class PointSetIn(BaseModel):
    n: int = Field(ge=1)
    points: List[List[int]] = Field(min_length=1)

    @model_validator(mode="after")
    def _arity(self):
        for p in self.points:
            if len(p) != self.n:
                raise ValueError(f"point {p} does not have arity {self.n}")
        if len({tuple(p) for p in self.points}) != len(self.points):
            raise ValueError("point set contains duplicates")
        return self

    def to_domain(self) -> PointSet:
        return point_set(self.points, self.n)


class TermIn(BaseModel):
    p: List[int]
    c: RatText

    @field_validator("c", mode="before")
    @classmethod
    def _rational(cls, value):
        return _check_rational(value)


class FiniteFnIn(BaseModel):
    n: int = Field(ge=1)
    terms: List[TermIn]

    @model_validator(mode="after")
    def _arity(self):
        for t in self.terms:
            if len(t.p) != self.n:
                raise ValueError(f"point {t.p} does not have arity {self.n}")
        return self

    def to_domain(self) -> FiniteFn:
        return finite_fn([(t.p, to_rat(t.c)) for t in self.terms], self.n)


class PolygonIn(BaseModel):
    vertices: List[List[RatText]] = Field(min_length=1)

    @field_validator("vertices", mode="before")
    @classmethod
    def _coordinates(cls, value):
        for v in value:
            if len(v) != 2:
                raise ValueError(f"vertex {v} is not planar")
            for c in v:
                _check_rational(c)
        return value

    def to_domain(self) -> Polygon:
        return convex_hull((to_rat(x), to_rat(y)) for x, y in self.vertices)


def point_set_json(A: PointSet) -> dict:
    return {"n": A.n, "points": [list(p) for p in A.points]}


def finite_fn_json(f: FiniteFn) -> dict:
    return {"n": f.n, "terms": [{"p": list(p), "c": format_rat(c)} for p, c in f.terms]}


def polygon_json(P: Polygon) -> dict:
    return {"vertices": [[format_rat(x), format_rat(y)] for x, y in P.vertices]}


class JobConfig(BaseModel):
    """One validated CLI invocation."""
    command: str
    inputs: List[str] = Field(default_factory=list)
    order: str
    d_schedule: str
    max_2vol: int = Field(ge=0)
    use_cache: bool = True
    output_format: str
    strict: bool = False
    seed: int = 0
    cases: int = Field(default=12, ge=1)
    svg: Union[str, None] = None

    @model_validator(mode="after")
    def _format(self):
        allowed = {
            "staircase": {"json", "svg"},
            "spoly": {"json", "csv", "svg"},
            "seshadri": {"json", "text"},
            "atlas": {"csv", "json"},
            "verify-pr": {"json", "text"},
            "check": {"json", "text"},
        }
        if self.command not in allowed:
            raise ValueError(f"unknown command {self.command!r}")
        if self.output_format not in allowed[self.command]:
            raise ValueError(f"{self.command} does not support --format {self.output_format}")
        return self
