"""Pydantic models for every artifact that leaves the library as JSON."""
import enum
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator


class PairMatrixArtifact(BaseModel):
    kind: str
    n: int
    pairs: list[list[int]]
    entries: list[list[int]]


class SnfResult(BaseModel):
    """Invariant factors in computation order: nonzero chain, then zeros."""

    invariant_factors: list[int]
    left: list[list[int]] | None = Field(default=None, exclude=True)
    right: list[list[int]] | None = Field(default=None, exclude=True)

    @property
    def rank(self) -> int:
        return sum(1 for f in self.invariant_factors if f != 0)

    def zeros_first(self) -> list[int]:
        """Zeros first, then the divisibility chain."""
        nonzero = [f for f in self.invariant_factors if f != 0]
        return [0] * (len(self.invariant_factors) - len(nonzero)) + nonzero


class Inertia(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_zero: int
    n_plus: int
    n_minus: int

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.n_zero, self.n_plus, self.n_minus)


class CharPoly(BaseModel):
    """Monic polynomial, coefficients from the highest degree down."""

    coefficients: list[int]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coefficients):
            if c == 0:
                continue
            power = self.degree - k
            mag = abs(c)
            body = "" if mag == 1 and power else str(mag)
            if power:
                body += "x" if power == 1 else f"x^{power}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


class ChoicePolicy(BaseModel):
    """How the basis traversal breaks ties between candidate vertices of LG(T)."""

    model_config = ConfigDict(frozen=True)

    mode: Literal["min", "max", "random"] = "min"
    seed: int = 0


class BlockContribution(BaseModel):
    block_internal_vertex: int
    step: Literal["2c", "3b", "star"]
    pairs: list[tuple[int, int]]


class BasisSet(BaseModel):
    start_leaf: int
    policy: ChoicePolicy
    pairs: list[tuple[int, int]]
    provenance: list[BlockContribution]

    def key(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.pairs)


class CheckId(str, enum.Enum):
    T1_RANK = "T1-rank"
    T4D_DET = "T2/T4d-det"
    T3_SNF = "T3-snf"
    T4A_UNIQUE = "T4a-unique"
    T4B_SIZE = "T4b-size"
    T4C_SPAN = "T4c-span"
    T5_INERTIA = "T5-inertia"
    L1_PENDANT_ROW = "L1-pendant-row"
    L2_COMPONENT_SPLIT = "L2-component-split"
    C1_SIBLING_LEAF = "C1-sibling-leaf"
    STAR_DET = "STAR-det"
    STAR_EIGEN = "STAR-eigen"
    FPC_MAX2 = "FPC-max2"
    PARITY_STEINER = "PARITY-steiner"


class Witness(BaseModel):
    n: int
    prufer: list[int]
    indices: list[Any] = []
    expected: Any = None
    computed: Any = None
    detail: str = ""


class TheoremCheck(BaseModel):
    id: CheckId
    status: Literal["pass", "fail"]
    expected: Any = None
    computed: Any = None
    witness: Witness | None = None
    elapsed_ms: float = Field(default=0.0, exclude=True)

    @property
    def passed(self) -> bool:
        return self.status == "pass"


class SampleSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=2)
    count: int = Field(ge=0)
    seed: int

    @classmethod
    def parse(cls, text: str) -> "SampleSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"sample spec must be n:count:seed, got {text!r}")
        n, count, seed = (int(p) for p in parts)
        return cls(n=n, count=count, seed=seed)


class CorpusSpec(BaseModel):
    max_exhaustive_n: int = Field(ge=0)
    samples: list[SampleSpec] = []

    @field_validator("max_exhaustive_n")
    @classmethod
    def _bounded(cls, value: int) -> int:
        if value > 9:
            raise ValueError("exhaustive sweeps beyond n=9 are not supported")
        return value


class CheckTally(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    id: CheckId
    passed: int = Field(default=0, serialization_alias="pass")
    failed: int = Field(default=0, serialization_alias="fail")
    witnesses: list[Witness] = []


class SnfObservation(BaseModel):
    n: int
    prufer: list[int]
    formula: list[int]
    computed: list[int]


class VerifyReport(BaseModel):
    corpus: CorpusSpec
    trees_checked: int
    checks: list[CheckTally]
    failures: int
    snf_base_case: list[SnfObservation] = []
    timing_ms: dict[str, float] = {}

    def to_json(self, include_timing: bool = False) -> str:
        exclude = None if include_timing else {"timing_ms"}
        return self.model_dump_json(by_alias=True, exclude=exclude, indent=2)
