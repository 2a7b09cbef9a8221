"""
Record, result and diagnostic models
"""

from fractions import Fraction
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_serializer

from services.concepts import TOP, ConceptExpr
from utils import json_number


# ---------- Type Definitions ----------

Zone = Literal["Equivalent", "MorePrecise", "LessPrecise", "Distant"]
ComparisonValue = Literal[-1, 0, 1]
PartyKind = Literal["offer", "demand"]
SourceKind = Literal["ontology", "parties", "weights"]
Severity = Literal["error", "warning"]

# zone precedence, best first
ZONE_PRECEDENCE: Dict[str, int] = {"Equivalent": 3, "MorePrecise": 2, "LessPrecise": 1, "Distant": 0}


# ---------- Input Schemas ----------

class SourceDocument(BaseModel):
    """A UTF-8 text input"""
    path: Optional[str] = Field(None, description="File path, if read from disk")
    text: str = Field(..., description="Document contents")
    kind: SourceKind = Field(..., description="ontology, parties or weights")

    def lines(self) -> List[str]:
        return self.text.splitlines()


class PartyRecord(BaseModel):
    """An offer or demand in component form"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str = Field(..., description="Party identifier")
    kind: PartyKind = Field(..., description="offer or demand")
    fillers: Dict[str, ConceptExpr] = Field(default_factory=dict, description="Component role → projection")
    line: Optional[int] = Field(None, description="Source line of the definition")

    def filler(self, role: str) -> ConceptExpr:
        return self.fillers.get(role, TOP)

    @field_serializer("fillers")
    def _render_fillers(self, fillers: Dict[str, ConceptExpr]) -> Dict[str, str]:
        return {role: expr.text for role, expr in fillers.items()}


class WeightTable(BaseModel):
    """Positive component weights; unlisted components weigh 1"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    weights: Dict[str, Fraction] = Field(default_factory=dict, description="Component role → weight")

    def weight(self, role: str) -> Fraction:
        return self.weights.get(role, Fraction(1))

    @field_serializer("weights")
    def _render_weights(self, weights: Dict[str, Fraction]) -> Dict[str, Union[int, str]]:
        return {role: json_number(value) for role, value in weights.items()}


# ---------- Result Schemas ----------

class ComponentEvaluation(BaseModel):
    """One offer projection measured against the demand projection"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    role: str = Field(..., description="Component role")
    offer: str = Field(..., description="Offer name")
    zone: Zone = Field(..., description="Position of the offer projection relative to the demand projection")
    demand_projection: ConceptExpr = Field(..., description="Reduced demand filler")
    offer_projection: ConceptExpr = Field(..., description="Reduced offer filler")
    lcs: ConceptExpr = Field(..., description="Least common subsumer of both projections")
    rest: ConceptExpr = Field(..., description="Demand part the offer leaves unmet")
    miss: ConceptExpr = Field(..., description="Offer part the demand did not ask for")
    rest_length: int = Field(..., description="Syntactic length of rest")
    miss_length: int = Field(..., description="Syntactic length of miss")
    demand_existing: bool = Field(..., description="Demand filler is not Top")
    offer_existing: bool = Field(..., description="Offer filler is not Top")

    @field_serializer("demand_projection", "offer_projection", "lcs", "rest", "miss")
    def _render_expr(self, expr: ConceptExpr) -> str:
        return expr.text


class ComponentTrace(BaseModel):
    """φ of one ordered offer pair on one component, with its evidence"""
    first: str = Field(..., description="First offer")
    second: str = Field(..., description="Second offer")
    role: str = Field(..., description="Component role")
    phi: ComparisonValue = Field(..., description="1 when first is better, -1 when second is")
    first_zone: Optional[Zone] = Field(None, description="Zone of the first offer")
    second_zone: Optional[Zone] = Field(None, description="Zone of the second offer")
    first_rest: Optional[str] = None
    first_miss: Optional[str] = None
    second_rest: Optional[str] = None
    second_miss: Optional[str] = None


class RankedOffer(BaseModel):
    """One line of the ranking"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    rank: int = Field(..., description="Competition rank, 1-based")
    name: str = Field(..., description="Offer name")
    score: Fraction = Field(..., description="Relative concordance score")

    @field_serializer("score")
    def _render_score(self, score: Fraction) -> Union[int, str]:
        return json_number(score)


class PairwiseScore(BaseModel):
    """c(x, y): weighted sum of φ over all components"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    first: str = Field(..., description="Offer x")
    second: str = Field(..., description="Offer y")
    value: Fraction = Field(..., description="Weighted vote of x over y")

    @field_serializer("value")
    def _render_value(self, value: Fraction) -> Union[int, str]:
        return json_number(value)


class RankingResult(BaseModel):
    """Ranked recommendations for one demand"""
    demand: str = Field(..., description="Demand name")
    ranked: List[RankedOffer] = Field(default_factory=list, description="Score descending, then name")
    excluded: List[str] = Field(default_factory=list, description="Offers sharing no existing component")
    trace: List[ComponentTrace] = Field(default_factory=list, description="φ per offer pair and component")
    # offer → component role → unweighted Σ φ
    component_scores: Dict[str, Dict[str, int]] = Field(default_factory=dict)
    pairwise: List[PairwiseScore] = Field(default_factory=list, description="c(x, y) per ordered pair")

    def score_of(self, name: str) -> Fraction:
        for entry in self.ranked:
            if entry.name == name:
                return entry.score
        raise KeyError(name)


class Diagnostic(BaseModel):
    """A located error or warning"""
    severity: Severity = Field(..., description="error or warning")
    line: int = Field(0, description="1-based line, 0 when unknown")
    column: int = Field(0, description="1-based column, 0 when unknown")
    message: str = Field(..., description="Human-readable explanation")
    code: str = Field(..., description="Stable upper-snake error code")

    def format(self, path: Optional[str] = None) -> str:
        where = f"{path}:" if path else ""
        return f"{where}{self.line}:{self.column}: {self.severity} {self.code}: {self.message}"
