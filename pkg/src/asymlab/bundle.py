"""Single-document instance bundles with string-id cross references.

::

    {
      "norms":       {"u": {"dim": 1, "generators": [[1]]}},
      "spaces":      {"T": {"points": ["a", "b"], "matrix": [[0, 1], [2, 0]]}},
      "operators":   {"A": {"matrix": [[-1]], "domain": "u", "codomain": "u"}},
      "functionals": {"phi": {"covector": [1]}},
      "point_sets":  {"Y": {"space": "u", "points": [0, 1, 2, 3]}},
      "sequences":   {"s": {"space": "u", "points": [...], "witness_pool": [...]}}
    }

Every section is optional.  A ``space`` reference names either a norm (the
induced quasi-metric ``p(y - x)``) or a tabular space; operator norms must be
references into ``norms``.
"""
import json

from ._validation import check_exact_keys
from .duality import functional_from_json
from .errors import InvalidInstance, UnresolvedReference
from .norms import PolyAsymNorm
from .operators import LinOperator
from .quasimetric import InducedQuasiMetric, TabularQuasiMetric
from .sequences import SequencePrefix

SECTIONS = ("norms", "spaces", "operators", "functionals", "point_sets", "sequences")


class InstanceBundle:
    """Parsed bundle; every section is a dict ordered by id."""

    def __init__(self, doc):
        check_exact_keys(doc, (), SECTIONS, what="bundle")
        for name in SECTIONS:
            if not isinstance(doc.get(name, {}), dict):
                raise InvalidInstance(f"section {name!r} must map ids to objects")
        raw = {name: dict(sorted(doc.get(name, {}).items())) for name in SECTIONS}
        self.norms = {k: PolyAsymNorm.from_json(v) for k, v in raw["norms"].items()}
        self.spaces = {k: TabularQuasiMetric.from_json(v) for k, v in raw["spaces"].items()}
        clash = set(self.norms) & set(self.spaces)
        if clash:
            raise InvalidInstance(f"ids used for both a norm and a space: {sorted(clash)}")
        self.operators = {k: LinOperator.from_json(v, self.norm)
                          for k, v in raw["operators"].items()}
        self.functionals = {k: functional_from_json(v) for k, v in raw["functionals"].items()}
        self.point_sets = {}
        for k, v in raw["point_sets"].items():
            check_exact_keys(v, ("space", "points"), what=f"point set {k!r}")
            space = self.space(v["space"])
            self.point_sets[k] = (v["space"], space, space.coerce(v["points"]))
        self.sequences = {}
        for k, v in raw["sequences"].items():
            check_exact_keys(v, ("space", "points"), ("witness_pool",), what=f"sequence {k!r}")
            space = self.space(v["space"])
            self.sequences[k] = SequencePrefix(space, v["points"], v.get("witness_pool"))

    @classmethod
    def from_text(cls, text):
        return cls(json.loads(text))

    @classmethod
    def empty(cls):
        return cls({})

    def norm(self, ref):
        if not isinstance(ref, str):
            raise InvalidInstance("norm references must be string ids")
        try:
            return self.norms[ref]
        except KeyError:
            raise UnresolvedReference(f"unknown norm id {ref!r}") from None

    def space(self, ref):
        if not isinstance(ref, str):
            raise InvalidInstance("space references must be string ids")
        if ref in self.norms:
            return InducedQuasiMetric(self.norms[ref])
        if ref in self.spaces:
            return self.spaces[ref]
        raise UnresolvedReference(f"unknown space id {ref!r}")
