"""Synthetic drifting data streams and CSV stream ingestion.

Four seedable generator families are provided, each emitting labelled
instances whose concept changes at scheduled positions:

* ``sine1``  - two uniform numeric attributes; positive when the point
  lies strictly under the sine curve; the rule flips at every drift.
* ``mixed``  - two boolean and two numeric attributes; positive when at
  least two of three conditions hold; the rule flips at every drift.
* ``circles`` - two numeric attributes; positive inside (boundary
  included) one of four circles of growing radius, one per concept.
* ``led``    - a digit on a seven-segment display among 24 binary
  attributes; drifts relocate the segment attributes.

Concept transitions are stochastic: near a drift position each instance
is drawn from the incoming concept with a sigmoid probability whose
slope is set by the transition length, which makes short transitions
abrupt and long ones gradual.  Class noise flips labels uniformly.

Generation is a pure function of (spec, seed): the single documented
PRNG is NumPy's 64-bit-seeded PCG64, whose output is stable across
platforms, and every random draw happens in a fixed documented order
(attributes, then one concept draw per drift position, then the noise
mask, then noise values).
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np
from scipy.special import expit

from .errors import DataFormatError, UsageError

NUMERIC = "numeric"
NOMINAL = "nominal"

DEFAULT_LENGTH = 100_000
DEFAULT_NOISE = 0.10

# Circle concepts: ((center_x, center_y), radius), one per concept.
CIRCLES = (
    ((0.2, 0.5), 0.15),
    ((0.4, 0.5), 0.20),
    ((0.6, 0.5), 0.25),
    ((0.8, 0.5), 0.30),
)

# Seven-segment encoding of the digits 0-9.
LED_SEGMENTS = np.array([
    [1, 1, 1, 0, 1, 1, 1],  # 0
    [0, 0, 1, 0, 0, 1, 0],  # 1
    [1, 0, 1, 1, 1, 0, 1],  # 2
    [1, 0, 1, 1, 0, 1, 1],  # 3
    [0, 1, 1, 1, 0, 1, 0],  # 4
    [1, 1, 0, 1, 0, 1, 1],  # 5
    [1, 1, 0, 1, 1, 1, 1],  # 6
    [1, 0, 1, 0, 0, 1, 0],  # 7
    [1, 1, 1, 1, 1, 1, 1],  # 8
    [1, 1, 1, 1, 0, 1, 1],  # 9
], dtype=np.int64)

LED_ATTRIBUTES = 24

# Attribute positions holding the seven segment bits, per concept.  The
# default layout starts at positions 0-6 and successive concepts swap
# 3, then 1, then 3 of them with previously irrelevant positions; a
# different reading of the drift magnitudes only needs a different
# layout tuple here (or per-spec via StreamSpec.led_layout).
LED_DEFAULT_LAYOUT = (
    (0, 1, 2, 3, 4, 5, 6),
    (7, 8, 9, 3, 4, 5, 6),
    (10, 8, 9, 3, 4, 5, 6),
    (11, 12, 13, 3, 4, 5, 6),
)

_INT_LABEL = re.compile(r"^\d+$")


@dataclass(frozen=True)
class ConceptSchedule:
    """Drift positions (0-based instance indices) and transition length."""

    positions: tuple[int, ...]
    transition: int

    def __post_init__(self):
        if self.transition < 1:
            raise UsageError(f"transition length must be >= 1, got {self.transition}")
        if any(b <= a for a, b in zip(self.positions, self.positions[1:])):
            raise UsageError("drift positions must be strictly increasing")

    @property
    def concepts(self) -> int:
        return len(self.positions) + 1


def default_schedule(family: str, length: int) -> ConceptSchedule:
    """The stock schedule: abrupt every 20k (sine1/mixed, transition 50),
    gradual every 25k (circles/led, transition 500)."""
    if family in ("sine1", "mixed"):
        return ConceptSchedule(tuple(range(20_000, length, 20_000)), 50)
    if family in ("circles", "led"):
        return ConceptSchedule(tuple(range(25_000, length, 25_000)), 500)
    raise UsageError(f"no default schedule for stream family {family!r}")


@dataclass(frozen=True)
class StreamSpec:
    """Recipe for one synthetic stream."""

    family: str
    length: int = DEFAULT_LENGTH
    noise: float = DEFAULT_NOISE
    schedule: Optional[ConceptSchedule] = None
    seed: int = 0
    led_layout: Optional[tuple[tuple[int, ...], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "family", self.family.lower())
        if self.family not in ("sine1", "mixed", "circles", "led"):
            raise UsageError(f"unknown stream family {self.family!r}")
        if self.length < 1:
            raise UsageError(f"stream length must be >= 1, got {self.length}")
        if not 0.0 <= self.noise < 1.0:
            raise UsageError(f"noise rate must lie in [0, 1), got {self.noise}")

    def resolved_schedule(self) -> ConceptSchedule:
        sched = self.schedule or default_schedule(self.family, self.length)
        if sched.positions and sched.positions[-1] >= self.length:
            raise UsageError(
                f"drift position {sched.positions[-1]} is beyond the stream "
                f"length {self.length}")
        return sched


@dataclass(frozen=True)
class StreamSchema:
    """Attribute layout of a stream."""

    names: tuple[str, ...]
    kinds: tuple[str, ...]           # NUMERIC or NOMINAL per attribute
    cardinalities: tuple[int, ...]   # nominal value count, 0 for numeric
    n_classes: int


@dataclass(frozen=True)
class LabeledInstance:
    """One stream element: attributes, class label, stream position."""

    position: int
    attributes: tuple
    label: int
    true_concept: Optional[int] = None


@dataclass
class Stream:
    """A materialised stream: attribute matrix, labels, and ground truth.

    ``X`` stores every attribute as float64 (nominal attributes hold
    integer codes).  ``drift_positions`` and ``concepts`` are harness
    ground truth; CSV streams have no such truth and leave them empty.
    ``y_clean`` holds the pre-noise labels of synthetic streams.
    """

    name: str
    X: np.ndarray
    y: np.ndarray
    schema: StreamSchema
    drift_positions: tuple[int, ...] = ()
    transition: int = 1
    concepts: Optional[np.ndarray] = None
    y_clean: Optional[np.ndarray] = None
    seed: Optional[int] = None

    def __len__(self) -> int:
        return self.y.shape[0]

    def instances(self) -> Iterator[LabeledInstance]:
        kinds = self.schema.kinds
        for t in range(len(self)):
            row = self.X[t]
            attrs = tuple(
                float(row[j]) if kinds[j] == NUMERIC else int(row[j])
                for j in range(len(kinds)))
            concept = None if self.concepts is None else int(self.concepts[t])
            yield LabeledInstance(t, attrs, int(self.y[t]), concept)


def drift_probability(t, t0, zeta: int):
    """Probability that instance ``t`` is drawn from the post-drift concept.

    A sigmoid centred on the drift position ``t0`` with slope 4/zeta, so
    the transition effectively spans about ``zeta`` instances.  Accepts
    scalars or arrays.
    """
    if zeta < 1:
        raise UsageError(f"transition length must be >= 1, got {zeta}")
    t = np.asarray(t, dtype=np.float64)
    out = expit(4.0 * (t - t0) / zeta)
    return float(out) if out.ndim == 0 else out


def sine1_label(x: float, y: float, concept: int) -> int:
    """1 when (x, y) lies strictly under sin(x); flipped on odd concepts."""
    under = y < math.sin(x)
    return int(under ^ (concept % 2 == 1))


def mixed_label(v: int, w: int, x: float, y: float, concept: int) -> int:
    """1 when at least two of {v, w, y < 0.5 + 0.3 sin(3 pi x)} hold;
    flipped on odd concepts."""
    conditions = int(bool(v)) + int(bool(w)) + int(y < 0.5 + 0.3 * math.sin(3.0 * math.pi * x))
    return int((conditions >= 2) ^ (concept % 2 == 1))


def circles_label(x: float, y: float, concept: int) -> int:
    """1 when (x, y) lies inside concept's circle, boundary included."""
    if not 0 <= concept < len(CIRCLES):
        raise UsageError(f"circles supports concepts 0..3, got {concept}")
    (cx, cy), r = CIRCLES[concept]
    return int((x - cx) ** 2 + (y - cy) ** 2 <= r * r)


def led_emit(rng: np.random.Generator, concept: int,
             layout: Sequence[Sequence[int]] = LED_DEFAULT_LAYOUT) -> LabeledInstance:
    """Draw one LED instance: a uniform digit whose seven segment bits sit
    at the concept's positions, every other attribute uniform random."""
    if not 0 <= concept < len(layout):
        raise UsageError(f"led layout defines concepts 0..{len(layout) - 1}, "
                         f"got {concept}")
    digit = int(rng.integers(0, 10))
    attrs = rng.integers(0, 2, size=LED_ATTRIBUTES)
    attrs[list(layout[concept])] = LED_SEGMENTS[digit]
    return LabeledInstance(0, tuple(int(a) for a in attrs), digit, concept)


def _concept_draws(n: int, schedule: ConceptSchedule, rng: np.random.Generator) -> np.ndarray:
    """Active concept index per instance; one Bernoulli draw per drift.

    A scheduled position marks where the transition to the incoming
    concept begins: the sigmoid midpoint sits half a transition length
    after it, so instances before the position are effectively pure old
    concept and the mix is complete about one transition length later.
    """
    t = np.arange(n, dtype=np.float64)
    concept = np.zeros(n, dtype=np.int64)
    for pos in schedule.positions:
        p = expit(4.0 * (t - (pos + 0.5 * schedule.transition)) / schedule.transition)
        concept += rng.random(n) < p
    return concept


def _binary_noise(y: np.ndarray, noise: float, rng: np.random.Generator) -> np.ndarray:
    flip = rng.random(y.shape[0]) < noise
    return np.where(flip, 1 - y, y)


def generate_stream(spec: StreamSpec) -> Stream:
    """Materialise the synthetic stream described by ``spec``."""
    schedule = spec.resolved_schedule()
    rng = np.random.default_rng(spec.seed)
    n = spec.length
    family = spec.family

    if family == "sine1":
        xy = rng.random((n, 2))
        concept = _concept_draws(n, schedule, rng)
        base = (xy[:, 1] < np.sin(xy[:, 0])).astype(np.int64)
        y_clean = base ^ (concept % 2)
        y = _binary_noise(y_clean, spec.noise, rng)
        schema = StreamSchema(("x", "y"), (NUMERIC, NUMERIC), (0, 0), 2)
        X = xy

    elif family == "mixed":
        vw = rng.integers(0, 2, size=(n, 2))
        xy = rng.random((n, 2))
        concept = _concept_draws(n, schedule, rng)
        third = xy[:, 1] < 0.5 + 0.3 * np.sin(3.0 * np.pi * xy[:, 0])
        base = ((vw[:, 0] + vw[:, 1] + third) >= 2).astype(np.int64)
        y_clean = base ^ (concept % 2)
        y = _binary_noise(y_clean, spec.noise, rng)
        schema = StreamSchema(("v", "w", "x", "y"),
                              (NOMINAL, NOMINAL, NUMERIC, NUMERIC),
                              (2, 2, 0, 0), 2)
        X = np.hstack([vw.astype(np.float64), xy])

    elif family == "circles":
        if schedule.concepts > len(CIRCLES):
            raise UsageError(
                f"circles supports at most {len(CIRCLES) - 1} drifts, "
                f"schedule has {len(schedule.positions)}")
        xy = rng.random((n, 2))
        concept = _concept_draws(n, schedule, rng)
        params = np.array([(cx, cy, r) for (cx, cy), r in CIRCLES])
        cx, cy, r = (params[concept, j] for j in range(3))
        y_clean = (((xy[:, 0] - cx) ** 2 + (xy[:, 1] - cy) ** 2) <= r * r).astype(np.int64)
        y = _binary_noise(y_clean, spec.noise, rng)
        schema = StreamSchema(("x", "y"), (NUMERIC, NUMERIC), (0, 0), 2)
        X = xy

    else:  # led
        layout = spec.led_layout or LED_DEFAULT_LAYOUT
        if schedule.concepts > len(layout):
            raise UsageError(
                f"led layout defines {len(layout)} concepts, schedule needs "
                f"{schedule.concepts}")
        digits = rng.integers(0, 10, size=n)
        attrs = rng.integers(0, 2, size=(n, LED_ATTRIBUTES))
        concept = _concept_draws(n, schedule, rng)
        for c in range(schedule.concepts):
            rows = np.nonzero(concept == c)[0]
            if rows.size:
                attrs[np.ix_(rows, list(layout[c]))] = LED_SEGMENTS[digits[rows]]
        y_clean = digits.astype(np.int64)
        flip = rng.random(n) < spec.noise
        offsets = rng.integers(1, 10, size=n)
        y = np.where(flip, (y_clean + offsets) % 10, y_clean)
        schema = StreamSchema(tuple(f"a{j + 1}" for j in range(LED_ATTRIBUTES)),
                              (NOMINAL,) * LED_ATTRIBUTES,
                              (2,) * LED_ATTRIBUTES, 10)
        X = attrs.astype(np.float64)

    return Stream(name=family, X=X, y=y.astype(np.int64), schema=schema,
                  drift_positions=schedule.positions,
                  transition=schedule.transition,
                  concepts=concept, y_clean=y_clean.astype(np.int64),
                  seed=spec.seed)


class CsvStreamReader:
    """Streaming CSV reader with the package's stream conventions.

    The first row is a header; the last column is the class label.
    Attribute columns are numeric when their first data value parses as
    a float, nominal otherwise, unless ``schema`` supplies an explicit
    kind (:data:`NUMERIC` / :data:`NOMINAL`) per attribute column.
    Nominal values are interned to integer codes in first-seen order.
    Label strings that are nonnegative integers are taken verbatim as
    class codes (so dumped streams load back with identical labels);
    anything else is interned in first-seen order.

    Rows are yielded one at a time, so arbitrarily large files can be
    consumed without materialising them; the inferred ``kinds``,
    ``names``, code tables and ``n_classes`` are available once
    iteration starts (kinds after the first data row).
    """

    def __init__(self, path, schema: Optional[Sequence[str]] = None):
        self.path = Path(path)
        self.declared = list(schema) if schema is not None else None
        self.names: tuple[str, ...] = ()
        self.kinds: Optional[list[str]] = None
        self.nominal_codes: list[dict[str, int]] = []
        self.label_codes: dict[str, int] = {}
        self.max_label = -1

    @property
    def n_classes(self) -> int:
        return max(self.max_label + 1, len(self.label_codes))

    def __iter__(self) -> Iterator[LabeledInstance]:
        with open(self.path, newline="", encoding="utf-8") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None:
                raise DataFormatError(f"{self.path}: empty file, expected a header row")
            if len(header) < 2:
                raise DataFormatError(
                    f"{self.path}: need at least one attribute column and a "
                    "label column")
            n_attrs = len(header) - 1
            self.names = tuple(header[:-1])
            self.nominal_codes = [dict() for _ in range(n_attrs)]
            if self.declared is not None:
                if len(self.declared) != n_attrs:
                    raise DataFormatError(
                        f"{self.path}: schema lists {len(self.declared)} kinds "
                        f"for {n_attrs} attribute columns")
                self.kinds = list(self.declared)
            position = 0
            for line, row in enumerate(reader, start=2):
                if not row:
                    continue
                if len(row) != len(header):
                    raise DataFormatError(
                        f"{self.path}: line {line}: expected {len(header)} "
                        f"fields, got {len(row)}")
                if self.kinds is None:
                    self.kinds = [_inferred_kind(value) for value in row[:-1]]
                attrs = []
                for j, value in enumerate(row[:-1]):
                    if self.kinds[j] == NUMERIC:
                        try:
                            attrs.append(float(value))
                        except ValueError as exc:
                            raise DataFormatError(
                                f"{self.path}: line {line}: column "
                                f"{header[j]!r}: {value!r} is not numeric") from exc
                    else:
                        codes = self.nominal_codes[j]
                        attrs.append(codes.setdefault(value, len(codes)))
                raw_label = row[-1]
                if _INT_LABEL.match(raw_label):
                    label = int(raw_label)
                else:
                    label = self.label_codes.setdefault(raw_label, len(self.label_codes))
                self.max_label = max(self.max_label, label)
                yield LabeledInstance(position, tuple(attrs), label)
                position += 1


def _inferred_kind(value: str) -> str:
    try:
        float(value)
        return NUMERIC
    except ValueError:
        return NOMINAL


def iter_csv_instances(path, schema: Optional[Sequence[str]] = None) -> Iterator[LabeledInstance]:
    """Stream labelled instances from a CSV file (see :class:`CsvStreamReader`)."""
    return iter(CsvStreamReader(path, schema))


def load_csv_stream(path, schema: Optional[Sequence[str]] = None) -> Stream:
    """Materialise a CSV stream for the benchmark harness."""
    reader = CsvStreamReader(path, schema)
    rows = []
    labels = []
    for inst in reader:
        rows.append(inst.attributes)
        labels.append(inst.label)
    kinds = tuple(reader.kinds) if reader.kinds is not None else ()
    if not kinds:
        kinds = tuple(NUMERIC for _ in reader.names)
    if rows:
        X = np.array(rows, dtype=np.float64)
        y = np.array(labels, dtype=np.int64)
    else:
        X = np.zeros((0, len(reader.names)))
        y = np.zeros(0, dtype=np.int64)
    cards = []
    for j, kind in enumerate(kinds):
        if kind != NOMINAL:
            cards.append(0)
        elif reader.nominal_codes and reader.nominal_codes[j]:
            cards.append(len(reader.nominal_codes[j]))
        elif len(rows):
            cards.append(int(X[:, j].max()) + 1)
        else:
            cards.append(1)
    return Stream(name=reader.path.stem, X=X, y=y,
                  schema=StreamSchema(reader.names, kinds, tuple(cards),
                                      reader.n_classes))


def dump_stream(spec, path) -> None:
    """Write a synthetic stream (or an already materialised one) to CSV.

    Numeric attributes use shortest round-trip formatting so a reload
    reproduces them exactly; nominal attributes and labels are written
    as integer codes.  Identical specs produce byte-identical files.
    """
    stream = generate_stream(spec) if isinstance(spec, StreamSpec) else spec
    kinds = stream.schema.kinds
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow([*stream.schema.names, "label"])
        for t in range(len(stream)):
            row = stream.X[t]
            fields = [repr(float(row[j])) if kinds[j] == NUMERIC else str(int(row[j]))
                      for j in range(len(kinds))]
            fields.append(str(int(stream.y[t])))
            writer.writerow(fields)
