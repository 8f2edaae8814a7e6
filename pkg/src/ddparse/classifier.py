"""Multiclass linear classifier: one-vs-rest hinge loss, averaged SGD.

Training is deterministic: example order is shuffled per epoch by a seeded
RNG, updates are applied in a fixed order, and serialization is canonical,
so identical (examples, config) pairs produce byte-identical model files.
The final weights are the average of the SGD iterates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import DegenerateData, FormatError, VersionMismatch

FORMAT_HEADER = "ddparse-model v1"


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 10
    learning_rate: float = 0.1
    l2: float = 1e-5
    seed: int = 42


@dataclass
class LinearModel:
    labels: list[str]
    weights: list[dict[str, float]]  # one sparse map per label
    bias: list[float]
    train_meta: TrainConfig
    epoch_losses: tuple[float, ...] = ()

    def scores(self, fv):
        return scores(self, fv)

    def predict(self, fv):
        return predict(self, fv)


def scores(model: LinearModel, fv) -> dict[str, float]:
    """Raw decision values w_y . x + b_y per label; unknown features score 0."""
    out = {}
    for label, w, b in zip(model.labels, model.weights, model.bias):
        out[label] = sum(w.get(f, 0.0) * x for f, x in fv.items()) + b
    return out


def predict(model: LinearModel, fv) -> str:
    """Argmax of scores; ties break toward the lowest label index."""
    best_label, best_score = model.labels[0], None
    for label, score in scores(model, fv).items():
        if best_score is None or score > best_score:
            best_label, best_score = label, score
    return best_label


class _BinaryTrainer:
    """Hinge-loss SGD state for one label, with L2 via a scale factor.

    Logical weights are ``scale * v``.  Averaging uses prefix sums of the
    scale so each feature is only touched when it occurs in an example.
    """

    def __init__(self):
        self.v: dict[str, float] = {}
        self.scale = 1.0
        self.b = 0.0
        self.scale_prefix = 0.0  # sum of scale after each completed step
        self.acc: dict[str, float] = {}
        self.last_prefix: dict[str, float] = {}
        self.b_acc = 0.0
        self.b_last_step = 0

    def margin(self, fv, target: float) -> float:
        dot = sum(self.v.get(f, 0.0) * x for f, x in fv.items())
        return target * (self.scale * dot + self.b)

    def step(self, fv, target: float, lr: float, l2: float, step_no: int) -> None:
        violated = self.margin(fv, target) < 1.0
        self.scale *= 1.0 - lr * l2
        if self.scale < 1e-9:  # fold the scale back in before it underflows
            for f in self.v:
                self.v[f] *= self.scale
            for f in self.last_prefix:
                self.last_prefix[f] /= self.scale
            self.scale_prefix /= self.scale
            self.scale = 1.0
        if violated:
            for f, x in fv.items():
                old = self.v.get(f, 0.0)
                self.acc[f] = self.acc.get(f, 0.0) + old * (
                    self.scale_prefix - self.last_prefix.get(f, 0.0)
                )
                self.last_prefix[f] = self.scale_prefix
                self.v[f] = old + lr * target * x / self.scale
            self.b_acc += self.b * (step_no - 1 - self.b_last_step)
            self.b_last_step = step_no - 1
            self.b += lr * target
        self.scale_prefix += self.scale

    def averaged(self, total_steps: int) -> tuple[dict[str, float], float]:
        weights = {}
        for f, value in self.v.items():
            total = self.acc.get(f, 0.0) + value * (
                self.scale_prefix - self.last_prefix.get(f, 0.0)
            )
            avg = total / total_steps
            if avg != 0.0:
                weights[f] = avg
        b_total = self.b_acc + self.b * (total_steps - self.b_last_step)
        return weights, b_total / total_steps


def train(examples, config: TrainConfig | None = None, labels=None) -> LinearModel:
    """Train a one-vs-rest linear model.

    ``labels`` fixes the label order (and thus tie-breaking); when omitted it
    defaults to the sorted set of observed labels.
    """
    config = config or TrainConfig()
    examples = list(examples)
    observed = []
    for fv, label in examples:
        if not fv:
            raise DegenerateData("example with empty feature vector")
        if label not in observed:
            observed.append(label)
    if len(observed) < 2:
        raise DegenerateData(f"need at least 2 distinct labels, got {len(observed)}")
    if labels is None:
        labels = sorted(observed)
    else:
        labels = list(labels)
        missing = [l for l in observed if l not in labels]
        if missing:
            raise DegenerateData(f"examples carry labels outside the label set: {missing}")

    rng = random.Random(config.seed)
    trainers = [_BinaryTrainer() for _ in labels]
    order = list(range(len(examples)))
    step_no = 0
    epoch_losses = []
    for epoch in range(config.epochs):
        lr = config.learning_rate / (1.0 + epoch)
        rng.shuffle(order)
        for idx in order:
            fv, gold = examples[idx]
            step_no += 1
            for label, trainer in zip(labels, trainers):
                target = 1.0 if gold == label else -1.0
                trainer.step(fv, target, lr, config.l2, step_no)
        loss = 0.0
        for fv, gold in examples:
            for label, trainer in zip(labels, trainers):
                target = 1.0 if gold == label else -1.0
                loss += max(0.0, 1.0 - trainer.margin(fv, target))
        epoch_losses.append(loss / len(examples))

    weights, bias = [], []
    for trainer in trainers:
        w, b = trainer.averaged(step_no)
        weights.append(w)
        bias.append(b)
    return LinearModel(
        labels=labels,
        weights=weights,
        bias=bias,
        train_meta=config,
        epoch_losses=tuple(epoch_losses),
    )


def training_accuracy(model: LinearModel, examples) -> float:
    correct = sum(1 for fv, gold in examples if predict(model, fv) == gold)
    return correct / len(examples) if examples else 0.0


# ---------------------------------------------------------------------------
# Serialization: versioned text format, floats at 17 significant digits.


def _fmt(x: float) -> str:
    return format(x, ".17g")


def write_model(model: LinearModel, fh) -> None:
    meta = model.train_meta
    fh.write(FORMAT_HEADER + "\n")
    fh.write(
        "meta"
        f"\tlabels={len(model.labels)}"
        f"\tepochs={meta.epochs}"
        f"\tlearning_rate={_fmt(meta.learning_rate)}"
        f"\tl2={_fmt(meta.l2)}"
        f"\tseed={meta.seed}\n"
    )
    for label, w, b in zip(model.labels, model.weights, model.bias):
        items = sorted(w.items())
        fh.write(f"label\t{label}\tbias={_fmt(b)}\tnfeat={len(items)}\n")
        for feature, value in items:
            fh.write(f"{feature}\t{_fmt(value)}\n")


def read_model(lines) -> LinearModel:
    """Read one model block from an iterator of lines."""
    def next_line(what):
        try:
            return next(lines).rstrip("\n")
        except StopIteration:
            raise FormatError(f"truncated model file: expected {what}") from None

    header = next_line("header")
    if header != FORMAT_HEADER:
        if header.startswith("ddparse-model v"):
            raise VersionMismatch(f"unsupported model version: {header!r}")
        raise FormatError(f"not a model file (header {header!r})")
    meta_line = next_line("metadata line")
    fields = dict(
        part.split("=", 1) for part in meta_line.split("\t")[1:] if "=" in part
    )
    try:
        n_labels = int(fields["labels"])
        config = TrainConfig(
            epochs=int(fields["epochs"]),
            learning_rate=float(fields["learning_rate"]),
            l2=float(fields["l2"]),
            seed=int(fields["seed"]),
        )
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad metadata line: {meta_line!r}") from exc

    labels, weights, bias = [], [], []
    for _ in range(n_labels):
        line = next_line("label block")
        parts = line.split("\t")
        if len(parts) != 4 or parts[0] != "label":
            raise FormatError(f"bad label line: {line!r}")
        try:
            b = float(parts[2].removeprefix("bias="))
            nfeat = int(parts[3].removeprefix("nfeat="))
        except ValueError as exc:
            raise FormatError(f"bad label line: {line!r}") from exc
        w = {}
        for _ in range(nfeat):
            rec = next_line("feature record")
            feature, _, value = rec.rpartition("\t")
            if not feature:
                raise FormatError(f"bad feature record: {rec!r}")
            try:
                w[feature] = float(value)
            except ValueError as exc:
                raise FormatError(f"bad feature record: {rec!r}") from exc
        labels.append(parts[1])
        weights.append(w)
        bias.append(b)
    return LinearModel(labels=labels, weights=weights, bias=bias, train_meta=config)


def save_model(model: LinearModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_model(model, fh)


def load_model(path) -> LinearModel:
    with open(path, "r", encoding="utf-8") as fh:
        return read_model(iter(fh))
