"""
Feed-forward question relevance and false-premise classifiers.

Inputs are concatenations of fixed encodings (question, premises, image
feature, caption) whose layout is chosen by ModelKind. The network is a
plain numpy multi-layer perceptron: rectifier hidden layers and a single
logistic output trained with binary cross-entropy.

Model files are little-endian binary:

    b"PMLP" | u32 version | u32 layer count | (layer count + 1) x u32 dims
    | per layer: f32 weights (fan_in x fan_out, row-major), f32 biases

with a ``<model>.json`` sidecar holding the ModelCard.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .config import TrainingConfig
from .errors import (
    ConfigError,
    DimensionMismatchError,
    EmptyDatasetError,
    MissingRecordError,
    ModelFormatError,
    TrainingDivergedError,
)
from .features import EmbeddingTable, FeatureStore
from .lexicon import Resources, load_resources
from .premise_extraction import extract_premises, question_words
from .schemas import (
    EncoderMode,
    EncodingSpec,
    EvaluationReport,
    ModelCard,
    ModelKind,
    Premise,
    PremiseOrder,
    Question,
    RelevanceExample,
    TrainingLog,
)

logger = logging.getLogger(__name__)

MODEL_MAGIC = b"PMLP"
MODEL_VERSION = 1

# Input components per model kind: q=question, p=premises, i=image, c=caption.
LAYOUTS: Dict[ModelKind, Tuple[str, ...]] = {
    ModelKind.REL_Q: ("q", "i"),
    ModelKind.REL_QP: ("q", "p", "i"),
    ModelKind.CAP_QC: ("q", "c"),
    ModelKind.CAP_PC: ("p", "c"),
    ModelKind.CAP_QPC: ("q", "p", "c"),
    ModelKind.FPD: ("p", "i"),
}

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8


# -- encoders --------------------------------------------------------------


def fit_encoding_spec(
    questions: Iterable[str],
    premises: Iterable[Sequence[Premise]],
    image_dim: int,
    question_mode: EncoderMode = EncoderMode.BAG_OF_WORDS,
    embeddings: Optional[EmbeddingTable] = None,
    captions: Iterable[str] = (),
    caption_mode: Optional[EncoderMode] = None,
) -> EncodingSpec:
    """Build sorted, deduplicated vocabularies from a training corpus."""
    vocab = sorted({word for text in questions for word in question_words(text)})
    objects = set()
    pairs = set()
    for premise_list in premises:
        for premise in premise_list:
            if premise.order == PremiseOrder.FIRST:
                objects.add(premise.parts[0])
            elif premise.order == PremiseOrder.SECOND:
                pairs.add((premise.parts[0], premise.parts[1]))
            else:
                objects.update((premise.parts[0], premise.parts[2]))
    caption_vocab = sorted({word for text in captions for word in question_words(text)})
    return EncodingSpec(
        question_mode=question_mode,
        vocab=vocab if question_mode == EncoderMode.BAG_OF_WORDS else [],
        embedding_dim=embeddings.dim if embeddings is not None else 0,
        premise_vocab_1=sorted(objects),
        premise_vocab_2=sorted(pairs),
        image_dim=image_dim,
        caption_mode=caption_mode,
        caption_vocab=caption_vocab if caption_mode == EncoderMode.BAG_OF_WORDS else [],
    )


def _encode_text(
    text: str,
    mode: EncoderMode,
    vocab: Sequence[str],
    embeddings: Optional[EmbeddingTable],
) -> np.ndarray:
    words = question_words(text)
    if mode == EncoderMode.MEAN_EMBEDDING:
        if embeddings is None:
            raise ValueError("mean-embedding encoding needs an embedding table")
        return embeddings.mean_vector(words)
    index = {word: i for i, word in enumerate(vocab)}
    counts = np.zeros(len(vocab))
    for word in words:
        position = index.get(word)
        if position is not None:
            counts[position] += 1.0
    return counts


def encode_question(
    question: Union[Question, str],
    spec: EncodingSpec,
    embeddings: Optional[EmbeddingTable] = None,
) -> np.ndarray:
    """Bag-of-words counts (OOV dropped) or mean word embedding (all-OOV is zeros)."""
    text = question.text if isinstance(question, Question) else question
    return _encode_text(text, spec.question_mode, spec.vocab, embeddings)


def encode_caption(
    caption: str, spec: EncodingSpec, embeddings: Optional[EmbeddingTable] = None
) -> np.ndarray:
    if spec.caption_mode is None:
        raise ValueError("encoding spec has no caption mode")
    return _encode_text(caption, spec.caption_mode, spec.caption_vocab, embeddings)


def encode_premises(premises: Iterable[Premise], spec: EncodingSpec) -> np.ndarray:
    """Object multi-hot followed by object-attribute multi-hot.

    Third-order premises set the entries of their subject and object.
    """
    objects = {name: i for i, name in enumerate(spec.premise_vocab_1)}
    pairs = {tuple(pair): i for i, pair in enumerate(spec.premise_vocab_2)}
    first = np.zeros(len(objects))
    second = np.zeros(len(pairs))
    for premise in premises:
        if premise.order == PremiseOrder.SECOND:
            position = pairs.get((premise.parts[0], premise.parts[1]))
            if position is not None:
                second[position] = 1.0
            continue
        names = premise.parts if premise.order == PremiseOrder.FIRST else premise.parts[::2]
        for name in names:
            position = objects.get(name)
            if position is not None:
                first[position] = 1.0
    return np.concatenate([first, second])


def _component_dim(component: str, spec: EncodingSpec) -> int:
    if component == "q":
        if spec.question_mode == EncoderMode.MEAN_EMBEDDING:
            return spec.embedding_dim
        return len(spec.vocab)
    if component == "p":
        return len(spec.premise_vocab_1) + len(spec.premise_vocab_2)
    if component == "i":
        return spec.image_dim
    if spec.caption_mode == EncoderMode.MEAN_EMBEDDING:
        return spec.embedding_dim
    return len(spec.caption_vocab)


def input_dim(kind: ModelKind, spec: EncodingSpec) -> int:
    return sum(_component_dim(component, spec) for component in LAYOUTS[kind])


def build_input(
    kind: ModelKind,
    spec: EncodingSpec,
    question: Optional[Union[Question, str]] = None,
    premises: Optional[Sequence[Premise]] = None,
    image: Optional[np.ndarray] = None,
    caption: Optional[str] = None,
    embeddings: Optional[EmbeddingTable] = None,
) -> np.ndarray:
    """Concatenate the encodings ``kind`` needs, in its fixed layout."""
    parts: List[np.ndarray] = []
    for component in LAYOUTS[kind]:
        if component == "q":
            if question is None:
                raise ValueError(f"{kind.value} input needs a question")
            parts.append(encode_question(question, spec, embeddings))
        elif component == "p":
            if premises is None:
                raise ValueError(f"{kind.value} input needs premises")
            parts.append(encode_premises(premises, spec))
        elif component == "i":
            if image is None:
                raise ValueError(f"{kind.value} input needs an image feature")
            vector = np.asarray(image, dtype=np.float64)
            if vector.shape != (spec.image_dim,):
                raise DimensionMismatchError(spec.image_dim, int(vector.size))
            parts.append(vector)
        else:
            if caption is None:
                raise ValueError(f"{kind.value} input needs a caption")
            parts.append(encode_caption(caption, spec, embeddings))
    return np.concatenate(parts)


@dataclass
class EncodingContext:
    """Lookups needed to turn dataset records into input vectors."""

    questions: Mapping[int, Question] = field(default_factory=dict)
    features: Optional[FeatureStore] = None
    captions: Mapping[int, str] = field(default_factory=dict)
    embeddings: Optional[EmbeddingTable] = None
    resources: Optional[Resources] = None
    _premises: Dict[int, List[Premise]] = field(default_factory=dict, repr=False)

    def question(self, question_id: int) -> Question:
        question = self.questions.get(question_id)
        if question is None:
            raise MissingRecordError(f"unknown question id {question_id}")
        return question

    def premises_of(self, question_id: int) -> List[Premise]:
        cached = self._premises.get(question_id)
        if cached is None:
            question = self.question(question_id)
            cached = extract_premises(
                question, strict=True, resources=self.resources or load_resources()
            )
            self._premises[question_id] = cached
        return cached


@dataclass
class EncodedDataset:
    X: np.ndarray
    y: np.ndarray
    orders: np.ndarray  # falsified premise order, 0 when unknown

    def __len__(self) -> int:
        return int(self.y.shape[0])


def encode_examples(
    kind: ModelKind,
    spec: EncodingSpec,
    examples: Sequence[RelevanceExample],
    context: EncodingContext,
) -> EncodedDataset:
    """Encode labelled records into a design matrix.

    FPD records use their own premise; the other kinds use the strict
    premises of the record's question.
    """
    layout = LAYOUTS[kind]
    rows: List[np.ndarray] = []
    for example in examples:
        question = context.question(example.question_id) if "q" in layout else None
        premises: Optional[List[Premise]] = None
        if "p" in layout:
            if kind == ModelKind.FPD:
                if example.premise is None:
                    raise MissingRecordError(
                        f"FPD example for question {example.question_id} has no premise"
                    )
                premises = [example.premise]
            else:
                premises = context.premises_of(example.question_id)
        image = None
        if "i" in layout:
            if context.features is None:
                raise ConfigError(f"{kind.value} needs image features")
            image = context.features.vector(example.image_id)
        caption = None
        if "c" in layout:
            caption = example.caption or context.captions.get(example.image_id)
            if caption is None:
                raise MissingRecordError(f"no caption for image {example.image_id}")
        rows.append(
            build_input(kind, spec, question, premises, image, caption, context.embeddings)
        )
    width = input_dim(kind, spec)
    X = np.vstack(rows) if rows else np.zeros((0, width))
    y = np.array([example.label for example in examples], dtype=np.float64)
    orders = np.array([example.falsified_order or 0 for example in examples], dtype=np.int64)
    return EncodedDataset(X=X, y=y, orders=orders)


# -- network ---------------------------------------------------------------


@dataclass
class MlpModel:
    """Weights are (fan_in, fan_out); the last layer has a single output."""

    weights: List[np.ndarray]
    biases: List[np.ndarray]
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.weights or len(self.weights) != len(self.biases):
            raise ValueError("model needs matching, non-empty weight and bias lists")
        for layer, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.ndim != 2 or b.shape != (W.shape[1],):
                raise ValueError(f"layer {layer}: weight {W.shape} and bias {b.shape} disagree")
            if layer > 0 and W.shape[0] != self.weights[layer - 1].shape[1]:
                raise ValueError(f"layer {layer} input does not match previous output")
        if self.weights[-1].shape[1] != 1:
            raise ValueError("output layer must have a single unit")

    @property
    def layer_sizes(self) -> List[int]:
        return [int(self.weights[0].shape[0])] + [int(W.shape[1]) for W in self.weights]

    @property
    def input_dim(self) -> int:
        return int(self.weights[0].shape[0])

    def copy(self) -> "MlpModel":
        weights = [W.copy() for W in self.weights]
        return MlpModel(weights, [b.copy() for b in self.biases], self.seed)


def init_model(
    layer_sizes: Sequence[int], seed: int = 0, rng: Optional[np.random.Generator] = None
) -> MlpModel:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and zero biases."""
    if len(layer_sizes) < 2 or any(size <= 0 for size in layer_sizes):
        raise ValueError(f"bad layer sizes: {list(layer_sizes)}")
    rng = rng if rng is not None else np.random.default_rng(seed)
    weights: List[np.ndarray] = []
    biases: List[np.ndarray] = []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return MlpModel(weights, biases, seed)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _relu(z: np.ndarray) -> np.ndarray:
    return np.maximum(z, 0.0)


def _as_batch(model: MlpModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.input_dim:
        raise DimensionMismatchError(model.input_dim, int(X.shape[-1]) if X.ndim else 0)
    return X


def _forward(model: MlpModel, X: np.ndarray) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    """Layer inputs and pre-activations; the last pre-activation is the logit."""
    inputs: List[np.ndarray] = []
    pre: List[np.ndarray] = []
    a = X
    last = len(model.weights) - 1
    for layer, (W, b) in enumerate(zip(model.weights, model.biases)):
        inputs.append(a)
        z = a @ W + b
        pre.append(z)
        if layer < last:
            a = _relu(z)
    return inputs, pre


def predict_proba(model: MlpModel, X: np.ndarray) -> np.ndarray:
    """Probabilities for a batch (or a single vector) of inputs."""
    _, pre = _forward(model, _as_batch(model, X))
    return _sigmoid(pre[-1][:, 0])


def mlp_forward(model: MlpModel, x: np.ndarray) -> float:
    """Probability in (0, 1) for one input vector.

    Raises:
        DimensionMismatchError: If ``x`` does not match the first layer.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatchError(model.input_dim, int(x.size))
    return float(predict_proba(model, x)[0])


Gradients = List[Tuple[np.ndarray, np.ndarray]]


def _bce(logits: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean(np.logaddexp(0.0, logits) - y * logits))


def loss_and_gradients(model: MlpModel, X: np.ndarray, y: np.ndarray) -> Tuple[float, Gradients]:
    """Mean binary cross-entropy and its gradient for every (W, b)."""
    X = _as_batch(model, X)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if y.shape[0] != X.shape[0]:
        raise ValueError(f"{X.shape[0]} inputs but {y.shape[0]} labels")
    inputs, pre = _forward(model, X)
    logits = pre[-1][:, 0]
    loss = _bce(logits, y)

    delta = ((_sigmoid(logits) - y) / X.shape[0])[:, None]
    gradients: Gradients = []
    for layer in range(len(model.weights) - 1, -1, -1):
        gradients.append((inputs[layer].T @ delta, delta.sum(axis=0)))
        if layer > 0:
            delta = (delta @ model.weights[layer].T) * (pre[layer - 1] > 0)
    gradients.reverse()
    return loss, gradients


@dataclass(frozen=True)
class GradientCheck:
    max_relative_error: float
    checked: int
    skipped: int  # parameters whose finite-difference step crosses a rectifier kink


def _relu_pattern(model: MlpModel, X: np.ndarray) -> List[np.ndarray]:
    _, pre = _forward(model, X)
    return [z > 0 for z in pre[:-1]]


def _same_pattern(a: List[np.ndarray], b: List[np.ndarray]) -> bool:
    return all(np.array_equal(p, q) for p, q in zip(a, b))


def gradient_check(
    model: MlpModel, x: np.ndarray, label: float, step: float = 1e-4
) -> GradientCheck:
    """Compare analytic gradients with central finite differences.

    Relative error is ``|a - n| / max(|a| + |n|, 1e-8)``. Parameters whose
    perturbation changes any rectifier's on/off state are skipped.
    """
    X = _as_batch(model, x)
    y = np.array([float(label)])
    _, analytic = loss_and_gradients(model, X, y)
    trial = model.copy()
    base_pattern = _relu_pattern(trial, X)

    worst = 0.0
    checked = skipped = 0
    for layer in range(len(trial.weights)):
        weight_grad, bias_grad = analytic[layer]
        for array, grad in ((trial.weights[layer], weight_grad), (trial.biases[layer], bias_grad)):
            for index in np.ndindex(array.shape):
                original = array[index]
                array[index] = original + step
                plus_pattern = _relu_pattern(trial, X)
                loss_plus = _bce(_forward(trial, X)[1][-1][:, 0], y)
                array[index] = original - step
                minus_pattern = _relu_pattern(trial, X)
                loss_minus = _bce(_forward(trial, X)[1][-1][:, 0], y)
                array[index] = original
                stable = _same_pattern(plus_pattern, base_pattern) and _same_pattern(
                    minus_pattern, base_pattern
                )
                if not stable:
                    skipped += 1
                    continue
                numeric = (loss_plus - loss_minus) / (2.0 * step)
                a = float(grad[index])
                error = abs(a - numeric) / max(abs(a) + abs(numeric), 1e-8)
                worst = max(worst, error)
                checked += 1
    return GradientCheck(max_relative_error=worst, checked=checked, skipped=skipped)


# -- training --------------------------------------------------------------


class _Adam:
    def __init__(self, model: MlpModel):
        self.m = [(np.zeros_like(W), np.zeros_like(b)) for W, b in zip(model.weights, model.biases)]
        self.v = [(np.zeros_like(W), np.zeros_like(b)) for W, b in zip(model.weights, model.biases)]
        self.t = 0

    def step(self, model: MlpModel, gradients: Gradients, lr: float) -> None:
        self.t += 1
        correction1 = 1.0 - ADAM_BETA1**self.t
        correction2 = 1.0 - ADAM_BETA2**self.t
        for layer, (dW, db) in enumerate(gradients):
            params = (model.weights[layer], model.biases[layer])
            for slot, (param, grad) in enumerate(zip(params, (dW, db))):
                m = self.m[layer][slot]
                v = self.v[layer][slot]
                m *= ADAM_BETA1
                m += (1.0 - ADAM_BETA1) * grad
                v *= ADAM_BETA2
                v += (1.0 - ADAM_BETA2) * grad * grad
                param -= lr * (m / correction1) / (np.sqrt(v / correction2) + ADAM_EPSILON)


def _sgd_step(model: MlpModel, gradients: Gradients, lr: float) -> None:
    for layer, (dW, db) in enumerate(gradients):
        model.weights[layer] -= lr * dW
        model.biases[layer] -= lr * db


def accuracy(model: MlpModel, X: np.ndarray, y: np.ndarray, threshold: float = 0.5) -> float:
    if len(y) == 0:
        return 0.0
    predictions = predict_proba(model, X) >= threshold
    return float(np.mean(predictions == (np.asarray(y) >= 0.5)))


def train(
    X: np.ndarray,
    y: np.ndarray,
    config: Optional[TrainingConfig] = None,
    seed: int = 0,
    on_epoch: Optional[Callable[[int, float], None]] = None,
) -> Tuple[MlpModel, TrainingLog]:
    """Train an MLP with seeded initialization and shuffling.

    The same inputs, config and seed always produce identical parameters.

    Raises:
        EmptyDatasetError: If there are no examples.
        TrainingDivergedError: If a batch loss becomes NaN or infinite.
    """
    config = config or TrainingConfig()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyDatasetError()
    if config.optimizer not in ("sgd", "adam"):
        raise ValueError(f"unknown optimizer: {config.optimizer}")

    rng = np.random.default_rng(seed)
    model = init_model([X.shape[1], *config.hidden, 1], seed=seed, rng=rng)
    adam = _Adam(model) if config.optimizer == "adam" else None
    n = X.shape[0]
    log = TrainingLog()

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n)
        total = 0.0
        for batch, start in enumerate(range(0, n, config.batch_size), start=1):
            index = order[start : start + config.batch_size]
            loss, gradients = loss_and_gradients(model, X[index], y[index])
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch, batch)
            if adam is not None:
                adam.step(model, gradients, config.learning_rate)
            else:
                _sgd_step(model, gradients, config.learning_rate)
            total += loss * len(index)
        epoch_loss = total / n
        log.epoch_losses.append(epoch_loss)
        if on_epoch is not None:
            on_epoch(epoch, epoch_loss)
        logger.debug("epoch %d loss %.6f", epoch, epoch_loss)

    log.final_accuracy = accuracy(model, X, y, config.threshold)
    logger.info(
        "Trained %s for %d epochs: loss %.4f, train accuracy %.4f",
        model.layer_sizes,
        config.epochs,
        log.epoch_losses[-1],
        log.final_accuracy,
    )
    return model, log


def evaluate(
    model: MlpModel,
    X: np.ndarray,
    y: np.ndarray,
    orders: Optional[np.ndarray] = None,
    threshold: float = 0.5,
) -> EvaluationReport:
    """Accuracy overall and on first- and second-order-falsified subsets."""
    y = np.asarray(y).reshape(-1)
    if y.shape[0] == 0:
        return EvaluationReport(overall=0.0)
    correct = (predict_proba(model, X) >= threshold) == (y >= 0.5)
    report = EvaluationReport(overall=float(correct.mean()), count=int(y.shape[0]))
    if orders is None:
        return report
    orders = np.asarray(orders)
    first = orders == 1
    second = orders == 2
    if first.any():
        report.first_order = float(correct[first].mean())
        report.first_order_count = int(first.sum())
    if second.any():
        report.second_order = float(correct[second].mean())
        report.second_order_count = int(second.sum())
    return report


def fpd_predict(
    model: MlpModel,
    spec: EncodingSpec,
    premise: Premise,
    image: np.ndarray,
    threshold: float = 0.5,
) -> bool:
    """True when the premise is predicted grounded in the image (probability >= threshold)."""
    x = build_input(ModelKind.FPD, spec, premises=[premise], image=image)
    return mlp_forward(model, x) >= threshold


# -- persistence -----------------------------------------------------------


def sidecar_path(path: Union[str, Path]) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def save_model(
    path: Union[str, Path],
    model: MlpModel,
    kind: ModelKind,
    spec: EncodingSpec,
    threshold: float = 0.5,
) -> ModelCard:
    """Write the binary model file and its JSON sidecar."""
    if input_dim(kind, spec) != model.input_dim:
        raise DimensionMismatchError(input_dim(kind, spec), model.input_dim)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sizes = model.layer_sizes
    header = np.array([MODEL_VERSION, len(model.weights), *sizes], dtype="<u4")
    with open(path, "wb") as f:
        f.write(MODEL_MAGIC)
        f.write(header.tobytes())
        for W, b in zip(model.weights, model.biases):
            f.write(np.ascontiguousarray(W, dtype="<f4").tobytes())
            f.write(np.ascontiguousarray(b, dtype="<f4").tobytes())
    card = ModelCard(kind=kind, spec=spec, layer_sizes=sizes, seed=model.seed, threshold=threshold)
    sidecar_path(path).write_text(card.model_dump_json(indent=2), encoding="utf-8")
    logger.info("Saved %s model %s to %s", kind.value, sizes, path)
    return card


def load_model(path: Union[str, Path]) -> Tuple[MlpModel, ModelCard]:
    """Read a model file and its sidecar.

    Raises:
        FileNotFoundError: If either file is missing.
        ModelFormatError: On a bad header, truncated payload or a sidecar
            that disagrees with the weights.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Model file not found: {path}")
    meta = sidecar_path(path)
    if not meta.exists():
        raise FileNotFoundError(f"Model sidecar not found: {meta}")

    data = path.read_bytes()
    if data[:4] != MODEL_MAGIC:
        raise ModelFormatError(f"{path}: bad magic {data[:4]!r}")
    if len(data) < 12:
        raise ModelFormatError(f"{path}: truncated header")
    version, layer_count = (int(v) for v in np.frombuffer(data, dtype="<u4", count=2, offset=4))
    if version != MODEL_VERSION:
        raise ModelFormatError(f"{path}: unsupported version {version}")
    offset = 12 + 4 * (layer_count + 1)
    if layer_count == 0 or len(data) < offset:
        raise ModelFormatError(f"{path}: truncated header")
    sizes = [int(v) for v in np.frombuffer(data, dtype="<u4", count=layer_count + 1, offset=12)]
    expected = offset + 4 * sum(i * o + o for i, o in zip(sizes[:-1], sizes[1:]))
    if len(data) != expected:
        raise ModelFormatError(f"{path}: expected {expected} bytes, got {len(data)}")

    weights: List[np.ndarray] = []
    biases: List[np.ndarray] = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        W = np.frombuffer(data, dtype="<f4", count=fan_in * fan_out, offset=offset)
        offset += 4 * fan_in * fan_out
        b = np.frombuffer(data, dtype="<f4", count=fan_out, offset=offset)
        offset += 4 * fan_out
        weights.append(W.astype(np.float64).reshape(fan_in, fan_out))
        biases.append(b.astype(np.float64))
    if not all(np.all(np.isfinite(p)) for p in weights + biases):
        raise ModelFormatError(f"{path}: non-finite parameters")

    try:
        card = ModelCard.model_validate_json(meta.read_text(encoding="utf-8"))
    except ValueError as e:
        raise ModelFormatError(f"{meta}: {e}") from e
    if card.layer_sizes != sizes or input_dim(card.kind, card.spec) != sizes[0]:
        raise ModelFormatError(f"{meta}: layer sizes do not match {path}")
    try:
        model = MlpModel(weights, biases, card.seed)
    except ValueError as e:
        raise ModelFormatError(f"{path}: {e}") from e
    return model, card
