from dataclasses import dataclass, field, fields, replace
from typing import List, Optional

import numpy as np

PAD_ID = 0
UNK_ID = 1


@dataclass(eq=False)
class ModelParams:
    """
    Parameters of the toy encoder, the head/tail MLPs and the biaffine scorer.

    `named_arrays` fixes the declared field order used by the optimizer and
    the checkpoint format: embeddings, head layers, tail layers, U1, U2, b.
    """
    embeddings: np.ndarray
    head_weights: List[np.ndarray]
    head_biases: List[np.ndarray]
    tail_weights: List[np.ndarray]
    tail_biases: List[np.ndarray]
    U1: np.ndarray
    U2: np.ndarray
    b: np.ndarray

    @classmethod
    def initialize(cls, vocab_size: int, n_labels: int, embedding_size: int, hidden_size: int,
                   mlp_depth: int = 1, rng: Optional[np.random.Generator] = None) -> 'ModelParams':
        """
        Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for embeddings and MLP weights;
        the biaffine tensors start at zero so the initial table is uniform.
        """
        if hidden_size < 1 or embedding_size < 1 or mlp_depth < 1:
            raise ValueError("hidden_size, embedding_size and mlp_depth must be >= 1.")
        rng = rng if rng is not None else np.random.default_rng()
        # An embedding row is an affine map of a one-hot input (fan-in 1).
        embeddings = rng.uniform(-1.0, 1.0, size=(vocab_size, embedding_size))

        def stack():
            weights, biases = [], []
            width = embedding_size
            for _ in range(mlp_depth):
                bound = 1.0 / np.sqrt(width)
                weights.append(rng.uniform(-bound, bound, size=(width, hidden_size)))
                biases.append(rng.uniform(-bound, bound, size=hidden_size))
                width = hidden_size
            return weights, biases

        head_weights, head_biases = stack()
        tail_weights, tail_biases = stack()
        return cls(
            embeddings=embeddings,
            head_weights=head_weights,
            head_biases=head_biases,
            tail_weights=tail_weights,
            tail_biases=tail_biases,
            U1=np.zeros((n_labels, hidden_size, hidden_size)),
            U2=np.zeros((n_labels, 2 * hidden_size)),
            b=np.zeros(n_labels),
        )

    @property
    def vocab_size(self) -> int:
        return self.embeddings.shape[0]

    @property
    def embedding_size(self) -> int:
        return self.embeddings.shape[1]

    @property
    def hidden_size(self) -> int:
        return self.U1.shape[1]

    @property
    def n_labels(self) -> int:
        return self.b.shape[0]

    @property
    def mlp_depth(self) -> int:
        return len(self.head_weights)

    def named_arrays(self) -> list:
        named = [('embeddings', self.embeddings)]
        for side in ('head', 'tail'):
            weights = getattr(self, f'{side}_weights')
            biases = getattr(self, f'{side}_biases')
            for depth, (weight, bias) in enumerate(zip(weights, biases)):
                named.append((f'{side}.{depth}.weight', weight))
                named.append((f'{side}.{depth}.bias', bias))
        named += [('U1', self.U1), ('U2', self.U2), ('b', self.b)]
        return named

    def arrays(self) -> list:
        return [array for _, array in self.named_arrays()]

    def map(self, fn) -> 'ModelParams':
        """Apply `fn` to every array, keeping the structure."""
        return ModelParams(
            embeddings=fn(self.embeddings),
            head_weights=[fn(w) for w in self.head_weights],
            head_biases=[fn(b) for b in self.head_biases],
            tail_weights=[fn(w) for w in self.tail_weights],
            tail_biases=[fn(b) for b in self.tail_biases],
            U1=fn(self.U1),
            U2=fn(self.U2),
            b=fn(self.b),
        )

    def copy(self) -> 'ModelParams':
        return self.map(np.array)

    def zeros_like(self) -> 'ModelParams':
        return self.map(np.zeros_like)

    def add_(self, other: 'ModelParams', scale: float = 1.0) -> 'ModelParams':
        """In-place self += scale * other."""
        for mine, theirs in zip(self.arrays(), other.arrays()):
            mine += scale * theirs
        return self

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(array)) for array in self.arrays())


@dataclass(frozen=True, eq=False)
class ScoreTable:
    """Per-cell label logits; `dropout_mask` is set only when logit dropout was applied."""
    logits: np.ndarray
    dropout_mask: Optional[np.ndarray] = None
    keep_scale: float = 1.0


@dataclass(frozen=True)
class LogitDropout:
    """Inverted dropout on logits, active during training only."""
    rate: float
    rng: np.random.Generator = field(compare=False)

    def __post_init__(self):
        if not 0.0 <= self.rate < 1.0:
            raise ValueError(f"Logit dropout rate must be in [0, 1), got {self.rate}.")


@dataclass(frozen=True)
class TrainConfig:
    """Model size, optimizer and training-loop settings."""
    hidden_size: int = 150
    embedding_size: int = 64
    mlp_depth: int = 1
    logit_dropout: float = 0.2
    learning_rate: float = 5e-5
    weight_decay: float = 1e-5
    beta1: float = 0.9
    beta2: float = 0.9
    epsilon: float = 1e-8
    warmup_ratio: float = 0.2
    batch_size: int = 32
    max_epochs: int = 200
    patience: int = 20
    seed: int = 0
    use_sym_loss: bool = True
    use_imp_loss: bool = True
    use_logit_dropout: bool = True

    def __post_init__(self):
        if not 0.0 <= self.logit_dropout < 1.0:
            raise ValueError(f"logit_dropout must be in [0, 1), got {self.logit_dropout}.")
        if self.learning_rate <= 0 or self.weight_decay < 0 or self.epsilon <= 0:
            raise ValueError("learning_rate and epsilon must be positive, weight_decay non-negative.")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("Adam betas must be in [0, 1).")
        if not 0 <= self.warmup_ratio <= 1:
            raise ValueError("warmup_ratio must be in [0, 1].")
        if self.hidden_size < 1 or self.embedding_size < 1 or self.mlp_depth < 1:
            raise ValueError("Model dimensions must be >= 1.")
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 0:
            raise ValueError("batch_size and max_epochs must be >= 1, patience >= 0.")

    @classmethod
    def from_settings(cls, **overrides) -> 'TrainConfig':
        """Build from `settings.UNIRE`; explicit overrides win, UNIRE_SEED wins over both."""
        from django.conf import settings

        conf = settings.UNIRE
        values = dict(
            hidden_size=conf['HIDDEN_SIZE'],
            embedding_size=conf['EMBEDDING_SIZE'],
            mlp_depth=conf['MLP_DEPTH'],
            logit_dropout=conf['LOGIT_DROPOUT'],
            learning_rate=conf['LEARNING_RATE'],
            weight_decay=conf['WEIGHT_DECAY'],
            beta1=conf['ADAM_BETA1'],
            beta2=conf['ADAM_BETA2'],
            epsilon=conf['ADAM_EPSILON'],
            warmup_ratio=conf['WARMUP_RATIO'],
            batch_size=conf['BATCH_SIZE'],
            max_epochs=conf['MAX_EPOCHS'],
            patience=conf['PATIENCE'],
        )
        values.update({key: value for key, value in overrides.items() if value is not None})
        if conf['SEED'] is not None:
            values['seed'] = conf['SEED']
        return cls(**values)

    def replace(self, **changes) -> 'TrainConfig':
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}
