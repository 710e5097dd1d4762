"""Atom processing layer: complex-bilinear triple scoring with a
self-contained Adam/BCE trainer.

The scorer is the complex trilinear form ``Re(sum_k e_s[k] * w_r[k] *
conj(e_o[k]))``; the real-diagonal restriction (imaginary parts pinned to
zero) gives the symmetric bilinear variant.  Gradients are written out by
hand and validated against central finite differences in the test suite;
an initial prediction for an atom is the sigmoid of its raw score.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .facts import FactStore
from .logic import GroundAtom, LogicError, Theory

CHECKPOINT_VERSION = 1

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8


class NumericError(LogicError):
    """Training produced a non-finite value."""


@dataclass(frozen=True, slots=True)
class TrainConfig:
    """Trainer knobs.

    ``loss`` selects the objective: ``"bce"`` is binary cross-entropy
    over facts plus ``negatives`` uniform corruptions per positive per
    side; ``"ce"`` is categorical cross-entropy against every entity on
    both sides (no sampling; ``negatives`` is ignored).  ``n3`` weights
    the nuclear 3-norm penalty on the embeddings touched by a batch,
    which is what keeps the factorization low-rank enough to generalize
    on small graphs.
    """

    dim: int = 100
    lr: float = 1e-2
    epochs: int = 100
    negatives: int = 32
    seed: int = 0
    batch_size: int = 512
    l2: float = 0.0
    n3: float = 0.0
    loss: str = "bce"
    model: str = "complex"

    def __post_init__(self) -> None:
        if min(self.dim, self.epochs, self.negatives, self.batch_size) <= 0:
            raise ValueError("dim, epochs, negatives and batch_size must be positive")
        if self.lr <= 0:
            raise ValueError("learning rate must be positive")
        if self.l2 < 0 or self.n3 < 0:
            raise ValueError("regularization weights must be non-negative")
        if self.loss not in ("bce", "ce"):
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.model not in ("complex", "distmult"):
            raise ValueError(f"unknown model kind {self.model!r}")


class EmbeddingModel:
    """Complex-valued entity/relation vectors of a fixed dimension."""

    def __init__(
        self,
        kind: str,
        ent_re: np.ndarray,
        ent_im: np.ndarray,
        rel_re: np.ndarray,
        rel_im: np.ndarray,
        entity_names: Sequence[str],
        relation_names: Sequence[str],
    ) -> None:
        if kind not in ("complex", "distmult"):
            raise ValueError(f"unknown model kind {kind!r}")
        self.kind = kind
        self.ent_re = ent_re
        self.ent_im = ent_im
        self.rel_re = rel_re
        self.rel_im = rel_im
        self.entity_names = list(entity_names)
        self.relation_names = list(relation_names)

    @property
    def n_entities(self) -> int:
        return self.ent_re.shape[0]

    @property
    def n_relations(self) -> int:
        return self.rel_re.shape[0]

    @property
    def dim(self) -> int:
        return self.ent_re.shape[1]


def create_model(
    kind: str,
    entity_names: Sequence[str],
    relation_names: Sequence[str],
    dim: int,
    seed: int = 0,
) -> EmbeddingModel:
    """Zero-mean normal init with std 1/sqrt(dim); keeps raw scores O(1)."""
    rng = np.random.default_rng(seed)
    scale = 1.0 / np.sqrt(dim)
    n_ent, n_rel = len(entity_names), len(relation_names)

    def draw(n: int) -> np.ndarray:
        return rng.normal(0.0, scale, size=(n, dim))

    ent_re = draw(n_ent)
    ent_im = draw(n_ent)
    rel_re = draw(n_rel)
    rel_im = draw(n_rel)
    if kind == "distmult":
        ent_im = np.zeros_like(ent_im)
        rel_im = np.zeros_like(rel_im)
    return EmbeddingModel(kind, ent_re, ent_im, rel_re, rel_im, entity_names, relation_names)


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def score_triples(model: EmbeddingModel, s, r, o) -> np.ndarray:
    """Raw scores ``Re(<e_s, w_r, conj(e_o)>)`` for parallel id arrays."""
    a, b = model.ent_re[s], model.ent_im[s]
    c, d = model.rel_re[r], model.rel_im[r]
    f, g = model.ent_re[o], model.ent_im[o]
    return ((a * c - b * d) * f + (a * d + b * c) * g).sum(axis=-1)


def score_triple(model: EmbeddingModel, s: int, r: int, o: int) -> float:
    for idx, bound in ((s, model.n_entities), (r, model.n_relations), (o, model.n_entities)):
        if not (0 <= idx < bound):
            raise LogicError(f"id {idx} outside vocabulary of size {bound}")
    return float(score_triples(model, np.array([s]), np.array([r]), np.array([o]))[0])


def prob_triple(model: EmbeddingModel, s: int, r: int, o: int) -> float:
    """The initial output prediction: sigmoid of the raw score."""
    return float(sigmoid(np.array([score_triple(model, s, r, o)]))[0])


def score_objects(model: EmbeddingModel, s: int, r: int) -> np.ndarray:
    """Raw scores of (s, r, e) over every entity e."""
    a, b = model.ent_re[s], model.ent_im[s]
    c, d = model.rel_re[r], model.rel_im[r]
    re_part = a * c - b * d
    im_part = a * d + b * c
    return model.ent_re @ re_part + model.ent_im @ im_part


def score_subjects(model: EmbeddingModel, r: int, o: int) -> np.ndarray:
    """Raw scores of (e, r, o) over every entity e."""
    c, d = model.rel_re[r], model.rel_im[r]
    f, g = model.ent_re[o], model.ent_im[o]
    coeff_a = c * f + d * g
    coeff_b = c * g - d * f
    return model.ent_re @ coeff_a + model.ent_im @ coeff_b


def loss_and_grads(
    model: EmbeddingModel,
    s: np.ndarray,
    r: np.ndarray,
    o: np.ndarray,
    labels: np.ndarray,
    l2: float = 0.0,
    n3: float = 0.0,
) -> tuple[float, dict[str, np.ndarray]]:
    """Mean binary cross-entropy and dense parameter gradients.

    The BCE-of-sigmoid composition differentiates to
    ``sigmoid(raw) - label`` per example; the trilinear form's partials
    follow by the product rule and are scatter-added over the touched
    rows.
    """
    a, b = model.ent_re[s], model.ent_im[s]
    c, d = model.rel_re[r], model.rel_im[r]
    f, g = model.ent_re[o], model.ent_im[o]
    raw = ((a * c - b * d) * f + (a * d + b * c) * g).sum(axis=1)
    # softplus(raw) - y*raw is the numerically stable BCE on logits
    loss = float(np.mean(np.logaddexp(0.0, raw) - labels * raw))
    err = (sigmoid(raw) - labels) / raw.shape[0]
    err = err[:, None]

    grads = {
        "ent_re": np.zeros_like(model.ent_re),
        "ent_im": np.zeros_like(model.ent_im),
        "rel_re": np.zeros_like(model.rel_re),
        "rel_im": np.zeros_like(model.rel_im),
    }
    np.add.at(grads["ent_re"], s, err * (c * f + d * g))
    np.add.at(grads["ent_im"], s, err * (c * g - d * f))
    np.add.at(grads["rel_re"], r, err * (a * f + b * g))
    np.add.at(grads["rel_im"], r, err * (a * g - b * f))
    np.add.at(grads["ent_re"], o, err * (a * c - b * d))
    np.add.at(grads["ent_im"], o, err * (a * d + b * c))

    if l2 > 0.0:
        for name in grads:
            param = getattr(model, name)
            loss += l2 * float(np.sum(param * param))
            grads[name] += 2.0 * l2 * param
    if n3 > 0.0:
        loss += _add_n3(model, grads, s, r, o, n3 / raw.shape[0])
    if model.kind == "distmult":
        grads["ent_im"][:] = 0.0
        grads["rel_im"][:] = 0.0
    return loss, grads


def _softmax_rows(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _add_n3(model: EmbeddingModel, grads: dict, s, r, o, weight: float) -> float:
    """Nuclear 3-norm on touched rows: weight/3 * sum of |x_k|^3."""
    penalty = 0.0
    for rows, re_name, im_name in (
        (s, "ent_re", "ent_im"),
        (o, "ent_re", "ent_im"),
        (r, "rel_re", "rel_im"),
    ):
        re_arr = getattr(model, re_name)[rows]
        im_arr = getattr(model, im_name)[rows]
        mod = np.sqrt(re_arr * re_arr + im_arr * im_arr)
        penalty += weight / 3.0 * float(np.sum(mod ** 3))
        np.add.at(grads[re_name], rows, weight * re_arr * mod)
        np.add.at(grads[im_name], rows, weight * im_arr * mod)
    return penalty


def ce_loss_and_grads(
    model: EmbeddingModel,
    s: np.ndarray,
    r: np.ndarray,
    o: np.ndarray,
    n3: float = 0.0,
) -> tuple[float, dict[str, np.ndarray]]:
    """Softmax cross-entropy against all entities, both sides.

    Each fact is a classification over the full entity set as the
    missing tail and, symmetrically, as the missing head; the gradient
    of log-softmax is ``softmax(raw) - onehot(target)`` and the
    trilinear partials factor into four dense matmuls per side.
    """
    bs = s.shape[0]
    rows = np.arange(bs)
    denom = 2.0 * bs
    ER, EI = model.ent_re, model.ent_im
    a, b = ER[s], EI[s]
    c, d = model.rel_re[r], model.rel_im[r]
    f, g = ER[o], EI[o]
    grads = {
        "ent_re": np.zeros_like(model.ent_re),
        "ent_im": np.zeros_like(model.ent_im),
        "rel_re": np.zeros_like(model.rel_re),
        "rel_im": np.zeros_like(model.rel_im),
    }

    # tail side: rank the true object against every entity
    cre, cim = a * c - b * d, a * d + b * c
    raw = cre @ ER.T + cim @ EI.T
    shifted = raw - raw.max(axis=1, keepdims=True)
    logz = np.log(np.exp(shifted).sum(axis=1))
    loss = float(np.sum(logz - shifted[rows, o]) / denom)
    E = _softmax_rows(raw)
    E[rows, o] -= 1.0
    E /= denom
    grads["ent_re"] += E.T @ cre
    grads["ent_im"] += E.T @ cim
    P, Q = E @ ER, E @ EI
    np.add.at(grads["ent_re"], s, c * P + d * Q)
    np.add.at(grads["ent_im"], s, -d * P + c * Q)
    np.add.at(grads["rel_re"], r, a * P + b * Q)
    np.add.at(grads["rel_im"], r, -b * P + a * Q)

    # head side: rank the true subject against every entity
    cre2, cim2 = c * f + d * g, c * g - d * f
    raw2 = cre2 @ ER.T + cim2 @ EI.T
    shifted2 = raw2 - raw2.max(axis=1, keepdims=True)
    logz2 = np.log(np.exp(shifted2).sum(axis=1))
    loss += float(np.sum(logz2 - shifted2[rows, s]) / denom)
    E2 = _softmax_rows(raw2)
    E2[rows, s] -= 1.0
    E2 /= denom
    grads["ent_re"] += E2.T @ cre2
    grads["ent_im"] += E2.T @ cim2
    P2, Q2 = E2 @ ER, E2 @ EI
    np.add.at(grads["ent_re"], o, c * P2 - d * Q2)
    np.add.at(grads["ent_im"], o, d * P2 + c * Q2)
    np.add.at(grads["rel_re"], r, f * P2 + g * Q2)
    np.add.at(grads["rel_im"], r, g * P2 - f * Q2)

    if n3 > 0.0:
        loss += _add_n3(model, grads, s, r, o, n3 / denom)
    if model.kind == "distmult":
        grads["ent_im"][:] = 0.0
        grads["rel_im"][:] = 0.0
    return loss, grads


class _Adam:
    def __init__(self, shapes: dict[str, tuple], lr: float) -> None:
        self.lr = lr
        self.t = 0
        self.m = {k: np.zeros(v) for k, v in shapes.items()}
        self.v = {k: np.zeros(v) for k, v in shapes.items()}

    def step(self, model: EmbeddingModel, grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        bc1 = 1.0 - ADAM_BETA1 ** self.t
        bc2 = 1.0 - ADAM_BETA2 ** self.t
        for name, grad in grads.items():
            m = self.m[name]
            v = self.v[name]
            m *= ADAM_BETA1
            m += (1.0 - ADAM_BETA1) * grad
            v *= ADAM_BETA2
            v += (1.0 - ADAM_BETA2) * grad * grad
            update = (self.lr / bc1) * m / (np.sqrt(v / bc2) + ADAM_EPSILON)
            getattr(model, name)[...] -= update


def training_triples(store: FactStore) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Binary facts of the store as parallel id arrays, in atom-id order."""
    triples = [fact for fact in store if len(fact) == 3]
    if not triples:
        raise LogicError("store holds no binary facts to train on")
    arr = np.array(triples, dtype=np.int64)
    return arr[:, 1], arr[:, 0], arr[:, 2]


def train(
    model: EmbeddingModel,
    store: FactStore,
    cfg: TrainConfig,
) -> tuple[EmbeddingModel, list[float]]:
    """Fit the scorer on the store's facts.

    The default objective is BCE over the facts plus uniform head/tail
    corruptions; ``cfg.loss="ce"`` ranks each fact against every entity
    on both sides instead.  Mini-batch Adam, deterministic for a fixed
    seed (bitwise identical loss traces).  Returns the model and the
    per-epoch mean loss.
    """
    s_pos, r_pos, o_pos = training_triples(store)
    n_pos = s_pos.shape[0]
    n_ent = model.n_entities
    rng = np.random.default_rng(cfg.seed)
    shapes = {
        "ent_re": model.ent_re.shape,
        "ent_im": model.ent_im.shape,
        "rel_re": model.rel_re.shape,
        "rel_im": model.rel_im.shape,
    }
    adam = _Adam(shapes, cfg.lr)
    losses: list[float] = []
    for epoch in range(cfg.epochs):
        order = rng.permutation(n_pos)
        total = 0.0
        count = 0
        for start in range(0, n_pos, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            bs = batch.shape[0]
            s_b, r_b, o_b = s_pos[batch], r_pos[batch], o_pos[batch]
            if cfg.loss == "ce":
                loss, grads = ce_loss_and_grads(model, s_b, r_b, o_b, cfg.n3)
                n_examples = 2 * bs
            else:
                neg_heads = rng.integers(0, n_ent, size=(bs, cfg.negatives))
                neg_tails = rng.integers(0, n_ent, size=(bs, cfg.negatives))
                s_all = np.concatenate([s_b, neg_heads.reshape(-1), np.repeat(s_b, cfg.negatives)])
                r_all = np.concatenate([r_b, np.repeat(r_b, cfg.negatives), np.repeat(r_b, cfg.negatives)])
                o_all = np.concatenate([o_b, np.repeat(o_b, cfg.negatives), neg_tails.reshape(-1)])
                labels = np.concatenate([
                    np.ones(bs),
                    np.zeros(bs * cfg.negatives * 2),
                ])
                loss, grads = loss_and_grads(model, s_all, r_all, o_all, labels, cfg.l2, cfg.n3)
                n_examples = labels.shape[0]
            if not np.isfinite(loss):
                raise NumericError(
                    f"non-finite loss {loss!r} at epoch {epoch}, batch offset {start}"
                )
            adam.step(model, grads)
            total += loss * n_examples
            count += n_examples
        losses.append(total / count)
    return model, losses


def atom_scorer(model: EmbeddingModel, theory: Theory):
    """Adapter mapping ground atoms to initial predictions.

    Returns ``None`` for atoms outside the model's vocabulary (non-binary
    predicates, or ids beyond the trained tables), which downstream
    layers replace with the neutral prior.
    """

    def score(atom: GroundAtom) -> Optional[float]:
        if len(atom) != 3:
            return None
        pred, s, o = atom
        if pred >= model.n_relations or s >= model.n_entities or o >= model.n_entities:
            return None
        return prob_triple(model, s, pred, o)

    return score


def save_model(model: EmbeddingModel, path: str) -> None:
    np.savez_compressed(
        path,
        version=np.array([CHECKPOINT_VERSION]),
        kind=np.array([model.kind]),
        ent_re=model.ent_re,
        ent_im=model.ent_im,
        rel_re=model.rel_re,
        rel_im=model.rel_im,
        entity_names=np.array(model.entity_names, dtype=object),
        relation_names=np.array(model.relation_names, dtype=object),
    )


def load_model(path: str) -> EmbeddingModel:
    data = np.load(path, allow_pickle=True)
    version = int(data["version"][0])
    if version != CHECKPOINT_VERSION:
        raise LogicError(f"unsupported checkpoint version {version}, expected {CHECKPOINT_VERSION}")
    return EmbeddingModel(
        str(data["kind"][0]),
        data["ent_re"],
        data["ent_im"],
        data["rel_re"],
        data["rel_im"],
        [str(x) for x in data["entity_names"]],
        [str(x) for x in data["relation_names"]],
    )
