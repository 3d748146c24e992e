"""Cross-validation, exhaustive grid search, and benchmark-table assembly."""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, replace

import numpy as np
import scipy.stats

from .data import DataError, Dataset, FoldAssignment, apply_normalization, fit_normalization, \
    one_hot, stratified_k_fold
from .kernel import KernelParams, build_class_geometry, feature_space_distance_matrix, kernel_matrix
from .model import ModelConfig, design_matrix, hidden_matrix, init_random_layer, \
    predict, train
from .solver import solve_auto
from .weighting import WeightingConfig, class_probability, contribution_scores, huber_weights


def accuracy(pred, truth) -> float:
    """Percent of matching labels."""
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.size == 0:
        raise ValueError("prediction and truth must be nonempty vectors of equal length")
    return 100.0 * float(np.mean(pred == truth))


def fold_seed(master_seed: int, config_index: int, fold: int) -> int:
    """Deterministic per-(config, fold) seed, stable across execution orders."""
    ss = np.random.SeedSequence(entropy=(int(master_seed), int(config_index), int(fold)))
    return int(ss.generate_state(1)[0])


@dataclass(frozen=True)
class CVResult:
    fold_accuracies: np.ndarray  # NaN for skipped folds
    mean: float
    skipped_folds: tuple[int, ...] = ()


def cross_validate(dataset: Dataset, config: ModelConfig, k: int, seed: int,
                   assignment: FoldAssignment | None = None,
                   config_index: int = 0) -> CVResult:
    """k-fold CV: normalization and weighting are fitted on the training folds only."""
    if assignment is None:
        assignment = stratified_k_fold(dataset, k, seed)
    accs = np.full(k, np.nan)
    skipped = []
    for f in range(k):
        tr_idx, te_idx = assignment.train_test_indices(f)
        try:
            train_ds = dataset.subset(tr_idx)
        except DataError:
            skipped.append(f)  # a class is absent from the training folds
            continue
        cfg = replace(config, seed=fold_seed(seed, config_index, f))
        model = train(train_ds, cfg)
        _, labels = predict(model, dataset.features[te_idx])
        accs[f] = accuracy(labels, dataset.labels[te_idx])
    valid = accs[~np.isnan(accs)]
    if valid.size == 0:
        raise DataError("every fold was skipped; dataset too small for this split")
    return CVResult(accs, float(valid.mean()), tuple(skipped))


@dataclass(frozen=True)
class GridSpec:
    """Hyperparameter grids; defaults follow the standard benchmarking ranges."""

    gamma_grid: tuple = tuple(10.0 ** e for e in range(-5, 6))
    hidden_grid: tuple = tuple(range(3, 204, 20))
    kernel_grid: tuple = tuple(2.0 ** e for e in range(-5, 6))
    tau_grid: tuple = (0.5, 0.625, 0.75, 0.875, 1.0)
    k: int = 5
    seed: int = 0
    delta: float | None = None
    delta_quantile: float = 0.5

    def __post_init__(self):
        for g in (self.gamma_grid, self.hidden_grid, self.kernel_grid, self.tau_grid):
            if len(g) == 0:
                raise ValueError("grids must be nonempty")


def enumerate_configs(variant: str, grid: GridSpec) -> list[ModelConfig]:
    """Deterministic iteration order: gamma, then hidden nodes, then kernel, then tau."""
    robust = variant in ("r2vfl-a", "r2vfl-m")
    scheme = "average" if variant == "r2vfl-a" else "median"
    configs = []
    for gamma in grid.gamma_grid:
        for hidden in grid.hidden_grid:
            if not robust:
                configs.append(ModelConfig(variant, hidden, gamma))
                continue
            for kg in grid.kernel_grid:
                for tau in grid.tau_grid:
                    w = WeightingConfig(kernel=KernelParams(gamma=kg), tau_multiplier=tau,
                                        center_scheme=scheme, delta=grid.delta,
                                        delta_quantile=grid.delta_quantile)
                    configs.append(ModelConfig(variant, hidden, gamma, weighting=w))
    return configs


class _FoldContext:
    """Per-fold preprocessed arrays plus caches shared across grid configs."""

    def __init__(self, dataset: Dataset, assignment: FoldAssignment, f: int):
        self.fold = f
        tr_idx, te_idx = assignment.train_test_indices(f)
        self.ok = np.unique(dataset.labels[tr_idx]).size == dataset.n_classes
        if not self.ok:
            return
        norm = fit_normalization(dataset.features[tr_idx])
        self.X_tr = apply_normalization(dataset.features[tr_idx], norm)
        self.X_te = apply_normalization(dataset.features[te_idx], norm)
        self.y_tr = dataset.labels[tr_idx]
        self.y_te = dataset.labels[te_idx]
        self.Y_tr = one_hot(self.y_tr, dataset.n_classes)
        self._kernel_cache: dict = {}
        self._score_cache: dict = {}

    def _kernel_entry(self, kgamma: float, quantile: float):
        key = (kgamma, quantile)
        if key not in self._kernel_cache:
            K = kernel_matrix(self.X_tr, self.X_tr, KernelParams(gamma=kgamma))
            dist = feature_space_distance_matrix(K)
            pair = dist[np.triu_indices(dist.shape[0], k=1)]
            delta = float(np.quantile(pair, quantile))
            self._kernel_cache[key] = (K, dist, delta)
        return self._kernel_cache[key]

    def scores(self, w: WeightingConfig) -> np.ndarray:
        key = (w.kernel.gamma, w.tau_multiplier, w.center_scheme, w.delta, w.delta_quantile)
        if key not in self._score_cache:
            K, dist, auto_delta = self._kernel_entry(w.kernel.gamma, w.delta_quantile)
            delta = w.delta if w.delta is not None else auto_delta
            cp = class_probability(self.y_tr, delta, dist)
            geometry = build_class_geometry(self.y_tr, K, w.center_scheme)
            m = huber_weights(self.y_tr, geometry, w.tau_multiplier)
            self._score_cache[key] = contribution_scores(cp, m).r
        return self._score_cache[key]

    def evaluate(self, config: ModelConfig, seed: int) -> float:
        layer = init_random_layer(self.X_tr.shape[1], config.hidden_nodes, seed)
        A1 = hidden_matrix(self.X_tr, layer, config.activation)
        A2 = design_matrix(self.X_tr, A1, config.direct_link)
        Y = self.Y_tr
        if config.robust:
            r = self.scores(config.resolved_weighting())
            A2 = r[:, None] * A2
            Y = r[:, None] * Y
        W2 = solve_auto(A2, Y, config.gamma)
        A1t = hidden_matrix(self.X_te, layer, config.activation)
        A2t = design_matrix(self.X_te, A1t, config.direct_link)
        labels = np.argmax(A2t @ W2, axis=1)
        return accuracy(labels, self.y_te)


def _evaluate_chunk(dataset, variant, grid, indices):
    configs = enumerate_configs(variant, grid)
    assignment = stratified_k_fold(dataset, grid.k, grid.seed)
    contexts = [_FoldContext(dataset, assignment, f) for f in range(grid.k)]
    out = []
    for ci in indices:
        cfg = configs[ci]
        accs = np.full(grid.k, np.nan)
        for ctx in contexts:
            if ctx.ok:
                accs[ctx.fold] = ctx.evaluate(cfg, fold_seed(grid.seed, ci, ctx.fold))
        valid = accs[~np.isnan(accs)]
        if valid.size == 0:
            raise DataError("every fold skipped during grid search")
        out.append((ci, float(valid.mean()), accs))
    return out


@dataclass(frozen=True)
class GridSearchResult:
    best_config: ModelConfig
    best_mean: float
    trace: tuple  # tuples of (config, mean accuracy, per-fold accuracies)


def grid_search(dataset: Dataset, variant: str, grid: GridSpec,
                jobs: int = 1) -> GridSearchResult:
    """Exhaustive search; ties break to the earliest config in iteration order.

    Results are independent of the worker count.
    """
    configs = enumerate_configs(variant, grid)
    indices = list(range(len(configs)))
    if jobs <= 1 or len(configs) == 1:
        results = _evaluate_chunk(dataset, variant, grid, indices)
    else:
        chunks = [indices[i::jobs] for i in range(jobs)]
        chunks = [c for c in chunks if c]
        with concurrent.futures.ProcessPoolExecutor(max_workers=len(chunks)) as pool:
            futures = [pool.submit(_evaluate_chunk, dataset, variant, grid, c) for c in chunks]
            results = [item for fut in futures for item in fut.result()]
        results.sort(key=lambda t: t[0])
    trace = tuple((configs[ci], mean, accs) for ci, mean, accs in results)
    best_i = max(range(len(trace)), key=lambda i: (trace[i][1], -i))
    return GridSearchResult(trace[best_i][0], trace[best_i][1], trace)


@dataclass(frozen=True)
class BenchmarkTable:
    """Accuracy matrix (datasets x models) with its fractional rank matrix."""

    model_names: tuple[str, ...]
    dataset_names: tuple[str, ...]
    accuracy: np.ndarray  # (D, p) percent
    rank: np.ndarray      # (D, p), rank 1 = best, ties averaged

    @classmethod
    def from_accuracy(cls, model_names, dataset_names, accuracy) -> "BenchmarkTable":
        acc = np.asarray(accuracy, dtype=np.float64)
        if acc.size == 0:
            raise ValueError("empty benchmark table")
        if np.any(np.isnan(acc)):
            raise ValueError("benchmark table contains NaN accuracies")
        rank = np.vstack([scipy.stats.rankdata(-row, method="average") for row in acc])
        return cls(tuple(model_names), tuple(dataset_names), acc, rank)


def average_ranks(table: BenchmarkTable) -> np.ndarray:
    """Column means of the rank matrix (lower is better)."""
    return table.rank.mean(axis=0)
