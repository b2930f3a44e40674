"""Training features, dataset assembly and the t-SNE embedding.

Every training sample summarises one error category of one (possibly
augmented) series as 20 numbers: the mean absolute error at each of the 15
AOIs plus five scalar statistics (mean, sd, IQR and the 95% CI bounds).
Sample rows are labelled with the operating condition that produced them;
assembly, standardisation and splitting are deterministic per seed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace as dc_replace
from pathlib import Path

import numpy as np

from .analysis import describe, clean_series, per_aoi_mean
from .augment import AoiErrorMap, augment_sample
from .dataset import GazeSession, N_AOI, fmt_float, fill_missing
from .errors import GazeDataError, NumericError, UsageError
from .geometry import CATEGORIES, ErrorSeries, compute_errors

FEATURE_NAMES = tuple(f"aoi_{k:02d}" for k in range(1, N_AOI + 1)) + (
    "mean",
    "sd",
    "iqr",
    "ci_lo",
    "ci_hi",
)
REDUCED_FEATURE_NAMES = ("mean", "sd", "ci_lo", "ci_hi", "iqr")

TASKS = ("user_distance", "head_pose", "platform_pose", "mixed")

_TASK_CLASSES = {
    "user_distance": ("UD50", "UD60", "UD70", "UD80"),
    "head_pose": ("Neutral", "HeadRoll20", "HeadPitch20", "HeadYaw20"),
    "platform_pose": ("Neutral", "PlatRoll20", "PlatPitch20", "PlatYaw20"),
}


@dataclass(frozen=True)
class FeatureVector:
    aoi_err: np.ndarray  # (15,)
    mean: float
    sd: float
    iqr: float
    ci95_low: float
    ci95_high: float

    def as_array(self) -> np.ndarray:
        return np.concatenate(
            [self.aoi_err, [self.mean, self.sd, self.iqr, self.ci95_low, self.ci95_high]]
        )

    def reduced(self) -> np.ndarray:
        """The 5-statistic form: mean, sd, CI bounds, IQR."""
        return np.array([self.mean, self.sd, self.ci95_low, self.ci95_high, self.iqr])


@dataclass
class LabeledMatrix:
    rows: np.ndarray  # (n, d)
    labels: np.ndarray  # (n,) int
    class_names: list[str]
    feature_names: tuple[str, ...] = FEATURE_NAMES
    categories: list[str] | None = None  # per-row error category
    standardized: bool = False
    column_mean: np.ndarray | None = None
    column_sd: np.ndarray | None = None

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if len(self.rows) != len(self.labels):
            raise UsageError("rows and labels must have equal length")

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @classmethod
    def from_arrays(cls, rows, labels, class_names=None, feature_names=None) -> "LabeledMatrix":
        rows = np.asarray(rows, dtype=float)
        labels = np.asarray(labels, dtype=int)
        if class_names is None:
            class_names = [str(c) for c in range(int(labels.max()) + 1 if len(labels) else 0)]
        if feature_names is None:
            feature_names = tuple(f"f{j}" for j in range(rows.shape[1]))
        return cls(rows, labels, list(class_names), tuple(feature_names))

    def subset(self, idx) -> "LabeledMatrix":
        idx = np.asarray(idx)
        return LabeledMatrix(
            rows=self.rows[idx],
            labels=self.labels[idx],
            class_names=list(self.class_names),
            feature_names=self.feature_names,
            categories=[self.categories[i] for i in idx] if self.categories else None,
            standardized=self.standardized,
            column_mean=self.column_mean,
            column_sd=self.column_sd,
        )


def build_feature(payload: ErrorSeries | AoiErrorMap, category: str,
                  absolute: bool = True) -> FeatureVector:
    """Summarise one error category of a series (or flipped AOI map).

    The per-AOI entries are mean |error| at each target location; the five
    statistics are computed over the same (absolute by default) series, CI
    as in `analysis.describe`.  Flip variants reuse their source series for
    the statistics since flipping only permutes values across AOIs.
    """
    if category not in CATEGORIES:
        raise GazeDataError(f"unknown error category {category!r}")
    if isinstance(payload, AoiErrorMap):
        aoi_err = payload.channel(category).copy()
        series = payload.source
    else:
        aoi_err = per_aoi_mean(payload, category, absolute=absolute)
        series = payload
    x = series.channel(category)
    if absolute:
        x = np.abs(x)
    st = describe(x)
    return FeatureVector(
        aoi_err=aoi_err,
        mean=st.mean,
        sd=float(np.std(x, ddof=1)),
        iqr=st.iqr,
        ci95_low=st.ci95_low,
        ci95_high=st.ci95_high,
    )


def _mixed_classes(sessions) -> tuple[str, ...]:
    pose = sorted(
        {
            s.meta.condition
            for s in sessions
            if s.meta.condition.startswith(("Head", "Plat"))
        }
    )
    if len(pose) != 3:
        raise GazeDataError(
            f"mixed task needs exactly 3 pose conditions, found {len(pose)}"
        )
    return ("UD50", "UD60", "UD70", "UD80") + tuple(pose)


def assemble_dataset(
    sessions: list[GazeSession],
    task: str,
    augment: bool = True,
    seed: int = 0,
    clean_method: str = "median",
    kernel_w: int = 41,
    absolute: bool = True,
    reduced: bool = False,
) -> LabeledMatrix:
    """Turn sessions into a labelled feature matrix for one task.

    Each session is filled, converted to angular errors and cleaned; with
    augmentation on, its ten variants each contribute one row per error
    category (30 rows), otherwise the original contributes three.  For the
    mixed task, neutral-pose recordings count as the UD60 class and a
    participant may supply that data only once.
    """
    if task not in TASKS:
        raise UsageError(f"unknown task {task!r}; choose from {TASKS}")
    if not sessions:
        raise GazeDataError("no sessions given")

    if task == "mixed":
        class_names = _mixed_classes(sessions)
        seen_neutral: dict[str, str] = {}
        for s in sessions:
            if s.meta.condition in ("UD60", "Neutral"):
                pid = s.meta.participant_id
                if pid in seen_neutral:
                    raise GazeDataError(
                        f"participant {pid} contributes both {seen_neutral[pid]} and "
                        f"{s.meta.condition}; the mixed task takes neutral data once"
                    )
                seen_neutral[pid] = s.meta.condition
    else:
        class_names = _TASK_CLASSES[task]

    def class_of(condition: str) -> int:
        if task == "mixed" and condition == "Neutral":
            condition = "UD60"
        if condition not in class_names:
            raise GazeDataError(f"condition {condition} does not belong to task {task}")
        return class_names.index(condition)

    rows: list[np.ndarray] = []
    labels: list[int] = []
    categories: list[str] = []
    for i, session in enumerate(sessions):
        label = class_of(session.meta.condition)
        errors = clean_series(
            compute_errors(fill_missing(session)), method=clean_method, kernel_w=kernel_w
        )
        if augment:
            payloads = [v for _, v in augment_sample(errors, seed + 101 * i).variants]
        else:
            payloads = [errors]
        for payload in payloads:
            for cat in CATEGORIES:
                fv = build_feature(payload, cat, absolute=absolute)
                rows.append(fv.reduced() if reduced else fv.as_array())
                labels.append(label)
                categories.append(cat)

    present = sorted(set(labels))
    if len(present) < len(class_names):
        missing = [class_names[c] for c in range(len(class_names)) if c not in present]
        raise GazeDataError(f"no sessions for class(es): {', '.join(missing)}")
    return LabeledMatrix(
        rows=np.asarray(rows),
        labels=np.asarray(labels),
        class_names=list(class_names),
        feature_names=REDUCED_FEATURE_NAMES if reduced else FEATURE_NAMES,
        categories=categories,
    )


def standardize(m: LabeledMatrix) -> LabeledMatrix:
    """Scale every column to zero mean and unit variance (population sd).

    The fitted column means and sds are stored on the result so held-out
    rows can be transformed with the training parameters.
    """
    mu = m.rows.mean(axis=0)
    sd = m.rows.std(axis=0)  # population sd
    zero = np.flatnonzero(sd == 0)
    if zero.size:
        names = ", ".join(m.feature_names[j] for j in zero)
        raise NumericError(f"zero-variance column(s): {names}")
    out = dc_replace(m)
    out.rows = (m.rows - mu) / sd
    out.standardized = True
    out.column_mean = mu
    out.column_sd = sd
    return out


def apply_standardization(rows: np.ndarray, column_mean: np.ndarray,
                          column_sd: np.ndarray) -> np.ndarray:
    """Transform rows with previously fitted parameters (e.g. test data)."""
    return (np.asarray(rows, dtype=float) - column_mean) / column_sd


def destandardize(rows: np.ndarray, column_mean: np.ndarray,
                  column_sd: np.ndarray) -> np.ndarray:
    return np.asarray(rows, dtype=float) * column_sd + column_mean


def shuffle_split(m: LabeledMatrix, test_frac: float, seed: int) -> tuple[LabeledMatrix, LabeledMatrix]:
    """Deterministic stratified split into train and test matrices."""
    if not (0 < test_frac < 1):
        raise UsageError("test_frac must be in (0, 1)")
    rng = np.random.default_rng(seed)
    train_idx: list[int] = []
    test_idx: list[int] = []
    for c in range(m.n_classes):
        members = np.flatnonzero(m.labels == c)
        if members.size < 2:
            raise UsageError(
                f"class {m.class_names[c]} has {members.size} sample(s); cannot split"
            )
        members = members[rng.permutation(members.size)]
        n_test = int(round(members.size * test_frac))
        n_test = min(max(n_test, 1), members.size - 1)
        test_idx.extend(members[:n_test])
        train_idx.extend(members[n_test:])
    return m.subset(np.sort(train_idx)), m.subset(np.sort(test_idx))


def write_matrix_csv(path: str | Path, m: LabeledMatrix) -> None:
    """Feature columns by name, then label and category."""
    lines = [",".join(m.feature_names) + ",label,category"]
    for i in range(len(m)):
        cat = m.categories[i] if m.categories else ""
        cells = ",".join(fmt_float(v) for v in m.rows[i])
        lines.append(f"{cells},{m.class_names[m.labels[i]]},{cat}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_matrix_csv(path: str | Path) -> LabeledMatrix:
    text = Path(path).read_text(encoding="utf-8").strip().splitlines()
    if not text:
        raise GazeDataError(f"{path}: empty feature file")
    header = text[0].split(",")
    if header[-2:] != ["label", "category"]:
        raise GazeDataError(f"{path}: expected trailing label,category columns")
    feature_names = tuple(header[:-2])
    rows, names, cats = [], [], []
    for lineno, line in enumerate(text[1:], start=2):
        parts = line.split(",")
        if len(parts) != len(header):
            raise GazeDataError(f"{path} row {lineno}: wrong field count")
        try:
            rows.append([float(v) for v in parts[: len(feature_names)]])
        except ValueError:
            raise GazeDataError(f"{path} row {lineno}: non-numeric feature") from None
        names.append(parts[-2])
        cats.append(parts[-1])
    class_names = sorted(set(names))
    labels = [class_names.index(n) for n in names]
    return LabeledMatrix(
        rows=np.asarray(rows),
        labels=np.asarray(labels),
        class_names=class_names,
        feature_names=feature_names,
        categories=cats,
    )


# ---------------------------------------------------------------------------
# t-SNE
# ---------------------------------------------------------------------------


@dataclass
class TsneResult:
    coords: np.ndarray  # (n, 2)
    kl_trace: np.ndarray  # KL(P || Q) per iteration, against the plain P
    row_perplexities: np.ndarray  # realized perplexity of each conditional row


def _row_conditionals(sq_dists: np.ndarray, beta: float, i: int) -> tuple[np.ndarray, float]:
    """Conditional similarities of row i at precision beta, with entropy."""
    p = np.exp(-sq_dists * beta)
    p[i] = 0.0
    total = p.sum()
    if total <= 0:
        return np.zeros_like(p), 0.0
    p /= total
    nz = p > 0
    entropy = float(-(p[nz] * np.log(p[nz])).sum())
    return p, entropy


def conditional_probs(sq_dists: np.ndarray, perplexity: float,
                      tol: float = 1e-4, max_iter: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Per-row Gaussian similarities with bandwidths found by binary search.

    For each row the precision beta = 1/(2 sigma^2) is bisected until the
    realized perplexity exp(entropy) matches the target within ``tol``.
    Returns the row-conditional matrix and the realized perplexities.
    """
    n = sq_dists.shape[0]
    P = np.zeros((n, n))
    realized = np.zeros(n)
    target_entropy = np.log(perplexity)
    for i in range(n):
        beta, beta_min, beta_max = 1.0, 0.0, np.inf
        p, entropy = _row_conditionals(sq_dists[i], beta, i)
        for _ in range(max_iter):
            if abs(np.exp(entropy) - perplexity) < tol:
                break
            if entropy > target_entropy:  # too spread out: raise precision
                beta_min = beta
                beta = beta * 2.0 if beta_max == np.inf else (beta + beta_max) / 2.0
            else:
                beta_max = beta
                beta = (beta + beta_min) / 2.0
            p, entropy = _row_conditionals(sq_dists[i], beta, i)
        P[i] = p
        realized[i] = np.exp(entropy)
    return P, realized


def _pairwise_sq_dists(rows: np.ndarray) -> np.ndarray:
    sq = (rows**2).sum(axis=1)
    d = sq[:, None] + sq[None, :] - 2.0 * rows @ rows.T
    np.fill_diagonal(d, 0.0)
    return np.maximum(d, 0.0)


def tsne(
    m: LabeledMatrix | np.ndarray,
    perplexity: float = 80.0,
    out_dims: int = 2,
    seed: int = 0,
    n_iter: int = 1000,
    learning_rate: float = 200.0,
    early_exaggeration: float = 12.0,
    exaggeration_iters: int = 250,
    momentum_switch_iter: int = 250,
) -> TsneResult:
    """Embed high-dimensional rows in 2-D by matching neighbour distributions.

    Gaussian similarities in the input space (bandwidth per point, set by
    binary search on the target perplexity) are symmetrised and matched
    against a Student-t kernel in the embedding by gradient descent on the
    KL divergence, with early exaggeration, a momentum switch and the
    classic per-parameter gains.  Short runs shrink the exaggeration and
    switch points so at least half the iterations optimise the plain
    objective.
    """
    rows = m.rows if isinstance(m, LabeledMatrix) else np.asarray(m, dtype=float)
    n = rows.shape[0]
    if out_dims != 2:
        raise UsageError("only 2-D output is supported")
    if not perplexity < n / 3:
        raise UsageError(f"perplexity {perplexity} infeasible for {n} rows (need < n/3)")
    exaggeration_iters = min(exaggeration_iters, n_iter // 2)
    momentum_switch_iter = min(momentum_switch_iter, n_iter // 2)

    sq_dists = _pairwise_sq_dists(rows)
    cond, realized = conditional_probs(sq_dists, perplexity, tol=1e-4)
    P = (cond + cond.T) / (2.0 * n)
    P = np.maximum(P, 1e-12)

    rng = np.random.default_rng(seed)
    y = rng.normal(0.0, 1e-4, (n, out_dims))
    velocity = np.zeros_like(y)
    gains = np.ones_like(y)
    kl_trace = np.empty(n_iter)

    for it in range(n_iter):
        target = P * early_exaggeration if it < exaggeration_iters else P
        d2 = _pairwise_sq_dists(y)
        w = 1.0 / (1.0 + d2)
        np.fill_diagonal(w, 0.0)
        Q = np.maximum(w / w.sum(), 1e-12)

        kl_trace[it] = float((P * np.log(P / Q)).sum())

        coeff = (target - Q) * w
        grad = 4.0 * ((np.diag(coeff.sum(axis=1)) - coeff) @ y)
        momentum = 0.5 if it < momentum_switch_iter else 0.8
        same_sign = np.sign(grad) == np.sign(velocity)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        gains = np.maximum(gains, 0.01)
        velocity = momentum * velocity - learning_rate * gains * grad
        y = y + velocity
        y = y - y.mean(axis=0)

    return TsneResult(coords=y, kl_trace=kl_trace, row_perplexities=realized)


def write_tsne_csv(path: str | Path, result: TsneResult, labels: np.ndarray,
                   class_names: list[str]) -> None:
    lines = ["x,y,label"]
    for i in range(len(result.coords)):
        lines.append(
            f"{fmt_float(result.coords[i, 0])},{fmt_float(result.coords[i, 1])},"
            f"{class_names[labels[i]]}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
