"""File formats and the seeded synthetic-corpus generator.

Formats (all UTF-8 text, floats written with 17 significant digits so that
save -> load round-trips are exact):

* posterior matrix: first line ``frames classes``, then one line per frame
  with space-separated probabilities; rows must sum to 1 within 1e-6.
* HMM: JSON with fields num_states, initial, transitions, labels,
  state_to_class; probabilities are stored linearly and converted to logs
  on load. Unknown fields are rejected.
* transcript: one token per line.
* corpus manifest: JSON listing utterance ids and their posterior and
  reference files, plus the generator seed and noise parameters.

The corpus generator simulates an acoustic model's posteriors along a state
path sampled from the HMM. Randomness comes from SplitMix64, a named
64-bit generator with defined behavior, so corpora are byte-reproducible
across platforms (and reimplementable in any language).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .decoder import HmmModel, collapse_tokens
from .errors import DataFormatError, ValidationError
from .posteriors import PosteriorMatrix, check_row_sums

__all__ = [
    "NoiseSpec",
    "CorpusUtterance",
    "CorpusManifest",
    "SplitMix64",
    "format_float",
    "load_posteriors",
    "save_posteriors",
    "load_hmm",
    "save_hmm",
    "load_transcript",
    "save_transcript",
    "load_priors",
    "load_manifest",
    "save_manifest",
    "generate_corpus",
]

MANIFEST_NAME = "manifest.json"


def format_float(x: float) -> str:
    """17 significant digits: enough to reproduce any float64 exactly."""
    return f"{x:.17g}"


# ---------------------------------------------------------------------------
# posterior matrices
# ---------------------------------------------------------------------------

def load_posteriors(path) -> PosteriorMatrix:
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise DataFormatError(path, 1, "empty file; expected a 'frames classes' header")
    header = lines[0].split()
    if len(header) != 2:
        raise DataFormatError(
            path, 1, f"malformed header {lines[0]!r}; expected 'frames classes'"
        )
    try:
        frames, classes = int(header[0]), int(header[1])
    except ValueError:
        raise DataFormatError(
            path, 1, f"malformed header {lines[0]!r}; expected two integers"
        ) from None
    body = [(no, ln) for no, ln in enumerate(lines[1:], start=2) if ln.strip()]
    if len(body) != frames:
        raise DataFormatError(
            path, len(lines), f"expected {frames} data rows, found {len(body)}"
        )
    rows = np.empty((frames, classes), dtype=np.float64)
    for k, (lineno, line) in enumerate(body):
        tokens = line.split()
        if len(tokens) != classes:
            raise DataFormatError(
                path, lineno, f"expected {classes} values, found {len(tokens)}"
            )
        try:
            rows[k] = [float(tok) for tok in tokens]
        except ValueError:
            bad = next(tok for tok in tokens if not _is_float(tok))
            raise DataFormatError(path, lineno, f"non-numeric token {bad!r}") from None
        if not np.isfinite(rows[k]).all() or (rows[k] < 0).any() or (rows[k] > 1).any():
            raise DataFormatError(path, lineno, "probabilities must be in [0, 1]")
        bad_row = check_row_sums(rows[k : k + 1])
        if bad_row is not None:
            raise DataFormatError(
                path, lineno, f"row sums to {rows[k].sum()!r}, expected 1 within 1e-06"
            )
    try:
        return PosteriorMatrix(rows)
    except ValidationError as exc:
        raise DataFormatError(path, None, str(exc)) from None


def _is_float(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def save_posteriors(matrix: PosteriorMatrix, path) -> None:
    path = Path(path)
    out = [f"{matrix.frames} {matrix.classes}"]
    for row in matrix.values:
        out.append(" ".join(format_float(v) for v in row))
    path.write_text("\n".join(out) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# HMM documents
# ---------------------------------------------------------------------------

_HMM_FIELDS = {"num_states", "initial", "transitions", "labels", "state_to_class"}


def load_hmm(path) -> HmmModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(path, exc.lineno, f"invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise DataFormatError(path, None, "HMM document must be a JSON object")
    unknown = set(doc) - _HMM_FIELDS
    if unknown:
        raise DataFormatError(path, None, f"unknown fields {sorted(unknown)}")
    missing = _HMM_FIELDS - set(doc)
    if missing:
        raise DataFormatError(path, None, f"missing fields {sorted(missing)}")
    n = doc["num_states"]
    if not isinstance(n, int) or n < 1:
        raise DataFormatError(path, None, f"num_states must be a positive integer, got {n!r}")
    init = np.asarray(doc["initial"], dtype=np.float64)
    trans = np.asarray(doc["transitions"], dtype=np.float64)
    if init.shape != (n,):
        raise DataFormatError(path, None, f"initial must have {n} entries, got shape {init.shape}")
    if trans.shape != (n, n):
        raise DataFormatError(path, None, f"transitions must be {n}x{n}, got shape {trans.shape}")
    labels = doc["labels"]
    s2c = doc["state_to_class"]
    if len(labels) != n or len(s2c) != n:
        raise DataFormatError(path, None, "labels and state_to_class must have one entry per state")
    try:
        return HmmModel.from_probs(init, trans, labels, s2c)
    except ValidationError as exc:
        raise DataFormatError(path, None, str(exc)) from None


def save_hmm(hmm: HmmModel, path) -> None:
    path = Path(path)
    doc = {
        "num_states": hmm.num_states,
        "initial": [float(p) for p in np.exp(hmm.log_initial)],
        "transitions": [[float(p) for p in row] for row in np.exp(hmm.log_transitions)],
        "labels": list(hmm.state_labels),
        "state_to_class": [int(c) for c in hmm.state_to_class],
    }
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# transcripts and priors
# ---------------------------------------------------------------------------

def load_transcript(path) -> tuple[str, ...]:
    path = Path(path)
    tokens = [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines()]
    return tuple(tok for tok in tokens if tok)


def save_transcript(tokens, path) -> None:
    Path(path).write_text("".join(f"{tok}\n" for tok in tokens), encoding="utf-8")


def load_priors(path) -> np.ndarray:
    path = Path(path)
    tokens = path.read_text(encoding="utf-8").split()
    if not tokens:
        raise DataFormatError(path, 1, "empty priors file")
    try:
        vals = np.array([float(tok) for tok in tokens], dtype=np.float64)
    except ValueError:
        bad = next(tok for tok in tokens if not _is_float(tok))
        raise DataFormatError(path, None, f"non-numeric token {bad!r}") from None
    if (vals <= 0.0).any():
        raise DataFormatError(path, None, "priors must be > 0")
    return vals


# ---------------------------------------------------------------------------
# corpus manifest
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseSpec:
    """Synthetic acoustic-noise knobs.

    concentration scales how much posterior mass lands on the true class
    (math.inf gives exact one-hot rows); confusion_rate is the probability
    that a frame's mass is re-centered on a uniformly chosen wrong class.
    """

    concentration: float
    confusion_rate: float
    seed: int

    def __post_init__(self):
        if math.isnan(self.concentration) or self.concentration <= 0.0:
            raise ValidationError(f"concentration must be > 0, got {self.concentration!r}")
        if not 0.0 <= self.confusion_rate <= 1.0:
            raise ValidationError(
                f"confusion_rate must be in [0, 1], got {self.confusion_rate!r}"
            )
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must fit in 64 bits")


@dataclass(frozen=True)
class CorpusUtterance:
    utterance_id: str
    posteriors_path: Path
    reference_path: Path


@dataclass(frozen=True)
class CorpusManifest:
    utterances: tuple[CorpusUtterance, ...]
    noise: NoiseSpec | None = None

    def __post_init__(self):
        ids = [u.utterance_id for u in self.utterances]
        if len(set(ids)) != len(ids):
            raise ValidationError("utterance ids must be unique")


def save_manifest(manifest: CorpusManifest, path) -> None:
    path = Path(path)
    base = path.parent
    doc: dict = {}
    if manifest.noise is not None:
        doc["noise"] = {
            "concentration": manifest.noise.concentration,
            "confusion_rate": manifest.noise.confusion_rate,
            "seed": manifest.noise.seed,
        }
    doc["utterances"] = [
        {
            "id": u.utterance_id,
            "posteriors": _relative_to(u.posteriors_path, base),
            "reference": _relative_to(u.reference_path, base),
        }
        for u in manifest.utterances
    ]
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def _relative_to(p: Path, base: Path) -> str:
    try:
        return Path(p).relative_to(base).as_posix()
    except ValueError:
        return Path(p).as_posix()


def load_manifest(path) -> CorpusManifest:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(path, exc.lineno, f"invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict) or "utterances" not in doc:
        raise DataFormatError(path, None, "manifest must be an object with 'utterances'")
    noise = None
    if doc.get("noise") is not None:
        nz = doc["noise"]
        try:
            noise = NoiseSpec(
                concentration=float(nz["concentration"]),
                confusion_rate=float(nz["confusion_rate"]),
                seed=int(nz["seed"]),
            )
        except (KeyError, TypeError, ValueError, ValidationError) as exc:
            raise DataFormatError(path, None, f"bad noise spec: {exc}") from None
    base = path.parent
    utts = []
    for entry in doc["utterances"]:
        try:
            utt = CorpusUtterance(
                utterance_id=str(entry["id"]),
                posteriors_path=base / entry["posteriors"],
                reference_path=base / entry["reference"],
            )
        except (KeyError, TypeError) as exc:
            raise DataFormatError(path, None, f"bad utterance entry: {exc}") from None
        for p in (utt.posteriors_path, utt.reference_path):
            if not p.exists():
                raise DataFormatError(path, None, f"referenced file {p} does not exist")
        utts.append(utt)
    try:
        return CorpusManifest(tuple(utts), noise)
    except ValidationError as exc:
        raise DataFormatError(path, None, str(exc)) from None


# ---------------------------------------------------------------------------
# seeded generation
# ---------------------------------------------------------------------------

class SplitMix64:
    """SplitMix64: 64-bit generator with identical output on every platform.

    Reference output from seed 0 starts 0xe220a8397b1dcdaf,
    0x6e789e6aa1b965f4, 0x06c45d188009454f.
    """

    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self._state = int(seed) & self._MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & self._MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self._MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self._MASK
        return z ^ (z >> 31)

    def next_double(self) -> float:
        """Uniform in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def below(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        return min(int(self.next_double() * n), n - 1)

    def exponential(self) -> float:
        return -math.log1p(-self.next_double())

    def categorical(self, probs) -> int:
        u = self.next_double()
        acc = 0.0
        for i, p in enumerate(probs):
            acc += p
            if u < acc:
                return i
        return len(probs) - 1


def _posterior_row(rng: SplitMix64, classes: int, center: int, concentration: float) -> np.ndarray:
    if math.isinf(concentration):
        row = np.zeros(classes)
        row[center] = 1.0
        return row
    w = np.array([rng.exponential() for _ in range(classes)])
    w[center] *= concentration
    total = w.sum()
    if total <= 0.0:  # all 53-bit uniforms were exactly 0; vanishingly unlikely
        w[:] = 0.0
        w[center] = 1.0
        total = 1.0
    return w / total


def generate_corpus(
    hmm: HmmModel,
    num_utterances: int,
    frames_range: tuple[int, int],
    noise: NoiseSpec,
    out_dir,
) -> CorpusManifest:
    """Write a synthetic corpus under out_dir and return its manifest.

    Each utterance samples a state path from the HMM, takes the collapsed
    labels as the reference transcript, and emits per-frame posterior rows
    centered (modulo confusion events) on the true class. Utterance i draws
    from SplitMix64(seed + i), so generation is reproducible and utterances
    are independent of corpus size or processing order.
    """
    if num_utterances < 1:
        raise ValidationError("num_utterances must be >= 1")
    lo, hi = int(frames_range[0]), int(frames_range[1])
    if not 1 <= lo <= hi:
        raise ValidationError(f"frames range must satisfy 1 <= lo <= hi, got {frames_range!r}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    classes = int(hmm.state_to_class.max()) + 1
    if classes < 2:
        raise ValidationError("corpus generation needs at least 2 classes")
    init_p = np.exp(hmm.log_initial)
    trans_p = np.exp(hmm.log_transitions)
    utts = []
    for i in range(num_utterances):
        rng = SplitMix64(noise.seed + i)
        num_frames = lo + rng.below(hi - lo + 1)
        states = [rng.categorical(init_p)]
        for _ in range(num_frames - 1):
            states.append(rng.categorical(trans_p[states[-1]]))
        rows = np.empty((num_frames, classes))
        for t, s in enumerate(states):
            center = int(hmm.state_to_class[s])
            if rng.next_double() < noise.confusion_rate:
                k = rng.below(classes - 1)
                center = k if k < center else k + 1
            rows[t] = _posterior_row(rng, classes, center, noise.concentration)
        reference = collapse_tokens([hmm.state_labels[s] for s in states])
        uid = f"utt{i:04d}"
        post_path = out_dir / f"{uid}.post"
        ref_path = out_dir / f"{uid}.ref"
        save_posteriors(PosteriorMatrix(rows), post_path)
        save_transcript(reference, ref_path)
        utts.append(CorpusUtterance(uid, post_path, ref_path))
    manifest = CorpusManifest(tuple(utts), noise)
    save_manifest(manifest, out_dir / MANIFEST_NAME)
    return manifest
