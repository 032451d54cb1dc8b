"""Run configuration: a flat dataclass, loadable from a ``key = value`` file."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from hybridsum.lexrank import SelectionBudget

# fields that change where or how fast a run happens, not what it computes
NON_SEMANTIC = frozenset({"output_dir", "workers", "seed"})


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    corpus_path: str = ""
    corpus_format: str = "jsonl"
    split: str | None = None
    min_doc_tokens: int = 20
    min_ref_tokens: int = 3
    # extractive stage
    extract: bool = True
    max_sentences: int = 15
    max_tokens: int = 4000
    damping: float = 0.85
    epsilon: float = 1e-6
    max_iterations: int = 100
    threshold: float | None = None
    max_input_tokens: int = 4096
    # abstractive stage
    backend: str = "lexrank"
    remote_endpoint: str | None = None
    max_output_tokens: int = 512
    # metrics
    rouge: bool = True
    rouge_stem: bool = True
    meteor: bool = True
    embed: tuple[str, ...] = ()
    factuality: bool = True
    aggregation: str = "macro"
    entity_kinds: tuple[str, ...] | None = None
    # run plumbing
    output_dir: str = "runs/latest"
    seed: int = 0
    workers: int = 4

    def __post_init__(self):
        if self.aggregation not in ("macro", "micro"):
            raise ConfigError(f"aggregation must be macro or micro, got {self.aggregation!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        try:
            self.budget
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def budget(self) -> SelectionBudget:
        return SelectionBudget(
            self.max_sentences, self.max_tokens, self.damping, self.epsilon, self.max_iterations, self.threshold
        )

    def semantic_dict(self) -> dict:
        d = asdict(self)
        for key in NON_SEMANTIC:
            d.pop(key)
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.semantic_dict(), sort_keys=True, default=list)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _coerce(name: str, annotation: str, raw: str):
    raw = raw.strip()
    if "None" in annotation and raw.lower() in ("", "none", "null"):
        return None
    if annotation.startswith("bool"):
        if raw.lower() in _TRUE:
            return True
        if raw.lower() in _FALSE:
            return False
        raise ConfigError(f"{name}: expected a boolean, got {raw!r}")
    try:
        if annotation.startswith("int"):
            return int(raw)
        if annotation.startswith("float"):
            return float(raw)
    except ValueError:
        raise ConfigError(f"{name}: cannot parse {raw!r}") from None
    if annotation.startswith("tuple"):
        return tuple(x.strip() for x in raw.split(",") if x.strip())
    return raw


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment, unknown keys are errors."""
    types = {f.name: str(f.type) for f in fields(RunConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, types[key], raw)
    return replace(base or RunConfig(), **values)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text("utf-8"))


def dump_config(cfg: RunConfig) -> str:
    lines = []
    for f in fields(RunConfig):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ", ".join(v)
        elif isinstance(v, bool):
            v = str(v).lower()
        lines.append(f"{f.name} = {'' if v is None else v}")
    return "\n".join(lines) + "\n"
