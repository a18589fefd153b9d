"""Spec files, seeded random hypersurfaces and the bundled example corpus.

A spec file is a JSON object::

    {"n": 4, "d": 3, "field": "p:10007", "f": "x0^3 + ...",
     "seed": 1, "sample": 0, "attempts": 1}

``seed``/``sample``/``attempts`` are present only for random specs; the
sample is reproduced by ``random_smooth_spec(d, n, field, seed, sample)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .exact_arith import FieldConfig
from .jacobian import is_smooth
from .polyring import HypersurfaceSpec, Polynomial, format_poly, monomial_count

__all__ = [
    "ATTEMPT_CAP",
    "CORPUS_SHAPES",
    "CapExceeded",
    "RandomSample",
    "sample_rng",
    "random_polynomial",
    "random_smooth_spec",
    "spec_to_dict",
    "spec_from_dict",
    "load_spec",
    "save_spec",
    "corpus_names",
    "load_corpus",
]

ATTEMPT_CAP = 1000
CORPUS_SHAPES = ((3, 2), (3, 3), (3, 4), (4, 3), (4, 4), (2, 4))
CORPUS_PRIME = 10007
CORPUS_SEED = 20240101


class CapExceeded(RuntimeError):
    def __init__(self, attempts: int):
        super().__init__(f"no smooth sample within {attempts} attempts")
        self.attempts = attempts


@dataclass(frozen=True)
class RandomSample:
    spec: HypersurfaceSpec
    seed: int
    sample: int
    attempts: int


def sample_rng(seed: int, sample: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for (seed, sample index, stream)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(sample, stream)))


def random_polynomial(nvars: int, d: int, field: FieldConfig, rng: np.random.Generator) -> Polynomial:
    """Uniform coefficients in F_p on all degree-d monomials."""
    if not field.is_prime:
        raise ValueError("random sampling needs a prime field")
    coeffs = rng.integers(0, field.prime, size=monomial_count(nvars, d))
    return Polynomial.from_vector(field.array([int(c) for c in coeffs]), nvars, d, field)


def random_smooth_spec(
    d: int, n: int, field: FieldConfig, seed: int, sample: int = 0,
    cap: int = ATTEMPT_CAP, strict: bool = True,
) -> RandomSample:
    rng = sample_rng(seed, sample)
    for attempt in range(1, cap + 1):
        f = random_polynomial(n + 2, d, field, rng)
        spec = HypersurfaceSpec(n, d, f, strict=strict)
        if is_smooth(spec):
            return RandomSample(spec, seed, sample, attempt)
    raise CapExceeded(cap)


def spec_to_dict(spec: HypersurfaceSpec, **extra) -> dict:
    out = {"n": spec.n, "d": spec.d, "field": spec.field.tag, "f": format_poly(spec.f)}
    out.update({k: v for k, v in extra.items() if v is not None})
    return out


def spec_from_dict(data: dict, strict: bool = True) -> HypersurfaceSpec:
    try:
        n, d, tag, text = int(data["n"]), int(data["d"]), data["field"], data["f"]
    except KeyError as exc:
        raise ValueError(f"spec is missing key {exc.args[0]!r}") from None
    return HypersurfaceSpec.parse(text, n, d, FieldConfig.from_tag(tag), strict=strict)


def load_spec(path: str | Path) -> HypersurfaceSpec:
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ValueError("spec file must hold a JSON object")
    return spec_from_dict(data)


def save_spec(spec: HypersurfaceSpec, path: str | Path, **extra) -> None:
    Path(path).write_text(json.dumps(spec_to_dict(spec, **extra), sort_keys=True, indent=2) + "\n")


def _corpus_dir():
    return resources.files("hypertorelli") / "corpus"


def corpus_names() -> list[str]:
    return sorted(p.name[:-5] for p in _corpus_dir().iterdir() if p.name.endswith(".json"))


def load_corpus(name: str) -> tuple[HypersurfaceSpec, dict]:
    entry = _corpus_dir() / f"{name}.json"
    if not entry.is_file():
        raise ValueError(f"unknown corpus member {name!r}")
    data = json.loads(entry.read_text())
    return spec_from_dict(data), data


def build_corpus(target: str | Path) -> list[str]:
    """Regenerate the bundled corpus files into ``target``."""
    target = Path(target)
    target.mkdir(parents=True, exist_ok=True)
    field = FieldConfig.prime_field(CORPUS_PRIME)
    written = []
    for d, n in CORPUS_SHAPES:
        name = f"fermat_d{d}_n{n}"
        save_spec(HypersurfaceSpec.fermat(n, d, field), target / f"{name}.json")
        written.append(name)
        for i in range(3):
            s = random_smooth_spec(d, n, field, CORPUS_SEED, i)
            name = f"random_d{d}_n{n}_{i}"
            save_spec(s.spec, target / f"{name}.json", seed=s.seed, sample=i, attempts=s.attempts)
            written.append(name)
    return written
