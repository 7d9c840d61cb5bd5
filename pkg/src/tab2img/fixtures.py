"""Deterministic synthetic benchmark datasets.

Twelve small mixed-type classification tables matching the shapes of the
usual low-dimensional UCI benchmarks (sample count, categorical/numerical
split, class count and imbalance). Values are drawn from fixed per-column
substreams, so a dataset is identical across runs and machines. Class signal
is planted per feature with tunable strength: numerical columns shift their
mean by class, binary columns tilt their level probability, categorical
columns peak around a class-dependent level. A few columns carry "?" holes
to exercise imputation.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .seeding import substream

MASTER_SEED = 7
MISSING = "?"


@dataclass(frozen=True)
class F:
    name: str
    kind: str                    # "num" | "bin" | "cat"
    levels: tuple = ()
    mu: float = 0.0
    sigma: float = 1.0
    p0: float = 0.5
    signal: float = 0.0


def n(name, mu, sigma, signal):
    return F(name, "num", mu=mu, sigma=sigma, signal=signal)


def b(name, signal, levels=("no", "yes"), p0=0.5):
    return F(name, "bin", levels=tuple(levels), p0=p0, signal=signal)


def c(name, levels, signal):
    return F(name, "cat", levels=tuple(levels), signal=signal)


@dataclass(frozen=True)
class FixtureSpec:
    name: str
    label_name: str
    classes: tuple
    counts: tuple
    features: tuple
    missing: tuple = field(default=())   # (feature name, hole rate)

    @property
    def n_samples(self) -> int:
        return sum(self.counts)


_ORD4 = ("0", "1", "2", "3")


def _derm(name, signal):
    return c(name, _ORD4, signal)


CATALOG = {}


def _register(spec: FixtureSpec) -> None:
    CATALOG[spec.name] = spec


_register(FixtureSpec(
    name="crx", label_name="approved",
    classes=("minus", "plus"), counts=(383, 307),
    features=(
        b("a01", 0.3, ("a", "b")),
        n("a02", 31.0, 12.0, 0.6),
        n("a03", 4.8, 5.0, 0.7),
        c("a04", ("u", "y", "l"), 0.5),
        c("a05", ("g", "p", "gg"), 0.5),
        c("a06", ("c", "d", "cc", "i", "j", "k", "m", "q"), 0.8),
        c("a07", ("v", "h", "bb", "ff", "z"), 0.6),
        n("a08", 2.2, 3.3, 0.9),
        b("a09", 1.2, ("f", "t")),
        b("a10", 0.8, ("f", "t")),
        n("a11", 2.4, 4.9, 0.8),
        b("a12", 0.1, ("f", "t")),
        c("a13", ("g", "s", "p"), 0.2),
        c("a14", ("z0", "z1", "z2", "z3"), 0.3),
        c("a15", ("lo", "mid", "hi"), 0.7),
    ),
    missing=(("a02", 0.04), ("a06", 0.03), ("a14", 0.04)),
))

_register(FixtureSpec(
    name="diabetes", label_name="class",
    classes=("neg", "pos"), counts=(200, 320),
    features=(
        n("age", 48.0, 12.0, 0.5),
        b("gender", 0.4, ("female", "male")),
        b("polyuria", 1.4),
        b("polydipsia", 1.3),
        b("sudden_weight_loss", 0.9),
        b("weakness", 0.5),
        b("polyphagia", 0.8),
        b("genital_thrush", 0.4),
        b("visual_blurring", 0.6),
        b("itching", 0.1),
        b("irritability", 0.7),
        b("delayed_healing", 0.2),
        b("partial_paresis", 1.0),
        b("muscle_stiffness", 0.4),
        b("alopecia", 0.3),
        b("obesity", 0.2),
    ),
))

_register(FixtureSpec(
    name="german", label_name="credit_risk",
    classes=("good", "bad"), counts=(700, 300),
    features=(
        c("checking_status", ("lt0", "0to200", "ge200", "none"), 0.8),
        n("duration_months", 21.0, 12.0, 0.7),
        c("credit_history", ("none", "paid", "existing", "delayed", "critical"), 0.7),
        c("purpose", ("car", "furniture", "radio", "education", "repairs", "business"), 0.4),
        n("credit_amount", 3270.0, 2820.0, 0.5),
        c("savings_status", ("lt100", "100to500", "500to1000", "ge1000", "unknown"), 0.6),
        c("employment_since", ("unemployed", "lt1", "1to4", "4to7", "ge7"), 0.5),
        c("installment_rate", ("1", "2", "3", "4"), 0.3),
        c("personal_status", ("single", "married", "divorced", "widowed"), 0.2),
        c("other_debtors", ("none", "coapplicant", "guarantor"), 0.4),
        c("residence_since", ("1", "2", "3", "4"), 0.1),
        c("property", ("realestate", "savings", "car", "unknown"), 0.5),
        n("age_years", 35.0, 11.0, 0.3),
        c("other_installments", ("bank", "stores", "none"), 0.3),
        c("housing", ("rent", "own", "free"), 0.4),
        c("existing_credits", ("1", "2", "3", "4"), 0.2),
        c("job", ("unskilled", "resident", "skilled", "management"), 0.3),
        b("num_dependents", 0.1, ("1", "2")),
        b("telephone", 0.1, ("none", "yes")),
        b("foreign_worker", 0.2),
    ),
))

_register(FixtureSpec(
    name="hepatitis", label_name="outcome",
    classes=("die", "live"), counts=(32, 123),
    features=(
        c("age_group", ("20s", "30s", "40s", "50s", "60s"), 0.4),
        b("sex", 0.1, ("female", "male")),
        b("steroid", 1.3),
        b("antivirals", 0.1),
        b("fatigue", 0.5),
        b("malaise", 0.4),
        b("anorexia", 0.3),
        b("liver_big", 0.15),
        b("liver_firm", 0.2),
        b("spleen_palpable", 0.3),
        b("spiders", 0.5),
        b("ascites", 0.55),
        b("varices", 0.45),
        n("bilirubin", 1.4, 1.0, 1.8),
        c("alk_phosphate_level", ("low", "normal", "high", "veryhigh"), 0.3),
        c("sgot_level", ("low", "normal", "high", "veryhigh"), 0.35),
        c("albumin_level", ("low", "normal", "high"), 0.3),
        c("protime", ("verylow", "low", "normal", "high"), 2.4),
        b("histology", 0.25),
    ),
    missing=(("bilirubin", 0.04), ("albumin_level", 0.05), ("protime", 0.06)),
))

_register(FixtureSpec(
    name="ionosphere", label_name="signal",
    classes=("b", "g"), counts=(126, 225),
    features=(
        b("polarization", 0.3, ("horiz", "vert")),
        c("antenna", ("alpha", "beta", "gamma"), 0.4),
    ) + tuple(
        n(f"re{i:02d}", 0.3 if i % 2 else -0.2, 0.8, 0.3 + 0.04 * i)
        for i in range(1, 17)
    ) + tuple(
        n(f"im{i:02d}", 0.0, 0.6, 0.2 + 0.03 * i)
        for i in range(1, 17)
    ),
))

_register(FixtureSpec(
    name="saheart", label_name="chd",
    classes=("0", "1"), counts=(302, 160),
    features=(
        n("sbp", 138.0, 20.0, 0.3),
        n("tobacco", 3.6, 4.6, 0.6),
        n("ldl", 4.7, 2.1, 0.7),
        n("adiposity", 25.0, 7.8, 0.5),
        b("famhist", 0.8, ("absent", "present")),
        n("typea", 53.0, 9.8, 0.2),
        n("obesity", 26.0, 4.2, 0.3),
        n("alcohol", 17.0, 24.0, 0.15),
        n("age", 43.0, 14.6, 0.8),
    ),
))

_register(FixtureSpec(
    name="cmc", label_name="method",
    classes=("nouse", "longterm", "shortterm"), counts=(629, 333, 511),
    features=(
        n("wife_age", 32.5, 8.2, 0.6),
        c("wife_education", ("1", "2", "3", "4"), 0.9),
        c("husband_education", ("1", "2", "3", "4"), 0.5),
        n("children", 3.3, 2.4, 0.8),
        b("wife_religion", 0.2, ("other", "islam")),
        b("wife_working", 0.15),
        c("husband_occupation", ("1", "2", "3", "4"), 0.3),
        c("living_standard", ("1", "2", "3", "4"), 0.5),
        b("media_exposure", 0.35, ("good", "notgood")),
    ),
))

_register(FixtureSpec(
    name="dermat", label_name="diagnosis",
    classes=("psoriasis", "seboreic", "lichen", "rosea", "chronic", "rubra"),
    counts=(112, 61, 72, 49, 52, 20),
    features=(
        _derm("erythema", 2.6),
        _derm("scaling", 2.8),
        _derm("definite_borders", 2.4),
        _derm("itching", 2.2),
        _derm("koebner_phenomenon", 2.6),
        _derm("polygonal_papules", 3.0),
        _derm("follicular_papules", 2.8),
        _derm("oral_mucosal_involvement", 3.0),
        _derm("knee_elbow_involvement", 2.6),
        _derm("scalp_involvement", 2.4),
        b("family_history", 1.2, ("0", "1")),
        _derm("melanin_incontinence", 2.8),
        _derm("eosinophils_infiltrate", 1.8),
        _derm("pnl_infiltrate", 2.2),
        _derm("fibrosis_papillary_dermis", 2.8),
        _derm("exocytosis", 2.0),
        _derm("acanthosis", 1.8),
        _derm("hyperkeratosis", 2.0),
        _derm("parakeratosis", 2.2),
        _derm("clubbing_rete_ridges", 2.8),
        _derm("elongation_rete_ridges", 2.6),
        _derm("thinning_suprapapillary", 2.8),
        _derm("spongiform_pustule", 2.4),
        _derm("munro_microabcess", 2.6),
        _derm("focal_hypergranulosis", 3.0),
        _derm("disappearance_granular", 2.4),
        _derm("vacuolisation_basal", 3.0),
        _derm("spongiosis", 2.2),
        _derm("saw_tooth_retes", 2.8),
        _derm("follicular_horn_plug", 2.6),
        _derm("perifollicular_parakeratosis", 2.4),
        _derm("inflammatory_mononuclear", 1.6),
        _derm("band_like_infiltrate", 3.0),
        c("age_band", ("child", "youth", "adult", "senior"), 0.6),
    ),
))

_register(FixtureSpec(
    name="heart", label_name="num",
    classes=("0", "1", "2", "3", "4"), counts=(164, 55, 36, 35, 13),
    features=(
        n("age", 54.0, 9.0, 0.4),
        b("sex", 0.4, ("female", "male")),
        c("cp", ("typical", "atypical", "nonanginal", "asymptomatic"), 1.0),
        n("trestbps", 131.0, 17.0, 0.3),
        n("chol", 246.0, 51.0, 0.2),
        b("fbs", 0.1, ("f", "t")),
        c("restecg", ("normal", "stt", "hypertrophy"), 0.3),
        n("thalach", 150.0, 23.0, 0.8),
        b("exang", 0.8),
        n("oldpeak", 1.04, 1.16, 0.9),
        c("slope", ("up", "flat", "down"), 0.6),
        c("ca", ("0", "1", "2", "3"), 1.1),
        c("thal", ("normal", "fixed", "reversable"), 1.0),
    ),
))

_register(FixtureSpec(
    name="annealing", label_name="class",
    classes=("1", "2", "3", "5", "U"), counts=(8, 88, 608, 60, 34),
    features=(
        c("family", ("TN", "ZS", "GB"), 0.4),
        b("product_type", 0.1, ("C", "H")),
        c("steel", ("A", "K", "M", "R", "S", "V", "W"), 1.2),
        c("carbon", ("00", "03", "08"), 0.8),
        c("hardness", ("00", "45", "60", "85"), 0.9),
        b("temper_rolling", 0.5, ("n", "t")),
        c("condition", ("S", "A", "X"), 0.7),
        c("formability", ("1", "2", "3", "4", "5"), 1.0),
        b("non_ageing", 0.3, ("n", "a")),
        c("surface_finish", ("P", "M", "X"), 0.2),
        c("surface_quality", ("D", "E", "F", "G", "X"), 1.1),
        c("enamelability", ("1", "2", "5"), 0.3),
        b("bc", 0.1, ("n", "y")),
        b("bf", 0.4, ("n", "y")),
        b("bt", 0.3, ("n", "y")),
        c("bw_me", ("B", "M", "X"), 0.2),
        b("bl", 0.2, ("n", "y")),
        b("m", 0.05, ("n", "y")),
        b("chrom", 0.25, ("n", "c")),
        b("phos", 0.1, ("n", "p")),
        b("cbond", 0.35, ("n", "y")),
        b("marvi", 0.05, ("n", "y")),
        b("exptl", 0.1, ("n", "y")),
        b("ferro", 0.2, ("n", "y")),
        b("corr", 0.1, ("n", "y")),
        b("blue_bright", 0.3, ("n", "b")),
        b("lustre", 0.4, ("n", "y")),
        b("jurofm", 0.05, ("n", "y")),
        b("s", 0.1, ("n", "y")),
        b("p", 0.05, ("n", "y")),
        b("shape", 0.6, ("coil", "sheet")),
        b("oil", 0.2, ("n", "y")),
        c("bore", ("0000", "0500", "0600"), 0.5),
        c("packing", ("1", "2", "3"), 0.3),
        n("thickness", 1.6, 1.3, 0.5),
        n("width", 610.0, 240.0, 0.3),
        n("length", 2200.0, 1800.0, 0.4),
        n("strength", 310.0, 150.0, 0.6),
    ),
))

_register(FixtureSpec(
    name="bridges", label_name="material",
    classes=("wood", "iron", "steel"), counts=(16, 11, 79),
    features=(
        c("river", ("A", "M", "O"), 0.3),
        c("location", ("northside", "southside", "downtown", "uptown", "outskirts"), 0.2),
        c("erected_era", ("crafts", "emerging", "mature", "modern"), 1.2),
        c("purpose", ("walk", "aqueduct", "rr", "highway"), 0.8),
        n("length", 1823.0, 1000.0, 0.6),
        c("lanes", ("1", "2", "4", "6"), 0.5),
        b("clear_g", 0.4, ("n", "g")),
        c("t_or_d", ("through", "deck", "mixed"), 0.7),
        c("rel_l", ("s", "ss", "f"), 0.6),
        c("span", ("short", "medium", "long"), 1.0),
    ),
    missing=(("length", 0.05), ("span", 0.04), ("t_or_d", 0.03)),
))

_register(FixtureSpec(
    name="tae", label_name="rating",
    classes=("low", "medium", "high"), counts=(49, 50, 52),
    features=(
        b("native_speaker", 0.7),
        c("course_topic", ("stats", "calculus", "algebra", "programming"), 0.4),
        n("class_size", 27.0, 12.0, 0.35),
        n("instructor_experience", 6.0, 3.5, 0.6),
        n("contact_hours", 45.0, 12.0, 0.5),
    ),
))


# (samples, categorical incl. binary, numerical, classes) per dataset
_SHAPES = {
    "crx": (690, 11, 4, 2),
    "diabetes": (520, 15, 1, 2),
    "german": (1000, 17, 3, 2),
    "hepatitis": (155, 18, 1, 2),
    "ionosphere": (351, 2, 32, 2),
    "saheart": (462, 1, 8, 2),
    "cmc": (1473, 7, 2, 3),
    "dermat": (366, 34, 0, 6),
    "heart": (303, 8, 5, 5),
    "annealing": (798, 34, 4, 5),
    "bridges": (106, 9, 1, 3),
    "tae": (151, 2, 3, 3),
}

for _name, (_ns, _nc, _nn, _k) in _SHAPES.items():
    _spec = CATALOG[_name]
    _cats = sum(1 for f in _spec.features if f.kind in ("bin", "cat"))
    _nums = sum(1 for f in _spec.features if f.kind == "num")
    if (_spec.n_samples, _cats, _nums, len(_spec.classes)) != (_ns, _nc, _nn, _k):
        raise AssertionError(
            f"fixture {_name} shape {(_spec.n_samples, _cats, _nums, len(_spec.classes))}"
            f" != expected {(_ns, _nc, _nn, _k)}"
        )


def available() -> tuple:
    return tuple(sorted(CATALOG))


def _class_signal(spec: FixtureSpec, class_idx: np.ndarray) -> np.ndarray:
    k = len(spec.classes)
    return 2.0 * class_idx / max(k - 1, 1) - 1.0


def _gen_column(spec: FixtureSpec, fs: F, fi: int, class_idx: np.ndarray) -> list:
    rng = substream(MASTER_SEED, "fixtures", spec.name, fs.name)
    m = class_idx.size
    t = _class_signal(spec, class_idx)
    if fs.kind == "num":
        x = fs.mu + fs.sigma * (rng.standard_normal(m) + fs.signal * t)
        return [f"{v:.2f}" for v in x]
    if fs.kind == "bin":
        p = np.clip(fs.p0 + 0.5 * fs.signal * t, 0.05, 0.95)
        draw = rng.random(m) < p
        lo, hi = fs.levels
        return [hi if d else lo for d in draw]
    levels = fs.levels
    L = len(levels)
    k = len(spec.classes)
    cdfs = []
    for ci in range(k):
        peak = (round((L - 1) * ci / max(k - 1, 1)) + fi) % L
        dist = np.abs(np.arange(L) - peak)
        dist = np.minimum(dist, L - dist)
        w = np.exp(fs.signal * np.where(dist == 0, 1.0, np.where(dist == 1, 0.4, 0.0)))
        cdfs.append(np.cumsum(w / w.sum()))
    cdf = np.asarray(cdfs)[class_idx]
    pick = (rng.random(m)[:, None] > cdf).sum(axis=1)
    return [levels[j] for j in pick]


def build(name: str) -> tuple:
    """Return (header row, data rows) for one dataset; label column last."""
    if name not in CATALOG:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(available())}")
    spec = CATALOG[name]
    class_idx = np.repeat(np.arange(len(spec.classes)), spec.counts)
    order = substream(MASTER_SEED, "fixtures", spec.name, "order")
    class_idx = class_idx[order.permutation(class_idx.size)]

    columns = [
        _gen_column(spec, fs, fi, class_idx) for fi, fs in enumerate(spec.features)
    ]
    rates = dict(spec.missing)
    for fi, fs in enumerate(spec.features):
        if fs.name not in rates:
            continue
        hole = substream(MASTER_SEED, "fixtures", spec.name, fs.name, "missing")
        mask = hole.random(class_idx.size) < rates[fs.name]
        columns[fi] = [MISSING if hit else v for v, hit in zip(columns[fi], mask)]

    header = [fs.name for fs in spec.features] + [spec.label_name]
    rows = [
        [columns[fi][i] for fi in range(len(spec.features))]
        + [spec.classes[class_idx[i]]]
        for i in range(class_idx.size)
    ]
    return header, rows


def write_csv(name: str, path: Path) -> Path:
    header, rows = build(name)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def write_all(out_dir: Path) -> list:
    return [write_csv(name, Path(out_dir) / f"{name}.csv") for name in available()]


def _main(argv=None) -> int:
    import argparse

    ap = argparse.ArgumentParser(
        prog="python -m tab2img.fixtures",
        description="Write the deterministic synthetic benchmark CSVs.",
    )
    ap.add_argument("out_dir")
    ap.add_argument("names", nargs="*", help=f"subset of: {', '.join(available())}")
    args = ap.parse_args(argv)
    for nm in args.names or available():
        print(write_csv(nm, Path(args.out_dir) / f"{nm}.csv"))
    return 0


if __name__ == "__main__":
    raise SystemExit(_main())
