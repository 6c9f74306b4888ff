"""Command-line adapter exposing tabular foundation models over the file
scoring protocol.

Protocol: read a train table (CSV with header), train labels (one 0/1 per
line) and a test table; write exactly one anomaly probability in [0, 1] per
test row to the output path; exit 0 on success, nonzero with a diagnostic on
standard error otherwise. Run metadata (model, ensemble count, any column
subsampling) is reported on standard error so the output file stays
protocol-clean.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

MODELS = ("echo", "tabpfn-v2", "tabpfn-v2.5", "limix-2m", "limix-16m")
CACHE_ENV = "TFM_ADAPTER_CACHE_DIR"


class AdapterError(RuntimeError):
    pass


def read_table(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline()
        if not header.strip():
            raise AdapterError(f"{path}: missing header row")
        width = len(header.strip().split(","))
        rows = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            fields = line.strip().split(",")
            if len(fields) != width:
                raise AdapterError(f"{path}:{lineno}: expected {width} fields")
            try:
                rows.append([float(f) for f in fields])
            except ValueError:
                raise AdapterError(f"{path}:{lineno}: non-numeric value") from None
    return np.asarray(rows, dtype=np.float64).reshape(len(rows), width)


def read_labels(path) -> np.ndarray:
    values = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            if s not in ("0", "1"):
                raise AdapterError(f"{path}:{lineno}: label must be 0 or 1, got {s!r}")
            values.append(int(s))
    return np.asarray(values, dtype=np.int64)


def subsample_columns(train, test, feature_cap, seed):
    """Uniform column subsample applied identically to both tables."""
    d = train.shape[1]
    if d <= feature_cap:
        return train, test, None
    cols = np.sort(np.random.default_rng(seed).choice(d, feature_cap, replace=False))
    return train[:, cols], test[:, cols], cols


def cap_context_rows(train, labels, context_cap, seed):
    """Uniform row subsample keeping at least one example of each class."""
    m = train.shape[0]
    if m <= context_cap:
        return train, labels
    rng = np.random.default_rng(seed)
    keep = rng.choice(m, context_cap, replace=False)
    for cls in (0, 1):
        if labels[keep].tolist().count(cls) == 0:
            candidates = np.flatnonzero(labels == cls)
            keep[rng.integers(context_cap)] = candidates[0]
    return train[keep], labels[keep]


def _predict_tabpfn(model_id, train, labels, test, ensembles, device):
    try:
        from tabpfn import TabPFNClassifier
    except ImportError as exc:
        raise AdapterError(
            f"model {model_id!r} needs the tabpfn package (pip install tabpfn): {exc}"
        ) from exc
    cache = os.environ.get(CACHE_ENV)
    if cache:
        os.environ.setdefault("TABPFN_MODEL_CACHE_DIR", cache)
    clf = TabPFNClassifier(device=device, n_estimators=ensembles)
    clf.fit(train, labels)
    return clf.predict_proba(test)[:, 1]


def _predict_limix(model_id, train, labels, test, ensembles, device):
    try:
        from limix_ai import LimiXPredictor  # packaging name used by LimiX releases
    except ImportError as exc:
        raise AdapterError(
            f"model {model_id!r} needs the LimiX inference package: {exc}"
        ) from exc
    cache = os.environ.get(CACHE_ENV)
    size = "2M" if model_id.endswith("2m") else "16M"
    predictor = LimiXPredictor(
        device=device, model_size=size, n_ensembles=ensembles, cache_dir=cache
    )
    return predictor.predict_proba(train, labels, test)[:, 1]


def predict(model_id, train, labels, test, ensembles, device):
    if model_id == "echo":
        return np.full(test.shape[0], 0.5)
    if model_id.startswith("tabpfn"):
        return _predict_tabpfn(model_id, train, labels, test, ensembles, device)
    return _predict_limix(model_id, train, labels, test, ensembles, device)


def adapter_main(
    train_x,
    train_y,
    test_x,
    out,
    model="echo",
    device="cpu",
    ensembles=1,
    context_cap=10_000,
    feature_cap=500,
    subsample_seed=0,
) -> int:
    if model not in MODELS:
        raise AdapterError(f"unknown model {model!r}; choose from {', '.join(MODELS)}")
    if ensembles < 1 or context_cap < 1 or feature_cap < 1:
        raise AdapterError("ensembles and caps must be positive")

    train = read_table(train_x)
    labels = read_labels(train_y)
    test = read_table(test_x)
    if labels.shape[0] != train.shape[0]:
        raise AdapterError(
            f"{train.shape[0]} train rows but {labels.shape[0]} labels"
        )
    if train.shape[1] != test.shape[1]:
        raise AdapterError(
            f"train width {train.shape[1]} != test width {test.shape[1]}"
        )

    train, test, cols = subsample_columns(train, test, feature_cap, subsample_seed)
    train, labels = cap_context_rows(train, labels, context_cap, subsample_seed)

    scores = predict(model, train, labels, test, ensembles, device)
    scores = np.clip(np.asarray(scores, dtype=np.float64), 0.0, 1.0)
    if scores.shape != (test.shape[0],):
        raise AdapterError("model returned a malformed score vector")

    with open(out, "w") as fh:
        for v in scores:
            fh.write(f"{float(v)!r}\n")

    meta = (
        f"tfm-adapter: model={model} ensembles={ensembles} "
        f"context_rows={train.shape[0]} features={train.shape[1]}"
    )
    if cols is not None:
        meta += f" column_subsample_seed={subsample_seed}"
    print(meta, file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tfm-adapter",
        description="Score a test table against in-context examples with a TFM",
    )
    parser.add_argument("train_x")
    parser.add_argument("train_y")
    parser.add_argument("test_x")
    parser.add_argument("out")
    parser.add_argument("--model", default="echo", choices=MODELS)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--ensembles", type=int, default=1)
    parser.add_argument("--context-cap", type=int, default=10_000)
    parser.add_argument("--feature-cap", type=int, default=500)
    parser.add_argument("--subsample-seed", type=int, default=0)
    args = parser.parse_args(argv)
    try:
        return adapter_main(
            args.train_x,
            args.train_y,
            args.test_x,
            args.out,
            model=args.model,
            device=args.device,
            ensembles=args.ensembles,
            context_cap=args.context_cap,
            feature_cap=args.feature_cap,
            subsample_seed=args.subsample_seed,
        )
    except AdapterError as exc:
        print(f"tfm-adapter: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"tfm-adapter: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
