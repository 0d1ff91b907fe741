"""Command-line interface: one subcommand per pipeline stage plus ``all``."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from . import attention_analysis as attn
from .corpus_composer import MODES, compose, composed_size, default_layout, parse_layout, phrase_units
from .corpus_io import (
    ParallelCorpus,
    parse_conllu,
    read_attention_jsonl,
    read_mwe_lexicon,
    read_parallel,
    write_lines,
    write_mwe_lexicon,
)
from .evaluation import corpus_bleu, extract_mwe_devset, render_diff_html, tokenize
from .mwe_aligner import DEFAULT_THRESHOLD, DEFAULT_WEIGHTS, align_corpora, pair_lines
from .pattern_engine import extract_candidates, parse_pattern_file, read_candidates, write_candidates

log = logging.getLogger("mwekit")


class PipelineError(RuntimeError):
    pass


def read_text(path) -> str:
    with open(path, encoding="utf-8", newline="") as f:
        return f.read()


def write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _pair_arg(value: str, count: int = 2) -> list[str]:
    parts = value.split(",")
    if len(parts) != count:
        raise argparse.ArgumentTypeError(f"expected {count} comma-separated paths, got {value!r}")
    return parts


def read_parallel_files(src, trg) -> ParallelCorpus:
    return read_parallel(read_text(src), read_text(trg))


def write_parallel_files(corpus: ParallelCorpus, src, trg) -> None:
    write_text(src, write_lines(corpus.source))
    write_text(trg, write_lines(corpus.target))


def complement(w: float) -> float:
    """``1 - w`` without binary noise such as 0.30000000000000004."""
    return round(1.0 - w, 12)


def _layout(args_mode, layout_file, seed, limit):
    if layout_file:
        return parse_layout(read_text(layout_file), args_mode, seed, limit)
    return default_layout(args_mode, seed, limit)


# --- subcommands ---------------------------------------------------------------


def cmd_extract(args):
    sents = parse_conllu(read_text(args.conllu))
    patterns = parse_pattern_file(read_text(args.patterns))
    cands = extract_candidates(patterns, sents, args.min_freq)
    write_text(args.out, write_candidates(cands))
    log.info("%d candidates from %d sentences", len(cands), len(sents))


def cmd_align(args):
    src_cands = read_candidates(read_text(args.src_cands))
    trg_cands = read_candidates(read_text(args.trg_cands))
    src_sents = parse_conllu(read_text(args.src_conllu))
    trg_sents = parse_conllu(read_text(args.trg_conllu))
    pairs = align_corpora(src_cands, trg_cands, src_sents, trg_sents, (args.w_dice, complement(args.w_dice)), args.threshold)
    write_text(args.out, write_mwe_lexicon(pairs))
    log.info("%d aligned pairs", len(pairs))


def cmd_compose(args):
    baseline = read_parallel_files(*args.baseline)
    if args.mwe:
        units = read_parallel_files(*args.mwe)
    else:
        units = phrase_units(read_mwe_lexicon(read_text(args.lexicon)))
    layout = _layout(args.mode, args.layout, args.seed, args.limit)
    out = compose(baseline, units, layout)
    write_parallel_files(out, *args.out)
    log.info("composed %d pairs", len(out))


def cmd_mwe_devset(args):
    dev = read_parallel_files(args.dev[0], args.dev[1])
    lexicon = read_mwe_lexicon(read_text(args.lexicon))
    tagged = parse_conllu(read_text(args.tagged)) if args.tagged else None
    subset, kept = extract_mwe_devset(dev, lexicon, tagged)
    write_parallel_files(subset, args.out[0], args.out[1])
    write_text(args.out[2], write_lines(str(i) for i in kept))
    log.info("kept %d of %d dev pairs", len(kept), len(dev))


def cmd_bleu(args):
    pairs = read_parallel(read_text(args.hyp), read_text(args.ref))
    hyps = [tokenize(line) for line in pairs.source]
    refs = [tokenize(line) for line in pairs.target]
    report = corpus_bleu(hyps, refs, smooth=args.smooth)
    text = json.dumps(report.to_dict(), indent=2) + "\n"
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)


def cmd_diff(args):
    base = read_text(args.base)
    new = read_text(args.new)
    ref = read_text(args.ref)
    bn = read_parallel(base, new)
    br = read_parallel(base, ref)
    write_text(args.html, render_diff_html(bn.source, bn.target, br.target, args.max_n))


def cmd_attn_stats(args):
    records = read_attention_jsonl(read_text(args.dump))
    lexicon = read_mwe_lexicon(read_text(args.lexicon))
    rows = attn.record_stats(records, lexicon)
    write_text(args.json, json.dumps(rows, indent=2, ensure_ascii=False) + "\n")


def cmd_attn_render(args):
    records = {r.id: r for r in read_attention_jsonl(read_text(args.dump))}
    if args.id not in records:
        raise SystemExit(f"error: no record with id {args.id!r} in {args.dump}")
    rec = records[args.id]
    obj = rec if args.subwords else attn.merge_bpe(rec)
    out = attn.render_matrix(obj, args.format)
    if args.out:
        write_text(args.out, out)
    else:
        sys.stdout.write(out)


def cmd_attn_compare(args):
    a = read_attention_jsonl(read_text(args.a))
    b = read_attention_jsonl(read_text(args.b))
    lexicon = read_mwe_lexicon(read_text(args.lexicon))
    rows, skipped = attn.compare_systems(a, b, lexicon)
    write_text(args.tsv, attn.format_comparison_tsv(rows))
    if skipped:
        log.warning("%d record ids present in only one dump were skipped", skipped)


# --- pipeline ------------------------------------------------------------------

CONFIG_PATH_KEYS = ("src_conllu", "trg_conllu", "src_patterns", "trg_patterns",
                    "src_text", "trg_text", "dev_src", "dev_trg", "layout")


@dataclass
class PipelineConfig:
    src_conllu: Path
    trg_conllu: Path
    src_patterns: Path
    trg_patterns: Path
    out_dir: Path
    src_text: Path | None = None
    trg_text: Path | None = None
    dev_src: Path | None = None
    dev_trg: Path | None = None
    layout: Path | None = None
    mode: str = "sentences"
    min_freq: int = 2
    w_dice: float = DEFAULT_WEIGHTS[0]
    threshold: float = DEFAULT_THRESHOLD
    baseline_limit: int | None = None
    seed: int = 1
    extra: dict = field(default_factory=dict)

    def validate(self):
        missing = [
            f"{key} = {getattr(self, key)}"
            for key in CONFIG_PATH_KEYS
            if getattr(self, key) is not None and not Path(getattr(self, key)).exists()
        ]
        if missing:
            raise PipelineError("config: missing input paths: " + ", ".join(missing))
        if (self.src_text is None) != (self.trg_text is None):
            raise PipelineError("config: give both src_text and trg_text or neither")
        if (self.dev_src is None) != (self.dev_trg is None):
            raise PipelineError("config: give both dev_src and dev_trg or neither")
        if self.mode not in MODES:
            raise PipelineError(f"config: mode must be one of {MODES}")
        if self.extra:
            raise PipelineError(f"config: unknown keys {sorted(self.extra)}")

    def params(self) -> dict:
        return {
            "mode": self.mode,
            "min_freq": self.min_freq,
            "weights": [self.w_dice, complement(self.w_dice)],
            "threshold": self.threshold,
            "baseline_limit": self.baseline_limit,
            "seed": self.seed,
        }


def load_config(path) -> PipelineConfig:
    """Flat ``key = value`` file; relative paths resolve against the file's directory."""
    path = Path(path)
    base = path.parent
    values: dict[str, str] = {}
    for line_no, raw in enumerate(read_text(path).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise PipelineError(f"config line {line_no}: expected key = value")
        values[key.strip()] = value.strip()
    required = ("src_conllu", "trg_conllu", "src_patterns", "trg_patterns", "out_dir")
    absent = [k for k in required if k not in values]
    if absent:
        raise PipelineError(f"config: missing keys {absent}")
    kwargs = {}
    for key in (*CONFIG_PATH_KEYS, "out_dir"):
        if key in values:
            kwargs[key] = base / values.pop(key)
    converters = {"mode": str, "min_freq": int, "w_dice": float, "threshold": float,
                  "baseline_limit": int, "seed": int}
    for key, conv in converters.items():
        if key in values:
            try:
                kwargs[key] = conv(values.pop(key))
            except ValueError as exc:
                raise PipelineError(f"config: bad value for {key}: {exc}") from None
    return PipelineConfig(**kwargs, extra=values)


def _baseline_corpus(cfg, src_sents, trg_sents) -> ParallelCorpus:
    if cfg.src_text is not None:
        return read_parallel_files(cfg.src_text, cfg.trg_text)
    return ParallelCorpus(
        tuple(" ".join(t.form for t in s.tokens) for s in src_sents),
        tuple(" ".join(t.form for t in s.tokens) for s in trg_sents),
    )


def run_pipeline(cfg: PipelineConfig, seed: int | None = None) -> dict:
    """extract -> align -> compose -> mwe-devset; returns the manifest.

    On failure every file written so far is removed and a PipelineError
    naming the stage is raised.
    """
    cfg.validate()
    if seed is not None:
        cfg.seed = seed
    out = Path(cfg.out_dir)
    written: list[Path] = []
    outputs: dict[str, str] = {}

    def emit(name, text):
        p = out / name
        write_text(p, text)
        written.append(p)
        outputs[name] = str(p)

    stage = "load"
    counts = {}
    try:
        src_sents = parse_conllu(read_text(cfg.src_conllu))
        trg_sents = parse_conllu(read_text(cfg.trg_conllu))
        baseline = _baseline_corpus(cfg, src_sents, trg_sents)

        stage = "extract"
        src_cands = extract_candidates(parse_pattern_file(read_text(cfg.src_patterns)), src_sents, cfg.min_freq)
        trg_cands = extract_candidates(parse_pattern_file(read_text(cfg.trg_patterns)), trg_sents, cfg.min_freq)
        emit("candidates.src.tsv", write_candidates(src_cands))
        emit("candidates.trg.tsv", write_candidates(trg_cands))
        counts["src_candidates"] = len(src_cands)
        counts["trg_candidates"] = len(trg_cands)

        stage = "align"
        pairs = align_corpora(src_cands, trg_cands, src_sents, trg_sents,
                              (cfg.w_dice, complement(cfg.w_dice)), cfg.threshold, baseline)
        emit("lexicon.tsv", write_mwe_lexicon(pairs))
        counts["pairs"] = len(pairs)

        stage = "compose"
        if cfg.mode == "phrases":
            units = phrase_units(pairs)
        else:
            units = baseline.select(pair_lines(pairs, src_sents, trg_sents))
        layout = _layout(cfg.mode, cfg.layout, cfg.seed, cfg.baseline_limit)
        composed = compose(baseline, units, layout)
        assert len(composed) == composed_size(len(baseline), len(units), layout)
        emit("train.src", write_lines(composed.source))
        emit("train.trg", write_lines(composed.target))
        emit("mwe_units.src", write_lines(units.source))
        emit("mwe_units.trg", write_lines(units.target))
        counts["mwe_units"] = len(units)
        counts["composed_lines"] = len(composed)

        stage = "mwe-devset"
        if cfg.dev_src is not None:
            dev = read_parallel_files(cfg.dev_src, cfg.dev_trg)
            subset, kept = extract_mwe_devset(dev, pairs)
            emit("dev.mwe.src", write_lines(subset.source))
            emit("dev.mwe.trg", write_lines(subset.target))
            emit("dev.mwe.idx", write_lines(str(i) for i in kept))
            counts["devset"] = len(kept)

        stage = "manifest"
        inputs = {
            key: {"path": str(getattr(cfg, key)), "sha256": sha256_file(getattr(cfg, key))}
            for key in CONFIG_PATH_KEYS
            if getattr(cfg, key) is not None
        }
        manifest = {
            "version": __version__,
            "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "inputs": inputs,
            "params": cfg.params(),
            "outputs": {name: {"path": p, "sha256": sha256_file(p)} for name, p in sorted(outputs.items())},
            "counts": counts,
        }
        emit("manifest.json", json.dumps(manifest, indent=2, ensure_ascii=False) + "\n")
        return manifest
    except Exception as exc:
        for p in written:
            p.unlink(missing_ok=True)
        if isinstance(exc, PipelineError):
            raise
        raise PipelineError(f"stage {stage} failed: {exc}") from exc


def cmd_all(args):
    cfg = load_config(args.config)
    manifest = run_pipeline(cfg, args.seed)
    sys.stdout.write(json.dumps(manifest["counts"], sort_keys=True) + "\n")


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default 1 where used)")
    common.add_argument("--version", action="version", version=f"mwekit {__version__}")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="mwekit", description=__doc__, parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", parents=[common], help="extract MWE candidates from a CoNLL-U corpus")
    p.add_argument("--conllu", required=True)
    p.add_argument("--patterns", required=True)
    p.add_argument("--min-freq", type=int, default=2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("align", parents=[common], help="align source and target candidates into a lexicon")
    p.add_argument("--src-cands", required=True)
    p.add_argument("--trg-cands", required=True)
    p.add_argument("--src-conllu", required=True)
    p.add_argument("--trg-conllu", required=True)
    p.add_argument("--w-dice", type=float, default=DEFAULT_WEIGHTS[0], help="Dice weight; string similarity gets the rest")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("compose", parents=[common], help="compose a synthetic training corpus")
    p.add_argument("--mode", choices=MODES, required=True)
    p.add_argument("--baseline", type=_pair_arg, required=True, metavar="SRC,TRG")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--mwe", type=_pair_arg, metavar="SRC,TRG")
    g.add_argument("--lexicon", help="use lexicon pairs as MWE units (phrases)")
    p.add_argument("--limit", type=int, default=None, help="baseline prefix length")
    p.add_argument("--layout", default=None)
    p.add_argument("--out", type=_pair_arg, required=True, metavar="SRC,TRG")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("mwe-devset", parents=[common], help="keep dev pairs containing lexicon MWEs")
    p.add_argument("--dev", type=_pair_arg, required=True, metavar="SRC,TRG")
    p.add_argument("--lexicon", required=True)
    p.add_argument("--tagged", default=None, help="tagged dev source (CoNLL-U) for lemma matching")
    p.add_argument("--out", type=lambda v: _pair_arg(v, 3), required=True, metavar="SRC,TRG,IDX")
    p.set_defaults(func=cmd_mwe_devset)

    p = sub.add_parser("bleu", parents=[common], help="corpus BLEU as JSON")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--smooth", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bleu)

    p = sub.add_parser("diff", parents=[common], help="highlight improving/worsening n-grams as HTML")
    p.add_argument("--base", required=True)
    p.add_argument("--new", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--html", required=True)
    p.add_argument("--max-n", type=int, default=4)
    p.set_defaults(func=cmd_diff)

    a = sub.add_parser("attn", parents=[common], help="attention dump inspection")
    asub = a.add_subparsers(dest="attn_command", required=True)
    p = asub.add_parser("stats", parents=[common])
    p.add_argument("--dump", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--json", required=True)
    p.set_defaults(func=cmd_attn_stats)
    p = asub.add_parser("render", parents=[common])
    p.add_argument("--dump", required=True)
    p.add_argument("--id", required=True)
    p.add_argument("--format", choices=("text", "svg", "html"), default="text")
    p.add_argument("--subwords", action="store_true", help="render subword units without merging")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_attn_render)
    p = asub.add_parser("compare", parents=[common])
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--lexicon", required=True)
    p.add_argument("--tsv", required=True)
    p.set_defaults(func=cmd_attn_compare)

    p = sub.add_parser("all", parents=[common], help="run extract, align, compose and mwe-devset from a config")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_all)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.seed is None and args.command != "all":
        args.seed = 1
    try:
        args.func(args)
    except (PipelineError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
