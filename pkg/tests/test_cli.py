import json
import subprocess
import sys

import pytest

from mwekit import __version__
from mwekit import attention_analysis as attn
from mwekit.cli import PipelineError, load_config, main, run_pipeline
from mwekit.corpus_composer import compose, default_layout
from mwekit.corpus_io import (
    parse_conllu,
    read_attention_jsonl,
    read_mwe_lexicon,
    read_parallel,
    write_lines,
    write_mwe_lexicon,
)
from mwekit.evaluation import corpus_bleu, extract_mwe_devset, render_diff_html, tokenize
from mwekit.mwe_aligner import align_corpora
from mwekit.pattern_engine import extract_candidates, parse_pattern_file, read_candidates, write_candidates


def text(path):
    return path.read_text(encoding="utf-8")


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def cands(toy_dir, tmp_path):
    src, trg = tmp_path / "c.en.tsv", tmp_path / "c.cs.tsv"
    assert run("extract", "--conllu", toy_dir / "train.en.conllu", "--patterns", toy_dir / "patterns.en.txt", "--out", src) == 0
    assert run("extract", "--conllu", toy_dir / "train.cs.conllu", "--patterns", toy_dir / "patterns.cs.txt", "--out", trg) == 0
    return src, trg


def test_extract_matches_library(toy_dir, cands):
    sents = parse_conllu(text(toy_dir / "train.en.conllu"))
    expected = write_candidates(extract_candidates(parse_pattern_file(text(toy_dir / "patterns.en.txt")), sents, 2))
    assert text(cands[0]) == expected


def test_align_matches_library(toy_dir, cands, tmp_path):
    out = tmp_path / "lex.tsv"
    assert run("align", "--src-cands", cands[0], "--trg-cands", cands[1],
               "--src-conllu", toy_dir / "train.en.conllu", "--trg-conllu", toy_dir / "train.cs.conllu",
               "--out", out) == 0
    pairs = align_corpora(read_candidates(text(cands[0])), read_candidates(text(cands[1])),
                          parse_conllu(text(toy_dir / "train.en.conllu")),
                          parse_conllu(text(toy_dir / "train.cs.conllu")))
    assert text(out) == write_mwe_lexicon(pairs)
    assert len(read_mwe_lexicon(text(out))) == 5


@pytest.mark.parametrize("mode", ["sentences", "phrases"])
def test_compose_matches_library(toy_dir, tmp_path, mode):
    out_s, out_t = tmp_path / "o.en", tmp_path / "o.cs"
    rc = run("compose", "--mode", mode, "--baseline", f"{toy_dir / 'train.en'},{toy_dir / 'train.cs'}",
             "--lexicon", toy_dir / "lexicon.tsv", "--seed", 7, "--out", f"{out_s},{out_t}")
    assert rc == 0
    baseline = read_parallel(text(toy_dir / "train.en"), text(toy_dir / "train.cs"))
    units = read_parallel(*(write_lines(col) for col in zip(*[(e.src_surface, e.trg_surface)
                                                             for e in read_mwe_lexicon(text(toy_dir / "lexicon.tsv"))])))
    expected = compose(baseline, units, default_layout(mode, 7))
    assert text(out_s) == write_lines(expected.source)
    assert text(out_t) == write_lines(expected.target)


def test_mwe_devset_matches_library(toy_dir, tmp_path):
    outs = [tmp_path / n for n in ("d.en", "d.cs", "d.idx")]
    assert run("mwe-devset", "--dev", f"{toy_dir / 'dev.en'},{toy_dir / 'dev.cs'}", "--lexicon",
               toy_dir / "lexicon.tsv", "--out", ",".join(map(str, outs))) == 0
    dev = read_parallel(text(toy_dir / "dev.en"), text(toy_dir / "dev.cs"))
    subset, kept = extract_mwe_devset(dev, read_mwe_lexicon(text(toy_dir / "lexicon.tsv")))
    assert text(outs[0]) == write_lines(subset.source)
    assert text(outs[2]) == write_lines(str(i) for i in kept)


def test_bleu_json(toy_dir, capsys):
    assert run("bleu", "--hyp", toy_dir / "hyp.new.cs", "--ref", toy_dir / "ref.cs") == 0
    got = json.loads(capsys.readouterr().out)
    pairs = read_parallel(text(toy_dir / "hyp.new.cs"), text(toy_dir / "ref.cs"))
    expected = corpus_bleu([tokenize(x) for x in pairs.source], [tokenize(x) for x in pairs.target])
    assert got == expected.to_dict()


def test_diff_html(toy_dir, tmp_path):
    out = tmp_path / "d.html"
    assert run("diff", "--base", toy_dir / "hyp.base.cs", "--new", toy_dir / "hyp.new.cs",
               "--ref", toy_dir / "ref.cs", "--html", out) == 0
    lines = [text(toy_dir / f).splitlines() for f in ("hyp.base.cs", "hyp.new.cs", "ref.cs")]
    assert text(out) == render_diff_html(*lines)


def test_attn_subcommands(toy_dir, tmp_path, capsys):
    dump, lex = toy_dir / "attn.base.jsonl", toy_dir / "lexicon.tsv"
    records = read_attention_jsonl(text(dump))
    entries = read_mwe_lexicon(text(lex))

    assert run("attn", "stats", "--dump", dump, "--lexicon", lex, "--json", tmp_path / "s.json") == 0
    assert json.loads(text(tmp_path / "s.json")) == json.loads(json.dumps(attn.record_stats(records, entries)))

    assert run("attn", "render", "--dump", dump, "--id", "s1", "--format", "svg") == 0
    assert capsys.readouterr().out == attn.render_matrix(attn.merge_bpe(records[0]), "svg")
    assert run("attn", "render", "--dump", dump, "--id", "s1", "--subwords") == 0
    assert capsys.readouterr().out == attn.render_matrix(records[0], "text")

    other = read_attention_jsonl(text(toy_dir / "attn.improved.jsonl"))
    assert run("attn", "compare", "--a", dump, "--b", toy_dir / "attn.improved.jsonl",
               "--lexicon", lex, "--tsv", tmp_path / "c.tsv") == 0
    assert text(tmp_path / "c.tsv") == attn.format_comparison_tsv(attn.compare_systems(records, other, entries)[0])


def test_attn_render_unknown_id(toy_dir):
    with pytest.raises(SystemExit):
        run("attn", "render", "--dump", toy_dir / "attn.base.jsonl", "--id", "nope")


def test_all_rerun_identical(toy_dir, capsys):
    cfg = toy_dir / "pipeline.cfg"
    assert run("all", "--config", cfg) == 0
    first = {p.name: p.read_bytes() for p in (toy_dir / "out").iterdir()}
    m1 = json.loads(first.pop("manifest.json"))
    assert run("all", "--config", cfg) == 0
    second = {p.name: p.read_bytes() for p in (toy_dir / "out").iterdir()}
    m2 = json.loads(second.pop("manifest.json"))
    assert first == second
    m1.pop("created"), m2.pop("created")
    assert m1 == m2
    assert m1["params"]["weights"] == [0.7, 0.3]


def test_missing_input_fails_before_any_stage(toy_dir, capsys):
    (toy_dir / "train.cs.conllu").unlink()
    assert run("all", "--config", toy_dir / "pipeline.cfg") == 1
    assert "missing input paths" in capsys.readouterr().err
    assert not (toy_dir / "out").exists()


def test_failure_removes_partial_outputs(toy_dir):
    # extract and align write their files, then the layout is rejected in compose
    (toy_dir / "half.layout").write_text("base 1/2\nmwe 1\n", encoding="utf-8")
    cfg = toy_dir / "pipeline.cfg"
    cfg.write_text(text(cfg) + "layout = half.layout\n", encoding="utf-8")
    with pytest.raises(PipelineError, match="stage compose"):
        run_pipeline(load_config(cfg))
    assert list((toy_dir / "out").iterdir()) == []


def test_unknown_config_key(toy_dir):
    cfg = toy_dir / "pipeline.cfg"
    cfg.write_text(text(cfg) + "colour = blue\n", encoding="utf-8")
    with pytest.raises(PipelineError, match="unknown keys"):
        run_pipeline(load_config(cfg))


def test_version_and_help():
    res = subprocess.run([sys.executable, "-m", "mwekit.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and __version__ in res.stdout
    res = subprocess.run([sys.executable, "-m", "mwekit.cli", "attn", "render", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "--subwords" in res.stdout
