"""Command-line front end: the full recognition→transcription pipeline and
each stage as its own subcommand.

Configuration is a flat ``key=value`` text file; every key can also be set
on the command line (``--beam-width 16`` overrides ``beam_width=8``). All
randomness derives from the single ``seed`` key. Exit codes: 0 success,
1 runtime or data error, 2 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import ambiguity, assets, metrics, ngram_lm, transcriber
from .corpus import EmptyCorpus, build_parallel, filter_sentences, read_parallel_tsv
from .ctc import DecoderConfig, prefix_beam_search, read_emissions, write_emissions
from .pinyin import PronunciationLexicon, SyllableInventory
from .simulate import POLICIES, SimConfig, synth_emissions


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    inventory: str = ""          # empty -> bundled data file
    lexicon: str = ""
    train_corpus: str = ""       # sentences for LM training
    eval_corpus: str = ""        # sentences to decode and score
    emissions_dir: str = ""      # ingest *.em files instead of synthesizing
    out_dir: str = "pinasr_report"
    unit_mode: str = "tonal"     # tonal | toneless
    use_pinyin_lm: bool = True
    pinyin_lm: str = ""          # optional ARPA path (else trained in-run)
    char_lm: str = ""            # optional ARPA path (else trained in-run)
    pinyin_lm_order: int = 4
    char_lm_order: int = 5
    lm_discount: float = 0.6
    min_count: int = 1
    beam_width: int = 8
    lm_weight: float = 0.3
    insertion_bonus: float = 0.0
    prune_threshold: float = -13.0
    channel_weight: float = 1.0
    transcriber_beam: int = 32
    frames_per_unit: int = 3
    blank_fill: float = 0.9
    temperature: float = 0.0
    confusion_policy: str = "tone-neighbor"
    min_len: int = 5
    max_len: int = 40
    seed: int = 0


def parse_config_file(path: str) -> dict:
    values = {}
    fields = {f.name: f for f in dataclasses.fields(PipelineConfig)}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in fields:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(fields[key].type, value, f"{path}:{lineno}")
    return values


def _coerce(field_type: str, value: str, where: str):
    if field_type == "bool":
        lowered = value.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{where}: bad boolean {value!r}")
    try:
        if field_type == "int":
            return int(value)
        if field_type == "float":
            return float(value)
    except ValueError:
        raise ConfigError(f"{where}: bad {field_type} {value!r}") from None
    return value


def config_hash(config: PipelineConfig) -> str:
    canonical = "\n".join(f"{k}={v}" for k, v in sorted(dataclasses.asdict(config).items()))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _load_inventory(config: PipelineConfig) -> SyllableInventory:
    if config.inventory:
        return SyllableInventory.from_file(_existing(config.inventory))
    return assets.default_inventory()


def _load_lexicon(config: PipelineConfig, inventory: SyllableInventory) -> PronunciationLexicon:
    if config.lexicon:
        return PronunciationLexicon.from_file(_existing(config.lexicon), inventory)
    return assets.default_lexicon()


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"no such file: {p}")
    return p


def _read_sentence_file(path: str, default_name: str) -> list[str]:
    if path:
        text = _existing(path).read_text(encoding="utf-8")
        return [line for line in text.splitlines() if line.strip()]
    return assets.read_sentences(default_name)


def _units_of(pinyin, tonal: bool) -> list[str]:
    return [str(s) if tonal else s.segment for s in pinyin]


def _train_unit_lm(config: PipelineConfig, pairs, alphabet, tonal: bool):
    corpus = [_units_of(pinyin, tonal) for _, pinyin in pairs]
    return ngram_lm.train(
        corpus, order=config.pinyin_lm_order, discount=config.lm_discount, vocabulary=alphabet
    )


def _train_char_lm(config: PipelineConfig, pairs):
    corpus = [list(hanzi) for hanzi, _ in pairs]
    return ngram_lm.train(
        corpus, order=config.char_lm_order, discount=config.lm_discount, min_count=config.min_count
    )


def cmd_pipeline(config: PipelineConfig) -> int:
    inventory = _load_inventory(config)
    lexicon = _load_lexicon(config, inventory)
    tonal = config.unit_mode == "tonal"
    if config.unit_mode not in ("tonal", "toneless"):
        raise ConfigError(f"unit_mode must be tonal or toneless, got {config.unit_mode!r}")
    if config.confusion_policy not in POLICIES:
        raise ConfigError(f"confusion_policy must be one of {POLICIES}")

    train_sentences = _read_sentence_file(config.train_corpus, "corpus_train.txt")
    eval_sentences = _read_sentence_file(config.eval_corpus, "corpus_heldout.txt")
    train_pairs = build_parallel(
        filter_sentences(train_sentences, config.min_len, config.max_len).sentences, lexicon, "train"
    )
    eval_pairs = build_parallel(
        filter_sentences(eval_sentences, config.min_len, config.max_len).sentences, lexicon, "eval"
    )
    if not eval_pairs.pairs:
        raise ConfigError("evaluation corpus is empty after filtering")

    alphabet = tuple(sorted(inventory.tonal_units if tonal else inventory.toneless_units))

    unit_lm = None
    if config.use_pinyin_lm:
        if config.pinyin_lm:
            with open(_existing(config.pinyin_lm), encoding="utf-8") as fh:
                unit_lm = ngram_lm.read_arpa(fh)
        else:
            unit_lm = _train_unit_lm(config, train_pairs.pairs, alphabet, tonal)
    if config.char_lm:
        with open(_existing(config.char_lm), encoding="utf-8") as fh:
            char_lm = ngram_lm.read_arpa(fh)
    else:
        char_lm = _train_char_lm(config, train_pairs.pairs)

    decoder_config = DecoderConfig(
        beam_width=config.beam_width,
        lm_weight=config.lm_weight,
        insertion_bonus=config.insertion_bonus,
        prune_threshold=config.prune_threshold,
    )

    ref_units: list[list[str]] = []
    hyp_units: list[list[str]] = []
    ref_chars: list[list[str]] = []
    hyp_chars: list[list[str]] = []
    transcripts: list[tuple[str, float]] = []

    for index, (hanzi, pinyin) in enumerate(eval_pairs.pairs):
        units = _units_of(pinyin, tonal)
        stage = "synthesize"
        try:
            if config.emissions_dir:
                with open(Path(config.emissions_dir) / f"utt_{index:04d}.em", encoding="utf-8") as fh:
                    emissions = read_emissions(fh)
            else:
                sim = SimConfig(
                    frames_per_unit=config.frames_per_unit,
                    blank_fill=config.blank_fill,
                    confusion_temperature=config.temperature,
                    confusion_policy=config.confusion_policy,
                    seed=config.seed + index,
                )
                emissions = synth_emissions(units, alphabet, sim)
            stage = "decode"
            decoded = prefix_beam_search(emissions, unit_lm, decoder_config)
            hyp = list(decoded[0][0])
            stage = "transcribe"
            lattice = transcriber.build_lattice_lenient(hyp, lexicon, tonal=tonal)
            best = transcriber.beam_transcribe(
                lattice, char_lm, config.channel_weight, config.transcriber_beam
            )[0]
        except Exception as exc:
            print(f"stage={stage} utt={index}: {exc}", file=sys.stderr)
            return 1
        ref_units.append(units)
        hyp_units.append(hyp)
        ref_chars.append(list(hanzi))
        hyp_chars.append(list(best.hanzi))
        transcripts.append((best.hanzi, best.total_score))

    uer = metrics.error_rate(ref_units, hyp_units)
    cer = metrics.error_rate(ref_chars, hyp_chars)
    stripped = (
        metrics.tone_stripped_rescore(ref_units, hyp_units, inventory) if tonal else None
    )

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    digest = config_hash(config)
    lines = [
        f"config_hash\t{digest}",
        f"utterances\t{len(eval_pairs.pairs)}",
        f"unit_mode\t{config.unit_mode}",
        f"pinyin_lm\t{'on' if unit_lm is not None else 'off'}",
        f"uer\t{uer.error_rate:.6f}",
    ]
    if stripped is not None:
        lines.append(f"uer_tone_stripped\t{stripped.error_rate:.6f}")
    lines.append(f"cer\t{cer.error_rate:.6f}")
    atomic_write(out_dir / "report.tsv", "\n".join(lines) + "\n")
    atomic_write(
        out_dir / "hyps.tsv",
        "".join(f"{hanzi}\t{score:.6f}\n" for hanzi, score in transcripts),
    )
    atomic_write(
        out_dir / "units.tsv",
        "".join(f"utt_{i:04d}\t{' '.join(h)}\n" for i, h in enumerate(hyp_units)),
    )
    detail_lines = []
    for utt_uer, utt_cer in zip(uer.per_utterance, cer.per_utterance):
        detail_lines.append(
            json.dumps(
                {"utt": utt_uer.index, "uer": utt_uer.__dict__, "cer": utt_cer.__dict__},
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    atomic_write(out_dir / "detail.jsonl", "\n".join(detail_lines) + "\n")
    for line in lines:
        print(line.replace("\t", "  "))
    return 0


def cmd_synth(config: PipelineConfig) -> int:
    inventory = _load_inventory(config)
    lexicon = _load_lexicon(config, inventory)
    tonal = config.unit_mode == "tonal"
    sentences = _read_sentence_file(config.eval_corpus, "corpus_heldout.txt")
    pairs = build_parallel(
        filter_sentences(sentences, config.min_len, config.max_len).sentences, lexicon, "synth"
    )
    alphabet = tuple(sorted(inventory.tonal_units if tonal else inventory.toneless_units))
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ref_lines = []
    for index, (hanzi, pinyin) in enumerate(pairs.pairs):
        units = _units_of(pinyin, tonal)
        sim = SimConfig(
            frames_per_unit=config.frames_per_unit,
            blank_fill=config.blank_fill,
            confusion_temperature=config.temperature,
            confusion_policy=config.confusion_policy,
            seed=config.seed + index,
        )
        emissions = synth_emissions(units, alphabet, sim)
        path = out_dir / f"utt_{index:04d}.em"
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "w", encoding="utf-8") as fh:
            write_emissions(emissions, fh)
        os.replace(tmp, path)
        ref_lines.append(f"utt_{index:04d}\t{hanzi}\t{' '.join(units)}")
    atomic_write(out_dir / "refs.tsv", "\n".join(ref_lines) + "\n")
    print(f"wrote {len(pairs.pairs)} emission files to {out_dir}")
    return 0


def cmd_train_lm(args, config: PipelineConfig) -> int:
    if not 1 <= args.order <= ngram_lm.MAX_ORDER:
        raise ConfigError(f"order must be in [1, {ngram_lm.MAX_ORDER}], got {args.order}")
    if not 0.0 < args.discount < 1.0:
        raise ConfigError(f"discount must be in (0, 1), got {args.discount}")
    sentences = [
        line
        for line in _existing(args.corpus).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    if args.unit == "char":
        corpus = [list(s) for s in sentences]
        vocabulary = None
    else:
        inventory = _load_inventory(config)
        lexicon = _load_lexicon(config, inventory)
        pairs = build_parallel(sentences, lexicon, "train-lm")
        tonal = args.unit == "pinyin"
        corpus = [_units_of(pinyin, tonal) for _, pinyin in pairs.pairs]
        vocabulary = sorted(inventory.tonal_units if tonal else inventory.toneless_units)
    model = ngram_lm.train(
        corpus,
        order=args.order,
        discount=args.discount,
        min_count=config.min_count,
        vocabulary=vocabulary,
    )
    out = Path(args.out)
    tmp = out.with_name(out.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        ngram_lm.write_arpa(model, fh)
    os.replace(tmp, out)
    per_order = [0] * model.order
    for gram in model.prob_table:
        per_order[len(gram) - 1] += 1
    print(f"vocabulary\t{len(model.vocabulary)}")
    for k, n in enumerate(per_order, 1):
        print(f"ngram_{k}\t{n}")
    return 0


def cmd_decode(args, config: PipelineConfig) -> int:
    lm = None
    if args.lm:
        with open(_existing(args.lm), encoding="utf-8") as fh:
            lm = ngram_lm.read_arpa(fh)
    decoder_config = DecoderConfig(
        beam_width=config.beam_width,
        lm_weight=config.lm_weight,
        insertion_bonus=config.insertion_bonus,
        prune_threshold=config.prune_threshold,
    )
    source = Path(args.emissions)
    files = sorted(source.glob("*.em")) if source.is_dir() else [_existing(args.emissions)]
    if not files:
        print(f"no *.em files under {source}", file=sys.stderr)
        return 1
    for path in files:
        with open(path, encoding="utf-8") as fh:
            emissions = read_emissions(fh)
        results = prefix_beam_search(emissions, lm, decoder_config)
        units, score = results[0]
        print(f"{path.stem}\t{' '.join(units)}\t{score:.6f}")
    return 0


def cmd_transcribe(args, config: PipelineConfig) -> int:
    inventory = _load_inventory(config)
    lexicon = _load_lexicon(config, inventory)
    if not config.char_lm:
        raise ConfigError("transcribe needs --char-lm (an ARPA character LM)")
    with open(_existing(config.char_lm), encoding="utf-8") as fh:
        char_lm = ngram_lm.read_arpa(fh)
    tonal = config.unit_mode == "tonal"
    for line in _existing(args.input).read_text(encoding="utf-8").splitlines():
        units = line.split()
        if not units:
            continue
        lattice = transcriber.build_lattice(units, lexicon, tonal=tonal)
        best = transcriber.beam_transcribe(
            lattice, char_lm, config.channel_weight, config.transcriber_beam
        )[0]
        print(f"{best.hanzi}\t{best.total_score:.6f}")
    return 0


def cmd_stats(args, config: PipelineConfig) -> int:
    inventory = _load_inventory(config)
    if args.parallel:
        with open(_existing(args.parallel), encoding="utf-8") as fh:
            corpus = read_parallel_tsv(fh, inventory)
    else:
        lexicon = _load_lexicon(config, inventory)
        sentences = _read_sentence_file(args.corpus, "corpus_toy20.txt")
        corpus = build_parallel(sentences, lexicon, "stats")
    report = ambiguity.stats_report(corpus, args.n_max)
    print(ambiguity.render_tsv(report), end="")
    print()
    print(ambiguity.render_table(report), end="")
    return 0


def cmd_score(args, config: PipelineConfig) -> int:
    def read_tokens(path):
        lines = _existing(path).read_text(encoding="utf-8").splitlines()
        return [list(l) if args.chars else l.split() for l in lines]

    refs, hyps = read_tokens(args.refs), read_tokens(args.hyps)
    report = metrics.error_rate(refs, hyps)
    metrics.write_report_tsv(report, sys.stdout)
    if args.tone_stripped:
        inventory = _load_inventory(config)
        stripped = metrics.tone_stripped_rescore(refs, hyps, inventory)
        metrics.write_report_tsv(stripped, sys.stdout, label="tone_stripped")
    if args.jsonl:
        with open(args.jsonl, "w", encoding="utf-8") as fh:
            metrics.write_report_jsonl(report, fh)
    return 0


def cmd_validate_assets() -> int:
    report = assets.validate_assets()
    print(report.render(), end="")
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pinasr",
        description="Factored Mandarin ASR decoding toolkit: pinyin recognition "
        "(CTC beam search + n-gram LM) and pinyin-to-Hanzi transcription.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p):
        p.add_argument("--config", help="key=value config file")
        for f in dataclasses.fields(PipelineConfig):
            flag = "--" + f.name.replace("_", "-")
            if f.type == "bool":
                p.add_argument(flag, dest=f.name, action=argparse.BooleanOptionalAction,
                               default=argparse.SUPPRESS, help=f"override {f.name}")
            else:
                p.add_argument(flag, dest=f.name, type={"int": int, "float": float}.get(f.type, str),
                               default=argparse.SUPPRESS, help=f"override {f.name} (default {f.default!r})")

    p = sub.add_parser("pipeline", help="run synth/ingest -> decode -> transcribe -> score")
    add_config_args(p)

    p = sub.add_parser("synth", help="write emission files for an evaluation corpus")
    add_config_args(p)

    p = sub.add_parser("train-lm", help="train an n-gram LM and write ARPA")
    p.add_argument("--corpus", required=True, help="sentence file, one per line")
    p.add_argument("--unit", choices=("char", "pinyin", "pinyin-toneless"), default="char")
    p.add_argument("--order", type=int, default=4)
    p.add_argument("--discount", type=float, default=0.6)
    p.add_argument("--out", required=True, help="output ARPA path")
    add_config_args(p)

    p = sub.add_parser("decode", help="beam-search decode emission files")
    p.add_argument("--emissions", required=True, help="*.em file or directory")
    p.add_argument("--lm", help="ARPA LM for shallow fusion")
    add_config_args(p)

    p = sub.add_parser("transcribe", help="convert pinyin lines to Hanzi")
    p.add_argument("--input", required=True, help="file of space-joined pinyin units")
    add_config_args(p)  # --char-lm (ARPA path) is required here

    p = sub.add_parser("stats", help="pinyin n-gram to Hanzi ambiguity table")
    p.add_argument("--corpus", default="", help="Hanzi sentence file (default: bundled toy corpus)")
    p.add_argument("--parallel", default="", help="parallel TSV instead of sentences")
    p.add_argument("--n-max", type=int, default=6)
    add_config_args(p)

    p = sub.add_parser("score", help="error rate between reference and hypothesis files")
    p.add_argument("--refs", required=True)
    p.add_argument("--hyps", required=True)
    p.add_argument("--chars", action="store_true", help="split lines into characters, not whitespace tokens")
    p.add_argument("--tone-stripped", action="store_true", help="also score after tone stripping")
    p.add_argument("--jsonl", help="write per-utterance detail to this path")
    add_config_args(p)

    sub.add_parser("validate-assets", help="check bundled data against the manifest")
    return parser


def make_config(args) -> PipelineConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(parse_config_file(_existing(args.config)))
    for f in dataclasses.fields(PipelineConfig):
        if hasattr(args, f.name):
            values[f.name] = getattr(args, f.name)
    return PipelineConfig(**values)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate-assets":
            return cmd_validate_assets()
        config = make_config(args)
        if args.command == "pipeline":
            return cmd_pipeline(config)
        if args.command == "synth":
            return cmd_synth(config)
        if args.command == "train-lm":
            return cmd_train_lm(args, config)
        if args.command == "decode":
            return cmd_decode(args, config)
        if args.command == "transcribe":
            return cmd_transcribe(args, config)
        if args.command == "stats":
            return cmd_stats(args, config)
        if args.command == "score":
            return cmd_score(args, config)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (EmptyCorpus, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
