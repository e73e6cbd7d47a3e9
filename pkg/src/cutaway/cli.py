"""Command-line entry points for the batch pipeline.

Subcommands: ingest, train, recommend, analyze, export, serve. Commands
print human-readable progress to stdout, write artifacts where told, and on
failure emit exactly one machine-readable JSON error line to stderr and
exit nonzero. Randomized steps take --seed and are fully deterministic.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import agreement, classifier, recommend, svgplot
from .errors import CutawayError
from .features import (
    build_feature_space,
    load_sentiment_lexicon,
    load_tagset,
    tag_pos,
)
from .service import ServiceConfig, serve
from .session import import_edl
from .transcript import (
    TimedTranscript,
    load_stopwords,
    load_transcript,
    transcript_to_json,
)


def _load_transcript_dir(path: str) -> dict[str, TimedTranscript]:
    docs = {}
    for p in sorted(Path(path).glob("*.json")):
        doc = load_transcript(p)
        docs[doc.video_id] = doc
    if not docs:
        raise FileNotFoundError(f"no transcript JSON files in {path!r}")
    return docs


def _write(path: str | None, text: str):
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_ingest(args) -> int:
    doc = load_transcript(args.transcript)
    _write(args.out, transcript_to_json(doc))
    if args.out:
        print(f"ingested {doc.video_id}: {len(doc.words)} words, "
              f"{doc.duration_s:g} s -> {args.out}")
    return 0


def cmd_train(args) -> int:
    stops = load_stopwords(args.stopwords)
    lexicon = load_sentiment_lexicon(args.sentiment)
    tagset = load_tagset()
    transcripts = _load_transcript_dir(args.transcripts)
    edit_sets = agreement.read_edit_sets(args.labels)
    labeled = classifier.label_keywords(transcripts, edit_sets,
                                        min_experts=args.min_experts)
    cfg = classifier.TrainConfig(c=args.c, epochs=args.epochs, seed=args.seed)

    cv = classifier.cross_validate(labeled, cfg, stops=stops, lexicon=lexicon,
                                   tagset=tagset)
    for vid in sorted(cv.per_video):
        r = cv.per_video[vid]
        print(f"video {vid} precision {r.precision:.2f} "
              f"recall {r.recall:.2f} f1 {r.f1:.2f}")
    pooled = cv.pooled
    print(f"pooled precision {pooled.precision:.2f} "
          f"recall {pooled.recall:.2f} f1 {pooled.f1:.2f}")

    tagged = [classifier.LabeledDoc(tag_pos(ld.doc), ld.keyword_indices)
              for ld in labeled]
    space = build_feature_space([ld.doc for ld in tagged], stops, tagset)
    examples = [ex for ld in tagged
                for ex in classifier.doc_examples(ld, space, lexicon, stops)]
    model = classifier.train(examples, cfg, feature_space_id=space.space_id)

    curve = classifier.pr_curve(model, tagged, space, lexicon, stops)
    model.decision_threshold = classifier.select_threshold(
        curve, min_precision=args.min_precision)
    print(f"threshold {model.decision_threshold:.4f} "
          f"(precision floor {args.min_precision:g})")

    model.save(args.out_model, train_config=cfg, metrics=cv.to_dict())
    space.save(args.out_space)
    print(f"model -> {args.out_model}")
    print(f"feature space -> {args.out_space}")
    if args.pr_svg:
        finite = [p for p in curve if p.threshold != float("inf")]
        svg = svgplot.svg_line_plot(
            [("model", [p.recall for p in finite],
              [p.precision for p in finite])],
            title="keyword detection precision/recall",
            x_label="recall", y_label="precision", y_max=1.0,
        )
        _write(args.pr_svg, svg)
        print(f"pr curve -> {args.pr_svg}")
    return 0


def cmd_recommend(args) -> int:
    doc = load_transcript(args.transcript)
    if args.source == "interval":
        recs = recommend.recommend_interval(doc, period_s=args.period,
                                            duration_s=args.duration)
    elif args.source == "algorithmic":
        if not (args.model and args.space):
            raise ValueError("--source algorithmic needs --model and --space")
        from .classifier import LinearModel
        from .features import FeatureSpace

        model = LinearModel.load(args.model)
        space = FeatureSpace.load(args.space)
        recs = recommend.recommend_algorithmic(
            model, doc, space, load_sentiment_lexicon(args.sentiment),
            load_stopwords(args.stopwords), max_n=args.limit,
        )
    else:
        if not args.corpus:
            raise ValueError("--source expert needs --corpus")
        edits = [es for es in agreement.read_edit_sets(args.corpus)
                 if es.video_id == doc.video_id]
        if not edits:
            raise ValueError(f"corpus has no edits for video {doc.video_id!r}")
        track = agreement.probability_track(edits, doc.duration_s)
        recs = recommend.recommend_expert(track, edits, doc)
    items = recommend.normalize(recs, doc.duration_s)
    if args.limit is not None:
        items = items[:args.limit]
    _write(args.out, json.dumps({
        "video_id": doc.video_id,
        "source": args.source,
        "items": [r.to_dict() for r in items],
    }, indent=2))
    return 0


def cmd_analyze(args) -> int:
    transcripts = _load_transcript_dir(args.transcripts)
    edits = agreement.read_edit_sets(args.corpus)
    durations = {vid: t.duration_s for vid, t in transcripts.items()}
    by_video: dict[str, list[agreement.EditSet]] = {}
    for es in edits:
        by_video.setdefault(es.video_id, []).append(es)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    videos = {}
    observed = []
    baseline = []
    for vid in sorted(by_video):
        sets = by_video[vid]
        duration = durations.get(vid)
        if duration is None:
            raise ValueError(f"no transcript for video {vid!r}")
        entry: dict = {"n_edit_sets": len(sets)}
        if len(sets) >= 2:
            jac = agreement.mean_pairwise_jaccard(sets, duration,
                                                  bin_s=args.bin_s)
            rnd = agreement.random_baseline_jaccard(
                sets, duration, trials=args.trials, seed=args.seed,
                bin_s=args.bin_s)
            entry["jaccard"] = jac.to_dict()
            entry["random_baseline"] = rnd.to_dict()
            observed.append(jac.mean)
            baseline.append(rnd.mean)
        track = agreement.probability_track(sets, duration, bin_s=args.bin_s)
        xs = [i * track.bin_s for i in range(len(track.values))]
        svg = svgplot.svg_line_plot(
            [("insertion probability", xs, track.values.tolist())],
            title=f"B-roll probability: {vid}",
            x_label="time (s)", y_label="probability", y_max=1.0,
        )
        svg_path = out_dir / f"track_{vid}.svg"
        svg_path.write_text(svg, encoding="utf-8")
        entry["track_svg"] = str(svg_path)
        videos[vid] = entry

    report = {
        "videos": videos,
        "stats": agreement.broll_stats(edits, durations).to_dict(),
        "query_locality": agreement.query_locality(edits, transcripts),
    }
    if observed:
        mean_obs = sum(observed) / len(observed)
        mean_rnd = sum(baseline) / len(baseline)
        report["overall"] = {
            "jaccard_mean": mean_obs,
            "random_mean": mean_rnd,
            "ratio": mean_obs / mean_rnd if mean_rnd > 0 else None,
        }
    _write(args.out, json.dumps(report, indent=2))
    return 0


def cmd_export(args) -> int:
    session = import_edl(Path(args.edl).read_text(encoding="utf-8"))
    if args.format == "csv":
        _write(args.out, session.to_csv())
    else:
        _write(args.out, json.dumps(session.to_edl(), indent=2))
    return 0


def cmd_serve(args) -> int:  # pragma: no cover - blocks on uvicorn
    serve(ServiceConfig.load(args.config))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cutaway",
        description="Transcript-driven B-roll editing pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate and normalize a transcript")
    p.add_argument("--transcript", required=True)
    p.add_argument("--out")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("train", help="cross-validate and train the keyword model")
    p.add_argument("--transcripts", required=True, help="directory of transcript JSON")
    p.add_argument("--labels", required=True, help="expert edit-set corpus JSON")
    p.add_argument("--out-model", required=True)
    p.add_argument("--out-space", required=True)
    p.add_argument("--pr-svg")
    p.add_argument("--c", type=float, default=0.01)
    p.add_argument("--epochs", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-experts", type=int, default=2)
    p.add_argument("--min-precision", type=float, default=0.6)
    p.add_argument("--stopwords")
    p.add_argument("--sentiment")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("recommend", help="generate B-roll recommendations")
    p.add_argument("--transcript", required=True)
    p.add_argument("--source", required=True,
                   choices=["algorithmic", "expert", "interval"])
    p.add_argument("--model")
    p.add_argument("--space")
    p.add_argument("--corpus")
    p.add_argument("--limit", type=int)
    p.add_argument("--period", type=float, default=recommend.DEFAULT_PERIOD_S)
    p.add_argument("--duration", type=float,
                   default=recommend.ALGORITHMIC_DURATION_S)
    p.add_argument("--stopwords")
    p.add_argument("--sentiment")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_recommend)

    p = sub.add_parser("analyze", help="agreement and usage analytics")
    p.add_argument("--corpus", required=True)
    p.add_argument("--transcripts", required=True)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bin-s", type=float, default=agreement.DEFAULT_BIN_S)
    p.add_argument("--out-dir", default="analysis")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("export", help="convert an EDL document")
    p.add_argument("--edl", required=True)
    p.add_argument("--format", choices=["edl-json", "csv"], default="edl-json")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--config", help="config file; CUTAWAY_* env vars override")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CutawayError as exc:
        print(json.dumps(exc.to_payload()), file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(json.dumps({"code": "not_found", "message": str(exc)}),
              file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(json.dumps({"code": "bad_request", "message": str(exc)}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
