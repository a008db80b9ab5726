#!/usr/bin/env python3
"""Pack crates/core/data/mini_corpus/<problem>/ into dataset JSONL.

Each problem directory holds problem.json ({description, io_tests}) and
{correct,incorrect}.{py,cpp,java,js,go}. Output goes to stdout.
"""
import json
import pathlib
import sys

EXT = {"py": "python", "cpp": "cpp", "java": "java", "js": "javascript", "go": "go"}

root = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "crates/core/data/mini_corpus")
problems, samples = [], []
for pdir in sorted(p for p in root.iterdir() if p.is_dir()):
    meta = json.loads((pdir / "problem.json").read_text())
    problems.append({"kind": "problem", "problem_id": pdir.name, **meta})
    for src in sorted(pdir.iterdir()):
        if src.suffix[1:] not in EXT:
            continue
        lang = EXT[src.suffix[1:]]
        samples.append({
            "kind": "sample",
            "sample_id": f"{pdir.name}-{lang}-{src.stem}",
            "problem_id": pdir.name,
            "language": lang,
            "label": src.stem,
            "source": src.read_text(),
        })
for rec in problems + samples:
    print(json.dumps(rec, ensure_ascii=False))
