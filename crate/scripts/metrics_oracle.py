#!/usr/bin/env python3
"""Independent reference computation for the metrics fixture.

Usage:
    metrics_oracle.py generate OUT_DIR   # synthetic judgments.csv
    metrics_oracle.py compute OUT_DIR    # expected_rows.csv, expected_mad.csv, table.txt

All arithmetic uses exact fractions; rounding to one decimal happens only
when the table is written, half away from zero.
"""

import csv
import random
import sys
from collections import defaultdict
from fractions import Fraction
from pathlib import Path

LANG_ORDER = ["cpp", "python", "java", "javascript", "go"]
LANG_NAME = {"cpp": "C++", "python": "Python", "java": "Java", "javascript": "JavaScript", "go": "Go"}
BIAS_ORDER = ["authority", "reverse_authority", "self_declared", "misleading_task", "variable_rename", "illusory_complexity"]
BIAS_SHORT = {
    "authority": "Authority",
    "reverse_authority": "RevAuthority",
    "self_declared": "SelfDeclared",
    "misleading_task": "Misleading",
    "variable_rename": "Rename",
    "illusory_complexity": "Dummy",
}
PARADIGM_ORDER = ["direct", "test_case_based"]
FIELDS = ["judge_id", "language", "condition", "paradigm", "item_id", "label", "trial_index", "verdict"]


def bias_key(cond):
    name, _, param = cond.partition(":")
    return (BIAS_ORDER.index(name), int(param) if param else 0)


def bias_short(cond):
    name, _, param = cond.partition(":")
    return BIAS_SHORT[name] + param


def generate(out):
    rng = random.Random(20240611)
    judges = ["judge-a", "judge-b"]
    languages = ["cpp", "python"]
    conditions = ["original", "authority", "reverse_authority", "self_declared", "misleading_task",
                  "variable_rename:24", "illusory_complexity:1"]
    # probability shift towards answering "correct", per condition
    push = {"original": 0.0, "authority": 0.15, "reverse_authority": -0.2, "self_declared": 0.35,
            "misleading_task": -0.4, "variable_rename:24": 0.1, "illusory_complexity:1": 0.0}
    rows = []
    for judge in judges:
        for lang in languages:
            base = rng.uniform(0.55, 0.85)
            for cond in conditions:
                for label in ["correct", "incorrect"]:
                    for i in range(4):
                        item = f"p{i:02d}-{lang}-{label}"
                        for t in range(3):
                            p_correct_verdict = base if label == "correct" else 1 - base
                            p_correct_verdict = min(1.0, max(0.0, p_correct_verdict + push[cond]))
                            r = rng.random()
                            if r < 0.04:
                                verdict = "unparseable"
                            elif rng.random() < p_correct_verdict:
                                verdict = "correct"
                            else:
                                verdict = "incorrect"
                            rows.append([judge, lang, cond, "direct", item, label, t, verdict])
    rng.shuffle(rows)
    with open(out / "judgments.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(FIELDS)
        w.writerows(rows)


def round1(x):
    """Exact half-away-from-zero rounding of a Fraction to one decimal."""
    scaled = x * 10
    sign = -1 if scaled < 0 else 1
    q = (abs(scaled) * 2 + 1) // 2
    return sign * q


def fmt_plain(x):
    q = round1(x)
    s = "-" if q < 0 else ""
    q = abs(q)
    return f"{s}{q // 10}.{q % 10}"


def fmt_signed(x):
    q = round1(x)
    if q == 0:
        return "0.0"
    s = "-" if q < 0 else "+"
    q = abs(q)
    return f"{s}{q // 10}.{q % 10}"


def compute(out):
    trials = defaultdict(lambda: [0, 0])  # (key, item) -> [hits, n]
    labels = {}
    with open(out / "judgments.csv") as f:
        for r in csv.DictReader(f):
            key = (r["judge_id"], r["language"], r["condition"], r["paradigm"])
            e = trials[(key, r["item_id"])]
            e[1] += 1
            if r["verdict"] == r["label"]:
                e[0] += 1
            labels[(key, r["item_id"])] = r["label"]

    stats = {}
    groups = defaultdict(lambda: {"correct": [], "incorrect": []})
    for (key, item), (h, n) in trials.items():
        groups[key][labels[(key, item)]].append(Fraction(h, n))
    for key, g in groups.items():
        stats[key] = {
            "n_correct": len(g["correct"]),
            "n_incorrect": len(g["incorrect"]),
            "acc_correct": sum(g["correct"], Fraction(0)) / len(g["correct"]),
            "acc_incorrect": sum(g["incorrect"], Fraction(0)) / len(g["incorrect"]),
        }

    def sort_key(k):
        judge, lang, cond, par = k
        ck = (-1, 0) if cond == "original" else bias_key(cond)
        return (judge, LANG_ORDER.index(lang), ck, PARADIGM_ORDER.index(par))

    rows = []
    for key in sorted(stats, key=sort_key):
        judge, lang, cond, par = key
        s = stats[key]
        base = stats[(judge, lang, "original", par)]
        dc = (s["acc_correct"] - base["acc_correct"]) * 100
        di = (s["acc_incorrect"] - base["acc_incorrect"]) * 100
        if cond == "original":
            direction = ""
        elif dc > 0 and di < 0:
            direction = "positive"
        elif dc < 0 and di > 0:
            direction = "negative"
        elif dc == 0 and di == 0:
            direction = "neutral"
        else:
            direction = "mixed"
        rows.append(dict(judge_id=judge, language=lang, condition=cond, paradigm=par, **s,
                         delta_correct=dc, delta_incorrect=di, direction=direction))

    with open(out / "expected_rows.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        cols = ["judge_id", "language", "condition", "paradigm", "n_correct", "n_incorrect",
                "acc_correct", "acc_incorrect", "delta_correct", "delta_incorrect", "direction"]
        w.writerow(cols)
        for r in rows:
            w.writerow([repr(float(r[c])) if isinstance(r[c], Fraction) else r[c] for c in cols])

    mads = []

    def mad(vals):
        return sum((abs(v) for v in vals), Fraction(0)) / len(vals)

    table = []
    for par in PARADIGM_ORDER:
        prow = [r for r in rows if r["paradigm"] == par]
        if not prow:
            continue
        biased = [r for r in prow if r["condition"] != "original"]
        biases = sorted({r["condition"] for r in biased}, key=bias_key)
        judges = sorted({r["judge_id"] for r in prow})
        langs = sorted({r["language"] for r in prow}, key=LANG_ORDER.index)

        def collect(pred):
            vals = []
            for r in biased:
                if pred(r):
                    vals += [r["delta_correct"], r["delta_incorrect"]]
            return vals

        header = ["judge", "language", "label", "original"] + [bias_short(b) for b in biases] + ["MAD"]
        body = []
        for j in judges:
            for l in langs:
                orig = [r for r in prow if r["judge_id"] == j and r["language"] == l and r["condition"] == "original"]
                if not orig:
                    continue
                for side in ["correct", "incorrect"]:
                    field = "delta_" + side
                    cells = [j, LANG_NAME[l], side, fmt_plain(orig[0]["acc_" + side] * 100)]
                    vals = []
                    for b in biases:
                        m = [r for r in biased if r["judge_id"] == j and r["language"] == l and r["condition"] == b]
                        if m:
                            vals.append(m[0][field])
                            cells.append(fmt_signed(m[0][field]))
                        else:
                            cells.append("-")
                    if vals:
                        v = mad(vals)
                        mads.append([par, "row", j, l, "", side, len(vals), v])
                        cells.append(fmt_plain(v))
                    else:
                        cells.append("-")
                    body.append(cells)
        widths = [max(len(x[i]) for x in [header] + body) for i in range(len(header))]

        def line(cells):
            parts = [c.ljust(widths[i]) if i < 3 else c.rjust(widths[i]) for i, c in enumerate(cells)]
            return "  ".join(parts).rstrip()

        table.append(f"== {par} ==")
        table.append(line(header))
        table += [line(b) for b in body]
        if biased:
            table.append("")
            parts = []
            for b in biases:
                vals = collect(lambda r: r["condition"] == b)
                v = mad(vals)
                mads.append([par, "bias", "", "", b, "", len(vals), v])
                parts.append(f"{bias_short(b)} {fmt_plain(v)}")
            table.append("MAD by bias: " + ", ".join(parts))
            parts = []
            for l in langs:
                vals = collect(lambda r: r["language"] == l)
                if vals:
                    v = mad(vals)
                    mads.append([par, "language", "", l, "", "", len(vals), v])
                    parts.append(f"{LANG_NAME[l]} {fmt_plain(v)}")
            table.append("MAD by language: " + ", ".join(parts))
            parts = []
            for j in judges:
                vals = collect(lambda r: r["judge_id"] == j)
                if vals:
                    v = mad(vals)
                    mads.append([par, "judge", j, "", "", "", len(vals), v])
                    parts.append(f"{j} {fmt_plain(v)}")
            table.append("MAD by judge: " + ", ".join(parts))
            for j in judges:
                for b in biases:
                    vals = collect(lambda r: r["judge_id"] == j and r["condition"] == b)
                    if vals:
                        mads.append([par, "judge_bias", j, "", b, "", len(vals), mad(vals)])
            vals = collect(lambda r: True)
            v = mad(vals)
            mads.append([par, "overall", "", "", "", "", len(vals), v])
            table.append(f"MAD overall: {fmt_plain(v)}")
            table.append("Directions:")
            for b in biases:
                ds = [r["direction"] for r in biased if r["condition"] == b]
                counts = ", ".join(f"{d} {ds.count(d)}" for d in ["positive", "negative", "mixed", "neutral"])
                table.append(f"  {bias_short(b)}: {counts}")
        table.append("")

    with open(out / "table.txt", "w") as f:
        f.write("\n".join(table[:-1]) + "\n")

    with open(out / "expected_mad.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["paradigm", "grouping", "judge_id", "language", "bias", "side", "n", "mad"])
        for m in mads:
            w.writerow(m[:-1] + [repr(float(m[-1]))])


if __name__ == "__main__":
    cmd, out = sys.argv[1], Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)
    {"generate": generate, "compute": compute}[cmd](out)
