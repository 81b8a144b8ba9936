#!/usr/bin/env python3
"""Regenerate tests/data/golden/*.txt straight from the LaTeX prompt listings
in paper.md, independently of core/templates/.

The goldens double as a check on the hand-transcribed template files: both
must agree byte for byte for the golden test to pass.

    python3 scripts/make_golden_prompts.py paper.md tests/data/golden
"""

import json
import os
import re
import sys

NUMBER_WORDS = {4: "four", 5: "five"}


def latex_lines_to_text(block):
    out = []
    for line in block.split("\n"):
        stripped = line.rstrip()
        if re.fullmatch(r"\s*\\*", stripped):
            out.append("")
            continue
        out.append(re.sub(r"\\+$", "", stripped))
    while out and out[-1] == "":
        out.pop()
    while out and out[0] == "":
        out.pop(0)
    text = "\n".join(out)
    return re.sub(r"\n{3,}", "\n\n", text)


def listing(paper, heading):
    """System text and raw user block of the listing following `heading`."""
    start = paper.index(heading)
    sys_at = paper.index(r"\textbf{System Prompt:}\\", start) + len(r"\textbf{System Prompt:}\\")
    user_at = paper.index(r"\textbf{User Prompt:}", sys_at)
    end = paper.index(r"\par\noindent\rule", user_at)
    system = latex_lines_to_text(paper[sys_at:user_at])
    user_raw = paper[user_at + len(r"\textbf{User Prompt:}"):end]
    return system, user_raw


def user_text(raw, n_options):
    pieces = []
    pos = 0
    for m in re.finditer(r"\\begin\{verbatim\}\n(.*?)\\end\{verbatim\}", raw, re.S):
        between = raw[pos:m.start()].strip()
        if between:
            pieces.append(between)
        pieces.append(m.group(1))
        pos = m.end()
    text = "\n".join(p.rstrip("\n") for p in pieces)
    if n_options == 4:
        text = text.replace("\n[option 5]: ```{OPTION_5}```", "")
    return text


def system_text(system, n_options, shots_placeholder):
    # The first bold X is the shot count, the second the option count.
    system = system.replace(r"\textbf{X}", shots_placeholder, 1)
    system = system.replace(r"\textbf{X}", NUMBER_WORDS[n_options], 1)
    return system.replace("five options", NUMBER_WORDS[n_options] + " options")


def exemplar(r, position, explanation):
    s = "Example %d:\nRiddle: ```\n%s\n```\n\nOptions:\n" % (position, r["question"])
    s += "\n".join("[option %d]: ```%s```" % (i + 1, o) for i, o in enumerate(r["options"]))
    s += "\n"
    if explanation is not None:
        s += "Explanation: %s\n" % explanation
    k = r["answer_index"]
    s += "Answer: [option %d]: %s\n" % (k + 1, r["options"][k])
    return s


def fill(tmpl, values):
    return re.sub(r"\{([A-Z0-9_]+)\}", lambda m: values.get(m.group(1), m.group(0)), tmpl)


def main():
    paper_path, out_dir = sys.argv[1], sys.argv[2]
    with open(paper_path, encoding="utf-8") as f:
        paper = f.read()
    with open(os.path.join(out_dir, "fixtures.json"), encoding="utf-8") as f:
        fixtures = json.load(f)

    zs = listing(paper, r"\paragraph{Zero-shot Chain of Thought Prompting Technique}")
    fs = listing(paper, r"\paragraph{Few-shot Prompting Techniques}")
    cot = listing(paper, r"\paragraph{Chain of Thought Prompting Technique}")

    strategies = {
        "cot-zs": (zs, None, False),
        "fs-rand": (fs, "plain", False),
        "fs-sim": (fs, "plain", False),
        "cot-fs": (cot, "plain", True),
        "riscore": (fs, "riscore", False),
        "riscore-m": (fs, "riscore_m", False),
    }
    for n_options in (4, 5):
        fx = fixtures[str(n_options)]
        test = fx["test"]
        for name, ((system, user_raw), pool, with_expl) in strategies.items():
            exemplars = fx[pool] if pool else []
            values = {"RIDDLE": test["question"], "SHOTS": str(len(exemplars))}
            for i, o in enumerate(test["options"]):
                values["OPTION_%d" % (i + 1)] = o
            block = "\n".join(
                exemplar(e, i + 1, fx["explanations"][e["id"]] if with_expl else None)
                for i, e in enumerate(exemplars))
            values["EXAMPLES_COT" if with_expl else "EXAMPLES"] = block
            sys_out = fill(system_text(system, n_options, "{SHOTS}"), values)
            user_out = fill(user_text(user_raw, n_options), values)
            stem = os.path.join(out_dir, "%s_%d" % (name, n_options))
            with open(stem + ".system.txt", "w", encoding="utf-8") as f:
                f.write(sys_out)
            with open(stem + ".user.txt", "w", encoding="utf-8") as f:
                f.write(user_out)
    print("wrote goldens to", out_dir)


if __name__ == "__main__":
    main()
