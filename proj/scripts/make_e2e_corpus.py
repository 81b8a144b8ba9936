#!/usr/bin/env python3
"""Writes the small synthetic corpus, mock script and config used by the
hermetic end-to-end tests under tests/data/e2e/."""
import json
import os

OUT = os.path.join(os.path.dirname(__file__), "..", "tests", "data", "e2e")
NOTA = "None of the above"

# (group, [(variant, question, [a, b, c], answer_index)])
BT_GROUPS = {
    "train": [
        ("bt-g1", [
            ("original", "A man shaves every single day, yet his beard stays long. Who is he?",
             ["A barber.", "A wizard.", "A sailor."], 0),
            ("semantic", "Every day a man uses a razor, but his own beard never gets shorter. Who is he?",
             ["A barber.", "A wizard.", "A sailor."], 0),
            ("context", "A woman styles hair from dawn to dusk, yet her own hair is always messy. Who is she?",
             ["A hairdresser.", "A painter.", "A pilot."], 0)]),
        ("bt-g2", [
            ("original", "What has keys but cannot open a single lock anywhere?",
             ["A janitor.", "A piano.", "A locksmith."], 1),
            ("semantic", "Which thing owns many keys and still opens no door at all?",
             ["A janitor.", "A piano.", "A locksmith."], 1),
            ("context", "What has a spine but never stands up straight in any room?",
             ["A snake.", "A chair.", "A book."], 2)]),
        ("bt-g3", [
            ("original", "What can you hold in your left hand but never in your right?",
             ["A pencil.", "Your right elbow.", "A coin."], 1),
            ("semantic", "Name something your left hand can grab that your right hand never can.",
             ["A pencil.", "Your right elbow.", "A coin."], 1),
            ("context", "What can a dog touch with its left paw but never with its right paw?",
             ["A bone.", "Its collar.", "Its right paw."], 2)]),
        ("bt-g4", [
            ("original", "A woman shoots her husband, holds him underwater, then hangs him, yet they dine later. How?",
             ["They are actors.", "She is a photographer.", "He is a ghost."], 1),
            ("semantic", "A wife shoots her man, dunks him in water and hangs him up, then they eat dinner. How?",
             ["They are actors.", "She is a photographer.", "He is a ghost."], 1),
            ("context", "A chef beats the eggs, drowns the fish and roasts the lamb, yet nobody calls the police. Why?",
             ["It is a dream.", "He is cooking.", "The police are away."], 1)]),
    ],
    "test": [
        ("bt-t1", [
            ("original", "What gets wetter the more it dries anything in the house?",
             ["A sponge.", "A towel.", "A hair dryer."], 1),
            ("semantic", "Which household item becomes more soaked the more it dries things?",
             ["A sponge.", "A towel.", "A hair dryer."], 1),
            ("context", "On a beach trip, what grows damper the longer everyone uses it to dry off?",
             ["The sand.", "The sun.", "A beach towel."], 2)]),
        ("bt-t2", [
            ("original", "What has hands and a face but cannot smile or wave at anyone?",
             ["A clock.", "A statue.", "A robot."], 0),
            ("semantic", "Which object owns a face and two hands yet never grins or waves?",
             ["A clock.", "A statue.", "A robot."], 0),
            ("context", "In a classroom, what has a face and hands but never raises them to answer?",
             ["The teacher.", "The wall clock.", "A poster."], 1)]),
        ("bt-t3", [
            ("original", "What goes up and down the stairs without ever moving at all?",
             ["A carpet.", "A cat.", "An elevator."], 0),
            ("semantic", "Which thing climbs and descends the staircase yet stays perfectly still?",
             ["A carpet.", "A cat.", "An elevator."], 0),
            ("context", "What runs along the mountain road all day without taking a single step?",
             ["A hiker.", "A goat.", "The guard rail."], 2)]),
        ("bt-t4", [
            ("original", "What has many teeth but can never bite anything or anyone?",
             ["A shark.", "A comb.", "A dentist."], 1),
            ("semantic", "Which item is full of teeth yet is unable to bite a thing?",
             ["A shark.", "A comb.", "A dentist."], 1),
            ("context", "In a workshop, what has sharp teeth but never eats a single meal?",
             ["A saw.", "A dog.", "A carpenter."], 0)]),
    ],
}

# RiddleSense-style riddles: five options, no groups. The last train riddle
# repeats a BrainTeaser question word for word and must be removed by dedup.
RS = {
    "train": [
        ("rs-1", "I have a trunk and many branches, yet I never travel anywhere. What am I?",
         ["car", "tree", "oak", "suitcase", "river"], 1),
        ("rs-2", "I have wheels and a motor, and I carry people along the road. What am I?",
         ["car", "horse", "bicycle", "oak", "ship"], 0),
        ("rs-3", "Tall and green, I give shade in summer and lose leaves in autumn. What am I?",
         ["oak", "car", "lamp", "cloud", "tent"], 0),
        ("rs-dup", "What has keys but cannot open a single lock anywhere?",
         ["piano", "car", "oak", "door", "map"], 0),
    ],
    "test": [
        ("rs-t1", "I fly without wings and cry without eyes across the grey sky. What am I?",
         ["cloud", "bird", "car", "oak", "kite"], 0),
        ("rs-t2", "The more you take from me, the bigger I become in the ground. What am I?",
         ["hole", "mountain", "car", "oak", "debt"], 0),
    ],
}


def bt_rows(split):
    rows = []
    for group, members in BT_GROUPS[split]:
        for variant, question, options, answer in members:
            rows.append({"id": f"{group}-{variant[0]}", "group_id": group, "variant": variant,
                         "question": question, "options": options + [NOTA], "answer_index": answer,
                         "source": "brainteaser_sp"})
    return rows


def rs_rows(split):
    return [{"id": i, "question": q, "options": o, "answer_index": a, "source": "riddlesense"}
            for i, q, o, a in RS[split]]


def oracle_rule(r):
    first = r["options"][0]
    needle = "Riddle: ```\n%s\n```\n\nOptions:\n[option 1]: ```%s```" % (r["question"], first)
    return {"user_contains": needle, "reply": "Let me think.\n[option %d]" % (r["answer_index"] + 1)}


def main():
    os.makedirs(OUT, exist_ok=True)
    files = {
        "brainteaser_train.jsonl": bt_rows("train"),
        "brainteaser_test.jsonl": bt_rows("test"),
        "riddlesense_train.jsonl": rs_rows("train"),
        "riddlesense_test.jsonl": rs_rows("test"),
    }
    for name, rows in files.items():
        with open(os.path.join(OUT, name), "w") as f:
            for r in rows:
                f.write(json.dumps(r) + "\n")

    # Answer rules only for test riddles: train riddles also appear inside
    # prompts as exemplars and must not trigger a rule.
    rules = [oracle_rule(r) for name, rows in files.items() if name.endswith("_test.jsonl") for r in rows]
    rules += [
        {"system_contains": "context reconstruction",
         "user_regex": r"Question: ```([^`]*)```\s*Correct answer: ```([^`]*)```\s*$",
         "reply": "Question: In a busy harbor town, $1\nCorrect answer: $2 (harbor edition)"},
        {"system_contains": "concept grasper", "user_regex": r"- Correct Answer: ([^\n]*)",
         "reply": "- Wrong Answer: Not $1"},
        {"system_contains": "rewrite the sentence", "user_regex": r"- Sentence \(out of context\): ([^\n]*)",
         "reply": "- Sentence: $1 by the harbor"},
        {"system_contains": "Classify the correct answer", "reply": "object"},
        {"system_contains": "within the specified category", "user_regex": r"Category: (\w+)",
         "reply": "Answer: $1 thing"},
    ]
    mock = {"chat": {"rules": rules}, "embeddings": {"model": "mock-embed", "dim": 64}}
    with open(os.path.join(OUT, "mock.json"), "w") as f:
        json.dump(mock, f, indent=1)
        f.write("\n")

    config = {
        "work_dir": "${RISCORE_WORK}",
        "cache_dir": "${RISCORE_WORK}/cache",
        "seed": 20240601,
        "models": {"mock-llm": {"penalized": False, "max_tokens": 512}},
        "roles": {"generator": "mock-llm", "evaluator": "mock-llm", "classifier": "mock-llm"},
        "embedding": {"model": "mock-embed"},
        "classifier": {"kind": "chat"},
        "datasets": {
            "brainteaser": {"train": "brainteaser_train.jsonl", "test": "brainteaser_test.jsonl"},
            "riddlesense": {"train": "riddlesense_train.jsonl", "test": "riddlesense_test.jsonl"},
        },
        "fewshot_pairs": "../fixtures/fewshot_pairs.jsonl",
        "explanations": "explanations.json",
        "wordnet": {"index": "../wordnet/index.noun", "data": "../wordnet/data.noun"},
        "dedup_threshold": 0.9,
        "reconstruction_mode": "zs",
        "max_in_flight": 4,
        "embed_batch": 16,
    }
    with open(os.path.join(OUT, "config.json"), "w") as f:
        json.dump(config, f, indent=1)
        f.write("\n")

    explanations = {r["id"]: "The answer plays on a second meaning of the question." for r in bt_rows("train")}
    with open(os.path.join(OUT, "explanations.json"), "w") as f:
        json.dump(explanations, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()
