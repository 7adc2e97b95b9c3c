#!/usr/bin/env python3
# Copyright 2026 The SaladBench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the two bundled synthetic corpora.

toy_sentiment.tsv  200 single-text reviews labelled neg/pos. Each review
                   opens with a scene-setting clause and closes with an
                   evaluation carrying the polarity.
toy_pair.tsv       300 premise/hypothesis pairs labelled
                   entailment/neutral/contradiction. Premises are long and
                   full of incidental detail; hypotheses are short, as in
                   crowd-sourced inference corpora.

Output is a pure function of the seed below.
"""

import csv
import pathlib
import random

SEED = 20260
HERE = pathlib.Path(__file__).resolve().parent

# --- sentiment -------------------------------------------------------------

SHOWS = """film movie sequel documentary thriller comedy drama musical western
cartoon remake biopic""".split()
TIMES = """yesterday tonight saturday sunday monday friday recently""".split()
COMPANIONS = """sister brother mother father cousin roommate neighbor grandmother
girlfriend boyfriend""".split()
VENUES = """cinema theater festival multiplex campus library airplane""".split()
POS = """great wonderful superb delightful moving charming brilliant clever gorgeous
fresh stunning hilarious touching""".split()
NEG = """awful dreadful boring clumsy tedious bland lifeless dull sloppy messy
painful forgettable shallow""".split()
INTENS = ["very", "truly", "really", "so"]

OPENERS = [
    "{t} i watched the {s} with my {c}",
    "i saw the {s} at the {v} {t}",
    "my {c} and i caught the {s} at the {v}",
    "{t} we finally watched the {s}",
    "the {s} we saw at the {v}",
]
VERDICTS = [
    "and it was {i} {a} and {b} .",
    "and honestly it felt {a} , {b} and {d} .",
    "; {a} , {b} , {i} {d} .",
    "was {a} and {i} {b} .",
    "and i found it {a} and {b} .",
]


def sentiment_rows(rng):
    rows = []
    for i in range(200):
        label = "pos" if i % 2 == 0 else "neg"
        pool = POS if label == "pos" else NEG
        a, b, d = rng.sample(pool, 3)
        fill = dict(s=rng.choice(SHOWS), t=rng.choice(TIMES), c=rng.choice(COMPANIONS),
                    v=rng.choice(VENUES), a=a, b=b, d=d, i=rng.choice(INTENS))
        text = rng.choice(OPENERS).format(**fill) + " " + rng.choice(VERDICTS).format(**fill)
        rows.append({"id": f"s{i:04d}", "text_a": text, "text_b": "", "label": label})
    return rows


# --- pair --------------------------------------------------------------------

AGENTS = """man woman boy girl chef farmer doctor teacher pilot singer painter
student child nurse sailor baker""".split()
VERBS = """carried painted cleaned fixed sold moved opened watched""".split()
OBJECTS = """box chair door window bicycle guitar table lamp basket boat""".split()
PLACES = """kitchen garden park station market harbor library studio""".split()
ADJS = """tall young old tired smiling bearded cheerful quiet nervous busy""".split()
COLORS = """red blue green yellow black white orange purple grey brown""".split()
CLOTHES = """jacket hat coat scarf sweater apron uniform dress""".split()
SIZES = """heavy small wooden broken shiny dusty tiny huge""".split()
WHEN = """yesterday today earlier tonight""".split()
PREPS = """across inside behind near beside""".split()


def premise(rng, agent, verb, obj, place):
    f = dict(g=agent, v=verb, o=obj, p=place, a=rng.choice(ADJS), c=rng.choice(COLORS),
             w=rng.choice(CLOTHES), s=rng.choice(SIZES), t=rng.choice(WHEN),
             r=rng.choice(PREPS))
    forms = [
        "a {a} {g} in a {c} {w} {v} the {s} {o} {r} the {p} .",
        "{t} , a {a} {g} {v} a {s} {o} {r} the {p} .",
        "the {g} in the {c} {w} {v} a {s} {o} {r} the {p} {t} .",
        "{r} the {p} , a {a} {g} wearing a {c} {w} {v} the {o} .",
    ]
    return rng.choice(forms).format(**f)


def hypothesis(rng, label, agent, verb, obj, place):
    other_agent = rng.choice([a for a in AGENTS if a != agent])
    other_obj = rng.choice([o for o in OBJECTS if o != obj])
    if label == "entailment":
        forms = [
            "a {g} {v} something at the {p} .",
            "someone {v} the {o} earlier .",
            "a person is at the {p} with a {o} .",
            "there is a {o} at the {p} .",
        ]
    elif label == "contradiction":
        forms = [
            "the {g} never {v} anything at all .",
            "nobody {v} the {o} at the {p} .",
            "the {g} is not at the {p} today .",
            "there is no {o} at the {p} .",
        ]
    else:
        forms = [
            "the {g} {v} the {o} because a {h} asked .",
            "the {g} wants to buy a {x} .",
            "the {g} {v} the {o} for a friend .",
            "the {g} likes the {p} .",
        ]
    return rng.choice(forms).format(g=agent, v=verb, o=obj, p=place, h=other_agent, x=other_obj)


def pair_rows(rng):
    labels = ["entailment", "neutral", "contradiction"]
    rows = []
    for i in range(300):
        label = labels[i % 3]
        agent = rng.choice(AGENTS)
        verb = rng.choice(VERBS)
        obj = rng.choice(OBJECTS)
        place = rng.choice(PLACES)
        rows.append({
            "id": f"p{i:04d}",
            "text_a": premise(rng, agent, verb, obj, place),
            "text_b": hypothesis(rng, label, agent, verb, obj, place),
            "label": label,
        })
    return rows


def write(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=["id", "text_a", "text_b", "label"],
                           delimiter="\t", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def main():
    rng = random.Random(SEED)
    write(HERE / "toy_sentiment.tsv", sentiment_rows(rng))
    write(HERE / "toy_pair.tsv", pair_rows(rng))


if __name__ == "__main__":
    main()
