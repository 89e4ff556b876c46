#!/usr/bin/env python3
"""Writes the golden prompt files under tests/golden/prompts/.

The prompt text here is transcribed by hand, template scaffolding plus
fixture substitutions, so the files stay independent of the renderer they
check. Fixture inputs must match tests/testutil.hpp.
"""

import os

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "golden", "prompts")

LANGS = {
    "en": {
        "name": "English",
        "context": "The sun is a star.",
        "paraphrase": "The sun is one of the stars.",
        "keyword": "sun",
        "question": "What is the sun?",
    },
    "de": {
        "name": "German",
        "context": "Die Sonne ist ein Stern.",
        "paraphrase": "Die Sonne zählt zu den Sternen.",
        "keyword": "Sonne",
        "question": "Was ist die Sonne?",
    },
    "hi": {
        "name": "Hindi",
        "context": "सूर्य एक तारा है।",
        "paraphrase": "सूर्य तारों में से एक है।",
        "keyword": "सूर्य",
        "question": "सूर्य क्या है?",
    },
    "bn": {
        "name": "Bengali",
        "context": "সূর্য একটি নক্ষত্র।",
        "paraphrase": "সূর্য নক্ষত্রদের একটি।",
        "keyword": "সূর্য",
        "question": "সূর্য কী?",
    },
}

# One-shot fixture exemplars (must match tests/testutil.hpp).
QG_EXEMPLAR = {
    "paraphrase": "Water boils at one hundred degrees.",
    "keyword": "water",
    "question": "What boils at one hundred degrees?",
}
DG_EXEMPLAR = {
    "question": "What boils at one hundred degrees?",
    "answer": "water",
    "distractors": ["milk", "oil", "mercury"],
}


def write(name, text):
    with open(os.path.join(OUT, name), "w", encoding="utf-8", newline="") as f:
        f.write(text)


def main():
    os.makedirs(OUT, exist_ok=True)
    for code, v in LANGS.items():
        name = v["name"]
        write("pg_%s.txt" % code,
              "Paraphrase the given context %s in language %s"
              % (v["context"], name))
        write("ke_%s.txt" % code,
              "Extract keywords from the paraphrased context %s in language %s"
              % (v["paraphrase"], name))
        write("qg_%s.txt" % code,
              "Generate a question based on the paraphrased context %s and the "
              "correct answer %s in language %s"
              % (v["paraphrase"], v["keyword"], name))
        write("dg_%s.txt" % code,
              "Create three plausible distractors for the question %s and the "
              "correct answer %s in language %s"
              % (v["question"], v["keyword"], name))
        write("ssp_%s.txt" % code,
              "Generate MCQs based on the given context %s along with the "
              "correct answer and three distractors in language %s"
              % (v["context"], name))
        write("qg_one_%s.txt" % code,
              "For the paraphrased context %s and the correct answer %s, the "
              "question is %s in language %s. Generate a question based on the "
              "paraphrased context %s and the correct answer %s in language %s"
              % (QG_EXEMPLAR["paraphrase"], QG_EXEMPLAR["keyword"],
                 QG_EXEMPLAR["question"], name, v["paraphrase"], v["keyword"],
                 name))
        write("dg_one_%s.txt" % code,
              "The distractors for the question %s and the correct answer %s "
              "are %s in language %s. Create three plausible distractors for "
              "the question %s and the correct answer %s in language %s"
              % (DG_EXEMPLAR["question"], DG_EXEMPLAR["answer"],
                 ", ".join(DG_EXEMPLAR["distractors"]), name, v["question"],
                 v["keyword"], name))


if __name__ == "__main__":
    main()
