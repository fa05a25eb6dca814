"""Independent token-count oracle for the bundled review fixture comments.

Reimplements the normalization rules with Python's unicodedata instead of ICU:
Arabic yeh/alef maksura -> Persian yeh, Arabic kaf -> Persian kaf, ZWNJ -> space,
harakat/superscript alef/tatweel dropped; punctuation (P*), decimal digits (Nd),
ASCII letters and control characters become spaces; whitespace runs split tokens.
No stopwords are removed.

Usage: python3 review_tokens.py tests/data/review_comments.tsv > tests/data/review_tokens_expected.tsv
"""
import sys
import unicodedata

FOLD = {"ي": "ی", "ى": "ی", "ك": "ک", "‌": " "}


def dropped(ch):
    cp = ord(ch)
    return 0x064B <= cp <= 0x065F or cp in (0x0670, 0x0640)


def to_space(ch):
    cat = unicodedata.category(ch)
    return cat.startswith("P") or cat == "Nd" or cat == "Cc" or ("a" <= ch.lower() <= "z" and ch.isascii())


def normalize(text):
    out = []
    for ch in text:
        ch = FOLD.get(ch, ch)
        if dropped(ch):
            continue
        out.append(" " if to_space(ch) else ch)
    return " ".join("".join(out).split())


def main(path):
    with open(path, encoding="utf-8") as f:
        rows = [line.rstrip("\n").split("\t", 1) for line in f][1:]
    print("category\ttokens\tnormalized")
    for category, text in rows:
        norm = normalize(text)
        print(f"{category}\t{len(norm.split())}\t{norm}")


if __name__ == "__main__":
    main(sys.argv[1])
