"""Builds data/fixture_vectors_fa.txt (args: comments.tsv out.txt): 100 Persian tokens with seeded 50-d vectors.

The tokens are the distinct normalized tokens of the review fixture comments
(first come, first kept) topped up with common review words. Re-running with the
same seed reproduces the file byte for byte.
"""
import random
import sys

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from review_tokens import normalize  # noqa: E402

EXTRA = ("عالی خوب بد خراب ضعیف ممتاز زیبا گران ارزان راضی ناراضی کیفیت ارسال رنگ باتری صفحه "
         "دوربین صدا سریع کند محکم سبک سنگین مناسب پیشنهاد توصیه خرید مرجوع اصل تقلبی بسته بندی "
         "پشتیبانی گارانتی شارژ نمایشگر دوام قشنگ افتضاح متوسط").split()


def main(comments_path, out_path, seed=20240601):
    tokens = []
    with open(comments_path, encoding="utf-8") as f:
        for line in list(f)[1:]:
            for tok in normalize(line.rstrip("\n").split("\t", 1)[1]).split():
                if tok not in tokens:
                    tokens.append(tok)
    for tok in EXTRA:
        if tok not in tokens:
            tokens.append(tok)
    tokens = tokens[:100]
    assert len(tokens) == 100, len(tokens)
    rng = random.Random(seed)
    with open(out_path, "w", encoding="utf-8") as out:
        for tok in tokens:
            out.write(tok + " " + " ".join(f"{rng.gauss(0.0, 0.4):.5f}" for _ in range(50)) + "\n")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
