"""Text-generation metrics: ROUGE-1, ROUGE-L, BLEU-4, and METEOR.

All four share one tokenizer so scores are comparable: lowercase, split on
whitespace, punctuation split off as separate tokens, ``<|...|>`` tags kept
atomic. Scores are directional (candidate vs reference) and live in [0, 1].
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass

from .stemming import porter_stem

_TOKEN_RE = re.compile(r"<\|[a-z0-9_]+\|>|\w+|[^\w\s]")

BLEU_EPSILON = 1e-9
BLEU_MAX_ORDER = 4


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class MetricScore:
    rouge1_f1: float
    rougeL_f1: float
    bleu: float
    meteor: float


@dataclass(frozen=True)
class BleuBreakdown:
    score: float
    precisions: tuple[float, ...]
    brevity_penalty: float
    smoothed: bool


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def rouge1(candidate: str, reference: str) -> float:
    """F1 over the clipped unigram multiset overlap."""
    cand, ref = tokenize(candidate), tokenize(reference)
    if not cand or not ref:
        return 0.0
    overlap = sum((Counter(cand) & Counter(ref)).values())
    return _f1(overlap / len(cand), overlap / len(ref))


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0]
        for j, y in enumerate(b, start=1):
            curr.append(prev[j - 1] + 1 if x == y else max(prev[j], curr[j - 1]))
        prev = curr
    return prev[-1]


def rougeL(candidate: str, reference: str) -> float:
    """F1 from the longest common subsequence of the token sequences."""
    cand, ref = tokenize(candidate), tokenize(reference)
    if not cand or not ref:
        return 0.0
    lcs = _lcs_length(cand, ref)
    return _f1(lcs / len(cand), lcs / len(ref))


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu_breakdown(candidate: str, references) -> BleuBreakdown:
    """BLEU-4 with per-order precisions exposed.

    Zero precisions contribute log(epsilon) to the geometric mean instead of
    zeroing the whole score; ``smoothed`` records whether that happened.
    """
    if isinstance(references, str):
        references = [references]
    if not references:
        raise ValueError("bleu requires at least one reference")
    cand = tokenize(candidate)
    refs = [tokenize(r) for r in references]
    if not cand or not any(refs):
        return BleuBreakdown(0.0, (0.0,) * BLEU_MAX_ORDER, 0.0, False)

    ref_len = min((len(r) for r in refs), key=lambda n: (abs(n - len(cand)), n))
    bp = 1.0 if len(cand) > ref_len else math.exp(1 - ref_len / max(len(cand), 1))

    precisions = []
    smoothed = False
    log_sum = 0.0
    for n in range(1, BLEU_MAX_ORDER + 1):
        cand_counts = _ngram_counts(cand, n)
        total = sum(cand_counts.values())
        max_ref_counts: Counter = Counter()
        for r in refs:
            for gram, count in _ngram_counts(r, n).items():
                max_ref_counts[gram] = max(max_ref_counts[gram], count)
        matched = sum(min(count, max_ref_counts[gram]) for gram, count in cand_counts.items())
        precision = matched / total if total else 0.0
        precisions.append(precision)
        if precision > 0:
            log_sum += math.log(precision)
        else:
            smoothed = True
            log_sum += math.log(BLEU_EPSILON)

    score = bp * math.exp(log_sum / BLEU_MAX_ORDER)
    return BleuBreakdown(score, tuple(precisions), bp, smoothed)


def bleu(candidate: str, references) -> float:
    return bleu_breakdown(candidate, references).score


def _greedy_align(cand: list[str], ref: list[str]) -> list[tuple[int, int]]:
    """Match unigrams in two stages (exact, then stemmed), each token at
    most once, candidate order preserved, earliest free reference position."""
    matches: list[tuple[int, int]] = []
    used_ref = [False] * len(ref)
    matched_cand = [False] * len(cand)

    def run_stage(cand_keys: list[str], ref_keys: list[str]) -> None:
        for i, key in enumerate(cand_keys):
            if matched_cand[i]:
                continue
            for j, ref_key in enumerate(ref_keys):
                if not used_ref[j] and key == ref_key:
                    matches.append((i, j))
                    used_ref[j] = True
                    matched_cand[i] = True
                    break

    run_stage(cand, ref)
    run_stage([porter_stem(t) for t in cand], [porter_stem(t) for t in ref])
    matches.sort()
    return matches


def _chunk_count(matches: list[tuple[int, int]]) -> int:
    chunks = 0
    prev = None
    for ci, ri in matches:
        if prev is None or ci != prev[0] + 1 or ri != prev[1] + 1:
            chunks += 1
        prev = (ci, ri)
    return chunks


def meteor(candidate: str, reference: str) -> float:
    """Unigram matching in exact + stem stages, recall-weighted harmonic
    mean F = 10PR/(R+9P), fragmentation penalty 0.5*(chunks/matches)^3."""
    cand, ref = tokenize(candidate), tokenize(reference)
    if not cand or not ref:
        return 0.0
    matches = _greedy_align(cand, ref)
    m = len(matches)
    if m == 0:
        return 0.0
    precision, recall = m / len(cand), m / len(ref)
    f_mean = 10 * precision * recall / (recall + 9 * precision)
    penalty = 0.5 * (_chunk_count(matches) / m) ** 3
    return f_mean * (1 - penalty)


def score_pair(candidate: str, reference: str) -> MetricScore:
    return MetricScore(
        rouge1_f1=rouge1(candidate, reference),
        rougeL_f1=rougeL(candidate, reference),
        bleu=bleu(candidate, reference),
        meteor=meteor(candidate, reference),
    )
