#!/usr/bin/env python3
"""Writes two_model_log.csv: a two-model log whose per-model aggregates are
pass rate 567/8135 (6.97%) at 0.006613 J/trial and 559/8135 (6.87%) at
0.114543 J/trial, 16,270 trials in total."""
import random
from pathlib import Path

PER_MODEL = 8135
MODELS = [
    ("OpenAI", "gpt-4o-mini", 567, 0.006613, 0.000019),
    ("DeepSeek", "deepseek-chat", 559, 0.114543, 0.000088),
]
BENCHMARKS = ["humaneval", "mbpp", "gsm8k", "mmlu"]

rng = random.Random(7)
rows = []
for provider, model, passes, energy, cost in MODELS:
    outcomes = [True] * passes + [False] * (PER_MODEL - passes)
    rng.shuffle(outcomes)
    for i, passed in enumerate(outcomes):
        rows.append((provider, model, BENCHMARKS[i % len(BENCHMARKS)], passed, energy, cost))
rng.shuffle(rows)

out = Path(__file__).with_name("two_model_log.csv")
with out.open("w") as f:
    f.write("provider,model,benchmark,compression_ratio,input_tokens,output_tokens,passed,cost_usd,run_index,energy_j\n")
    for run_index, (provider, model, bench, passed, energy, cost) in enumerate(rows):
        f.write(f"{provider},{model},{bench},1,180,20,{'true' if passed else 'false'},{cost},{run_index},{energy}\n")
