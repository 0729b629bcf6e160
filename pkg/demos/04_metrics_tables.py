"""
Evaluation tables
=================

Per-class, weighted, micro and macro scores for both subtasks.
"""

from deftkit.metrics import CLASS_NAMES, parse_rendered, render_report, score_classification, score_tokens

# a tiny hand example: three definitions, one non-definition
r = score_classification([1, 1, 1, 0], [1, 1, 0, 1])
print(render_report(r, CLASS_NAMES))
print("macro F1 exactly", r.macro_f1)

# token level: O is excluded from the overall numbers by default
gold = [["B-Term", "O", "B-Definition", "I-Definition"], ["O", "B-Term"]]
pred = [["B-Term", "O", "B-Definition", "O"], ["O", "O"]]
tok = score_tokens(gold, pred)
table = render_report(tok)
print(table)

# the printed table can be read back, and full precision is available as lines
print(parse_rendered(table)["micro"])
print(tok.to_lines().splitlines()[:3])
