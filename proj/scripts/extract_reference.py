#!/usr/bin/env python3
"""Extract published benchmark result tables from a LaTeX/markdown source
into a long-format CSV (table,dataset,theta,method,value) used by the
`reproduce` subcommand as its comparison corpus.

Usage: extract_reference.py <source.md> <out.csv>
"""
import re
import sys

ENC = ["numeric-only", "catboost", "onehot", "loo", "label", "target", "jamesstein",
       "helmert", "sum"]
TABLES = {
    "table_encoded_iol": ("cba", "iol", ENC),
    "table_encoded_iol_hyperbox": ("boxes", "iol", ENC),
    "table_encoded_onln": ("cba", "onln", ENC),
    "table_encoded_onln_hyperbox": ("boxes", "onln", ENC),
    "table_encoded_agglo2": ("cba", "agglo2", ENC),
    "table_encoded_agglo2_hyperbox": ("boxes", "agglo2", ENC),
    "table_combination_gfmm_dt": ("cba", "hybrid",
                                  ["A/iol", "A/onln", "A/agglo2", "B/iol", "B/onln", "B/agglo2"]),
    "table_mix_gfmm": ("cba", "mixed",
                       ["m1/eta=0.1", "m1/eta=0.7", "m1/eta=1", "m2/beta=0.25", "m2/beta=0.5",
                        "m2/beta=0.75"]),
    "table_gfmm_mix_hyperbox": ("boxes", "mixed",
                                ["m1/eta=0.1", "m1/eta=0.7", "m1/eta=1", "m2/beta=0.25",
                                 "m2/beta=0.5", "m2/beta=0.75"]),
}


def clean(cell):
    cell = re.sub(r"\\textbf\{([^}]*)\}", r"\1", cell)
    cell = re.sub(r"\\multirow\{\d+\}\{\*\}\{([^}]*)\}", r"\1", cell)
    cell = re.sub(r"\(\d+\)", "", cell)
    return cell.strip()


def main():
    src, out = sys.argv[1], sys.argv[2]
    text = open(src).read()
    rows = []
    for label, (measure, family, methods) in TABLES.items():
        start = text.index(r"\label{" + label + "}")
        body = text[start:text.index(r"\end{tabular}", start)]
        dataset = None
        for line in body.splitlines():
            if "&" not in line or not line.rstrip().endswith(("\\hline", "}", "\\\\")):
                continue
            line = re.sub(r"\\shortstack\[l\]\{([^\\]*?)\s*\\\\\s*\(\d+\)\}", r"\1", line)
            cells = [clean(c) for c in line.split("\\\\")[0].split("&")]
            if len(cells) != len(methods) + 2:
                continue
            try:
                theta = float(cells[1])
            except ValueError:
                continue
            if cells[0]:
                dataset = cells[0].replace(" ", "_")
            for method, value in zip(methods, cells[2:]):
                if value in ("-", ""):
                    continue
                rows.append((measure, family, dataset, cells[1], method, value))
    with open(out, "w") as fh:
        fh.write("measure,family,dataset,theta,method,value\n")
        for r in rows:
            fh.write(",".join(r) + "\n")
    print(f"{len(rows)} reference values")


if __name__ == "__main__":
    main()
