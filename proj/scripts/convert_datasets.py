#!/usr/bin/env python3
"""Convert raw KEEL .dat / Orange .tab files into the bundled CSV + schema layout.

Usage: convert_datasets.py <raw_dir> <out_dir>

The raw directory must contain the files listed in DATASETS below. KEEL files
may or may not carry their '@' header block; it is skipped either way.
"""
import csv
import os
import sys

N, C = "numeric", "categorical"

DATASETS = {
    "australian": ("australian.dat", [
        ("A1", C), ("A2", N), ("A3", N), ("A4", C), ("A5", C), ("A6", C), ("A7", N),
        ("A8", C), ("A9", C), ("A10", N), ("A11", C), ("A12", C), ("A13", N), ("A14", N)]),
    "cmc": ("contraceptive.dat", [
        ("wife_age", N), ("wife_education", C), ("husband_education", C), ("children", N),
        ("wife_religion", C), ("wife_working", C), ("husband_occupation", C),
        ("living_standard", C), ("media_exposure", C)]),
    "japanese_credit": ("crx.dat", [
        ("A1", C), ("A2", N), ("A3", N), ("A4", C), ("A5", C), ("A6", C), ("A7", C),
        ("A8", N), ("A9", C), ("A10", C), ("A11", N), ("A12", C), ("A13", C), ("A14", N),
        ("A15", N)]),
    "german": ("german.dat", [
        ("status", C), ("duration", N), ("history", C), ("purpose", C), ("amount", N),
        ("savings", C), ("employment", C), ("installment_rate", N), ("personal", C),
        ("debtors", C), ("residence", N), ("property", C), ("age", N), ("plans", C),
        ("housing", C), ("existing_credits", N), ("job", C), ("liable", N),
        ("telephone", C), ("foreign", C)]),
    "heart": ("heart.dat", [
        ("age", N), ("sex", C), ("chest_pain", C), ("rest_bp", N), ("cholesterol", N),
        ("fasting_sugar", C), ("rest_ecg", C), ("max_hr", N), ("angina", C),
        ("oldpeak", N), ("slope", N), ("vessels", N), ("thal", C)]),
    "molecular_biology": ("splice.dat", [("p%02d" % i, C) for i in range(1, 61)]),
    "tae": ("tae.dat", [
        ("native_speaker", C), ("instructor", C), ("course", C), ("semester", C),
        ("class_size", N)]),
    "tic_tac_toe": ("tic-tac-toe.dat", [
        (name, C) for name in ["tl", "tm", "tr", "ml", "mm", "mr", "bl", "bm", "br"]]),
}


def read_keel(path):
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("@"):
                continue
            rows.append([cell.strip() for cell in line.split(",")])
    return rows


def read_zoo(path):
    with open(path) as fh:
        lines = [l.rstrip("\n").split("\t") for l in fh]
    header, body = lines[0], lines[3:]
    keep = [i for i, h in enumerate(header) if h != "name"]
    return [[row[i] for i in keep] for row in body if len(row) == len(header)]


def write(out_dir, name, columns, rows):
    header = [c for c, _ in columns] + ["class"]
    for r in rows:
        if len(r) != len(header):
            raise SystemExit(f"{name}: row arity {len(r)} != {len(header)}")
    with open(os.path.join(out_dir, name + ".csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    with open(os.path.join(out_dir, name + ".schema"), "w") as fh:
        for col, kind in columns:
            fh.write(f"column {col} {kind}\n")
        fh.write("class class\n")
    print(f"{name}: {len(rows)} rows")


def main():
    raw, out = sys.argv[1], sys.argv[2]
    os.makedirs(out, exist_ok=True)
    for name, (fname, columns) in DATASETS.items():
        write(out, name, columns, read_keel(os.path.join(raw, fname)))
    zoo_cols = [(c, C) for c in ["hair", "feathers", "eggs", "milk", "airborne", "aquatic",
                                 "predator", "toothed", "backbone", "breathes", "venomous",
                                 "fins"]]
    zoo_cols += [("legs", N), ("tail", C), ("domestic", C), ("catsize", C)]
    write(out, "zoo", zoo_cols, read_zoo(os.path.join(raw, "zoo.tab")))


if __name__ == "__main__":
    main()
