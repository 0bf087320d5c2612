#!/usr/bin/env python3
"""Assemble data/adult.csv from the UCI adult.data and adult.test files.

The two UCI files are concatenated (48'842 records), the spaces after the
delimiters are dropped and the trailing '.' on test-set income labels is
removed so both halves share one label vocabulary. '?' is kept verbatim; the
loader treats it as missing.

Usage:
  make_adult.py --data adult.data --test adult.test -o data/adult.csv
  make_adult.py --wheel responsibly-0.1.2-py3-none-any.whl -o data/adult.csv
"""
import argparse
import zipfile

HEADER = [
    "age", "workclass", "fnlwgt", "education", "education-num",
    "marital-status", "occupation", "relationship", "race", "sex",
    "capital-gain", "capital-loss", "hours-per-week", "native-country",
    "income",
]


def records(lines):
    for line in lines:
        line = line.strip()
        if not line or line.startswith("|"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != len(HEADER):
            raise ValueError(f"unexpected field count: {line!r}")
        fields[-1] = fields[-1].rstrip(".")
        yield fields


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--data")
    ap.add_argument("--test")
    ap.add_argument("--wheel")
    ap.add_argument("-o", "--output", required=True)
    args = ap.parse_args()

    if args.wheel:
        with zipfile.ZipFile(args.wheel) as z:
            parts = [z.read(f"responsibly/dataset/adult/adult.{s}").decode()
                     for s in ("data", "test")]
    else:
        parts = [open(p).read() for p in (args.data, args.test)]

    n = 0
    with open(args.output, "w", newline="") as out:
        out.write(",".join(HEADER) + "\n")
        for part in parts:
            for rec in records(part.splitlines()):
                out.write(",".join(rec) + "\n")
                n += 1
    print(f"wrote {n} records to {args.output}")


if __name__ == "__main__":
    main()
