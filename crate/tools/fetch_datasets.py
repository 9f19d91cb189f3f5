#!/usr/bin/env python3
"""Download the UCI datasets used by the test fixtures.

Each dataset is rewritten as a canonical CSV — named feature columns first,
label column last, one header row — matching fixtures/manifest.json. Files
already present in fixtures/ are kept unless --force is given.

iris.csv and wine.csv ship with the repository; the other six need this
script (and network access to archive.ics.uci.edu) before the full
acceptance suite can pass.
"""

import argparse
import csv
import io
import statistics
import sys
import urllib.request
from pathlib import Path

BASE = "https://archive.ics.uci.edu/ml/machine-learning-databases"

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

EXPECTED_ROWS = {
    "iris.csv": 150,
    "wine.csv": 178,
    "ionosphere.csv": 351,
    "banknote.csv": 1372,
    "haberman.csv": 306,
    "breast_cancer_wisconsin.csv": 699,
    "statlog_heart.csv": 270,
    "seeds.csv": 210,
}


def fetch(url: str) -> list[list[str]]:
    print(f"  fetching {url}")
    with urllib.request.urlopen(url, timeout=60) as response:
        text = response.read().decode("utf-8")
    rows = []
    for line in io.StringIO(text):
        line = line.strip()
        if line:
            # UCI files are comma- or whitespace-separated; some use
            # irregular runs of tabs, so fall back to a generic split.
            rows.append(line.split(",") if "," in line else line.split())
    return rows


def iris(rows):
    header = ["sepal_length", "sepal_width", "petal_length", "petal_width", "species"]
    return header, [r[:4] + [r[4].removeprefix("Iris-")] for r in rows]


def wine(rows):
    header = [
        "alcohol", "malic_acid", "ash", "alcalinity_of_ash", "magnesium",
        "total_phenols", "flavanoids", "nonflavanoid_phenols",
        "proanthocyanins", "color_intensity", "hue", "od280_od315",
        "proline", "cultivar",
    ]
    # The source puts the cultivar first; move it behind the features.
    return header, [r[1:] + [r[0]] for r in rows]


def ionosphere(rows):
    header = [f"pulse_{j}" for j in range(34)] + ["class"]
    return header, rows


def banknote(rows):
    header = ["variance", "skewness", "curtosis", "entropy", "class"]
    return header, rows


def haberman(rows):
    header = ["age", "operation_year", "positive_nodes", "survival"]
    return header, rows


def breast_cancer(rows):
    header = [
        "clump_thickness", "uniformity_cell_size", "uniformity_cell_shape",
        "marginal_adhesion", "single_epithelial_cell_size", "bare_nuclei",
        "bland_chromatin", "normal_nucleoli", "mitoses", "class",
    ]
    # Drop the sample id; impute the missing bare-nuclei values ('?') with
    # the column median so all 699 rows stay usable.
    rows = [r[1:] for r in rows]
    observed = [int(r[5]) for r in rows if r[5] != "?"]
    fill = str(int(statistics.median(observed)))
    for r in rows:
        if r[5] == "?":
            r[5] = fill
    return header, rows


def statlog_heart(rows):
    header = [
        "age", "sex", "chest_pain", "resting_bp", "cholesterol",
        "fasting_blood_sugar", "resting_ecg", "max_heart_rate",
        "exercise_angina", "oldpeak", "slope", "major_vessels", "thal",
        "class",
    ]
    return header, rows


def seeds(rows):
    header = [
        "area", "perimeter", "compactness", "kernel_length", "kernel_width",
        "asymmetry", "groove_length", "variety",
    ]
    return header, rows


DATASETS = [
    ("iris.csv", f"{BASE}/iris/iris.data", iris),
    ("wine.csv", f"{BASE}/wine/wine.data", wine),
    ("ionosphere.csv", f"{BASE}/ionosphere/ionosphere.data", ionosphere),
    ("banknote.csv", f"{BASE}/00267/data_banknote_authentication.txt", banknote),
    ("haberman.csv", f"{BASE}/haberman/haberman.data", haberman),
    (
        "breast_cancer_wisconsin.csv",
        f"{BASE}/breast-cancer-wisconsin/breast-cancer-wisconsin.data",
        breast_cancer,
    ),
    ("statlog_heart.csv", f"{BASE}/statlog/heart/heart.dat", statlog_heart),
    ("seeds.csv", f"{BASE}/00236/seeds_dataset.txt", seeds),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--force", action="store_true", help="redownload existing files")
    parser.add_argument(
        "--only", metavar="NAME", help="fetch a single fixture (e.g. haberman.csv)"
    )
    args = parser.parse_args()

    FIXTURES.mkdir(exist_ok=True)
    failures = []
    for name, url, shape in DATASETS:
        if args.only and name != args.only:
            continue
        target = FIXTURES / name
        if target.exists() and not args.force:
            print(f"{name}: already present, skipping")
            continue
        print(f"{name}:")
        try:
            header, rows = shape(fetch(url))
        except Exception as error:  # noqa: BLE001 - report and keep going
            print(f"  FAILED: {error}", file=sys.stderr)
            failures.append(name)
            continue
        if len(rows) != EXPECTED_ROWS[name]:
            print(
                f"  FAILED: expected {EXPECTED_ROWS[name]} rows, got {len(rows)}",
                file=sys.stderr,
            )
            failures.append(name)
            continue
        short = [r for r in rows if len(r) != len(header)]
        if short:
            print(f"  FAILED: {len(short)} rows with wrong column count", file=sys.stderr)
            failures.append(name)
            continue
        with target.open("w", newline="") as out:
            writer = csv.writer(out)
            writer.writerow(header)
            writer.writerows(rows)
        print(f"  wrote {target} ({len(rows)} rows)")

    if failures:
        print(f"\nfailed: {', '.join(failures)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
