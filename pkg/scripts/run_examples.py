"""Full analysis of every network in networks/, printed and optionally saved as JSON."""

import argparse
from pathlib import Path

from crnx.parser import CrnSyntaxError, read_network
from crnx.report import analyze_network

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("paths", nargs="*", help="defaults to networks/*.crn")
    ap.add_argument("--out", type=Path, help="directory for JSON reports")
    args = ap.parse_args()
    paths = [Path(p) for p in args.paths] or sorted((ROOT / "networks").glob("*.crn"))
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
    for path in paths:
        print(f"== {path.name}")
        try:
            net = read_network(path)
        except CrnSyntaxError as exc:
            print(f"   parse error at {exc.line}:{exc.column}: {exc.message}\n")
            continue
        report = analyze_network(net)
        print(report.summary() + "\n")
        if args.out:
            (args.out / f"{path.stem}.json").write_text(report.to_json(indent=2) + "\n")


if __name__ == "__main__":
    main()
