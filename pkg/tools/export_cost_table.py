"""Export the radix cost table to a CSV for golden regression approval."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parents[1]
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

from src.core.parametrization import cost_table


def main() -> int:
    parser = argparse.ArgumentParser(description="Export predicted vs measured radix costs to CSV.")
    parser.add_argument("--radixes", default="2-16", help="Radix range lo-hi or comma list (default: 2-16)")
    parser.add_argument("--exponents", default="1-5", help="Exponent range lo-hi or comma list (default: 1-5)")
    parser.add_argument(
        "--out",
        default=None,
        help="Output CSV path (default: golden/cost_table_r<radixes>_k<exponents>.csv)",
    )
    args = parser.parse_args()

    radixes = _parse_range(args.radixes)
    exponents = _parse_range(args.exponents)
    table = cost_table(radixes, exponents)

    out_path = (
        Path(args.out)
        if args.out
        else Path("golden") / f"cost_table_r{args.radixes}_k{args.exponents}.csv"
    )
    out_path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(out_path, index=False)

    mismatches = int((~table["matches"]).sum())
    print(f"Exported {len(table)} rows to {out_path}")
    print(f"Rows where formula and scan disagree: {mismatches}")
    return 0 if mismatches == 0 else 1


def _parse_range(text: str) -> list[int]:
    if "-" in text:
        low, high = (int(part) for part in text.split("-", 1))
        return list(range(low, high + 1))
    return [int(part) for part in text.split(",") if part.strip()]


if __name__ == "__main__":
    raise SystemExit(main())
