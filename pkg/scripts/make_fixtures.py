"""Regenerate the worked fixtures under fixtures/.

fixtures/synth: one ticker priced at a flat 3% rate (q = 2%).
fixtures/ev:    three tickers whose rates fall with maturity from the
                reported maximum to the reported minimum, with the reported
                mean, and are flat across strikes.  Spot and dividend yield
                are illustrative placeholders, not market data.

    python scripts/make_fixtures.py [--root fixtures]
"""

import argparse
import json
from datetime import date
from pathlib import Path

from cerate.synthetic import default_expiries, default_strikes, parity_quotes, term_structure, write_fixture

START = date(2023, 1, 3)

# ticker: (spot, dividend yield, reported max, min, mean)
EV = {
    "TSLA": (108.10, 0.0, 2.1970, 0.1994, 1.0320),
    "GM": (34.00, 0.0106, 0.0927, 0.0395, 0.0708),
    "F": (11.70, 0.0513, 0.4549, 0.0615, 0.2626),
}


def write_manifest(directory: Path, tickers):
    manifest = {
        "jobs": [{"chain": f"{t}_chain.csv", "meta": f"{t}.meta"} for t in tickers],
        "out": "results",
    }
    path = directory / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--root", type=Path, default=Path(__file__).resolve().parents[1] / "fixtures")
    args = parser.parse_args()

    synth = args.root / "synth"
    expiries = default_expiries(START, 20)
    quotes = parity_quotes(100.0, 0.02, START, expiries, default_strikes(100.0, 20), 0.03, half_spread=0.05)
    write_fixture(synth, "SYNTH", 100.0, 0.02, START, quotes)
    print("wrote", write_manifest(synth, ["SYNTH"]))

    ev = args.root / "ev"
    for ticker, (spot, q, hi, lo, mean) in EV.items():
        rates = term_structure(hi, lo, mean, len(expiries))
        quotes = parity_quotes(spot, q, START, expiries, default_strikes(spot, 15), rates, half_spread=0.01)
        write_fixture(ev, ticker, spot, q, START, quotes)
    print("wrote", write_manifest(ev, list(EV)))


if __name__ == "__main__":
    main()
