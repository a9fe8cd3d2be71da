"""Rank the published summary statistics directly (no chains needed).

    python scripts/rank_reported.py
"""

from cerate.export import rank_text
from cerate.ranking import rank
from cerate.surface import RateSummary

BEST_WORST = {
    "Apple": (0.8644, 0.1181, 0.4437),
    "Nvidia": (4.0908, 0.3308, 1.8897),
    "Meta": (2.6418, 0.2238, 1.2135),
    "First Republic Bank": (-0.8600, -0.9998, -0.9731),
    "Signature Bank": (-0.0166, -0.4008, -0.1601),
    "Charles Schwab": (-0.0481, -0.4523, -0.2625),
}
EV = {
    "Tesla": (2.1970, 0.1994, 1.0320),
    "General Motors": (0.0927, 0.0395, 0.0708),
    "Ford Motor Company": (0.4549, 0.0615, 0.2626),
}

if __name__ == "__main__":
    for title, table in [("best/worst performers", BEST_WORST), ("electric vehicles", EV)]:
        for policy in ("mean", "min", "max"):
            print(f"# {title}, policy={policy}")
            print(rank_text(rank(((t, RateSummary(*v)) for t, v in table.items()), policy)))
