"""Convert Match Charting Project point files into the normalized points CSV.

    python scripts/mcp_adapter.py charting-m-points-2020s.csv > points.csv

Best effort, outside the tested core.  Assumptions:

* ``match_id`` looks like ``date-gender-event-round-Player_One-Player_Two`` and
  ``Svr`` (1 or 2) picks the server from the last two fields.
* Lets are not separate serve attempts.  A let is replayed, so only the
  ``1stIn``/``2ndIn`` flags of the completed serve count.
* ``rallyCount`` conventions differ across charters on error-ending rallies, so
  the rally length is forced to the parity implied by ``isSvrWinner``:
  server-won rallies are odd, lost rallies even.  Aces and unreturned serves
  become length 1.
* Rows with blank ``1stIn`` (unfinished or uncharted points) are skipped and
  counted on stderr.
"""

import argparse
import csv
import sys

OUT_COLUMNS = ("match_id", "server_id", "serve_number", "serve_in", "rally_length", "server_won")


def _flag(v):
    v = (v or "").strip().lower()
    if v in ("1", "true", "t"):
        return True
    if v in ("0", "false", "f"):
        return False
    return None


def _server(match_id, svr):
    parts = match_id.split("-")
    if len(parts) < 6 or svr not in ("1", "2"):
        return None
    return parts[-2] if svr == "1" else parts[-1]


def _length(won, rally, one_shot):
    if one_shot and won:
        return 1
    try:
        n = max(int(float(rally)), 1)
    except ValueError:
        n = 1 if won else 2
    if won != (n % 2 == 1):
        n += 1
    return n


def convert(rows):
    skipped = 0
    for r in rows:
        server = _server(r.get("match_id", ""), (r.get("Svr") or "").strip())
        first_in = _flag(r.get("1stIn"))
        won = _flag(r.get("isSvrWinner"))
        if server is None or first_in is None or won is None:
            skipped += 1
            continue
        one_shot = bool(_flag(r.get("isAce")) or _flag(r.get("isUnret")))
        mid = r["match_id"]
        if first_in:
            yield (mid, server, "First", True, _length(won, r.get("rallyCount"), one_shot), won)
            continue
        yield (mid, server, "First", False, 0, False)
        second_in = _flag(r.get("2ndIn"))
        if second_in is None:
            second_in = not _flag(r.get("isDouble"))
        if second_in:
            yield (mid, server, "Second", True, _length(won, r.get("rallyCount"), one_shot), won)
        else:
            yield (mid, server, "Second", False, 0, False)
    if skipped:
        print(f"skipped {skipped} rows without serve outcome", file=sys.stderr)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("points", help="MCP charting points CSV")
    ap.add_argument("--out", help="output CSV (default: stdout)")
    args = ap.parse_args(argv)
    with open(args.points, newline="", encoding="utf-8", errors="replace") as fh:
        records = list(convert(csv.DictReader(fh)))
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(out, lineterminator="\n")
    w.writerow(OUT_COLUMNS)
    for rec in records:
        w.writerow([str(v).lower() if isinstance(v, bool) else v for v in rec])
    if args.out:
        out.close()


if __name__ == "__main__":
    main()
