"""CLI invocations pinned by golden files: name → (argv, expected exit status)."""
from pathlib import Path

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


def d(name):
    return str(DATA / name)


CASES = {
    "rank_tri": (["rank", "-i", d("tri.json")], 0),
    "rank_rel": (["rank", "-i", d("star3.json"), "--sub", "x", "--over", "a,b,d"], 0),
    "rank_reweighted": (["rank", "-i", d("tri.json"), "--alpha", "E=1/3"], 0),
    "strong_false": (["strong", "-i", d("star3.json"), "--sub", "a,b,d"], 1),
    "strong_true": (["strong", "-i", d("star3.json"), "--sub", "a,x"], 0),
    "icl": (["icl", "-i", d("star3.json"), "--sub", "a,b,d"], 0),
    "d": (["d", "-i", d("star3.json"), "--sub", "a,b,d"], 0),
    "d_rel": (["d", "-i", d("star3.json"), "--sub", "x", "--over", "a"], 0),
    "dim": (["dim", "-i", d("star3.json")], 0),
    "minpair_check": (["minpair", "check", "-i", d("star3.json"), "--base", "a,b,d",
                       "--body", "a,b,d,x", "--essential"], 0),
    "minpair_check_false": (["minpair", "check", "-i", d("edge.json"), "--base", "a",
                             "--body", "a,b"], 1),
    "minpair_synth": (["minpair", "synth", "-i", d("three_points.json")], 0),
    "nugget": (["nugget", "-i", d("point_b.json")], 0),
    "cap": (["cap", "-i", d("empty.json"), "--dim", "1"], 0),
    "raise": (["raise", "-i", d("point_b.json")], 0),
    "amalgam": (["amalgam", "--a", d("empty.json"), "--b", d("point_b.json"),
                 "--c", d("pair_c.json")], 0),
    "nonorth": (["nonorth", "--a", d("empty.json"), "--ab", d("raise_b.json"),
                 "--ac", d("raise_c.json")], 0),
    "preweight": (["preweight", "--a", d("empty.json"), "--ab", d("point_b.json")], 0),
    "generic_fixed": (["generic", "--alpha", "E=1/2", "--mode", "fixed", "--dim", "1", "--rounds", "5",
                       "--max-ext", "3", "--seed", "7"], 0),
    "generic_full": (["generic", "--alpha", "E=1/2", "--mode", "full", "--rounds", "10",
                      "--max-ext", "2"], 0),
    "audit_ext": (["audit-ext", "-i", d("empty.json"), "--max-ext", "1"], 1),
    "bnf_mismatch": (["bnf", "--left", d("tri.json"), "--right", d("star3.json")], 1),
    "bnf_self": (["bnf", "--left", d("star3.json"), "--right", d("star3.json")], 0),
    "verify": (["verify", "--cases", "25", "--seed", "4"], 0),
    "export_json": (["export", "-i", d("star3.json")], 0),
    "export_dot": (["export", "-i", d("star3.json"), "--format", "dot"], 0),
}
