"""Generate the bundled data fixtures and verify their guarantees.

Produces, under src/clinsearch/data/:
  icd_sample.tsv    ~830-node ICD-10-style ontology, 16 chapters
  chapters.csv      chapter code ranges and titles
  claims_sample.csv small synthetic claims table
  paraphrases.tsv   frozen robustness fixture

The ontology is built so that a known fraction of level-1 nodes share no
vocabulary with their parent (they are the flattening candidates and the
top-down misses), and so that on both the raw and the flattened form every
node wins or safely loses the (depth, code) tie-break against any other node
whose token set contains its own. Every guarantee the test suite relies on
is re-verified here before anything is written; the script fails loudly
instead of producing a fixture that merely looks right.

Run from the repository root:  python3 scripts/gen_fixtures.py
"""

from __future__ import annotations

import csv
import random
import sys
from pathlib import Path

from clinsearch.config import SimilarityConfig
from clinsearch.flatten import check_reachability, find_candidates, flatten_to_fixpoint
from clinsearch.hybrid import predict_hybrid
from clinsearch.ontology import Ontology, load_chapter_ranges, parse_ontology_text
from clinsearch.pipeline import load_claims
from clinsearch.predictor import predict_default
from clinsearch.bench import run_robustness, score_accuracy, make_query_set

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "clinsearch" / "data"

CHAPTERS = [
    (1, "A00", "B99", "Certain infectious and parasitic diseases", "A", 0, 99),
    (2, "C00", "D49", "Neoplasms", "C", 0, 99),
    (3, "D50", "D89", "Diseases of the blood and blood-forming organs", "D", 50, 89),
    (4, "E00", "E89", "Endocrine, nutritional and metabolic diseases", "E", 0, 89),
    (5, "F01", "F99", "Mental, behavioral and neurodevelopmental disorders", "F", 1, 99),
    (6, "G00", "G99", "Diseases of the nervous system", "G", 0, 99),
    (7, "H00", "H59", "Diseases of the eye and adnexa", "H", 0, 59),
    (8, "H60", "H95", "Diseases of the ear and mastoid process", "H", 60, 95),
    (9, "I00", "I99", "Diseases of the circulatory system", "I", 0, 99),
    (10, "J00", "J99", "Diseases of the respiratory system", "J", 0, 99),
    (11, "K00", "K95", "Diseases of the digestive system", "K", 0, 95),
    (12, "L00", "L99", "Diseases of the skin and subcutaneous tissue", "L", 0, 99),
    (13, "M00", "M99", "Diseases of the musculoskeletal system and connective tissue", "M", 0, 99),
    (14, "N00", "N99", "Diseases of the genitourinary system", "N", 0, 99),
    (15, "O00", "O9A", "Pregnancy, childbirth and the puerperium", "O", 0, 98),
    (16, "P00", "P96", "Certain conditions originating in the perinatal period", "P", 0, 96),
]

# One themed site list per chapter; no word repeats anywhere in the table,
# which is what keeps descriptions from different categories incomparable.
ORGANS = [
    ["intestine", "colon", "ileum", "jejunum", "peritoneum", "tonsil", "pharynx", "meninges"],
    ["tongue", "palate", "parotid", "nasopharynx", "mediastinum", "thymus", "cardia", "pylorus"],
    ["marrow", "spleen", "erythrocytes", "leukocytes", "platelets", "plasma", "lymphocytes", "neutrophils"],
    ["thyroid", "pituitary", "parathyroid", "adrenals", "pancreas", "hypothalamus", "gonads", "islets"],
    ["cognition", "mood", "memory", "attention", "perception", "affect", "impulse", "volition"],
    ["cerebellum", "brainstem", "cortex", "thalamus", "nerves", "ganglia", "myelin", "synapses"],
    ["cornea", "retina", "iris", "sclera", "conjunctiva", "macula", "eyelid", "orbit"],
    ["cochlea", "eardrum", "mastoid", "ossicles", "labyrinth", "eustachian", "pinna", "vestibule"],
    ["aorta", "ventricle", "atrium", "myocardium", "pericardium", "endocardium", "arterioles", "venules"],
    ["bronchus", "trachea", "larynx", "alveoli", "diaphragm", "bronchioles", "epiglottis", "sinuses"],
    ["esophagus", "stomach", "duodenum", "liver", "gallbladder", "appendix", "rectum", "cecum"],
    ["epidermis", "dermis", "follicles", "cuticle", "melanocytes", "keratin", "subcutis", "nailbed"],
    ["femur", "tibia", "humerus", "vertebrae", "cartilage", "tendons", "ligaments", "fascia"],
    ["kidney", "ureter", "bladder", "urethra", "glomeruli", "nephron", "prostate", "ovary"],
    ["placenta", "amnion", "cervix", "uterus", "chorion", "umbilicus", "fundus", "myometrium"],
    ["fontanelle", "meconium", "vernix", "lanugo", "foramen", "ductus", "surfactant", "philtrum"],
]

CONDITIONS = [
    "disorders", "stenosis", "degeneration", "malformation", "neoplasm",
    "insufficiency", "dysfunction", "atrophy", "hypertrophy", "calcification",
    "ulceration", "fibrosis", "edema", "ischemia", "necrosis", "dysplasia",
    "hyperplasia", "abscess", "lesion", "inflammation", "erosion", "sclerosis",
    "induration", "sepsis", "infection", "infestation",
]
QUALIFIERS = [
    "upper", "lower", "left", "right", "anterior", "posterior",
    "central", "peripheral", "proximal", "distal", "medial", "lateral",
]
MODIFIERS = [
    "acute", "chronic", "recurrent", "severe", "mild", "moderate",
    "progressive", "transient", "congenital", "acquired", "diffuse", "focal",
]
COMPLICATIONS = [
    "hemorrhage", "gangrene", "effusion", "granuloma", "thrombosis",
    "embolism", "crisis", "exacerbation", "suppuration", "fistula",
    "perforation", "ascites",
]
EPONYMS = [
    "barrett", "crohn", "meniere", "addison", "cushing", "hodgkin", "paget",
    "graves", "hashimoto", "wilson", "huntington", "bechterew", "behcet",
    "buerger", "berger", "brill", "castleman", "chagas", "charcot", "dressler",
    "dupuytren", "ebstein", "eisenmenger", "fabry", "fanconi", "felty",
    "gaucher", "gilbert", "goodpasture", "hirschsprung", "horner", "kawasaki",
    "kienbock", "klinefelter", "korsakoff", "krabbe", "lemierre", "lhermitte",
    "marfan", "meckel", "meigs", "menetrier", "morton", "mondor", "niemann",
    "noonan", "osgood", "osler", "peutz", "peyronie", "plummer", "pott",
    "prinzmetal", "raynaud", "reiter", "rett", "reye", "riedel", "rolando",
    "scheuermann", "schilder", "sever", "sheehan", "sjogren", "stargardt",
    "stokes", "sydenham", "takayasu", "tietze", "turcot", "usher", "vincent",
    "virchow", "wallenberg", "weber", "wegener", "weil", "wernicke", "whipple",
    "wolff", "zenker", "zollinger", "alport", "batten", "becker", "behr",
    "binswanger", "bloom", "boerhaave", "bowen", "brugada", "caplan", "conn",
    "cori", "cotard", "devic", "dubin", "eales", "erb", "ewing", "jeghers",
    "lindau", "hippel", "strauss", "churg", "weiss", "mallory",
]
NOUNS = ["syndrome", "anomaly", "phenomenon", "triad", "complex", "diathesis"]

STATES = [
    "Washington", "Oregon", "California", "Texas", "New York",
    "Florida", "Illinois", "Ohio", "Georgia", "Arizona",
]


def fail(message: str) -> None:
    sys.exit(f"FIXTURE GENERATION FAILED: {message}")


def build_ontology_rows() -> tuple[list[tuple[str, int, str]], list[str], list[str]]:
    """Build (code, depth, description) rows plus divergent and truncated lists."""
    rows: list[tuple[str, int, str]] = []
    divergent: list[str] = []
    truncated: list[str] = []
    eponym_iter = iter(EPONYMS)
    ci = 0
    for chapter_index, (_, _, _, _, letter, lo, hi) in enumerate(CHAPTERS):
        numbers = sorted({round(lo + i * (hi - lo) / 7) for i in range(8)})
        if len(numbers) != 8:
            fail(f"chapter {letter}: category codes collide")
        for li, num in enumerate(numbers):
            cat = f"{letter}{num:02d}"
            organ = ORGANS[chapter_index][li]
            qual = QUALIFIERS[ci % len(QUALIFIERS)]
            cond = CONDITIONS[ci % len(CONDITIONS)]
            cond2 = CONDITIONS[(ci + 7) % len(CONDITIONS)]
            if cond2 == cond:
                cond2 = CONDITIONS[(ci + 8) % len(CONDITIONS)]
            m0, m1, m2 = (
                MODIFIERS[ci % len(MODIFIERS)],
                MODIFIERS[(ci + 3) % len(MODIFIERS)],
                MODIFIERS[(ci + 6) % len(MODIFIERS)],
            )
            site = f"{qual} {organ}"
            two_part_root = ci % 3 == 0
            root_desc = (
                f"{cond} and {cond2} of {site}" if two_part_root else f"{cond} of {site}"
            )
            rows.append((cat, 0, root_desc))

            children: list[tuple[str, str]] = []
            if two_part_root:
                children.append((f"{cat}.0", f"{cond} of {site}"))
                truncated.append(f"{cat}.0")
            else:
                children.append((f"{cat}.0", f"{m0} {cond} of {site}"))
            children.append((f"{cat}.1", f"{m1} {cond} of {site}"))
            children.append((f"{cat}.2", f"{cond} of {site} unspecified"))
            is_divergent = ci % 4 != 1
            if is_divergent:
                eponym = next(eponym_iter)
                noun = NOUNS[ci % len(NOUNS)]
                if ci % 20 == 0:
                    desc = f"{eponym} {next(eponym_iter)} {noun}"
                else:
                    desc = f"{eponym} {noun}"
                children.append((f"{cat}.3", desc))
                divergent.append(f"{cat}.3")
            else:
                children.append((f"{cat}.3", f"{m2} {cond} of {site}"))

            grands: dict[str, list[str]] = {code: [] for code, _ in children}
            comp1 = COMPLICATIONS[ci % len(COMPLICATIONS)]
            comp2 = COMPLICATIONS[(ci + 5) % len(COMPLICATIONS)]
            comp3 = COMPLICATIONS[(ci + 9) % len(COMPLICATIONS)]
            if ci % 4 != 3:
                grands[f"{cat}.0"].append(f"{children[0][1]} with {comp1}")
            if ci % 2 == 0:
                grands[f"{cat}.1"].append(f"{children[1][1]} with {comp2}")
            if ci % 4 == 0 and is_divergent:
                grands[f"{cat}.3"].append(f"{children[3][1]} with {comp3}")

            for code, desc in children:
                rows.append((code, 1, desc))
                for gi, gdesc in enumerate(grands[code], start=1):
                    rows.append((f"{code}{gi}", 2, gdesc))
            ci += 1
    return rows, divergent, truncated


def write_ontology_tsv(rows: list[tuple[str, int, str]], path: Path) -> None:
    lines = ["# code\tdepth\tdescription"]
    lines.extend(f"{code}\t{depth}\t{desc}" for code, depth, desc in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def check_superset_invariant(o: Ontology, label: str) -> None:
    """No node may lose the (depth, code) tie-break to a non-ancestor whose
    tokens contain its own description tokens."""
    ancestors: dict[str, set[str]] = {}
    for node in o.walk():
        chain = set()
        parent = node.parent
        while parent is not None:
            chain.add(parent)
            parent = o.nodes[parent].parent
        ancestors[node.code] = chain
    violations = []
    nodes = list(o.walk())
    for n in nodes:
        n_tokens = n.tokens.tokens
        for m in nodes:
            if m.code == n.code or not n_tokens <= m.tokens.tokens:
                continue
            if m.code in ancestors[n.code]:
                continue
            if (m.depth, m.code) < (n.depth, n.code):
                violations.append((n.code, m.code))
    if violations:
        fail(f"{label}: tie-break violations {violations[:10]}")


def verify_ontology(text: str, cfg: SimilarityConfig, divergent: list[str]):
    o = parse_ontology_text(text, "icd-sample", cfg)
    o.validate()
    check_superset_invariant(o, "raw fixture")

    candidates = find_candidates(o, 1)
    if sorted(candidates) != sorted(divergent):
        extra = set(candidates) - set(divergent)
        missing = set(divergent) - set(candidates)
        fail(f"candidate mismatch: extra={sorted(extra)[:5]} missing={sorted(missing)[:5]}")
    if find_candidates(o, 2):
        fail("depth-2 candidates should not exist")

    flattened, passes = flatten_to_fixpoint(o)
    flattened.validate()
    if passes != 2:
        fail(f"expected 2 passes to fixpoint, got {passes}")
    if sorted(flattened.nodes) != sorted(o.nodes):
        fail("flattening changed the node set")
    check_superset_invariant(flattened, "flattened fixture")

    # Top-down misses on the raw form must be exactly the divergent children.
    missed = [
        code
        for desc, code in make_query_set(o, 1)
        if code not in predict_default(desc, o, cfg).codes()
    ]
    if sorted(missed) != sorted(divergent):
        fail(f"top-down misses {len(missed)} != divergent {len(divergent)}")

    for label, ont, predict in (
        ("raw/whole-tree", o, predict_hybrid),
        ("flattened/whole-tree", flattened, predict_hybrid),
        ("flattened/top-down", flattened, predict_default),
    ):
        unreachable = check_reachability(ont, predict, cfg)
        if unreachable:
            fail(f"{label}: unreachable {unreachable[:5]}")

    level1 = make_query_set(o, 1)
    default_acc = score_accuracy(
        [(code, predict_default(d, o, cfg)) for d, code in level1]
    )
    flat_level1 = make_query_set(flattened, 1)
    hybrid_acc = score_accuracy(
        [(code, predict_hybrid(d, flattened, cfg)) for d, code in flat_level1]
    )
    if not (hybrid_acc >= 98.0 and default_acc < hybrid_acc):
        fail(f"accuracy shape wrong: default={default_acc} hybrid+flattened={hybrid_acc}")
    print(
        f"ontology ok: {len(o)} nodes, {len(divergent)} divergent children, "
        f"default L1 {default_acc:.2f}%, hybrid+flattened L1 {hybrid_acc:.2f}%"
    )
    return o, flattened


def mutate(word: str, rng: random.Random) -> str:
    """One in-place character substitution, avoiding the first character."""
    index = rng.randrange(1, len(word))
    alphabet = "abcdefghijklmnopqrstuvwxyz"
    replacement = rng.choice([c for c in alphabet if c != word[index]])
    return word[:index] + replacement + word[index + 1 :]


def build_paraphrases(o: Ontology, divergent: list[str], rng: random.Random) -> list[tuple[str, str]]:
    rows: list[tuple[str, str]] = []
    regular_children = [
        code
        for code in o.levels[1]
        if code not in divergent and not o.nodes[code].description.endswith("unspecified")
    ]
    rng.shuffle(regular_children)

    # Reorders and connective drops: solvable by every variant.
    for code in regular_children[:35]:
        tokens = o.nodes[code].description.split()
        shuffled = tokens[:]
        rng.shuffle(shuffled)
        if rng.random() < 0.5:
            shuffled = [t for t in shuffled if t not in ("of", "and", "with")] or shuffled
        rows.append((code, " ".join(shuffled)))

    # One-character typos in the leading modifier: the category still wins.
    for code in regular_children[35:60]:
        tokens = o.nodes[code].description.split()
        tokens[0] = mutate(tokens[0], rng)
        rows.append((code, " ".join(tokens)))

    # Eponym children: invisible to the top-down walk, found by whole-tree
    # scans exactly or through the approximate channel.
    chosen = divergent[:]
    rng.shuffle(chosen)
    for code in chosen[:10]:
        tokens = o.nodes[code].description.split()
        rows.append((code, " ".join(reversed(tokens))))
    for code in chosen[10:20]:
        rows.append((code, o.nodes[code].description.split()[0]))
    for code in chosen[20:30]:
        tokens = [mutate(t, rng) for t in o.nodes[code].description.split()]
        rows.append((code, " ".join(tokens)))

    # Colloquialisms nobody is expected to resolve.
    hopeless = [
        "stomach flu", "broken heart", "bad knees", "weak lungs", "itchy scalp",
        "racing pulse", "swollen feet", "ringing ears", "blurry sight", "sore back",
    ]
    anchors = [o.levels[0][i * 8] for i in range(10)]
    rows.extend(zip(anchors, hopeless))
    return rows


def verify_paraphrases(
    path: Path, o: Ontology, cfg: SimilarityConfig
) -> None:
    reports = {
        variant: run_robustness(o, str(path), variant, cfg)
        for variant in ("default", "hybrid", "hybrid+flattened")
    }
    acc = {v: r.metrics["accuracy_pct"] for v, r in reports.items()}
    if not (acc["hybrid+flattened"] >= acc["hybrid"] >= acc["default"]):
        fail(f"robustness ordering broken: {acc}")
    if not acc["hybrid"] > acc["default"]:
        fail(f"whole-tree should strictly beat top-down here: {acc}")
    print(f"paraphrases ok: {acc}")


def build_claims(o: Ontology, rng: random.Random) -> list[list[str]]:
    codes = list(o.nodes)
    rows = []
    for i in range(60):
        n_dx = rng.randint(1, 5)
        dx = sorted(rng.sample(codes, n_dx))
        n_rx = rng.randint(0, 3)
        rx = sorted(f"RX{rng.randint(100, 999)}" for _ in range(n_rx))
        rows.append(
            [
                f"P{i + 1:04d}",
                STATES[i % len(STATES)],
                str(rng.randint(5, 90)),
                "female" if i % 2 else "male",
                "|".join(dx),
                "|".join(rx),
            ]
        )
    return rows


def main() -> None:
    cfg = SimilarityConfig()
    rng = random.Random(11)
    DATA_DIR.mkdir(parents=True, exist_ok=True)

    rows, divergent, truncated = build_ontology_rows()
    print(f"built {len(rows)} rows ({len(divergent)} divergent, {len(truncated)} truncated)")
    ontology_path = DATA_DIR / "icd_sample.tsv"
    write_ontology_tsv(rows, ontology_path)
    text = ontology_path.read_text(encoding="utf-8")
    o, flattened = verify_ontology(text, cfg, divergent)

    chapters_path = DATA_DIR / "chapters.csv"
    with chapters_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["chapter", "low", "high", "title"])
        for num, low, high, title, *_ in CHAPTERS:
            writer.writerow([num, low, high, title])
    ranges = load_chapter_ranges(str(chapters_path))
    for node in o.walk():
        if not any(r.contains(node.code) for r in ranges):
            fail(f"code {node.code} falls outside every chapter")
    print(f"chapters ok: {len(ranges)} ranges cover all codes")

    paraphrase_path = DATA_DIR / "paraphrases.tsv"
    paraphrase_rows = build_paraphrases(o, divergent, rng)
    with paraphrase_path.open("w", encoding="utf-8") as fh:
        fh.write("# code\tparaphrase\n")
        for code, paraphrase in paraphrase_rows:
            fh.write(f"{code}\t{paraphrase}\n")
    verify_paraphrases(paraphrase_path, o, cfg)

    claims_path = DATA_DIR / "claims_sample.csv"
    with claims_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["patient_id", "state", "age", "sex", "diagnosis_codes", "drug_codes"])
        writer.writerows(build_claims(o, rng))
    table = load_claims(str(claims_path))
    if len(table) != 60:
        fail(f"claims row count {len(table)}")
    print(f"claims ok: {len(table)} rows")
    print("all fixtures written to", DATA_DIR)


if __name__ == "__main__":
    main()
