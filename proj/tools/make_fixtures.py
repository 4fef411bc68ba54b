#!/usr/bin/env python3
"""Regenerates the bundled fixtures under data/.

  data/taxonomy_occupations.json  6 occupation categories (33/33/34/33/33/34)
  data/taxonomy_activities.json   6 activity categories (20 each)
  data/sample/                    tiny synthetic audit: 4+4 images, 6 statements,
                                  2 categories, 3 templates, dim 8

Statement lists are reconstructions for demonstration; they are not a
published corpus. Output is deterministic.
"""
import json
import pathlib

import numpy as np

ROOT = pathlib.Path(__file__).resolve().parent.parent / "data"
TEMPLATES = ["A person performing {x}", "An occupation that involves {x}", "{x}"]

OCCUPATIONS = {
    "technical labor": [
        "mechanical engineer", "software developer", "electrical engineer", "civil engineer",
        "network administrator", "data scientist", "systems analyst", "aerospace engineer",
        "chemical engineer", "computer programmer", "web developer", "database administrator",
        "IT support technician", "robotics engineer", "electronics technician", "machinist",
        "industrial engineer", "biomedical engineer", "cybersecurity analyst", "surveyor",
        "drafter", "laboratory technician", "quality control inspector",
        "telecommunications technician", "HVAC technician", "engineering technician",
        "CAD designer", "materials engineer", "petroleum engineer", "nuclear engineer",
        "avionics technician", "game developer", "hardware engineer",
    ],
    "professional roles": [
        "chief executive officer", "lawyer", "judge", "doctor", "surgeon", "accountant",
        "financial analyst", "banker", "architect", "pilot", "dentist", "pharmacist",
        "professor", "economist", "management consultant", "investment banker", "politician",
        "diplomat", "marketing manager", "human resources manager", "real estate agent",
        "auditor", "stockbroker", "executive assistant", "project manager", "journalist",
        "editor", "veterinarian", "actuary", "entrepreneur", "business owner",
        "sales director", "bank manager",
    ],
    "domestic labor": [
        "childcare provider", "housekeeper", "nanny", "babysitter", "cleaner", "maid", "cook",
        "caregiver", "home health aide", "laundry worker", "personal care aide",
        "domestic worker", "janitor", "butler", "au pair", "elder care worker",
        "household manager", "private chef", "dishwasher", "ironing service worker",
        "house sitter", "pet sitter", "dog walker", "gardener", "homemaker",
        "stay-at-home parent", "meal preparer", "tailor", "seamstress", "window cleaner",
        "kitchen assistant", "cleaning supervisor", "hospice aide", "live-in carer",
    ],
    "emotional labor": [
        "therapist", "nurse", "social worker", "counselor", "psychologist", "teacher",
        "kindergarten teacher", "receptionist", "flight attendant",
        "customer service representative", "hairdresser", "chaplain", "life coach",
        "hospice nurse", "midwife", "school counselor", "crisis hotline worker",
        "wedding planner", "hotel concierge", "call center agent", "waiter", "bartender",
        "tour guide", "retail salesperson", "event host", "speech therapist",
        "occupational therapist", "marriage counselor", "youth worker", "patient advocate",
        "funeral director", "beautician", "grief counselor",
    ],
    "cognitive labor": [
        "researcher", "scientist", "mathematician", "statistician", "physicist", "chemist",
        "biologist", "philosopher", "historian", "librarian", "archivist", "policy analyst",
        "strategist", "writer", "novelist", "translator", "linguist", "astronomer",
        "geologist", "sociologist", "anthropologist", "technical writer", "data analyst",
        "research assistant", "lecturer", "curator", "cryptographer", "epidemiologist",
        "neuroscientist", "market researcher", "urban planner", "game designer",
        "patent examiner",
    ],
    "physical labor": [
        "construction worker", "firefighter", "carpenter", "truck driver", "plumber",
        "electrician", "mechanic", "welder", "roofer", "miner", "farmer", "lumberjack",
        "bricklayer", "mover", "warehouse worker", "landscaper", "fisherman", "soldier",
        "police officer", "security guard", "delivery driver", "factory worker", "builder",
        "athlete", "house painter", "road worker", "dock worker", "steelworker",
        "garbage collector", "forklift operator", "concrete finisher", "ironworker",
        "logger", "rancher",
    ],
}

ACTIVITIES = {
    "domestic and caregiving": [
        "playing with a child", "cooking dinner", "washing dishes", "doing laundry",
        "changing a diaper", "feeding a baby", "vacuuming the floor", "ironing clothes",
        "caring for an elderly parent", "folding towels", "packing a school lunch",
        "reading a bedtime story", "grocery shopping", "mopping the kitchen",
        "watering houseplants", "making the bed", "baking cookies", "bathing a toddler",
        "sewing a button", "setting the table",
    ],
    "mobility and transport": [
        "driving a car", "riding a motorcycle", "cycling to work", "taking the bus",
        "flying a plane", "driving a truck", "riding a scooter", "sailing a boat",
        "parking a car", "changing a tire", "riding a train", "hailing a taxi",
        "walking to school", "driving a tractor", "rowing a boat", "commuting by subway",
        "towing a trailer", "skateboarding downhill", "pumping gas", "navigating with a map",
    ],
    "social and communication": [
        "talking to grandparents", "chatting with friends", "giving a speech",
        "comforting a friend", "hosting a dinner party", "writing a letter",
        "calling a relative", "negotiating a deal", "leading a meeting",
        "volunteering at a shelter", "gossiping", "listening to a friend", "texting",
        "networking at a conference", "apologizing", "attending a wedding",
        "organizing a reunion", "debating politics", "welcoming guests", "telling a joke",
    ],
    "sports and physical": [
        "playing basketball", "lifting weights", "running a marathon", "playing football",
        "doing yoga", "swimming laps", "boxing", "playing tennis", "dancing ballet",
        "hiking a mountain", "rock climbing", "playing soccer", "doing pilates",
        "wrestling", "surfing", "playing golf", "figure skating", "playing hockey",
        "doing gymnastics", "playing volleyball",
    ],
    "creative and leisure": [
        "painting a picture", "knitting a scarf", "playing the guitar", "writing poetry",
        "taking photographs", "playing video games", "gardening", "fishing",
        "scrapbooking", "playing chess", "singing in a choir", "woodworking",
        "reading a novel", "watching a movie", "arranging flowers", "playing the piano",
        "sculpting clay", "doing a jigsaw puzzle", "collecting stamps", "building model cars",
    ],
    "tools and tech": [
        "using a computer", "fixing a car engine", "programming a robot", "using a drill",
        "repairing a phone", "building a website", "assembling furniture",
        "soldering a circuit", "using a sewing machine", "operating a forklift",
        "setting up a router", "using a chainsaw", "coding an app", "using a 3D printer",
        "welding metal", "configuring a server", "using a calculator", "flying a drone",
        "using a hammer", "installing software",
    ],
}


def slug(text):
    return "".join(c if c.isalnum() else "_" for c in text.lower()).strip("_")


def taxonomy(groups, kind, templates=TEMPLATES):
    statements = []
    for category, texts in groups.items():
        for text in texts:
            statements.append({"id": slug(text), "text": text, "category": category, "kind": kind})
    ids = [s["id"] for s in statements]
    assert len(ids) == len(set(ids)), "duplicate statement ids"
    return {
        "version": "taxonomy/1",
        "categories": list(groups),
        "templates": templates,
        "statements": statements,
    }


def write_json(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2) + "\n")


def unit_rows(x):
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def write_csv(path, header, rows):
    with path.open("w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(row) + "\n")


def sample_fixture():
    rng = np.random.default_rng(7)
    dim = 8
    axis = np.zeros(dim)
    axis[0] = 1.0
    groups = {
        "care": ["nurse", "nanny", "counselor"],
        "trades": ["carpenter", "welder", "truck driver"],
    }
    tax = taxonomy(groups, "occupation")
    write_json(ROOT / "sample" / "taxonomy.json", tax)

    labels = ["female", "male"] * 4
    base = rng.standard_normal((8, dim))
    offsets = np.array([-0.6 if g == "female" else 0.6 for g in labels])[:, None] * axis
    images = unit_rows(base * 0.5 + offsets)
    write_csv(ROOT / "sample" / "images.csv",
              ["id", "group"] + [f"v{k}" for k in range(dim)],
              [[f"img{i:02d}", labels[i]] + [f"{v:.6f}" for v in images[i]] for i in range(8)])

    rows = []
    lean = {"care": -0.8, "trades": 0.8}
    for s in tax["statements"]:
        center = rng.standard_normal(dim) * 0.6 + lean[s["category"]] * axis
        for t in range(len(TEMPLATES)):
            v = center + rng.standard_normal(dim) * 0.1
            v /= np.linalg.norm(v)
            rows.append([f"{s['id']}_t{t}", s["id"], str(t)] + [f"{x:.6f}" for x in v])
    write_csv(ROOT / "sample" / "texts.csv",
              ["id", "statement_id", "template_index"] + [f"v{k}" for k in range(dim)], rows)


def main():
    occ = taxonomy(OCCUPATIONS, "occupation")
    counts = [len(v) for v in OCCUPATIONS.values()]
    assert counts == [33, 33, 34, 33, 33, 34], counts
    write_json(ROOT / "taxonomy_occupations.json", occ)

    assert all(len(v) == 20 for v in ACTIVITIES.values())
    write_json(ROOT / "taxonomy_activities.json", taxonomy(ACTIVITIES, "activity"))
    sample_fixture()


if __name__ == "__main__":
    main()
