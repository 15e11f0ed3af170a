#!/usr/bin/env python3
"""Regenerates the bundled vocabulary sample fixtures (JSON lines).

The entries are a small hand-picked sample for offline use and tests; the
URIs live under vocab.example.org and are not the authorities' real URIs.
"""
import json
import pathlib

HERE = pathlib.Path(__file__).parent

PERIODS = [
    ("Lower Palaeolithic", [], -700000, -300000),
    ("Middle Palaeolithic", ["Mousterian"], -300000, -40000),
    ("Upper Palaeolithic", [], -40000, -10000),
    ("Aurignacian", [], -43000, -26000),
    ("Gravettian", [], -31000, -22000),
    ("Solutrean", [], -22000, -17000),
    ("Magdalenian", [], -17000, -12000),
    ("Azilian", [], -12000, -9500),
    ("Mesolithic", [], -9500, -5500),
    ("Early Neolithic", ["Néolithique ancien"], -5500, -4700),
    ("Middle Neolithic", ["Néolithique moyen"], -4700, -3500),
    ("Late Neolithic", ["Néolithique récent"], -3500, -2900),
    ("Chalcolithic", ["Copper Age", "Néolithique final"], -2900, -2200),
    ("Bell Beaker", ["Campaniforme"], -2600, -2200),
    ("Early Bronze Age", ["Bronze ancien"], -2200, -1600),
    ("Middle Bronze Age", ["Bronze moyen"], -1600, -1350),
    ("Late Bronze Age", ["Bronze final"], -1350, -800),
    ("Hallstatt", ["Premier âge du Fer"], -800, -450),
    ("La Tène", ["Second âge du Fer"], -450, -25),
    ("Iron Age", ["Âge du Fer"], -800, -25),
    ("Archaic Greece", [], -800, -480),
    ("Classical Greece", [], -480, -323),
    ("Hellenistic", [], -323, -31),
    ("Roman Republic", [], -509, -27),
    ("Late Republic", [], -133, -27),
    ("Augustan", [], -27, 14),
    ("Early Roman Empire", ["Haut-Empire"], -27, 235),
    ("Julio-Claudian", [], -27, 68),
    ("Flavian", [], 69, 96),
    ("Antonine", [], 138, 192),
    ("Severan", [], 193, 235),
    ("Crisis of the Third Century", [], 235, 284),
    ("Late Roman Empire", ["Bas-Empire", "Late Antiquity"], 284, 476),
    ("Gallo-Roman", ["Gallo-romain", "Roman Gaul"], -52, 486),
    ("Merovingian", ["Mérovingien"], 481, 751),
    ("Carolingian", ["Carolingien"], 751, 987),
    ("Early Middle Ages", ["Haut Moyen Âge"], 476, 1000),
    ("Romanesque", ["Roman (art)"], 1000, 1150),
    ("Central Middle Ages", ["Moyen Âge central"], 1000, 1250),
    ("Gothic", ["Gothique"], 1140, 1500),
    ("Late Middle Ages", ["Bas Moyen Âge"], 1250, 1492),
    ("Hundred Years' War", ["Guerre de Cent Ans"], 1337, 1453),
    ("Renaissance", [], 1492, 1610),
    ("Early Modern", ["Époque moderne"], 1492, 1789),
    ("Baroque", [], 1600, 1750),
    ("Classicism", ["Classicisme"], 1610, 1715),
    ("Enlightenment", ["Lumières"], 1715, 1789),
    ("French Revolution", ["Révolution française"], 1789, 1799),
    ("Nineteenth century", ["XIXe siècle"], 1800, 1899),
    ("Contemporary", ["Époque contemporaine"], 1789, 2025),
]
assert len(PERIODS) == 50

PLACES = [
    ("Chassenon", ["Cassinomagus"], 45.8445, 0.7722),
    ("Charente", [], 45.7, 0.17),
    ("Limoges", ["Augustoritum"], 45.8336, 1.2611),
    ("Poitiers", ["Limonum"], 46.5802, 0.3404),
    ("Saintes", ["Mediolanum Santonum"], 45.7464, -0.6333),
    ("Périgueux", ["Vesunna"], 45.1846, 0.7214),
    ("Bordeaux", ["Burdigala"], 44.8378, -0.5792),
    ("Lyon", ["Lugdunum"], 45.7640, 4.8357),
    ("Vienne", [], 45.5255, 4.8740),
    ("Nîmes", ["Nemausus"], 43.8367, 4.3601),
    ("Arles", ["Arelate"], 43.6766, 4.6278),
    ("Orange", ["Arausio"], 44.1381, 4.8075),
    ("Autun", ["Augustodunum"], 46.9510, 4.2986),
    ("Bibracte", ["Mont Beuvray"], 46.9236, 4.0406),
    ("Alésia", ["Alise-Sainte-Reine"], 47.5372, 4.5003),
    ("Paris", ["Lutetia", "Lutèce"], 48.8566, 2.3522),
    ("Reims", ["Durocortorum"], 49.2583, 4.0317),
    ("Tours", ["Caesarodunum"], 47.3941, 0.6848),
    ("Orléans", ["Cenabum"], 47.9030, 1.9093),
    ("Caen", [], 49.1829, -0.3707),
    ("Mont-Saint-Michel", [], 48.6361, -1.5115),
    ("Carnac", [], 47.5839, -3.0781),
    ("Lascaux", ["Montignac"], 45.0539, 1.1681),
    ("Chauvet", ["Vallon-Pont-d'Arc"], 44.3881, 4.4161),
    ("Marseille", ["Massalia"], 43.2965, 5.3698),
    ("Glanum", ["Saint-Rémy-de-Provence"], 43.7736, 4.8322),
    ("Vaison-la-Romaine", ["Vasio"], 44.2414, 5.0742),
    ("Toulouse", ["Tolosa"], 43.6047, 1.4442),
    ("Narbonne", ["Narbo Martius"], 43.1839, 3.0042),
    ("Strasbourg", ["Argentoratum"], 48.5734, 7.7521),
]

SUBJECTS = [
    ("thermes", ["bains", "baths", "thermae"]),
    ("amphithéâtre", ["amphitheatre"]),
    ("théâtre", ["theatre"]),
    ("temple", ["fanum"]),
    ("forum", []),
    ("aqueduc", ["aqueduct"]),
    ("villa", []),
    ("nécropole", ["necropolis", "cimetière"]),
    ("oppidum", []),
    ("habitat", ["settlement"]),
    ("église", ["church"]),
    ("abbaye", ["abbey", "monastère"]),
    ("cathédrale", ["cathedral"]),
    ("château fort", ["castle"]),
    ("rempart", ["enceinte", "city wall"]),
    ("grotte ornée", ["decorated cave"]),
    ("mégalithe", ["menhir", "dolmen"]),
    ("céramique", ["pottery", "ceramics"]),
    ("mosaïque", ["mosaic"]),
    ("enduit peint", ["wall painting"]),
    ("sculpture", ["statue"]),
    ("inscription", ["épigraphie", "epigraphy"]),
    ("monnaie", ["coin", "numismatique"]),
    ("hypocauste", ["hypocaust"]),
    ("architecture", []),
    ("restitution", ["reconstruction"]),
    ("relevé", ["survey", "lasergrammétrie"]),
    ("photogrammétrie", ["photogrammetry"]),
    ("fouille", ["excavation"]),
    ("mobilier", ["artefacts", "finds"]),
]


def slug(n):
    return f"{n:03d}"


def write(name, rows):
    path = HERE / name
    with path.open("w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")
    print(f"{path}: {len(rows)} entries")


write("periodo.jsonl", [
    {"scheme": "PeriodO", "uri": f"https://vocab.example.org/periodo/p{slug(i + 1)}",
     "preferred_label": label, "alt_labels": alts, "bounds": [lo, hi], "coords": None}
    for i, (label, alts, lo, hi) in enumerate(PERIODS)
])
write("geonames.jsonl", [
    {"scheme": "Geonames", "uri": f"https://vocab.example.org/geonames/g{slug(i + 1)}",
     "preferred_label": label, "alt_labels": alts, "bounds": None, "coords": [lat, lon]}
    for i, (label, alts, lat, lon) in enumerate(PLACES)
])
write("pactols.jsonl", [
    {"scheme": "PACTOLS", "uri": f"https://vocab.example.org/pactols/s{slug(i + 1)}",
     "preferred_label": label, "alt_labels": alts, "bounds": None, "coords": None}
    for i, (label, alts) in enumerate(SUBJECTS)
])
