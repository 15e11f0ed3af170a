#!/usr/bin/env python3
"""Writes the published fixture deposit (chassenon.json) and its expected
Dublin Core record (chassenon_dc.json), the latter derived by hand-coded
crosswalk rules rather than by the C++ code under test.
"""
import hashlib
import json
import pathlib
import sys

fx = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else ".")


def doc(name, role, relations=()):
    data = (fx / name).read_bytes()
    return {
        "filename": name, "media_role": role, "byte_size": len(data),
        "checksum": hashlib.sha256(data).hexdigest(), "format_class": "Archivable",
        "storage": {"kind": "internal", "location": name},
        "relations": [{"kind": k, "target": t} for k, t in relations],
    }


def agent(name, org=None):
    return {"name": name, "role_note": None, "org": org}


PID = "10.34969/CND3D/257350.d.2015"
OBJ_PIDS = ["10.34969/CND3D/257351.o.2015", "10.34969/CND3D/257352.o.2015"]
periods = [{"scheme": "PeriodO", "uri": "https://vocab.example.org/periodo/p034", "label": "Gallo-Roman"}]
places = [{"scheme": "Geonames", "uri": "https://vocab.example.org/geonames/g001", "label": "Chassenon"}]
subjects = [{"scheme": "PACTOLS", "uri": "https://vocab.example.org/pactols/s001", "label": "thermes"},
            {"scheme": "PACTOLS", "uri": "https://vocab.example.org/pactols/s026", "label": "restitution"}]
deposit = {
    "local_id": 257350, "pid": PID,
    "title": "Les thermes de Chassenon",
    "deposit_creator": agent("Sandrine Dupont", "Archeovision"),
    "silent_partners": [agent("Cassinomagus Park")],
    "nature_of_resource": "building", "nature_of_deposit": "restitution",
    "scientific_objectives": "Hypothetical 3D restitution of the Gallo-Roman baths of Cassinomagus from the excavation record.",
    "deposit_date": "2015-06-30",
    "project_date_range": {"min": 2003, "max": 2015},
    "archaeological_date_range": {"min": 90, "max": 300},
    "period_terms": periods, "place_terms": places, "subject_terms": subjects,
    "citation": "Archeovision (2015). Les thermes de Chassenon. 3D restitution. https://doi.org/" + PID,
    "related_publications": ["hal-01234567"],
    "objects": [
        {"local_id": 1, "pid": OBJ_PIDS[0], "title": "Thermes, état 2", "creators": [agent("Sandrine Dupont")],
         "contributors": [agent("Marc Leroy")], "creation_3d_date": "2014-11-02",
         "archaeological_date": {"min": 150, "max": 300}, "version": "2.0", "category": "mesh",
         "documents": [doc("cube_ascii.ply", "final-model"),
                       doc("minimal.dae", "other", [("derived-from", "cube_ascii.ply")])],
         "final_model": "cube_ascii.ply"},
        {"local_id": 2, "pid": OBJ_PIDS[1], "title": "Relevé du caldarium", "creators": [agent("Paul Martin")],
         "contributors": [agent("Marc Leroy")], "creation_3d_date": "2013-05-21",
         "archaeological_date": {"min": 90, "max": 300}, "version": "1.0", "category": "point-cloud",
         "documents": [doc("cube_ble.ply", "source-scan")], "final_model": None},
    ],
    "access_policy": "public", "status": "published",
}
(fx / "chassenon.json").write_text(json.dumps(deposit, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")

doi = "https://doi.org/"
dc = [["dc:title", deposit["title"]],
      ["dc:creator", "Sandrine Dupont"], ["dc:creator", "Paul Martin"],
      ["dc:contributor", "Cassinomagus Park"], ["dc:contributor", "Marc Leroy"]]
dc += [["dc:subject", s["uri"]] for s in subjects]
dc += [["dc:description", deposit["scientific_objectives"]], ["dc:date", "2015-06-30"],
       ["dc:type", "Dataset"], ["dc:identifier", doi + PID], ["dc:relation", "hal-01234567"]]
dc += [["dcterms:hasPart", doi + p] for p in OBJ_PIDS]
dc += [["dc:coverage", t["uri"]] for t in periods + places]
dc += [["dc:rights", "info:eu-repo/semantics/openAccess"],
       ["dcterms:bibliographicCitation", deposit["citation"]]]
(fx / "chassenon_dc.json").write_text(json.dumps(dc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
