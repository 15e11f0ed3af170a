#!/usr/bin/env python3
"""Builds an archive package for chassenon.json with Python only (hashlib,
json), following the documented layout and manifest-digest rule. The C++
verifier must accept it and load back the same deposit.
"""
import hashlib
import json
import pathlib
import shutil
import sys

fx = pathlib.Path(sys.argv[1])
out = pathlib.Path(sys.argv[2])
if out.exists():
    shutil.rmtree(out)

deposit = json.loads((fx / "chassenon.json").read_text(encoding="utf-8"))
files = {}
refs = []
for obj in deposit["objects"]:
    base = f"objects/{obj['local_id']}"
    for d in obj["documents"]:
        if d["storage"]["kind"] != "internal":
            continue
        payload = f"{base}/files/{d['filename']}"
        files[payload] = ((fx / d["storage"]["location"]).read_bytes(), d["format_class"])
        d["storage"]["location"] = payload
    files[f"{base}/object.json"] = (json.dumps(obj, indent=1).encode(), "Archivable")
    refs.append({"local_id": obj["local_id"], "metadata": f"{base}/object.json"})
deposit["objects"] = refs
files["deposit.json"] = (json.dumps(deposit, indent=1).encode(), "Archivable")

created = "2021-09-01T12:00:00Z"
entries = []
h = hashlib.sha256(f"depot3d-package 1.0\n{created}\n".encode())
for path in sorted(files, key=lambda p: p.encode()):
    data, cls = files[path]
    sha = hashlib.sha256(data).hexdigest()
    entries.append({"path": path, "byte_size": len(data), "sha256": sha, "format_class": cls})
    h.update(f"{sha} {len(data)} {cls} {path}\n".encode())
    (out / path).parent.mkdir(parents=True, exist_ok=True)
    (out / path).write_bytes(data)
manifest = {"package_format_version": "1.0", "created": created, "entries": entries,
            "package_digest": h.hexdigest()}
(out / "manifest.json").write_text(json.dumps(manifest, indent=1))
