"""Import SciDTB-style ``.dep`` files into the toolkit's corpus format.

A SciDTB record is ``{"root": [{"id", "parent", "text", "relation"}, ...]}``
with the artificial root serialized as entry 0.  Sentence boundaries are not
marked, so they are inferred from sentence-final punctuation.

Usage: python -m ddparse.scidtb SRC_DIR DST_DIR
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from .errors import ParseError
from .treebank import DiscourseTree, document_from_record, save_document

_SENT_FINAL = (".", "。", "!", "?", "！", "？")


def convert_record(record: dict, doc_id: str, source="<scidtb>") -> DiscourseTree:
    if "root" not in record or not isinstance(record["root"], list):
        raise ParseError(source, "missing 'root' array")
    entries = [e for e in record["root"] if e.get("id", 0) != 0]
    entries.sort(key=lambda e: e["id"])
    edus = []
    sentence = 0
    for entry in entries:
        text = str(entry.get("text", ""))
        relation = str(entry.get("relation", ""))
        if relation == "null":
            relation = ""
        edus.append(
            {
                "id": int(entry["id"]),
                "text": text,
                "parent": int(entry.get("parent", -1)),
                "relation": relation,
                "sentence": sentence,
                "ends_with_period": text.rstrip().endswith((".", "。")),
            }
        )
        if text.rstrip().endswith(_SENT_FINAL):
            sentence += 1
    return document_from_record({"doc_id": doc_id, "edus": edus}, source)


def convert_file(src: Path, dst_dir: Path) -> Path:
    record = json.loads(src.read_text(encoding="utf-8"))
    tree = convert_record(record, doc_id=src.stem, source=src)
    target = dst_dir / f"{tree.doc_id}.json"
    save_document(tree, target)
    return target


def convert_dir(src_dir, dst_dir) -> int:
    src_dir, dst_dir = Path(src_dir), Path(dst_dir)
    dst_dir.mkdir(parents=True, exist_ok=True)
    count = 0
    for src in sorted(src_dir.glob("*.dep")):
        convert_file(src, dst_dir)
        count += 1
    return count


def main(argv=None) -> int:
    argv = argv if argv is not None else sys.argv[1:]
    if len(argv) != 2:
        print(__doc__.strip(), file=sys.stderr)
        return 2
    count = convert_dir(argv[0], argv[1])
    print(f"converted {count} documents")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
