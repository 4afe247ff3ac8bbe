#!/usr/bin/env python3
# Copyright 2026  The ngramkit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#  http://www.apache.org/licenses/LICENSE-2.0
#
# THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
# WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
# MERCHANTABILITY OR NON-INFRINGEMENT.
# See the Apache 2 License for the specific language governing permissions and
# limitations under the License.

"""Builds the desk corpus from English prose shipped with CPython.

Sources are the docstrings of the standard library and the pydoc topic
help texts.  Output is lowercased, one sentence per line, whitespace
tokenized.  Every tenth sentence goes to the held-out file.

Usage: make_desk_corpus.py <stdlib-dir> <out-dir>
"""

import ast
import pathlib
import re
import sys

SENT_SPLIT = re.compile(r"(?<=[.!?])\s+(?=[A-Z(\"'])")
TOKEN = re.compile(r"[a-z]+(?:'[a-z]+)?|[0-9]+|[.,;:!?()]")


def prose_blocks(text):
    """Yields paragraphs with code samples and tables removed."""
    para = []
    for line in text.splitlines():
        s = line.strip()
        if (not s or s.startswith((">>>", "...", "$", "|", "+-", "==", "--"))
                or line.startswith(("    ", "\t"))):
            if para:
                yield " ".join(para)
                para = []
            continue
        para.append(s)
    if para:
        yield " ".join(para)


def sentences(text):
    for block in prose_blocks(text):
        for sent in SENT_SPLIT.split(block):
            toks = TOKEN.findall(sent.lower())
            words = [t for t in toks if t.isalpha() or "'" in t]
            # Keep sentences that are mostly words.
            if len(words) >= 4 and len(words) >= 0.7 * len(toks):
                yield " ".join(toks)


def main():
    stdlib = pathlib.Path(sys.argv[1])
    out = pathlib.Path(sys.argv[2])
    texts = []
    for path in sorted(stdlib.rglob("*.py")):
        rel = path.relative_to(stdlib).parts
        if any(p in ("test", "tests", "site-packages", "dist-packages",
                     "idlelib", "lib2to3") for p in rel):
            continue
        try:
            tree = ast.parse(path.read_text(encoding="utf-8"))
        except (SyntaxError, UnicodeDecodeError, ValueError):
            continue
        for node in ast.walk(tree):
            if isinstance(node, (ast.Module, ast.ClassDef, ast.FunctionDef,
                                 ast.AsyncFunctionDef)):
                doc = ast.get_docstring(node)
                if doc:
                    texts.append(doc)
    topics = stdlib / "pydoc_data" / "topics.py"
    namespace = {}
    exec(topics.read_text(encoding="utf-8"), namespace)
    for key in sorted(namespace["topics"]):
        texts.append(namespace["topics"][key])

    seen = set()
    train, heldout = [], []
    for text in texts:
        for sent in sentences(text):
            if sent in seen:
                continue
            seen.add(sent)
            (heldout if len(seen) % 10 == 0 else train).append(sent)
    out.mkdir(parents=True, exist_ok=True)
    (out / "train.txt").write_text("\n".join(train) + "\n", encoding="utf-8")
    (out / "heldout.txt").write_text("\n".join(heldout) + "\n",
                                     encoding="utf-8")


if __name__ == "__main__":
    main()
