"""Parsing of LLM generation responses and case-script output.

Generation responses carry tagged fenced blocks.  A test idea is the triple
(case-script, math-explanation, self-validation) in that order; strict mode
drops any incomplete triple with a diagnostic, lenient mode keeps a script
whose validator is missing.  Nested fences are not supported: a block ends
at the first closing fence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

CASE_DELIMITER = b"###CASE###"

_FENCE_RE = re.compile(r"```([a-z][a-z0-9\-]*)[ \t]*\n(.*?)```", re.DOTALL)

DEFAULT_TARGET_COUNT = 10


@dataclass
class CaseScript:
    script_source: str
    math_explanation: str
    self_validation_source: str | None
    target_count: int = DEFAULT_TARGET_COUNT


def _blocks(text: str) -> list[tuple[str, str]]:
    return [(m.group(1), m.group(2)) for m in _FENCE_RE.finditer(text)]


def parse_generation_response(text: str, strict: bool = True,
                              target_count: int = DEFAULT_TARGET_COUNT
                              ) -> tuple[list[CaseScript], list[str]]:
    """Group tagged blocks into CaseScript triples, in response order.

    Returns (scripts, diagnostics).  Diagnostics record every dropped or
    orphaned block; parsing never raises on malformed responses because a
    bad response should cost retention, not crash a batch.
    """
    scripts: list[CaseScript] = []
    diagnostics: list[str] = []
    current: dict | None = None

    def flush():
        nonlocal current
        if current is None:
            return
        src = current.get("script", "")
        val = current.get("validation")
        if not src.strip():
            diagnostics.append("dropped triple with empty case-script")
        elif val is None and strict:
            diagnostics.append("dropped case-script without self-validation (strict mode)")
        else:
            scripts.append(CaseScript(
                script_source=src,
                math_explanation=current.get("explanation", ""),
                self_validation_source=val,
                target_count=target_count,
            ))
        current = None

    for tag, body in _blocks(text):
        if tag == "case-script":
            flush()
            current = {"script": body}
        elif tag == "math-explanation":
            if current is None or "explanation" in current:
                diagnostics.append("orphan math-explanation block ignored")
            else:
                current["explanation"] = body
        elif tag == "self-validation":
            if current is None or "validation" in current:
                diagnostics.append("orphan self-validation block ignored")
            else:
                current["validation"] = body
        else:
            diagnostics.append(f"unknown block tag {tag!r} ignored")
    flush()
    return scripts, diagnostics


def parse_direct_response(text: str) -> tuple[list[tuple[bytes, bytes]], list[str]]:
    """Pair ```input blocks with the ```output block that follows each.
    Returns (pairs, diagnostics)."""
    pairs: list[tuple[bytes, bytes]] = []
    diagnostics: list[str] = []
    pending_input: bytes | None = None
    for tag, body in _blocks(text):
        if tag == "input":
            if pending_input is not None:
                diagnostics.append("input block without matching output dropped")
            pending_input = body.encode("utf-8")
        elif tag == "output":
            if pending_input is None:
                diagnostics.append("output block without preceding input ignored")
            else:
                pairs.append((pending_input, body.encode("utf-8")))
                pending_input = None
        else:
            diagnostics.append(f"unknown block tag {tag!r} ignored")
    if pending_input is not None:
        diagnostics.append("input block without matching output dropped")
    return pairs, diagnostics


def split_case_output(stdout: bytes) -> list[bytes]:
    """Split case-script stdout into individual inputs.

    The delimiter is a line containing exactly ###CASE###; splitting leaves
    the newline that closed the delimiter line at the head of the following
    chunk, so exactly one leading newline is stripped per chunk.  Chunks
    that are empty after that (e.g. after a trailing delimiter) are dropped.
    """
    inputs = []
    for chunk in stdout.split(CASE_DELIMITER):
        if chunk.startswith(b"\n"):
            chunk = chunk[1:]
        if chunk == b"":
            continue
        inputs.append(chunk)
    return inputs
