"""
JSON utilities for the commutation toolkit
Handles tolerant loading of hand-written input files, the commutator
matrix file format and deterministic output
"""

import json
import re

from .algebra import CommutatorMatrix, new_commutator_matrix
from .model import MatrixError


def safe_json_loads(json_str, fallback=None):
    """
    Robustly parse hand-edited JSON text.
    Supports:
    - Stripping Markdown code blocks
    - Dropping leading prose and // comment lines
    - Repairing trailing commas
    """
    if not json_str:
        return fallback

    # 1. Strip Markdown Code Blocks
    cleaned = json_str.strip()
    if cleaned.startswith("```"):
        match = re.search(r"```(?:json)?\s*(.*?)\s*```", cleaned, re.DOTALL)
        if match:
            cleaned = match.group(1).strip()
        else:
            cleaned = re.sub(r"^```(?:json)?", "", cleaned).strip()

    # 2. Drop whole-line comments
    cleaned = "\n".join(line for line in cleaned.splitlines() if not line.lstrip().startswith("//"))

    # 3. Cut to the outermost value
    start_idx = cleaned.find('{')
    list_start_idx = cleaned.find('[')
    if start_idx != -1 and (list_start_idx == -1 or start_idx < list_start_idx):
        cleaned = cleaned[start_idx:]
        end_idx = cleaned.rfind('}')
        if end_idx != -1:
            cleaned = cleaned[:end_idx + 1]
    elif list_start_idx != -1:
        cleaned = cleaned[list_start_idx:]
        end_idx = cleaned.rfind(']')
        if end_idx != -1:
            cleaned = cleaned[:end_idx + 1]

    # 4. Attempt Standard Parse
    try:
        return json.loads(cleaned)
    except json.JSONDecodeError:
        pass

    # 5. Repair Strategy: trailing commas before closing braces/brackets
    try:
        repaired = re.sub(r',\s*([\]}])', r'\1', cleaned)
        return json.loads(repaired)
    except json.JSONDecodeError:
        pass

    return fallback


def matrix_from_json(obj) -> CommutatorMatrix:
    """Build a matrix from {"d": int, "labels": [...], "mu": [[...]]}."""
    if not isinstance(obj, dict):
        raise MatrixError("matrix file must hold a JSON object")
    missing = [key for key in ("d", "mu") if key not in obj]
    if missing:
        raise MatrixError(f"matrix file is missing {', '.join(missing)}")
    return new_commutator_matrix(obj["mu"], obj["d"], obj.get("labels"))


def matrix_to_json(mu: CommutatorMatrix):
    return {"d": mu.d, "labels": list(mu.labels), "mu": mu.to_list()}


def load_matrix(path) -> CommutatorMatrix:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise MatrixError(f"cannot read matrix file {path}: {e}")
    obj = safe_json_loads(text)
    if obj is None:
        raise MatrixError(f"matrix file {path} is not valid JSON")
    return matrix_from_json(obj)


def dumps(obj) -> str:
    """Deterministic JSON text: insertion-ordered keys, no whitespace drift."""
    return json.dumps(obj, ensure_ascii=False, separators=(", ", ": "))
