"""Two-step translate+parse pipeline over external backends.

A translator turns source sentences into English, one line in, one line
out. A parser turns English sentences into Penman graphs, one line in,
one blank-line-separated block out. Backends are either subprocesses
speaking that line protocol or HTTP endpoints taking
``{"sentences": [...]}`` and answering ``{"outputs": [...]}``.

Results are cached per (adapter identity, input sentence), so re-running
an unchanged corpus invokes no backend at all.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import shlex
import subprocess
import tempfile
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence

from .corpus import CorpusEntry, iter_blocks, write_corpus
from .penman import AmrGraph, PenmanError, parse_penman, serialize_penman

log = logging.getLogger(__name__)

SUBPROCESS = "subprocess"
HTTP = "http"


class AdapterError(RuntimeError):
    """A backend failed; ``batch_index`` names the failing invocation."""

    def __init__(self, message: str, batch_index: int | None = None):
        self.batch_index = batch_index
        if batch_index is not None:
            message = f"batch {batch_index}: {message}"
        super().__init__(message)


class ContractError(AdapterError):
    """A backend answered, but not with one output per input."""


class CacheCorruptionError(RuntimeError):
    pass


@dataclass(frozen=True)
class AdapterSpec:
    """How to reach one backend.

    ``command`` is split shell-style and run without a shell; the
    placeholder ``{lang}`` is replaced by the source language tag.
    """

    kind: str
    command: str | None = None
    url: str | None = None
    input_field: str = "sentences"
    output_field: str = "outputs"
    batch_size: int = 32
    timeout: float = 600.0
    name: str = ""
    version: str = ""

    def __post_init__(self):
        if self.kind == SUBPROCESS:
            if not self.command or self.url:
                raise ValueError("subprocess adapter needs a command and no url")
        elif self.kind == HTTP:
            if not self.url or self.command:
                raise ValueError("http adapter needs a url and no command")
        else:
            raise ValueError(f"unknown adapter kind {self.kind!r}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    @classmethod
    def subprocess(cls, command: str, **kw) -> "AdapterSpec":
        return cls(SUBPROCESS, command=command, **kw)

    @classmethod
    def http(cls, url: str, **kw) -> "AdapterSpec":
        return cls(HTTP, url=url, **kw)

    def describe(self) -> dict:
        out = {"kind": self.kind, "name": self.name, "version": self.version}
        if self.kind == SUBPROCESS:
            out["command"] = self.command
        else:
            out.update(url=self.url, input_field=self.input_field, output_field=self.output_field)
        return out

    @property
    def identity(self) -> str:
        return json.dumps(self.describe(), sort_keys=True)


@dataclass
class PipelineLog:
    """Counters of backend traffic, for inspecting cache behaviour."""

    invocations: list[tuple[str, int, int]] = field(default_factory=list)
    cache_hits: int = 0
    cache_misses: int = 0

    def invoked(self, stage: str, batch_index: int, size: int) -> None:
        self.invocations.append((stage, batch_index, size))

    def count(self, stage: str | None = None) -> int:
        return sum(1 for s, _, _ in self.invocations if stage is None or s == stage)


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class Cache:
    """Content-addressed store of backend outputs under ``root``."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def _path(self, stage: str, identity: str, text: str) -> Path:
        key = _sha256(identity + "\0" + text)
        return self.root / stage / key[:2] / f"{key}.json"

    def get(self, stage: str, identity: str, text: str) -> dict | None:
        path = self._path(stage, identity, text)
        if not path.exists():
            return None
        try:
            entry = json.loads(path.read_text(encoding="utf-8"))
            ok = (
                entry["adapter"] == identity
                and entry["input"] == text
                and entry["output_sha256"] == _sha256(entry["output"])
            )
        except (ValueError, KeyError, TypeError) as e:
            raise CacheCorruptionError(f"{path}: unreadable cache entry ({e})") from e
        if not ok:
            raise CacheCorruptionError(f"{path}: cache entry fails its checksum")
        return entry

    def put(self, stage: str, identity: str, text: str, output: str) -> dict:
        path = self._path(stage, identity, text)
        path.parent.mkdir(parents=True, exist_ok=True)
        entry = {
            "adapter": identity,
            "input": text,
            "output": output,
            "output_sha256": _sha256(output),
            "created": _now(),
        }
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as f:
            json.dump(entry, f, ensure_ascii=False, sort_keys=True)
        os.replace(tmp, path)
        return entry


def clean_sentence(text: str) -> str:
    """Newlines delimit records in the line protocol; fold them to spaces."""
    return text.replace("\r\n", " ").replace("\n", " ").replace("\r", " ")


def _run_subprocess(adapter: AdapterSpec, payload: str, batch_index: int, lang: str) -> str:
    argv = shlex.split(adapter.command.replace("{lang}", lang))
    try:
        proc = subprocess.run(
            argv,
            input=payload.encode("utf-8"),
            capture_output=True,
            timeout=adapter.timeout,
        )
    except subprocess.TimeoutExpired:
        raise AdapterError(f"timed out after {adapter.timeout}s: {adapter.command}", batch_index)
    except OSError as e:
        raise AdapterError(f"cannot run {adapter.command!r}: {e}", batch_index) from e
    if proc.returncode != 0:
        err = proc.stderr.decode("utf-8", "replace").strip()[-500:]
        raise AdapterError(f"exit status {proc.returncode}: {err}", batch_index)
    try:
        return proc.stdout.decode("utf-8")
    except UnicodeDecodeError as e:
        raise AdapterError(f"output is not UTF-8: {e}", batch_index) from e


def _run_http(adapter: AdapterSpec, items: list[str], batch_index: int) -> list[str]:
    body = json.dumps({adapter.input_field: items}).encode("utf-8")
    request = urllib.request.Request(
        adapter.url, data=body, headers={"Content-Type": "application/json"}, method="POST"
    )
    try:
        with urllib.request.urlopen(request, timeout=adapter.timeout) as resp:
            reply = json.loads(resp.read().decode("utf-8"))
    except (urllib.error.URLError, OSError, ValueError) as e:
        raise AdapterError(f"request to {adapter.url} failed: {e}", batch_index) from e
    outputs = reply.get(adapter.output_field) if isinstance(reply, dict) else None
    if not isinstance(outputs, list) or not all(isinstance(o, str) for o in outputs):
        raise ContractError(f"reply lacks a string list {adapter.output_field!r}", batch_index)
    return outputs


def _translate_batch(adapter: AdapterSpec, items: list[str], batch_index: int, lang: str):
    if adapter.kind == HTTP:
        outputs = [clean_sentence(o) for o in _run_http(adapter, items, batch_index)]
    else:
        out = _run_subprocess(adapter, "".join(s + "\n" for s in items), batch_index, lang)
        if out.endswith("\n"):
            out = out[:-1]
        outputs = out.split("\n") if out else []
        outputs = [o.rstrip("\r") for o in outputs]
    if len(outputs) != len(items):
        raise ContractError(
            f"translator returned {len(outputs)} lines for {len(items)} sentences", batch_index
        )
    return outputs


def _parse_batch(adapter: AdapterSpec, items: list[str], batch_index: int, lang: str):
    if adapter.kind == HTTP:
        blocks = _run_http(adapter, items, batch_index)
    else:
        out = _run_subprocess(adapter, "".join(s + "\n" for s in items), batch_index, lang)
        blocks = [b.penman for b in iter_blocks(out)]
    if len(blocks) != len(items):
        raise ContractError(
            f"parser returned {len(blocks)} graphs for {len(items)} sentences", batch_index
        )
    return blocks


def _run_stage(
    stage: str,
    items: Sequence[str],
    adapter: AdapterSpec,
    call: Callable[[AdapterSpec, list[str], int, str], list[str]],
    lang: str,
    cache: Cache | None,
    stats: PipelineLog | None,
    validate: Callable[[str, int, int], None] | None = None,
) -> list[dict]:
    """Outputs (as cache-style entries) for ``items``, invoking only on misses."""
    identity = adapter.identity
    results: list[dict | None] = [None] * len(items)
    misses = []
    for k, text in enumerate(items):
        entry = cache.get(stage, identity, text) if cache else None
        if entry is None:
            misses.append(k)
        else:
            results[k] = entry
    if stats is not None:
        stats.cache_hits += len(items) - len(misses)
        stats.cache_misses += len(misses)
    for b, start in enumerate(range(0, len(misses), adapter.batch_size)):
        idx = misses[start : start + adapter.batch_size]
        batch = [items[k] for k in idx]
        log.info("%s: batch %d (%d items) -> %s", stage, b, len(batch), adapter.name or adapter.kind)
        if stats is not None:
            stats.invoked(stage, b, len(batch))
        outputs = call(adapter, batch, b, lang)
        if validate is not None:
            for k, out in zip(idx, outputs):
                validate(out, b, k)
        for k, out in zip(idx, outputs):
            if cache:
                results[k] = cache.put(stage, identity, items[k], out)
            else:
                results[k] = {"output": out, "created": _now()}
    return results


def translate_corpus(
    sentences: Sequence[str],
    adapter: AdapterSpec,
    *,
    lang: str = "",
    cache: Cache | None = None,
    stats: PipelineLog | None = None,
) -> list[str]:
    """Translate sentences in order; output count always equals input count."""
    items = [clean_sentence(s) for s in sentences]
    entries = _run_stage("translate", items, adapter, _translate_batch, lang, cache, stats)
    return [e["output"] for e in entries]


def _check_block(text: str, batch_index: int, index: int) -> None:
    try:
        parse_penman(text)
    except PenmanError as e:
        raise AdapterError(
            f"parser output for sentence {index} is not valid Penman: {e}", batch_index
        ) from e


def parse_corpus(
    sentences: Sequence[str],
    adapter: AdapterSpec,
    *,
    lang: str = "en",
    cache: Cache | None = None,
    stats: PipelineLog | None = None,
) -> list[AmrGraph]:
    """Parse English sentences into graphs, one per sentence, in order."""
    items = [clean_sentence(s) for s in sentences]
    entries = _run_stage("parse", items, adapter, _parse_batch, lang, cache, stats, _check_block)
    return [parse_penman(e["output"]) for e in entries]


@dataclass(frozen=True)
class SourceSentence:
    id: str
    text: str
    language: str


@dataclass(frozen=True)
class PipelineRecord:
    id: str
    source_sentence: str
    source_language: str
    translated_sentence: str
    graph: AmrGraph
    timestamps: dict
    adapters: dict

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "source_sentence": self.source_sentence,
            "source_language": self.source_language,
            "translated_sentence": self.translated_sentence,
            "graph": serialize_penman(self.graph, indent=None),
            "timestamps": self.timestamps,
            "adapters": self.adapters,
        }


def read_sentences(path: str | Path, language: str) -> list[SourceSentence]:
    """One sentence per line, optionally ``id<TAB>sentence``; blank lines skipped.

    Lines without an id get their 1-based line number.
    """
    out = []
    text = Path(path).read_text(encoding="utf-8")
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if "\t" in line:
            sid, sentence = line.split("\t", 1)
        else:
            sid, sentence = str(n), line
        out.append(SourceSentence(sid.strip(), sentence.strip(), language))
    return out


def run_pipeline(
    corpus: Sequence[SourceSentence],
    translator: AdapterSpec,
    parser: AdapterSpec,
    cache_dir: str | Path | None = None,
    *,
    out_path: str | Path | None = None,
    stats: PipelineLog | None = None,
) -> list[PipelineRecord]:
    """Translate then parse ``corpus``; optionally write predictions.

    With ``out_path`` the graphs are written as an AMR corpus file and the
    full records as ``<out_path>.provenance.json``.
    """
    cache = Cache(cache_dir) if cache_dir is not None else None
    by_lang: dict[str, list[int]] = {}
    for k, s in enumerate(corpus):
        by_lang.setdefault(s.language, []).append(k)
    translated: list[dict | None] = [None] * len(corpus)
    for lang, idx in by_lang.items():
        items = [clean_sentence(corpus[k].text) for k in idx]
        for k, entry in zip(
            idx, _run_stage("translate", items, translator, _translate_batch, lang, cache, stats)
        ):
            translated[k] = entry
    english = [e["output"] for e in translated]
    parsed = _run_stage(
        "parse", [clean_sentence(s) for s in english], parser, _parse_batch, "en", cache, stats, _check_block
    )
    adapters = {"translator": translator.describe(), "parser": parser.describe()}
    records = [
        PipelineRecord(
            s.id,
            s.text,
            s.language,
            t["output"],
            parse_penman(p["output"]),
            {"translated": t["created"], "parsed": p["created"]},
            adapters,
        )
        for s, t, p in zip(corpus, translated, parsed)
    ]
    if out_path is not None:
        write_records(records, out_path)
    return records


def write_records(records: Sequence[PipelineRecord], out_path: str | Path) -> Path:
    """Write predictions and the JSON provenance sidecar; returns the sidecar path."""
    out_path = Path(out_path)
    write_corpus(
        [CorpusEntry(r.id, r.graph, r.translated_sentence) for r in records], out_path
    )
    sidecar = out_path.with_name(out_path.name + ".provenance.json")
    sidecar.write_text(
        json.dumps([r.as_dict() for r in records], indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    return sidecar
