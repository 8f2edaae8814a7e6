"""Zero-shot cross-lingual pipeline: per-EDU translation, rule-based edits,
topic-aware two-part parsing, and back-mapping onto the source-language EDUs.

Translation goes through a pluggable adapter (HTTP service, dictionary file,
or identity pass-through) with an append-only file cache so repeated runs
are cheap and reproducible.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path

import requests

from .errors import AdapterError, AlignmentError
from .parser import ParserModel, label_relations, parse_structure
from .treebank import Arc, DiscourseTree, Edu, build_tree

DEFAULT_TOPIC_CUES = ("该文", "本文", "该研究", "本研究", "该方法")
RELATIVE_PRONOUNS = frozenset(
    {"that", "which", "who", "whom", "whose", "where", "when"}
)
EMPTY_TOKEN = "<EMPTY>"

_TERMINAL_PUNCT = ".。"


def text_ends_with_period(text: str) -> bool:
    return text.rstrip().endswith((".", "。"))


@dataclass(frozen=True)
class PipelineConfig:
    adapter: str = "identity"  # identity | dict | http
    endpoint: str = ""
    dict_file: str = ""
    api_key_env: str = ""
    cache_path: str = ""
    enable_punct_fix: bool = False  # all toggles off = direct parsing
    enable_pronoun_fix: bool = False
    enable_two_part: bool = False
    topic_cues: tuple[str, ...] = DEFAULT_TOPIC_CUES
    source_lang: str = "zh"
    target_lang: str = "en"


# ---------------------------------------------------------------------------
# Translation adapters


class IdentityAdapter:
    """Pass-through adapter (testing, or already-translated corpora)."""

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        return text


class DictionaryAdapter:
    """Exact-match lookup over ``source<TAB>target`` lines."""

    def __init__(self, entries: dict[str, str]):
        self.entries = dict(entries)

    @classmethod
    def from_file(cls, path) -> "DictionaryAdapter":
        entries = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            source, sep, target = line.partition("\t")
            if not sep:
                raise AlignmentError(f"bad dictionary line (no tab): {line!r}")
            entries[source] = target
        return cls(entries)

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        if text not in self.entries:
            raise KeyError(f"no dictionary entry for {text!r}")
        return self.entries[text]


class HttpAdapter:
    """JSON-over-HTTP translation client with retry and exponential backoff."""

    def __init__(self, endpoint: str, api_key_env: str = "", timeout: float = 10.0,
                 max_retries: int = 3, backoff: float = 0.5):
        self.endpoint = endpoint
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff = backoff

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        payload = {"q": text, "source": source_lang, "target": target_lang}
        if self.api_key_env:
            payload["api_key"] = os.environ.get(self.api_key_env, "")
        last_error: Exception | None = None
        for attempt in range(self.max_retries):
            try:
                resp = requests.post(self.endpoint, json=payload, timeout=self.timeout)
                if resp.status_code >= 500:
                    raise requests.HTTPError(f"server error {resp.status_code}")
                resp.raise_for_status()
                return str(resp.json().get("translatedText", ""))
            except requests.RequestException as exc:
                last_error = exc
                if attempt + 1 < self.max_retries:
                    time.sleep(self.backoff * 2**attempt)
        raise RuntimeError(f"translation request failed after "
                           f"{self.max_retries} attempts: {last_error}")


class TranslationCache:
    """Append-only ``source<TAB>target`` file; single writer, many readers."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._entries: dict[str, str] = {}
        if self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                source, sep, target = line.partition("\t")
                if sep:
                    self._entries[source] = target

    @staticmethod
    def _norm(text: str) -> str:
        return text.replace("\t", " ").replace("\n", " ")

    def get(self, text: str) -> str | None:
        return self._entries.get(self._norm(text))

    def put(self, text: str, translation: str) -> None:
        key, value = self._norm(text), self._norm(translation)
        with self._lock:
            if key in self._entries:
                return
            self._entries[key] = value
            with open(self.path, "a", encoding="utf-8", newline="\n") as fh:
                fh.write(f"{key}\t{value}\n")


class CachingAdapter:
    def __init__(self, inner, cache: TranslationCache):
        self.inner = inner
        self.cache = cache

    def translate(self, text: str, source_lang: str, target_lang: str) -> str:
        hit = self.cache.get(text)
        if hit is not None:
            return hit
        result = self.inner.translate(text, source_lang, target_lang)
        self.cache.put(text, result)
        return result


def build_adapter(config: PipelineConfig):
    if config.adapter == "identity":
        adapter = IdentityAdapter()
    elif config.adapter == "dict":
        adapter = DictionaryAdapter.from_file(config.dict_file)
    elif config.adapter == "http":
        adapter = HttpAdapter(config.endpoint, api_key_env=config.api_key_env)
    else:
        raise ValueError(f"unknown adapter {config.adapter!r}")
    if config.cache_path:
        adapter = CachingAdapter(adapter, TranslationCache(config.cache_path))
    return adapter


# ---------------------------------------------------------------------------
# Pipeline stages


def translate_edus(doc: DiscourseTree, adapter, source_lang: str = "zh",
                   target_lang: str = "en") -> list[Edu]:
    """One translated EDU per source EDU; ids and sentence indices preserved."""
    out = []
    for edu in doc.real_edus():
        try:
            text = adapter.translate(edu.text, source_lang, target_lang)
        except Exception as exc:
            raise AdapterError(edu.id, str(exc)) from exc
        if not text or not text.strip():
            raise AdapterError(edu.id, "adapter returned an empty translation")
        out.append(
            Edu(
                id=edu.id,
                text=text,
                sentence_index=edu.sentence_index,
                ends_with_period=text_ends_with_period(text),
            )
        )
    return out


def _replace_terminal_periods(text: str) -> str:
    """Swap the trailing run of ASCII periods for commas; keep internal ones."""
    end = len(text.rstrip())
    start = end
    while start > 0 and text[start - 1] == ".":
        start -= 1
    if start == end:
        return text
    return text[:start] + "," * (end - start) + text[end:]


def adjust_punctuation(english_edus, chinese_edus) -> list[Edu]:
    """A translated EDU may end with a period only if its source EDU does."""
    if len(english_edus) != len(chinese_edus):
        raise AlignmentError(
            f"{len(english_edus)} translated EDUs vs {len(chinese_edus)} source EDUs"
        )
    out = []
    for eng, zh in zip(english_edus, chinese_edus):
        if eng.id != zh.id:
            raise AlignmentError(f"EDU id mismatch: {eng.id} vs {zh.id}")
        if zh.ends_with_period:
            out.append(eng)
            continue
        text = _replace_terminal_periods(eng.text)
        out.append(
            Edu(eng.id, text, eng.sentence_index, text_ends_with_period(text))
        )
    return out


def _split_tail_word(text: str) -> tuple[str, str, str]:
    """(text without last word, last word core, its trailing punctuation)."""
    stripped = text.rstrip()
    cut = stripped.rfind(" ") + 1
    chunk = stripped[cut:]
    core = chunk.rstrip(".,;:!?\"')]}")
    return stripped[:cut].rstrip(), core, chunk[len(core):]


def adjust_relative_pronouns(english_edus) -> list[Edu]:
    """Move a trailing relative pronoun onto the EDU it introduces.

    Applies within a source sentence only.  An EDU emptied by the move keeps
    a sentinel token so the source/target EDU alignment stays one-to-one.
    """
    edus = list(english_edus)
    for _ in range(sum(len(e.text.split()) for e in edus) * max(len(edus), 1) + 1):
        changed = False
        for i in range(len(edus) - 1):
            left, right = edus[i], edus[i + 1]
            if left.sentence_index != right.sentence_index:
                continue
            if left.text == EMPTY_TOKEN:
                continue
            remainder, core, trail = _split_tail_word(left.text)
            if core.lower() not in RELATIVE_PRONOUNS:
                continue
            new_left = (remainder + trail) if remainder else (trail or EMPTY_TOKEN)
            right_text = right.text
            new_right = core if right_text == EMPTY_TOKEN else f"{core} {right_text}"
            edus[i] = Edu(left.id, new_left, left.sentence_index,
                          text_ends_with_period(new_left))
            edus[i + 1] = Edu(right.id, new_right, right.sentence_index,
                              text_ends_with_period(new_right))
            changed = True
        if not changed:
            break
    return edus


def detect_topic_sentence(doc: DiscourseTree, topic_cues=DEFAULT_TOPIC_CUES) -> int | None:
    """Index of the first sentence whose first EDU starts with a cue word."""
    seen = set()
    for edu in doc.real_edus():
        if edu.sentence_index in seen:
            continue
        seen.add(edu.sentence_index)
        text = edu.text.lstrip()
        if any(text.startswith(cue) for cue in topic_cues):
            return edu.sentence_index
    return None


def two_part_parse(edus, split_sentence: int | None, model: ParserModel) -> DiscourseTree:
    """Parse the text before and from the topic sentence separately, then join.

    The first EDU of the latter part is pinned as the document root; the
    former part's root is re-headed onto it.  Degenerate splits fall back to
    a whole-document parse.
    """
    real = [e for e in edus if e.id != 0]
    if split_sentence is None:
        return parse_structure(real, model)
    split_pos = next(
        (i for i, e in enumerate(real) if e.sentence_index == split_sentence), None
    )
    if not split_pos:  # missing sentence, or split at the first EDU
        return parse_structure(real, model)

    part_a, part_b = real[:split_pos], real[split_pos:]

    def renumber(part):
        return [
            Edu(i + 1, e.text, e.sentence_index, e.ends_with_period)
            for i, e in enumerate(part)
        ]

    def to_global(local_id: int, part) -> int:
        return 0 if local_id == 0 else part[local_id - 1].id

    tree_a = parse_structure(renumber(part_a), model)
    tree_b = parse_structure(renumber(part_b), model, forced_root=1)
    topic_id = part_b[0].id

    arcs = []
    for arc in tree_a.arcs:
        head = to_global(arc.head, part_a)
        if head == 0:  # part A's root hangs off the topic EDU
            head = topic_id
        arcs.append(Arc(head, to_global(arc.dependent, part_a)))
    for arc in tree_b.arcs:
        arcs.append(Arc(to_global(arc.head, part_b), to_global(arc.dependent, part_b)))
    arcs.sort(key=lambda a: a.dependent)
    return build_tree("", real).with_arcs(arcs)


def run_pipeline(chinese_doc: DiscourseTree, config: PipelineConfig,
                 model: ParserModel, adapter=None) -> DiscourseTree:
    """Translate, apply the enabled edits, parse, and map back by EDU id."""
    if adapter is None:
        adapter = build_adapter(config)
    english = translate_edus(chinese_doc, adapter,
                             config.source_lang, config.target_lang)
    if config.enable_punct_fix:
        english = adjust_punctuation(english, list(chinese_doc.real_edus()))
    if config.enable_pronoun_fix:
        english = adjust_relative_pronouns(english)

    topic = None
    if config.enable_two_part:
        topic = detect_topic_sentence(chinese_doc, config.topic_cues)
    if topic is not None:
        structure = two_part_parse(english, topic, model)
    else:
        structure = parse_structure(english, model)
    labeled = label_relations(structure, model)
    return build_tree(chinese_doc.doc_id, chinese_doc.real_edus(), labeled.arcs)
