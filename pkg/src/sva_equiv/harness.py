"""Batch evaluation: ingest rows, check every candidate, aggregate a report."""

from __future__ import annotations

import csv
import json
import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor, as_completed
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass, field

from .errors import CheckSyntaxError, ClassifyError, SchemaError
from .metrics import TaskOutcome, pass_at_k_table
from .normalize import normalize
from .pec import CheckConfig, Verdict, VerdictKind, check_equivalence
from .rewards import rlvf_reward, rwopd_weight
from .tcl import TclClass, classify

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
DENOMINATORS = ("all", "supported")
UNCLASSIFIED = "unclassified"


@dataclass(frozen=True)
class EvalRow:
    id: str
    reference_sva: str
    candidates: tuple
    nl: str | None = None
    rtl_context: str | None = None


def _row_from_obj(obj, line: int) -> EvalRow:
    if not isinstance(obj, dict):
        raise SchemaError(line, "row is not a JSON object")
    rid = obj.get("id")
    if rid is None or (isinstance(rid, str) and not rid.strip()):
        raise SchemaError(line, "missing id")
    ref = obj.get("reference_sva")
    if not isinstance(ref, str) or not ref.strip():
        raise SchemaError(line, "missing reference_sva")
    cands = obj.get("candidates")
    if not isinstance(cands, list) or not cands or not all(isinstance(c, str) for c in cands):
        raise SchemaError(line, "candidates must be a non-empty list of strings")
    for key in ("nl", "rtl_context"):
        if obj.get(key) is not None and not isinstance(obj[key], str):
            raise SchemaError(line, f"{key} must be a string")
    return EvalRow(str(rid), ref, tuple(cands), obj.get("nl"), obj.get("rtl_context"))


def ingest(path, errors: list | None = None) -> list:
    """Read EvalRows from a JSONL file.

    Malformed lines become SchemaError entries in ``errors`` (or log warnings)
    and are skipped. A missing or unreadable file raises OSError.
    """
    rows, seen = [], set()
    problems = errors if errors is not None else []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                problems.append(SchemaError(lineno, f"invalid JSON: {exc.msg}"))
                continue
            try:
                row = _row_from_obj(obj, lineno)
            except SchemaError as exc:
                problems.append(exc)
                continue
            if row.id in seen:
                problems.append(SchemaError(lineno, f"duplicate id {row.id!r}"))
                continue
            seen.add(row.id)
            rows.append(row)
    if errors is None:
        for p in problems:
            log.warning("%s: %s", path, p)
    if not rows:
        log.warning("%s: no rows ingested", path)
    return rows


@dataclass
class CandidateResult:
    index: int
    verdict: Verdict | None
    syntax_ok: bool
    reward_distill: float
    reward_rl: float
    wall_time: float
    error: str = ""
    fired: tuple = ()  # (rule name, count) from the pec-profile pass over the candidate

    @property
    def label(self) -> str:
        if self.verdict is not None:
            return str(self.verdict)
        return "SYNTAX_ERROR" if self.error.startswith(("candidate", "reference")) else "ERROR"

    @property
    def kind(self) -> VerdictKind | None:
        return self.verdict.kind if self.verdict is not None else None


@dataclass
class RowResult:
    id: str
    reference_class: TclClass | None
    candidates: list = field(default_factory=list)

    @property
    def first(self) -> CandidateResult:
        return self.candidates[0]

    @property
    def class_name(self) -> str:
        return str(self.reference_class) if self.reference_class is not None else UNCLASSIFIED


def check_candidate(index: int, candidate: str, reference: str, cfg: CheckConfig, use_normalize: bool = True) -> CandidateResult:
    """Check one candidate; never raises."""
    start = time.monotonic()
    fired = ()
    try:
        if use_normalize:
            _, rep = normalize(candidate, "pec")
            fired = tuple((str(r), n) for r, n in rep.fired)
        verdict = check_equivalence(candidate, reference, cfg, normalize=use_normalize)
        syntax_ok, error = True, ""
    except CheckSyntaxError as exc:
        verdict, syntax_ok, error = None, False, str(exc)
    except Exception as exc:  # crash isolation: any failure is recorded, not raised
        verdict, syntax_ok, error = None, False, f"{type(exc).__name__}: {exc}"
    wall = time.monotonic() - start
    distill = rwopd_weight(verdict, syntax_ok) if verdict is not None else 0.0
    rl = rlvf_reward(verdict, syntax_ok) if verdict is not None else 0.0
    return CandidateResult(index, verdict, syntax_ok, distill, rl, wall, error, fired)


def _task(args):
    key, cand, ref, cfg, use_normalize = args
    return key, check_candidate(key[1], cand, ref, cfg, use_normalize)


def _run_pool(tasks, workers: int) -> dict:
    """Run tasks on a process pool; a dead worker costs only its own task.

    Tasks left unfinished by a broken pool are retried one per fresh
    single-worker pool, and a task that kills that worker too is recorded as
    a crash.
    """
    done = {}
    try:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_task, t) for t in tasks]
            for fut in as_completed(futures):
                try:
                    key, res = fut.result()
                except BrokenProcessPool:
                    continue
                done[key] = res
    except BrokenProcessPool:
        pass
    pending = [t for t in tasks if t[0] not in done]
    if pending:
        log.warning("worker pool broke; retrying %d unfinished task(s) in isolation", len(pending))
    for t in pending:
        try:
            with ProcessPoolExecutor(max_workers=1) as pool:
                key, res = pool.submit(_task, t).result()
            done[key] = res
        except BrokenProcessPool:
            done[t[0]] = CandidateResult(t[0][1], None, False, 0.0, 0.0, 0.0, "worker crashed")
    return done


def _reference_class(ref: str):
    try:
        return classify(ref)
    except ClassifyError:
        return None


def run_batch(rows, cfg: CheckConfig | None = None, workers: int = 1, use_normalize: bool = True, self_check: bool = False) -> list:
    """Check every (row, candidate) pair once; results sorted by (id, candidate index).

    ``self_check`` replaces each row's candidates with its own reference.
    """
    if workers < 1:
        raise ValueError("workers must be at least 1")
    cfg = cfg or CheckConfig()
    rows = list(rows)
    tasks = []
    for r_i, row in enumerate(rows):
        cands = (row.reference_sva,) if self_check else row.candidates
        for c_i, cand in enumerate(cands):
            tasks.append(((r_i, c_i), cand, row.reference_sva, cfg, use_normalize))
    if workers == 1:
        done = dict(_task(t) for t in tasks)
    else:
        done = _run_pool(tasks, workers)
    results = []
    for r_i, row in enumerate(rows):
        n = 1 if self_check else len(row.candidates)
        cands = [done[(r_i, c_i)] for c_i in range(n)]
        results.append(RowResult(row.id, _reference_class(row.reference_sva), cands))
    results.sort(key=lambda r: r.id)
    return results


# -- report -----------------------------------------------------------------


def _frac(num: int, den: int) -> float:
    return num / den if den else 0.0


def _is_strict(c: CandidateResult) -> bool:
    return c.kind is VerdictKind.EQUIVALENT


def _is_relaxed(c: CandidateResult) -> bool:
    return c.kind is not None and (c.kind is VerdictKind.EQUIVALENT or c.kind.one_sided)


def _is_abstention(c: CandidateResult) -> bool:
    return c.kind is VerdictKind.UNSUPPORTED


@dataclass
class EvalReport:
    rows: int
    strict_func_at_1: float
    relaxed_func_at_1: float
    denominator: str
    func_at_1: dict  # denominator -> {"strict", "relaxed", "denominator_rows"}
    abstentions: int
    abstention_reasons: dict
    syntax_errors: int
    verdict_counts: dict
    per_class: dict
    pass_at_k: dict
    rule_stats: dict
    mean_reward_distill: float
    mean_reward_rl: float
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "rows": self.rows,
            "denominator": self.denominator,
            "strict_func_at_1": self.strict_func_at_1,
            "relaxed_func_at_1": self.relaxed_func_at_1,
            "func_at_1": self.func_at_1,
            "abstentions": self.abstentions,
            "abstention_reasons": self.abstention_reasons,
            "syntax_errors": self.syntax_errors,
            "verdict_counts": self.verdict_counts,
            "per_class": self.per_class,
            "pass_at_k": self.pass_at_k,
            "rule_stats": self.rule_stats,
            "mean_reward_distill": self.mean_reward_distill,
            "mean_reward_rl": self.mean_reward_rl,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _func_block(rows) -> dict:
    total = len(rows)
    strict = sum(_is_strict(r.first) for r in rows)
    relaxed = sum(_is_relaxed(r.first) for r in rows)
    abst = sum(_is_abstention(r.first) for r in rows)
    supported = total - abst
    return {
        "all": {"strict": _frac(strict, total), "relaxed": _frac(relaxed, total), "denominator_rows": total},
        "supported": {
            "strict": _frac(strict, supported),
            "relaxed": _frac(relaxed, supported),
            "denominator_rows": supported,
        },
        "counts": {"rows": total, "strict": strict, "relaxed": relaxed, "abstentions": abst},
    }


def report(results, denominator: str = "all", ks=(1, 5, 10), replicates: int = 10_000, seed: int = 0) -> EvalReport:
    """Aggregate row results; strict counts EQUIVALENT, relaxed adds one-sided verdicts."""
    results = list(results)
    if not results:
        raise ValueError("report needs at least one row result")
    if denominator not in DENOMINATORS:
        raise ValueError(f"denominator must be one of {DENOMINATORS}")
    block = _func_block(results)
    head = block[denominator]

    per_class = {}
    names = [str(c) for c in TclClass] + [UNCLASSIFIED]
    for name in names:
        group = [r for r in results if r.class_name == name]
        if not group and name == UNCLASSIFIED:
            continue
        b = _func_block(group)
        per_class[name] = {
            "rows": len(group),
            "strict": b[denominator]["strict"],
            "relaxed": b[denominator]["relaxed"],
            "abstentions": b["counts"]["abstentions"],
            "strict_count": b["counts"]["strict"],
            "relaxed_count": b["counts"]["relaxed"],
        }

    firsts = [r.first for r in results]
    reasons = Counter(c.verdict.reason for c in firsts if _is_abstention(c))
    all_cands = [c for r in results for c in r.candidates]
    verdicts = Counter(c.label for c in all_cands)

    pk = {}
    if any(len(r.candidates) > 1 for r in results):
        strict_tasks = [TaskOutcome(r.id, len(r.candidates), sum(_is_strict(c) for c in r.candidates)) for r in results]
        relaxed_tasks = [TaskOutcome(r.id, len(r.candidates), sum(_is_relaxed(c) for c in r.candidates)) for r in results]
        pk = {
            "strict": pass_at_k_table(strict_tasks, ks, replicates, seed),
            "relaxed": pass_at_k_table(relaxed_tasks, ks, replicates, seed),
        }

    rule_counts: Counter = Counter()
    fired_cands = 0
    for c in all_cands:
        if c.fired:
            fired_cands += 1
        for rule, n in c.fired:
            rule_counts[rule] += n
    rule_stats = {
        "profile": "pec",
        "candidates": len(all_cands),
        "any_fired_fraction": _frac(fired_cands, len(all_cands)),
        "counts": dict(sorted(rule_counts.items(), key=lambda kv: int(kv[0][1:]))),
    }

    return EvalReport(
        rows=len(results),
        strict_func_at_1=head["strict"],
        relaxed_func_at_1=head["relaxed"],
        denominator=denominator,
        func_at_1={k: block[k] for k in DENOMINATORS},
        abstentions=block["counts"]["abstentions"],
        abstention_reasons=dict(sorted(reasons.items())),
        syntax_errors=sum(not c.syntax_ok for c in firsts),
        verdict_counts=dict(sorted(verdicts.items())),
        per_class=per_class,
        pass_at_k=pk,
        rule_stats=rule_stats,
        mean_reward_distill=sum(c.reward_distill for c in all_cands) / len(all_cands),
        mean_reward_rl=sum(c.reward_rl for c in all_cands) / len(all_cands),
    )


CSV_FIELDS = (
    "id", "candidate", "reference_class", "verdict", "reason", "syntax_ok",
    "reward_distill", "reward_rl", "wall_time", "rules_fired", "error",
)


def write_csv(results, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_FIELDS)
        for r in results:
            for c in r.candidates:
                w.writerow(
                    [
                        r.id,
                        c.index,
                        r.class_name,
                        c.kind.value if c.kind else c.label,
                        c.verdict.reason if c.verdict is not None and c.verdict.reason else "",
                        int(c.syntax_ok),
                        c.reward_distill,
                        c.reward_rl,
                        f"{c.wall_time:.4f}",
                        ";".join(f"{rule}x{n}" for rule, n in c.fired),
                        c.error,
                    ]
                )


def summary_text(rep: EvalReport) -> str:
    lines = [
        f"rows: {rep.rows}   denominator: {rep.denominator}",
        "",
        f"{'':<18}{'strict':>10}{'relaxed':>10}{'rows':>8}",
    ]
    for den in DENOMINATORS:
        b = rep.func_at_1[den]
        lines.append(f"{'Func@1 ' + den:<18}{b['strict']:>10.3f}{b['relaxed']:>10.3f}{b['denominator_rows']:>8}")
    lines.append("")
    lines.append(f"{'class':<18}{'strict':>10}{'relaxed':>10}{'rows':>8}{'abstain':>9}")
    for name, b in rep.per_class.items():
        lines.append(f"{name:<18}{b['strict']:>10.3f}{b['relaxed']:>10.3f}{b['rows']:>8}{b['abstentions']:>9}")
    lines.append("")
    reasons = ", ".join(f"{k}={v}" for k, v in rep.abstention_reasons.items()) or "none"
    lines.append(f"abstentions: {rep.abstentions} ({reasons})   syntax errors: {rep.syntax_errors}")
    lines.append("verdicts: " + ", ".join(f"{k}={v}" for k, v in rep.verdict_counts.items()))
    lines.append(f"mean reward: distill {rep.mean_reward_distill:.3f}   rl {rep.mean_reward_rl:.3f}")
    for mode, table in rep.pass_at_k.items():
        for name, v in table.items():
            lines.append(f"{mode:<8}{name:<9}{v['estimate']:.3f}  [{v['ci_low']:.3f}, {v['ci_high']:.3f}]")
    return "\n".join(lines) + "\n"
