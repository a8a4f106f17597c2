"""Satisfiability backends: an embedded CDCL solver and an external driver.

The embedded solver is a conflict-driven clause-learning procedure with
two-watched-literal propagation, first-UIP learning with basic clause
minimization, activity-based decisions with phase saving, Luby restarts,
and periodic forgetting of long inactive learnt clauses.  It is
deterministic for a fixed seed.

An external solver process can be used instead; it must accept a DIMACS file
argument and answer with ``s SATISFIABLE``/``s UNSATISFIABLE`` plus ``v``
lines (exit codes 10/20 are also honored).

Every satisfiable answer is re-verified against the clause set before being
returned, regardless of backend.
"""

from __future__ import annotations

import heapq
import os
import random
import subprocess
import tempfile
import time
from dataclasses import dataclass

from .prop import Cnf
from .textio import format_dimacs

SOLVER_ENV_VAR = "LTLSKETCH_SOLVER"


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolveOptions:
    seed: int = 0
    timeout: float | None = None
    external: str | None = None


@dataclass(frozen=True)
class SolveResult:
    status: str  # 'sat' | 'unsat' | 'timeout'
    model: dict[int, bool] | None = None

    @property
    def is_sat(self) -> bool:
        return self.status == "sat"


def solve(cnf: Cnf, options: SolveOptions = SolveOptions()) -> SolveResult:
    """Decide the clause set; models are projected to catalog variables."""
    external = options.external or os.environ.get(SOLVER_ENV_VAR)
    if external:
        result = _solve_external(external, cnf, options.timeout)
    else:
        result = _Cdcl(cnf.num_vars, cnf.clauses, options.seed, options.timeout).run()
    if result.status == "sat":
        _verify_model(cnf, result.model)
        projected = {v: result.model.get(v, False) for v in range(1, cnf.watermark + 1)}
        return SolveResult("sat", projected)
    return result


def _verify_model(cnf: Cnf, model: dict[int, bool]) -> None:
    for clause in cnf.clauses:
        if not any(model.get(abs(lit), False) == (lit > 0) for lit in clause):
            raise SolverError(f"backend returned a model violating clause {clause}")


def _luby(i: int) -> int:
    """i-th element (1-based) of the Luby restart sequence."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) // 2
        seq -= 1
        i = i % size
    return 1 << seq


# ---------------------------------------------------------------------------
# Embedded CDCL


class _Cdcl:
    def __init__(self, num_vars: int, clauses, seed: int, timeout: float | None):
        nv = num_vars
        self.nv = nv
        self.assign = [0] * (nv + 1)        # var -> -1 / 0 / +1
        self.lit_val = [0] * (2 * nv + 1)   # literal (offset nv) -> -1 / 0 / +1
        self.level = [0] * (nv + 1)
        self.reason: list[list[int] | None] = [None] * (nv + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: list[list[list[int]]] = [[] for _ in range(2 * nv + 1)]
        self.activity = [0.0] * (nv + 1)
        self.var_inc = 1.0
        self.phase = [False] * (nv + 1)
        self.seen = bytearray(nv + 1)
        self.problem: list[list[int]] = []
        self.learnts: list[list[int]] = []
        self.ok = True
        self.deadline = None if timeout is None else time.monotonic() + timeout
        rng = random.Random(seed)
        order = list(range(1, nv + 1))
        rng.shuffle(order)
        self.tiebreak = [0] * (nv + 1)
        for pos, v in enumerate(order):
            self.tiebreak[v] = pos
        self.heap = [(0.0, self.tiebreak[v], v) for v in order]
        heapq.heapify(self.heap)
        for clause in clauses:
            if not self._add_clause(list(clause)):
                self.ok = False
                break

    def _enqueue(self, lit: int, reason: list[int] | None) -> bool:
        nv = self.nv
        cur = self.lit_val[lit + nv]
        if cur:
            return cur == 1
        v = lit if lit > 0 else -lit
        self.assign[v] = 1 if lit > 0 else -1
        self.lit_val[lit + nv] = 1
        self.lit_val[nv - lit] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)
        return True

    def _watch(self, clause: list[int]) -> None:
        nv = self.nv
        self.watches[clause[0] + nv].append((clause[1], clause))
        self.watches[clause[1] + nv].append((clause[0], clause))

    def _add_clause(self, lits: list[int]) -> bool:
        lits = sorted(set(lits), key=abs)
        for lit in lits:
            if -lit in lits:
                return True
        if not lits:
            return False
        if len(lits) == 1:
            return self._enqueue(lits[0], None)
        self.problem.append(lits)
        self._watch(lits)
        return True

    def _propagate(self) -> list[int] | None:
        # Hottest loop in the solver: blocking literals skip most visits,
        # and implications are enqueued inline.
        nv = self.nv
        lit_val = self.lit_val
        watches = self.watches
        trail = self.trail
        assign = self.assign
        level = self.level
        reason = self.reason
        cur_level = len(self.trail_lim)
        while self.qhead < len(trail):
            lit = trail[self.qhead]
            self.qhead += 1
            fl = -lit
            ws = watches[fl + nv]
            i = 0
            end = len(ws)
            while i < end:
                blocker, c = ws[i]
                if lit_val[blocker + nv] == 1:
                    i += 1
                    continue
                if c[0] == fl:
                    c[0] = c[1]
                    c[1] = fl
                first = c[0]
                fval = lit_val[first + nv]
                if fval == 1:
                    ws[i] = (first, c)
                    i += 1
                    continue
                moved = False
                k = 2
                clen = len(c)
                while k < clen:
                    ck = c[k]
                    if lit_val[ck + nv] >= 0:
                        c[1] = ck
                        c[k] = fl
                        watches[ck + nv].append((first, c))
                        end -= 1
                        ws[i] = ws[end]
                        ws.pop()
                        moved = True
                        break
                    k += 1
                if moved:
                    continue
                if fval == -1:
                    return c
                v = first if first > 0 else -first
                assign[v] = 1 if first > 0 else -1
                lit_val[first + nv] = 1
                lit_val[nv - first] = -1
                level[v] = cur_level
                reason[v] = c
                trail.append(first)
                i += 1
        return None

    def _bump(self, v: int) -> None:
        act = self.activity[v] + self.var_inc
        self.activity[v] = act
        if act > 1e100:
            scale = 1e-100
            for u in range(1, self.nv + 1):
                self.activity[u] *= scale
            self.var_inc *= scale
            self.heap = [
                (-self.activity[u], self.tiebreak[u], u)
                for u in range(1, self.nv + 1)
                if self.assign[u] == 0
            ]
            heapq.heapify(self.heap)
        else:
            heapq.heappush(self.heap, (-act, self.tiebreak[v], v))

    def _analyze(self, conflict: list[int]) -> tuple[list[int], int]:
        level = self.level
        reason = self.reason
        trail = self.trail
        seen = self.seen
        cur = len(self.trail_lim)
        learnt: list[int] = [0]
        touched: list[int] = []
        counter = 0
        idx = len(trail) - 1
        p = 0
        clause = conflict
        while True:
            for q in (clause[1:] if p else clause):
                v = q if q > 0 else -q
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    touched.append(v)
                    self._bump(v)
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[abs(trail[idx])]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p if p > 0 else -p
            seen[v] = 0
            counter -= 1
            if counter == 0:
                break
            clause = reason[v]
            if clause[0] != p:
                clause = [p] + [q for q in clause if q != p]
        learnt[0] = -p
        # Basic minimization: drop literals whose reason lies entirely
        # inside the remaining clause (or at level 0).
        kept = [learnt[0]]
        for q in learnt[1:]:
            r = reason[q if q > 0 else -q]
            if r is None:
                kept.append(q)
                continue
            for other in r:
                ov = other if other > 0 else -other
                if ov != (q if q > 0 else -q) and not seen[ov] and level[ov] > 0:
                    kept.append(q)
                    break
        for v in touched:
            seen[v] = 0
        if len(kept) == 1:
            return kept, 0
        top = max(range(1, len(kept)), key=lambda k: level[abs(kept[k])])
        kept[1], kept[top] = kept[top], kept[1]
        return kept, level[abs(kept[1])]

    def _backtrack(self, target: int) -> None:
        nv = self.nv
        while len(self.trail_lim) > target:
            mark = self.trail_lim.pop()
            for lit in self.trail[mark:]:
                v = lit if lit > 0 else -lit
                self.phase[v] = lit > 0
                self.assign[v] = 0
                self.lit_val[lit + nv] = 0
                self.lit_val[nv - lit] = 0
                self.reason[v] = None
            del self.trail[mark:]
        self.qhead = len(self.trail)

    def _decide(self) -> int | None:
        # Unassigned vars are not re-inserted on backtrack; when the queue
        # of bumped entries runs dry it is rebuilt from scratch.
        heappop = heapq.heappop
        while True:
            while self.heap:
                act, _, v = heappop(self.heap)
                if self.assign[v] == 0 and -act == self.activity[v]:
                    return v if self.phase[v] else -v
            fresh = [
                (-self.activity[v], self.tiebreak[v], v)
                for v in range(1, self.nv + 1)
                if self.assign[v] == 0
            ]
            if not fresh:
                return None
            heapq.heapify(fresh)
            self.heap = fresh

    def _reduce_db(self) -> None:
        """Forget the older half of long learnt clauses.

        Only called with propagation quiesced at decision level 0, where
        watch lists can be rebuilt safely.
        """
        locked = {
            id(self.reason[abs(lit)])
            for lit in self.trail
            if self.reason[abs(lit)] is not None
        }
        keep = [c for c in self.learnts if len(c) <= 4 or id(c) in locked]
        rest = [c for c in self.learnts if len(c) > 4 and id(c) not in locked]
        keep.extend(rest[len(rest) // 2:])
        self.learnts = keep
        nv = self.nv
        lit_val = self.lit_val
        self.watches = [[] for _ in range(2 * nv + 1)]
        for group in (self.problem, self.learnts):
            alive = []
            for c in group:
                if any(lit_val[lit + nv] == 1 for lit in c):
                    continue  # permanently satisfied at level 0
                # Quiesced level 0 leaves every live clause with at least two
                # unassigned literals; move them to the watched positions.
                free = [lit for lit in c if lit_val[lit + nv] == 0]
                falsified = [lit for lit in c if lit_val[lit + nv] == -1]
                c[:] = free + falsified
                self._watch(c)
                alive.append(c)
            group[:] = alive

    def run(self) -> SolveResult:
        if not self.ok:
            return SolveResult("unsat")
        conflicts_total = 0
        restarts = 0
        budget = 100 * _luby(1)
        max_learnts = 4000
        reduce_pending = False
        check_counter = 0
        while True:
            check_counter += 1
            if self.deadline is not None and check_counter % 64 == 1:
                if time.monotonic() > self.deadline:
                    return SolveResult("timeout")
            conflict = self._propagate()
            if conflict is not None:
                if not self.trail_lim:
                    return SolveResult("unsat")
                conflicts_total += 1
                budget -= 1
                learnt, back = self._analyze(conflict)
                self._backtrack(back)
                if len(learnt) > 1:
                    self.learnts.append(learnt)
                    self._watch(learnt)
                    self._enqueue(learnt[0], learnt)
                else:
                    if not self._enqueue(learnt[0], None):
                        return SolveResult("unsat")
                self.var_inc /= 0.95
                if len(self.learnts) > max_learnts:
                    reduce_pending = True
                if budget <= 0:
                    restarts += 1
                    budget = 100 * _luby(restarts + 1)
                    self._backtrack(0)
            else:
                if reduce_pending and not self.trail_lim:
                    self._reduce_db()
                    max_learnts = int(max_learnts * 1.3)
                    reduce_pending = False
                lit = self._decide()
                if lit is None:
                    model = {v: self.assign[v] > 0 for v in range(1, self.nv + 1)}
                    return SolveResult("sat", model)
                self.trail_lim.append(len(self.trail))
                self._enqueue(lit, None)


# ---------------------------------------------------------------------------
# External process backend


def _solve_external(path: str, cnf: Cnf, timeout: float | None) -> SolveResult:
    text = format_dimacs(cnf.num_vars, cnf.clauses)
    with tempfile.NamedTemporaryFile(
        "w", suffix=".cnf", prefix="ltlsketch_", delete=False
    ) as handle:
        handle.write(text)
        tmp = handle.name
    try:
        try:
            proc = subprocess.run(
                [path, tmp], capture_output=True, text=True, timeout=timeout
            )
        except subprocess.TimeoutExpired:
            return SolveResult("timeout")
        except OSError as exc:
            raise SolverError(f"cannot launch solver {path!r}: {exc}") from exc
        status = None
        lits: list[int] = []
        for line in proc.stdout.splitlines():
            if line.startswith("s "):
                verdict = line[2:].strip().upper()
                if verdict == "SATISFIABLE":
                    status = "sat"
                elif verdict == "UNSATISFIABLE":
                    status = "unsat"
            elif line.startswith("v "):
                lits.extend(int(tok) for tok in line[2:].split())
        if status is None:
            if proc.returncode == 10:
                status = "sat"
            elif proc.returncode == 20:
                status = "unsat"
            else:
                raise SolverError(
                    f"solver {path!r} produced no verdict "
                    f"(exit {proc.returncode}): {proc.stderr.strip()[:200]}"
                )
        if status == "unsat":
            return SolveResult("unsat")
        model = {abs(lit): lit > 0 for lit in lits if lit != 0}
        return SolveResult("sat", model)
    finally:
        os.unlink(tmp)
