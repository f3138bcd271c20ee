"""Deterministic solver for small concave quadratic programs over
complex variables:

    maximize   Re{b^H x} - x^H Q x           (Q Hermitian PSD)
    subject to Re{a_j^H x} + o_j >= 0        (affine)
               ||x||^2 <= p                  (optional ball)
               |x_i|^2 <= limit_i^2          (optional per-coordinate caps)

The problem is mapped to the real composite vector y = [Re x; Im x] and
solved with a log-barrier interior-point method: damped Newton centering,
barrier parameter raised by decades, a slack-variable feasibility phase
when no strictly interior start is available, and a projected-gradient
fallback with Dykstra projections if the Newton path stalls. All stage
arithmetic uses the merit h(y) + barrier(y) / t, which stays O(1) as t
grows, so the line search keeps full float resolution at every stage.
The whole path is deterministic; no randomness is used anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sca import AffineConstraint

__all__ = [
    "ConvexQPInstance",
    "SolveOptions",
    "SolveReport",
    "solve",
    "log_to_csv_text",
]


@dataclass
class ConvexQPInstance:
    Q: np.ndarray                 # (n, n) Hermitian PSD
    b: np.ndarray                 # (n,)
    affine: tuple = ()            # AffineConstraint items over x
    ball: float | None = None     # ||x||^2 <= ball
    caps: tuple = ()              # ((index, limit_sq), ...)

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=complex)
        self.b = np.asarray(self.b, dtype=complex)
        n = self.b.shape[0]
        if self.Q.shape != (n, n):
            raise ValueError("Q and b dimensions disagree")
        scale = float(np.abs(self.Q).max(initial=0.0))
        if not np.allclose(self.Q, self.Q.conj().T, atol=1e-10 * (1.0 + scale)):
            raise ValueError("Q must be Hermitian")
        if n:
            eigs = np.linalg.eigvalsh(self.Q)
            bound = float(np.abs(eigs).max(initial=0.0))
            if eigs[0] < -1e-9 * max(bound, 1e-30):
                raise ValueError(f"Q must be PSD; min eigenvalue {eigs[0]:.3e}")
        for con in self.affine:
            if con.a.shape != (n,):
                raise ValueError("affine constraint dimension mismatch")
        if self.ball is not None and self.ball <= 0.0:
            raise ValueError("ball radius^2 must be positive")
        seen = set()
        for idx, limit_sq in self.caps:
            if not 0 <= idx < n:
                raise ValueError(f"cap index {idx} out of range")
            if idx in seen:
                raise ValueError(f"duplicate cap on coordinate {idx}")
            if limit_sq <= 0.0:
                raise ValueError("cap limit^2 must be positive")
            seen.add(idx)

    @property
    def dim(self) -> int:
        return self.b.shape[0]


@dataclass
class SolveOptions:
    kkt_tol: float = 1e-8
    feas_tol: float = 1e-9
    max_iter: int = 200           # total Newton steps across both phases


@dataclass
class SolveReport:
    x: np.ndarray | None
    status: str                   # optimal | infeasible | max-iter
    kkt_residual: float
    iterations: int
    objective: float = math.nan   # Re{b^H x} - x^H Q x at the returned x
    ridge: float = 0.0            # regularization added to Q, raw scale
    log: list | None = None       # (phase, t, step, merit, decrement) rows


def log_to_csv_text(report: SolveReport) -> str:
    """Iterate log as CSV (iteration, merit, residual); residual is the
    Newton decrement of the step."""
    lines = ["iteration,merit,residual"]
    for i, (_phase, _t, _step, merit, dec) in enumerate(report.log or ()):
        lines.append(f"{i},{merit:.12g},{dec:.12g}")
    return "\n".join(lines) + "\n"


def _embed_matrix(Q: np.ndarray) -> np.ndarray:
    A, B = Q.real, Q.imag
    return np.block([[A, -B], [B, A]])


def _embed_vector(z: np.ndarray) -> np.ndarray:
    return np.concatenate([z.real, z.imag])


def _lift(y: np.ndarray) -> np.ndarray:
    n = y.shape[0] // 2
    return y[:n] + 1j * y[n:]


class _RealQP:
    """Real-composite form with normalized objective and constraints."""

    def __init__(self, inst: ConvexQPInstance):
        n = inst.dim
        self.n = n
        self.d = 2 * n
        P = _embed_matrix(inst.Q)
        q = _embed_vector(inst.b)
        self.obj_scale = max(np.abs(P).max(initial=0.0), np.abs(q).max(initial=0.0))
        if self.obj_scale <= 0.0:
            self.obj_scale = 1.0
        self.P = P / self.obj_scale
        self.q = q / self.obj_scale

        rows, offs = [], []
        self.trivially_infeasible = False
        for con in inst.affine:
            r = _embed_vector(con.a)
            nrm = float(np.linalg.norm(r))
            if nrm <= 0.0:
                if con.offset < 0.0:
                    self.trivially_infeasible = True
                continue
            rows.append(r / nrm)
            offs.append(con.offset / nrm)
        self.R = np.array(rows) if rows else np.zeros((0, self.d))
        self.o = np.array(offs) if offs else np.zeros(0)
        self.ball = inst.ball
        self.cap_pairs = tuple((i, i + n, limit_sq) for i, limit_sq in inst.caps)
        self.m = self.R.shape[0] + (1 if self.ball is not None else 0) + len(self.cap_pairs)

    # objective in normalized units (minimized)
    def h(self, y):
        return float(y @ self.P @ y - self.q @ y)

    def grad_h(self, y):
        return 2.0 * (self.P @ y) - self.q

    def slacks(self, y):
        parts = [self.R @ y + self.o] if self.R.shape[0] else [np.zeros(0)]
        if self.ball is not None:
            parts.append(np.array([self.ball - float(y @ y)]))
        for i, j, cap in self.cap_pairs:
            parts.append(np.array([cap - y[i] ** 2 - y[j] ** 2]))
        return np.concatenate(parts)

    def strictly_feasible(self, y, margin=0.0):
        s = self.slacks(y)
        return bool(s.size == 0 or s.min() > margin)

    def barrier(self, y):
        s = self.slacks(y)
        if s.size and s.min() <= 0.0:
            return math.inf
        return -float(np.log(s).sum()) if s.size else 0.0

    def slack_grads(self, y):
        """Constraint values and gradients d slack / d y as rows, in the
        same order slacks() uses."""
        d = self.d
        vals, grads = [], []
        if self.R.shape[0]:
            vals.append(self.R @ y + self.o)
            grads.append(self.R)
        if self.ball is not None:
            vals.append(np.array([self.ball - float(y @ y)]))
            grads.append(-2.0 * y[None, :])
        for i, j, cap in self.cap_pairs:
            vals.append(np.array([cap - y[i] ** 2 - y[j] ** 2]))
            g = np.zeros((1, d))
            g[0, i] = -2.0 * y[i]
            g[0, j] = -2.0 * y[j]
            grads.append(g)
        if not vals:
            return np.zeros(0), np.zeros((0, d))
        return np.concatenate(vals), np.vstack(grads)

    def curvature_kind(self, idx):
        """Which slack sits at flat index idx: ("affine", None),
        ("ball", None) or ("cap", (i, j))."""
        n_rows = self.R.shape[0]
        if idx < n_rows:
            return "affine", None
        idx -= n_rows
        if self.ball is not None:
            if idx == 0:
                return "ball", None
            idx -= 1
        i, j, _cap = self.cap_pairs[idx]
        return "cap", (i, j)

    def barrier_grad_hess(self, y):
        """Gradient and Hessian of -sum log slack at y."""
        d = self.d
        grad = np.zeros(d)
        hess = np.zeros((d, d))
        if self.R.shape[0]:
            s = self.R @ y + self.o
            inv = 1.0 / s
            grad -= self.R.T @ inv
            hess += (self.R * (inv ** 2)[:, None]).T @ self.R
        if self.ball is not None:
            s = self.ball - float(y @ y)
            grad += (2.0 / s) * y
            hess += (2.0 / s) * np.eye(d) + (4.0 / s ** 2) * np.outer(y, y)
        for i, j, cap in self.cap_pairs:
            s = cap - y[i] ** 2 - y[j] ** 2
            grad[i] += 2.0 * y[i] / s
            grad[j] += 2.0 * y[j] / s
            hess[i, i] += 2.0 / s + 4.0 * y[i] ** 2 / s ** 2
            hess[j, j] += 2.0 / s + 4.0 * y[j] ** 2 / s ** 2
            hess[i, j] += 4.0 * y[i] * y[j] / s ** 2
            hess[j, i] += 4.0 * y[i] * y[j] / s ** 2
        return grad, hess


def _chol_solve(H: np.ndarray, g: np.ndarray):
    """Solve H x = g with escalating diagonal loading on failure."""
    bump = 0.0
    d = H.shape[0]
    scale = max(np.trace(H) / d, 1e-12) if d else 1e-12
    for _ in range(12):
        try:
            L = np.linalg.cholesky(H + bump * np.eye(H.shape[0]) if bump else H)
            return np.linalg.solve(L.T, np.linalg.solve(L, g))
        except np.linalg.LinAlgError:
            bump = scale * 1e-12 if bump == 0.0 else bump * 100.0
    return None


def _newton_stage(qp: _RealQP, y, t, final, opts, log, counter):
    """Center min h(y) + barrier(y)/t from a strictly feasible y.

    Returns (y, ok, res) where res is the stationarity residual
    ||grad_h + grad_barrier/t||_inf at exit and ok is False only when
    the direction or line search broke down with progress still on the
    table."""
    res = math.inf
    for step in range(60):
        grad_phi, hess_phi = qp.barrier_grad_hess(y)
        grad = qp.grad_h(y) + grad_phi / t
        res = float(np.abs(grad).max(initial=0.0))
        merit0 = qp.h(y) + qp.barrier(y) / t
        if final and res <= 0.5 * opts.kkt_tol:
            return y, True, res
        if counter[0] >= opts.max_iter:
            return y, True, res
        hess = 2.0 * qp.P + hess_phi / t
        delta = _chol_solve(hess, -grad)
        if delta is None:
            return y, False, res
        lam_sq = float(-grad @ delta)
        if log is not None:
            log.append(("phase2", t, step, merit0, lam_sq / 2.0))
        noise = 1e-15 * (1.0 + abs(merit0))
        if lam_sq / 2.0 <= (1e-10 if not final else noise):
            return y, True, res
        counter[0] += 1
        slope = float(grad @ delta)
        alpha = 1.0
        moved = False
        for _ in range(80):
            y_new = y + alpha * delta
            if qp.strictly_feasible(y_new):
                merit_new = qp.h(y_new) + qp.barrier(y_new) / t
                if merit_new <= merit0 + 0.01 * alpha * slope + noise:
                    y = y_new
                    moved = True
                    break
            alpha *= 0.5
        if not moved:
            # no measurable progress left at this precision
            return y, lam_sq / 2.0 <= 1e3 * noise, res
    return y, True, res


def _sane_phase1_start(qp: _RealQP, y0):
    """Tame a wild seed before the feasibility phase: clip it into the
    ball / cap region, then prefer the origin when it is less violated
    (only affine rows can be negative there)."""
    y = y0.copy()
    if qp.ball is not None:
        nrm = float(np.linalg.norm(y))
        rad = math.sqrt(qp.ball)
        if nrm > 0.99 * rad:
            y *= 0.99 * rad / nrm
    for i, j, cap in qp.cap_pairs:
        mag = math.hypot(y[i], y[j])
        lim = math.sqrt(cap)
        if mag > 0.99 * lim:
            y[i] *= 0.99 * lim / mag
            y[j] *= 0.99 * lim / mag
    if float(np.min(qp.slacks(np.zeros(qp.d)))) > float(np.min(qp.slacks(y))):
        y = np.zeros(qp.d)
    return y


def _phase1(qp: _RealQP, y0, opts: SolveOptions, log, counter):
    """Find a strictly feasible point by minimizing the worst violation.

    Works on (y, s) with slack_j(y) + s > 0; s below zero certifies a
    strict interior. Returns (y, status) with status in
    {"ok", "infeasible", "budget"}.
    """
    d = qp.d
    y = _sane_phase1_start(qp, y0)
    s_val = max(0.0, -float(qp.slacks(y).min(initial=0.0))) + 1.0
    slack_grads = qp.slack_grads

    t = 1.0
    for _stage in range(24):
        for step in range(60):
            if counter[0] >= opts.max_iter:
                return y, "budget"
            vals, grads = slack_grads(y)
            w = vals + s_val                     # must stay > 0
            inv = 1.0 / (w * t)
            inv2 = 1.0 / (w ** 2 * t)
            grad_y = -(grads.T @ inv)
            grad_s = 1.0 - float(inv.sum())
            hess_yy = (grads * inv2[:, None]).T @ grads
            # curvature of the ball / cap slacks themselves
            if qp.ball is not None:
                idx = qp.R.shape[0]
                hess_yy += 2.0 * inv[idx] * np.eye(d)
            base = qp.R.shape[0] + (1 if qp.ball is not None else 0)
            for c_idx, (i, j, _cap) in enumerate(qp.cap_pairs):
                hess_yy[i, i] += 2.0 * inv[base + c_idx]
                hess_yy[j, j] += 2.0 * inv[base + c_idx]
            hess_ys = grads.T @ inv2
            hess_ss = float(inv2.sum())
            big = np.zeros((d + 1, d + 1))
            big[:d, :d] = hess_yy
            big[:d, d] = hess_ys
            big[d, :d] = hess_ys
            big[d, d] = hess_ss
            grad = np.concatenate([grad_y, [grad_s]])
            delta = _chol_solve(big, -grad)
            if delta is None:
                return y, "budget"
            lam_sq = float(-grad @ delta)
            merit0 = s_val - float(np.log(w).sum()) / t
            if log is not None:
                log.append(("phase1", t, step, merit0, lam_sq / 2.0))
            noise = 1e-15 * (1.0 + abs(merit0))
            if lam_sq / 2.0 <= max(1e-12, noise):
                break
            counter[0] += 1
            slope = float(grad @ delta)
            alpha = 1.0
            moved = False
            for _ in range(80):
                y_new = y + alpha * delta[:d]
                s_new = s_val + alpha * delta[d]
                w_new = slack_grads(y_new)[0] + s_new
                if w_new.min(initial=1.0) > 0.0:
                    merit_new = s_new - float(np.log(w_new).sum()) / t
                    if merit_new <= merit0 + 0.01 * alpha * slope + noise:
                        y, s_val = y_new, s_new
                        moved = True
                        break
                alpha *= 0.5
            if not moved:
                break
            if s_val < -1e-4:
                return y, "ok"
        if s_val < -1e-12:
            return y, "ok"
        if qp.m / t < 1e-12:
            break
        t *= 10.0
    return y, "ok" if s_val < -1e-12 else "infeasible"


def _polish(qp: _RealQP, y0, t, opts: SolveOptions, log, counter):
    """Active-set refinement of a centered barrier iterate.

    Barrier duals 1/(t * slack) identify the active constraints; Newton
    steps on the equality KKT system (stationarity plus active slacks
    zero) then converge quadratically to the exact optimum, free of the
    barrier ill-conditioning that limits the gradient test. Returns
    (y, residual) on success, None when the active-set guess does not
    check out, in which case the caller keeps raising t."""
    d = qp.d
    vals, _ = qp.slack_grads(y0)
    if vals.size and vals.min() <= 0.0:
        return None
    lam_bar = 1.0 / (t * vals) if vals.size else np.zeros(0)
    active = set(np.nonzero(lam_bar > math.sqrt(1.0 / t))[0].tolist())

    for _round in range(4):
        idx = sorted(active)
        n_a = len(idx)
        if n_a > qp.d:
            return None
        y = y0.copy()
        lam = lam_bar[idx].copy() if n_a else np.zeros(0)
        f_prev = math.inf
        for step in range(12):
            vals, grads = qp.slack_grads(y)
            g_a = grads[idx] if n_a else np.zeros((0, d))
            s_a = vals[idx] if n_a else np.zeros(0)
            grad_l = qp.grad_h(y) - (g_a.T @ lam if n_a else 0.0)
            f_vec = np.concatenate([grad_l, s_a])
            f_norm = float(np.abs(f_vec).max(initial=0.0))
            if log is not None:
                log.append(("polish", t, step, qp.h(y), f_norm))
            if f_norm <= 1e-13 or f_norm >= 0.5 * f_prev and step >= 4:
                break
            f_prev = f_norm
            if counter[0] >= opts.max_iter:
                break
            counter[0] += 1
            hess_l = 2.0 * qp.P.copy()
            for pos, k in enumerate(idx):
                kind, payload = qp.curvature_kind(k)
                if kind == "ball":
                    hess_l += 2.0 * lam[pos] * np.eye(d)
                elif kind == "cap":
                    i, j = payload
                    hess_l[i, i] += 2.0 * lam[pos]
                    hess_l[j, j] += 2.0 * lam[pos]
            kkt = np.zeros((d + n_a, d + n_a))
            kkt[:d, :d] = hess_l
            if n_a:
                kkt[:d, d:] = -g_a.T
                kkt[d:, :d] = g_a
            try:
                sol = np.linalg.solve(kkt, -f_vec)
            except np.linalg.LinAlgError:
                return None
            y = y + sol[:d]
            if n_a:
                lam = lam + sol[d:]

        vals, grads = qp.slack_grads(y)
        neg_dual = [idx[p] for p in range(n_a) if lam[p] < -1e-10]
        violated = [k for k in np.nonzero(vals < -10.0 * opts.feas_tol)[0]
                    if k not in active]
        if not neg_dual and not violated:
            g_a = grads[idx] if n_a else np.zeros((0, d))
            stat = float(np.abs(qp.grad_h(y) - (g_a.T @ lam if n_a else 0.0))
                         .max(initial=0.0))
            feas = max(0.0, -float(vals.min(initial=0.0)))
            dual_neg = max(0.0, -float(lam.min(initial=0.0)))
            comp = float(np.abs(lam * vals[idx]).max(initial=0.0)) if n_a else 0.0
            res = max(stat, feas, dual_neg, comp)
            if res <= opts.kkt_tol and feas <= opts.feas_tol:
                return y, res
            return None
        active.difference_update(neg_dual)
        active.update(int(k) for k in violated)
    return None


def _pg_fallback(qp: _RealQP, y0, iters=5000):
    """Projected-gradient descent with Dykstra projections; emergency
    path when the Newton iteration stalls."""
    eigs = np.linalg.eigvalsh(qp.P)
    lip = max(2.0 * float(eigs[-1]), 1e-8)
    step = 1.0 / lip
    y = y0.copy()
    best = y.copy()
    best_val = qp.h(y)
    for _ in range(iters):
        y = _dykstra_project(qp, y - step * qp.grad_h(y))
        val = qp.h(y)
        if val < best_val:
            best_val, best = val, y.copy()
    return best


def _dykstra_project(qp: _RealQP, y, sweeps=200, tol=1e-14):
    """Euclidean projection onto the intersection of the constraint sets."""
    sets = []
    for j in range(qp.R.shape[0]):
        sets.append(("half", j))
    if qp.ball is not None:
        sets.append(("ball", None))
    for pair in qp.cap_pairs:
        sets.append(("cap", pair))
    if not sets:
        return y
    corrections = [np.zeros_like(y) for _ in sets]
    x = y.copy()
    for _ in range(sweeps):
        x_prev = x.copy()
        for idx, (kind, payload) in enumerate(sets):
            z = x + corrections[idx]
            if kind == "half":
                r, o = qp.R[payload], qp.o[payload]
                viol = r @ z + o
                proj = z - min(0.0, viol) * r     # rows are unit norm
            elif kind == "ball":
                nrm_sq = float(z @ z)
                proj = z * math.sqrt(qp.ball / nrm_sq) if nrm_sq > qp.ball else z
            else:
                i, j, cap = payload
                nrm_sq = z[i] ** 2 + z[j] ** 2
                proj = z.copy()
                if nrm_sq > cap:
                    scale = math.sqrt(cap / nrm_sq)
                    proj[i] *= scale
                    proj[j] *= scale
            corrections[idx] = z - proj
            x = proj
        if float(np.linalg.norm(x - x_prev)) <= tol * (1.0 + float(np.linalg.norm(x))):
            break
    return x


def _kkt_residual(qp: _RealQP, y, t):
    """Stationarity of the centered point plus the duality gap bound."""
    grad_phi, _ = qp.barrier_grad_hess(y)
    res = float(np.abs(qp.grad_h(y) + grad_phi / t).max(initial=0.0))
    return max(res, qp.m / t)


def solve(inst: ConvexQPInstance, opts: SolveOptions | None = None,
          x0: np.ndarray | None = None, want_log: bool = False) -> SolveReport:
    """Solve the instance; see the module docstring for the problem form.

    x0, when given, seeds the path (it does not need to be feasible).
    Status is "optimal" when the KKT residual in normalized units falls
    below kkt_tol, "infeasible" when the feasibility phase certifies the
    interior empty, and "max-iter" when the Newton budget runs out or the
    path stalls before reaching the tolerance.
    """
    opts = opts or SolveOptions()
    qp = _RealQP(inst)
    log = [] if want_log else None
    counter = [0]

    if qp.trivially_infeasible:
        return SolveReport(x=None, status="infeasible", kkt_residual=math.inf,
                           iterations=0, log=log)

    ridge_raw = 0.0
    if qp.d:
        tr = float(np.trace(qp.P))
        if tr > 0.0:
            lam_min = float(np.linalg.eigvalsh(qp.P)[0])
            ridge = 1e-12 * tr / qp.d
            if lam_min < ridge:
                qp.P = qp.P + ridge * np.eye(qp.d)
                ridge_raw = ridge * qp.obj_scale

    # unconstrained: one linear solve
    if qp.m == 0:
        sol = _chol_solve(2.0 * qp.P, qp.q)
        if sol is None:
            sol = np.linalg.lstsq(2.0 * qp.P, qp.q, rcond=None)[0]
        res = float(np.abs(2.0 * (qp.P @ sol) - qp.q).max(initial=0.0))
        x = _lift(sol)
        status = "optimal" if res <= opts.kkt_tol else "max-iter"
        return SolveReport(x=x, status=status, kkt_residual=res, iterations=1,
                           objective=_raw_objective(inst, x), ridge=ridge_raw,
                           log=log)

    # starting point: caller seed, pulled slightly inside if needed
    y = _embed_vector(np.asarray(x0, dtype=complex)) if x0 is not None \
        else np.zeros(qp.d)
    if not qp.strictly_feasible(y, margin=1e-10):
        y_in = _pull_inside(qp, y)
        if y_in is not None:
            y = y_in
        else:
            y, p1 = _phase1(qp, y, opts, log, counter)
            if p1 == "infeasible":
                return SolveReport(x=None, status="infeasible",
                                   kkt_residual=math.inf,
                                   iterations=counter[0], log=log)
            if p1 == "budget" or not qp.strictly_feasible(y):
                return SolveReport(x=None, status="max-iter",
                                   kkt_residual=math.inf,
                                   iterations=counter[0], log=log)

    t_target = qp.m / (0.3 * opts.kkt_tol)
    t = 1.0
    newton_ok = True
    res = math.inf
    polished = None
    while True:
        final = t >= t_target
        y, newton_ok, res = _newton_stage(qp, y, t, final, opts, log, counter)
        if not newton_ok and counter[0] < opts.max_iter:
            y = _pg_fallback(qp, y)
            break
        if qp.m / t <= 1e-3:
            polished = _polish(qp, y, t, opts, log, counter)
            if polished is not None:
                break
        if final or counter[0] >= opts.max_iter:
            break
        t *= 10.0

    if polished is not None:
        y, res = polished
        feas_ok = qp.strictly_feasible(y, margin=-opts.feas_tol)
        status = "optimal" if res <= opts.kkt_tol and feas_ok else "max-iter"
    else:
        gap = qp.m / t
        res = max(res, gap) if qp.strictly_feasible(y) else math.inf
        feas_ok = qp.strictly_feasible(y, margin=-opts.feas_tol)
        status = "optimal" if (res <= opts.kkt_tol and newton_ok and feas_ok
                               and counter[0] <= opts.max_iter) else "max-iter"
    x = _lift(y)
    return SolveReport(x=x, status=status, kkt_residual=res,
                       iterations=counter[0],
                       objective=_raw_objective(inst, x), ridge=ridge_raw,
                       log=log)


def _pull_inside(qp: _RealQP, y):
    """Cheap interior start: shrink toward the origin of the ball / caps
    and accept if every slack turns strictly positive. The ladder ends at
    the origin itself, which is interior whenever all affine offsets are
    positive; otherwise the caller falls back to the feasibility phase."""
    for shrink in (1.0 - 1e-6, 0.999, 0.99, 0.9, 0.5, 0.2, 0.05, 0.01,
                   1e-3, 1e-4, 0.0):
        cand = y * shrink
        if qp.strictly_feasible(cand, margin=1e-9):
            return cand
    return None


def _raw_objective(inst: ConvexQPInstance, x: np.ndarray) -> float:
    return float(np.vdot(inst.b, x).real - np.vdot(x, inst.Q @ x).real)
