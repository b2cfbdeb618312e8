//! Single-letter capacity expressions and 2-user rate regions.
//!
//! The region of a 2-user scheme class is represented direction-by-direction
//! through its support function `h(lambda) = max lambda . R`. Nonconvex
//! outer searches (over input distributions or joint auxiliary
//! distributions) use a deterministic candidate set: a coarse simplex grid,
//! seeded Dirichlet restarts, optional caller-provided starts, plus a
//! compass polish per direction. All these searches return lower estimates
//! of the true region; the inner coupling minimization used by the
//! outer-bound region is convex and solved to a certified duality gap, so
//! its value is an upper estimate of the inner minimum.

use crate::channels::{augment_with_csir, BroadcastChannel, ChannelWithState};
use crate::lp::{self, ConstraintOp, LpModel, LpStatus};
use crate::probspace::{
    blahut_arimoto, conditional_mutual_information, mutual_information, CondPmf, JointDist, Pmf,
};
use crate::random::{dirichlet_pmf, rng_from_seed};
use crate::{Error, Result};

/// Default number of Dirichlet restarts in outer searches.
pub const DEFAULT_RESTARTS: usize = 64;
/// Default simplex grid resolution (1/denominator) in outer searches.
pub const DEFAULT_GRID_DENOM: usize = 16;
/// Default duality-gap tolerance of the coupling minimization.
pub const SATO_GAP_TOL: f64 = 1e-7;
/// Round cap of the coupling minimization.
const SATO_MAX_ROUNDS: usize = 50_000;

// ---------------------------------------------------------------------------
// Polymatroids
// ---------------------------------------------------------------------------

/// 2-user rate region `{R >= 0, R_1 <= a1, R_2 <= a2, R_1 + R_2 <= a12}`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Polymatroid2 {
    pub a1: f64,
    pub a2: f64,
    pub a12: f64,
}

impl Polymatroid2 {
    /// Clamps `a12` into `[0, a1 + a2]` and the individual bounds to be
    /// nonnegative.
    pub fn new(a1: f64, a2: f64, a12: f64) -> Self {
        let a1 = a1.max(0.0);
        let a2 = a2.max(0.0);
        let a12 = a12.clamp(0.0, a1 + a2);
        Self { a1, a2, a12 }
    }

    /// The (at most five) candidate vertices of the region.
    pub fn vertices(&self) -> Vec<(f64, f64)> {
        vec![
            (0.0, 0.0),
            (self.a1.min(self.a12), 0.0),
            (0.0, self.a2.min(self.a12)),
            (self.a1.min(self.a12), (self.a12 - self.a1).clamp(0.0, self.a2)),
            ((self.a12 - self.a2).clamp(0.0, self.a1), self.a2.min(self.a12)),
        ]
    }

    /// Support `max {lambda . R : R in region}` by vertex enumeration.
    pub fn support(&self, lambda: (f64, f64)) -> f64 {
        self.vertices()
            .into_iter()
            .map(|(r1, r2)| lambda.0 * r1 + lambda.1 * r2)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// The vertex attaining the support (ties broken toward the first in
    /// the fixed vertex order).
    pub fn support_argmax(&self, lambda: (f64, f64)) -> (f64, f64) {
        let mut best = (0.0, 0.0);
        let mut best_v = f64::NEG_INFINITY;
        for (r1, r2) in self.vertices() {
            let v = lambda.0 * r1 + lambda.1 * r2;
            if v > best_v + 1e-15 {
                best_v = v;
                best = (r1, r2);
            }
        }
        best
    }
}

/// Bound-wise Minkowski sum; valid for polymatroids.
pub fn minkowski_sum(p: &Polymatroid2, q: &Polymatroid2) -> Polymatroid2 {
    Polymatroid2::new(p.a1 + q.a1, p.a2 + q.a2, p.a12 + q.a12)
}

// ---------------------------------------------------------------------------
// Region estimates
// ---------------------------------------------------------------------------

/// One direction of a swept region boundary.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RegionPoint {
    pub lambda: (f64, f64),
    pub support: f64,
    pub r1: f64,
    pub r2: f64,
    /// Flattened argmax distribution (meaning depends on the sweep).
    pub dist: Vec<f64>,
}

/// Direction sweep of a region: raw swept points and their convex hull.
/// Downstream comparisons use [`RegionEstimate::support`], evaluated on the
/// hull.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RegionEstimate {
    pub points: Vec<RegionPoint>,
    pub hull: Vec<(f64, f64)>,
}

impl RegionEstimate {
    pub fn from_points(points: Vec<RegionPoint>) -> Self {
        Self::from_points_with_vertices(points, Vec::new())
    }

    /// Builds the estimate from swept points plus any further achievable
    /// region points (used by the sweeps to add every vertex of the winning
    /// polymatroids, which sharpens the hull at unswept directions).
    pub fn from_points_with_vertices(
        points: Vec<RegionPoint>,
        extra: Vec<(f64, f64)>,
    ) -> Self {
        let mut raw: Vec<(f64, f64)> = points.iter().map(|p| (p.r1, p.r2)).collect();
        raw.extend(extra);
        // the region always contains the axis projections and the origin
        let proj: Vec<(f64, f64)> =
            raw.iter().flat_map(|&(r1, r2)| [(r1, 0.0), (0.0, r2)]).collect();
        raw.extend(proj);
        raw.push((0.0, 0.0));
        let hull = convex_hull(raw);
        Self { points, hull }
    }

    /// Support of the hull in direction `lambda`.
    pub fn support(&self, lambda: (f64, f64)) -> f64 {
        self.hull
            .iter()
            .map(|&(r1, r2)| lambda.0 * r1 + lambda.1 * r2)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evenly spaced directions `lambda_1 = i/(count-1)` on the simplex.
pub fn direction_grid(count: usize) -> Vec<(f64, f64)> {
    assert!(count >= 2);
    (0..count)
        .map(|i| {
            let l1 = i as f64 / (count - 1) as f64;
            (l1, 1.0 - l1)
        })
        .collect()
}

/// Monotone-chain convex hull.
fn convex_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

// ---------------------------------------------------------------------------
// Capacity of a channel with state, and its classical counterpart
// ---------------------------------------------------------------------------

/// Capacity with the state known at both ends, `sum_s P_S(s) C(N(.|., s))`,
/// computed per state by alternating maximization. By the virtual-signaling
/// equality this is also the assisted capacity of the channel with
/// transmitter-only state knowledge.
pub fn csir_capacity(ch: &ChannelWithState, tol: f64) -> Result<f64> {
    let mut total = 0.0;
    for s in 0..ch.s_size() {
        let ps = ch.state().get(s);
        if ps == 0.0 {
            continue;
        }
        let (c, _) = blahut_arimoto(&ch.per_state_kernel(s), tol)?;
        total += ps * c;
    }
    Ok(total)
}

/// Augmenting the receiver with the state leaves [`csir_capacity`]
/// unchanged; returns both values for cross-checks.
pub fn csir_capacity_augmented_matches(ch: &ChannelWithState, tol: f64) -> Result<(f64, f64)> {
    let direct = csir_capacity(ch, tol)?;
    let augmented = csir_capacity(&augment_with_csir(ch), tol)?;
    Ok((direct, augmented))
}

/// Lower estimate of the classical capacity with transmitter-only state
/// knowledge: `max I(U;Y) - I(U;S)` over `P_{XU|S}` with
/// `|U| <= min(|X||S|, |Y|+|S|-1)`, by multi-start projected gradient
/// ascent. The problem is nonconvex, so the returned value is a lower bound
/// up to the final evaluation's roundoff.
pub fn gelfand_pinsker_estimate(
    ch: &ChannelWithState,
    u_size: usize,
    restarts: usize,
) -> Result<f64> {
    let max_u = (ch.x_size() * ch.s_size()).min(ch.y_size() + ch.s_size() - 1);
    if u_size < 1 || u_size > max_u {
        return Err(Error::InvalidArgument(format!(
            "auxiliary alphabet size {u_size} outside [1, {max_u}]"
        )));
    }
    let (x_sz, s_sz, y_sz) = (ch.x_size(), ch.s_size(), ch.y_size());
    let block = x_sz * u_size;

    // objective I(U;Y) - I(U;S) and its gradient in the per-state blocks
    // t_s(x, u); the I(U) terms cancel between the two informations
    let eval = |t: &[f64]| -> (f64, Vec<f64>) {
        let mut p_uy = vec![0.0; u_size * y_sz];
        let mut p_us = vec![0.0; u_size * s_sz];
        for s in 0..s_sz {
            let ps = ch.state().get(s);
            if ps == 0.0 {
                continue;
            }
            for x in 0..x_sz {
                for u in 0..u_size {
                    let w = ps * t[s * block + x * u_size + u];
                    if w == 0.0 {
                        continue;
                    }
                    p_us[u * s_sz + s] += w;
                    for y in 0..y_sz {
                        let nv = ch.prob(y, x, s);
                        if nv > 0.0 {
                            p_uy[u * y_sz + y] += w * nv;
                        }
                    }
                }
            }
        }
        let p_y: Vec<f64> =
            (0..y_sz).map(|y| (0..u_size).map(|u| p_uy[u * y_sz + y]).sum()).collect();
        let plog = |v: f64| if v > 0.0 { v * v.log2() } else { 0.0 };
        let mut obj = 0.0;
        for &v in &p_uy {
            obj += plog(v);
        }
        for &v in &p_y {
            obj -= plog(v);
        }
        for &v in &p_us {
            obj -= plog(v);
        }
        for s in 0..s_sz {
            obj += plog(ch.state().get(s));
        }
        let floor = 1e-300f64;
        let mut grad = vec![0.0; t.len()];
        for s in 0..s_sz {
            let ps = ch.state().get(s);
            if ps == 0.0 {
                continue;
            }
            for x in 0..x_sz {
                for u in 0..u_size {
                    let mut g = 0.0;
                    for y in 0..y_sz {
                        let nv = ch.prob(y, x, s);
                        if nv == 0.0 {
                            continue;
                        }
                        g += nv
                            * (p_uy[u * y_sz + y].max(floor).log2() - p_y[y].max(floor).log2());
                    }
                    g -= p_us[u * s_sz + s].max(floor).log2();
                    grad[s * block + x * u_size + u] = ps * g;
                }
            }
        }
        (obj, grad)
    };

    let ascend = |mut t: Vec<f64>| -> f64 {
        let (mut obj, mut grad) = eval(&t);
        for _ in 0..400 {
            let mut step = 1.0;
            let mut improved = false;
            while step > 1e-9 {
                let mut cand = t.clone();
                for s in 0..s_sz {
                    let blk = &mut cand[s * block..(s + 1) * block];
                    for (i, g) in grad[s * block..(s + 1) * block].iter().enumerate() {
                        blk[i] += step * g;
                    }
                    project_simplex(blk);
                }
                let (cobj, cgrad) = eval(&cand);
                if cobj > obj + 1e-13 {
                    t = cand;
                    obj = cobj;
                    grad = cgrad;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        obj
    };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    starts.push(vec![1.0 / block as f64; s_sz * block]);
    // deterministic embedding u = x mod |U|
    let mut det = vec![0.0; s_sz * block];
    for s in 0..s_sz {
        for x in 0..x_sz {
            det[s * block + x * u_size + (x % u_size)] = 1.0 / x_sz as f64;
        }
    }
    starts.push(det);
    let mut rng = rng_from_seed(0x6750_417e);
    for _ in 0..restarts {
        let mut t = Vec::with_capacity(s_sz * block);
        for _ in 0..s_sz {
            t.extend_from_slice(dirichlet_pmf(&mut rng, block).probs());
        }
        starts.push(t);
    }
    let mut best = f64::NEG_INFINITY;
    for t in starts {
        best = best.max(ascend(t));
    }
    Ok(best.max(0.0))
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let n = v.len();
    let mut sorted: Vec<f64> = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let cand = (cumsum - 1.0) / (i + 1) as f64;
        if s - cand > 0.0 {
            theta = cand;
        }
    }
    let mut total = 0.0;
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
        total += *x;
    }
    if total > 0.0 {
        for x in v.iter_mut() {
            *x /= total;
        }
    } else {
        let u = 1.0 / n as f64;
        for x in v.iter_mut() {
            *x = u;
        }
    }
}

// ---------------------------------------------------------------------------
// Polymatroid evaluators at a fixed distribution
// ---------------------------------------------------------------------------

/// Rate bounds of the transmitter/user-1 assisted class at a fixed joint
/// auxiliary distribution `p_xu`:
/// `(I(X;Y_1), I(U;Y_2), I(X;Y_1|U) + I(U;Y_2))`.
pub fn ks_polymatroid(bc: &BroadcastChannel, p_xu: &JointDist) -> Result<Polymatroid2> {
    if bc.user_count() != 2 {
        return Err(Error::InvalidArgument("2-user channel required".into()));
    }
    if p_xu.dims().len() != 2 || p_xu.dims()[0] != bc.x_size() {
        return Err(Error::InvalidArgument(format!(
            "joint must be over X x U with |X| = {}",
            bc.x_size()
        )));
    }
    let u_size = p_xu.dims()[1];
    let (y1, y2) = (bc.y_sizes()[0], bc.y_sizes()[1]);
    let joint = JointDist::from_fn(vec![bc.x_size(), u_size, y1, y2], |ix| {
        let pxu = p_xu.probs()[ix[0] * u_size + ix[1]];
        if pxu == 0.0 {
            return 0.0;
        }
        pxu * bc.prob(&[ix[2], ix[3]], ix[0])
    })?;
    let a1 = mutual_information(&joint, &[0], &[2])?;
    let a2 = mutual_information(&joint, &[1], &[3])?;
    let a12 = conditional_mutual_information(&joint, &[0], &[2], &[1])? + a2;
    Ok(Polymatroid2::new(a1, a2, a12))
}

/// Closed-form bounds for a channel deterministic at user 2, at input
/// distribution `p_x`: `(I(X;Y_1), H(Y_2), I(X;Y_1|Y_2) + H(Y_2))`.
pub fn semidet_polymatroid(bc: &BroadcastChannel, p_x: &Pmf) -> Result<Polymatroid2> {
    let joint = bc_input_joint(bc, p_x)?;
    let a1 = mutual_information(&joint, &[0], &[1])?;
    let h2 = joint.marginal(&[2])?.entropy();
    let a12 = conditional_mutual_information(&joint, &[0], &[1], &[2])? + h2;
    Ok(Polymatroid2::new(a1, h2, a12))
}

/// The scaled closed-form bounds for a user-2-deterministic channel whose
/// outputs pass through per-user erasures, evaluated on the pre-erasure
/// channel at one input distribution.
pub fn semidet_erasure_polymatroid(
    bc: &BroadcastChannel,
    p_x: &Pmf,
    gamma1: f64,
    gamma2: f64,
) -> Result<Polymatroid2> {
    let joint = bc_input_joint(bc, p_x)?;
    let i1 = mutual_information(&joint, &[0], &[1])?;
    let h2 = joint.marginal(&[2])?.entropy();
    let i1c = conditional_mutual_information(&joint, &[0], &[1], &[2])?;
    Ok(Polymatroid2::new(
        (1.0 - gamma1) * i1,
        (1.0 - gamma2) * h2,
        (1.0 - gamma1) * i1c + (1.0 - gamma2) * h2,
    ))
}

/// The outer-bound polymatroid at a fixed input distribution:
/// `(I(X;Y_1), I(X;Y_2), min-coupling I(X;Y_1',Y_2'))`.
pub fn sato_polymatroid(bc: &BroadcastChannel, p_x: &Pmf, tol: f64) -> Result<Polymatroid2> {
    let joint = bc_input_joint(bc, p_x)?;
    let a1 = mutual_information(&joint, &[0], &[1])?;
    let a2 = mutual_information(&joint, &[0], &[2])?;
    let inner = sato_inner_min(bc, p_x, tol)?;
    Ok(Polymatroid2::new(a1, a2, inner.value))
}

/// Joint `(X, Y1, Y2)` under `p_x`.
fn bc_input_joint(bc: &BroadcastChannel, p_x: &Pmf) -> Result<JointDist> {
    if bc.user_count() != 2 {
        return Err(Error::InvalidArgument("2-user channel required".into()));
    }
    if p_x.len() != bc.x_size() {
        return Err(Error::InvalidArgument("input distribution size mismatch".into()));
    }
    JointDist::from_fn(vec![bc.x_size(), bc.y_sizes()[0], bc.y_sizes()[1]], |ix| {
        let px = p_x.get(ix[0]);
        if px == 0.0 {
            return 0.0;
        }
        px * bc.prob(&[ix[1], ix[2]], ix[0])
    })
}

// ---------------------------------------------------------------------------
// Coupling minimization (sum-rate bound of the outer region)
// ---------------------------------------------------------------------------

/// Result of the coupling minimization at a fixed input distribution.
#[derive(Debug, Clone)]
pub struct SatoInner {
    /// Certified value of `min I(X; Y1', Y2')` over same-marginal couplings
    /// (within `gap` above the true minimum).
    pub value: f64,
    /// Final duality gap certified through the linear oracle.
    pub gap: f64,
    /// Optimal couplings, one `|Y1| x |Y2|` table per input symbol.
    pub couplings: Vec<Vec<f64>>,
}

/// Minimize `I(X;Y_1',Y_2')` over channels with the same per-user
/// conditional marginals as `bc`, at input distribution `p_x`.
///
/// The feasible set is a product of transportation polytopes (one per input
/// symbol) and the objective is convex in the coupling. Iterations
/// interleave information-projection sweeps (each block projection solved by
/// iterative proportional fitting) with conditional-gradient steps whose
/// linear subproblems are transportation LPs solved by the LP engine; the
/// run terminates once the conditional-gradient duality gap, evaluated at a
/// slightly smoothed point to keep the entropy gradient finite, certifies
/// the value within `tol`.
pub fn sato_inner_min(bc: &BroadcastChannel, p_x: &Pmf, tol: f64) -> Result<SatoInner> {
    if bc.user_count() != 2 {
        return Err(Error::InvalidArgument("2-user channel required".into()));
    }
    if p_x.len() != bc.x_size() {
        return Err(Error::InvalidArgument("input distribution size mismatch".into()));
    }
    if tol <= 0.0 {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let (y1, y2) = (bc.y_sizes()[0], bc.y_sizes()[1]);
    let cells = y1 * y2;
    let m1 = bc.user_marginal(0)?;
    let m2 = bc.user_marginal(1)?;
    // start from the independent coupling
    let mut t: Vec<Vec<f64>> = (0..bc.x_size())
        .map(|x| {
            let mut tx = vec![0.0; cells];
            for a in 0..y1 {
                for b in 0..y2 {
                    tx[a * y2 + b] = m1.get(x, a) * m2.get(x, b);
                }
            }
            tx
        })
        .collect();

    let mix = |t: &[Vec<f64>]| -> Vec<f64> {
        let mut q = vec![0.0; cells];
        for (x, tx) in t.iter().enumerate() {
            let px = p_x.get(x);
            if px == 0.0 {
                continue;
            }
            for (c, &v) in tx.iter().enumerate() {
                q[c] += px * v;
            }
        }
        q
    };
    let objective = |t: &[Vec<f64>]| -> f64 {
        let q = mix(t);
        let mut i = 0.0;
        for (x, tx) in t.iter().enumerate() {
            let px = p_x.get(x);
            if px == 0.0 {
                continue;
            }
            for (c, &v) in tx.iter().enumerate() {
                if v > 0.0 && q[c] > 0.0 {
                    i += px * v * (v / q[c]).log2();
                }
            }
        }
        i.max(0.0)
    };
    let gradient = |t: &[Vec<f64>]| -> Vec<Vec<f64>> {
        let q = mix(t);
        t.iter()
            .enumerate()
            .map(|(x, tx)| {
                let px = p_x.get(x);
                tx.iter()
                    .enumerate()
                    .map(|(c, &v)| {
                        if px == 0.0 {
                            0.0
                        } else {
                            px * (v.max(1e-300) / q[c].max(1e-300)).log2()
                        }
                    })
                    .collect()
            })
            .collect()
    };
    let blend = |gamma: f64, t: &[Vec<f64>], s: &[Vec<f64>]| -> Vec<Vec<f64>> {
        t.iter()
            .zip(s)
            .map(|(tx, sx)| {
                tx.iter().zip(sx).map(|(&a, &b)| (1.0 - gamma) * a + gamma * b).collect()
            })
            .collect()
    };

    let mut obj = objective(&t);
    let mut gap = f64::INFINITY;
    for _round in 0..SATO_MAX_ROUNDS {
        // information-projection sweep: for the current output mixture q,
        // replace each block by the I-projection of q onto its
        // transportation polytope
        let q = mix(&t);
        for x in 0..bc.x_size() {
            if p_x.get(x) == 0.0 {
                continue;
            }
            t[x] = ipf_project(&q, y1, y2, m1.row(x), m2.row(x), &t[x]);
        }
        obj = objective(&t);

        // duality-gap certificate at a slightly smoothed point: the
        // smoothing cost is charged to the gap
        let delta = 1e-10;
        let smoothed: Vec<Vec<f64>> = t
            .iter()
            .enumerate()
            .map(|(x, tx)| {
                let mut sm = vec![0.0; cells];
                for a in 0..y1 {
                    for b in 0..y2 {
                        sm[a * y2 + b] = (1.0 - delta) * tx[a * y2 + b]
                            + delta * m1.get(x, a) * m2.get(x, b);
                    }
                }
                sm
            })
            .collect();
        let sm_obj = objective(&smoothed);
        let grad = gradient(&smoothed);
        let mut s = Vec::with_capacity(bc.x_size());
        for (x, gx) in grad.iter().enumerate() {
            s.push(transportation_lmo(gx, y1, y2, m1.row(x), m2.row(x))?);
        }
        let mut fw_gap = 0.0;
        for x in 0..bc.x_size() {
            for c in 0..cells {
                fw_gap += grad[x][c] * (smoothed[x][c] - s[x][c]);
            }
        }
        gap = fw_gap.max(0.0) + (sm_obj - obj).abs();
        if gap < tol {
            return Ok(SatoInner { value: obj, gap, couplings: t });
        }

        // conditional-gradient step toward the oracle vertex, with exact
        // line search on the convex 1-D slice
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        for _ in 0..40 {
            let a = lo + (hi - lo) / 3.0;
            let b = hi - (hi - lo) / 3.0;
            if objective(&blend(a, &t, &s)) < objective(&blend(b, &t, &s)) {
                hi = b;
            } else {
                lo = a;
            }
        }
        let cand = blend(0.5 * (lo + hi), &t, &s);
        if objective(&cand) < obj {
            t = cand;
            obj = objective(&t);
        }
    }
    Err(Error::NumericFailure(format!(
        "coupling minimization stalled with duality gap {gap:.3e} (tol {tol:.3e}), value {obj}"
    )))
}

/// Transportation linear-minimization oracle via the LP engine.
fn transportation_lmo(
    cost: &[f64],
    y1: usize,
    y2: usize,
    rows: &[f64],
    cols: &[f64],
) -> Result<Vec<f64>> {
    let mut model = LpModel::new(y1 * y2, false);
    for (c, &g) in cost.iter().enumerate() {
        model.set_objective_coeff(c, g)?;
        model.set_bounds(c, 0.0, 1.0)?;
    }
    for (a, &r) in rows.iter().enumerate() {
        let coeffs: Vec<(usize, f64)> = (0..y2).map(|b| (a * y2 + b, 1.0)).collect();
        model.add_constraint(coeffs, ConstraintOp::Eq, r)?;
    }
    for (b, &c) in cols.iter().enumerate() {
        let coeffs: Vec<(usize, f64)> = (0..y1).map(|a| (a * y2 + b, 1.0)).collect();
        model.add_constraint(coeffs, ConstraintOp::Eq, c)?;
    }
    let sol = lp::solve_default(&model)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::NumericFailure(format!(
            "transportation oracle status {:?}",
            sol.status
        )));
    }
    Ok(sol.primal)
}

/// Iterative proportional fitting: relative-entropy projection of base
/// measure `q` onto the transportation polytope with the given marginals.
/// Falls back to the previous block when the marginal pattern is not
/// reachable from `q`'s support.
fn ipf_project(
    q: &[f64],
    y1: usize,
    y2: usize,
    rows: &[f64],
    cols: &[f64],
    fallback: &[f64],
) -> Vec<f64> {
    let mut t: Vec<f64> = q.to_vec();
    for a in 0..y1 {
        for b in 0..y2 {
            if rows[a] == 0.0 || cols[b] == 0.0 {
                t[a * y2 + b] = 0.0;
            }
        }
    }
    for _ in 0..500 {
        let mut max_err = 0.0f64;
        for (a, &r) in rows.iter().enumerate() {
            let s: f64 = t[a * y2..(a + 1) * y2].iter().sum();
            if s > 0.0 {
                let f = r / s;
                for b in 0..y2 {
                    t[a * y2 + b] *= f;
                }
            } else if r > 0.0 {
                return fallback.to_vec();
            }
        }
        for (b, &c) in cols.iter().enumerate() {
            let s: f64 = (0..y1).map(|a| t[a * y2 + b]).sum();
            if s > 0.0 {
                let f = c / s;
                for a in 0..y1 {
                    t[a * y2 + b] *= f;
                }
            } else if c > 0.0 {
                return fallback.to_vec();
            }
        }
        for (a, &r) in rows.iter().enumerate() {
            let s: f64 = t[a * y2..(a + 1) * y2].iter().sum();
            max_err = max_err.max((s - r).abs());
        }
        if max_err < 1e-14 {
            return t;
        }
    }
    t
}

// ---------------------------------------------------------------------------
// Region sweeps
// ---------------------------------------------------------------------------

/// Shared knobs of the nonconvex outer searches. Results are deterministic
/// for fixed knobs: grid candidates come first, then seeded Dirichlet
/// restarts, then caller-provided starts; ties break toward the earlier
/// candidate.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub directions: usize,
    pub restarts: usize,
    pub grid_denom: usize,
    pub seed: u64,
    /// Extra starting distributions appended to the candidate set.
    pub extra_starts: Vec<Vec<f64>>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            directions: 8,
            restarts: DEFAULT_RESTARTS,
            grid_denom: DEFAULT_GRID_DENOM,
            seed: 0x5eed,
            extra_starts: Vec::new(),
        }
    }
}

/// All compositions of `denom` into `dim` parts, as simplex grid points in
/// lexicographic order.
fn simplex_grid(dim: usize, denom: usize) -> Vec<Vec<f64>> {
    fn rec(cur: &mut [usize], pos: usize, left: usize, denom: usize, out: &mut Vec<Vec<f64>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.iter().map(|&c| c as f64 / denom as f64).collect());
            return;
        }
        for v in 0..=left {
            cur[pos] = v;
            rec(cur, pos + 1, left - v, denom, out);
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0usize; dim];
    rec(&mut cur, 0, denom, denom, &mut out);
    out
}

/// Grid resolution adapted to the search dimension to keep candidate counts
/// workable.
fn adapted_denom(dim: usize, denom: usize) -> usize {
    match dim {
        0..=4 => denom,
        5..=6 => denom.min(8),
        7..=9 => denom.min(4),
        _ => denom.min(2),
    }
    .max(1)
}

/// Compass polish: hill-climb over pairwise simplex mass moves with a
/// shrinking step.
fn compass_polish(
    start: &[f64],
    start_val: f64,
    eval: &mut dyn FnMut(&[f64]) -> f64,
    max_levels: usize,
) -> (Vec<f64>, f64) {
    let dim = start.len();
    let mut best = start.to_vec();
    let mut best_val = start_val;
    let mut step: f64 = 1.0 / 16.0;
    for _ in 0..max_levels {
        let mut improved = true;
        while improved {
            improved = false;
            for i in 0..dim {
                for j in 0..dim {
                    if i == j || best[j] < 1e-15 {
                        continue;
                    }
                    let delta = step.min(best[j]);
                    let mut cand = best.clone();
                    cand[j] -= delta;
                    cand[i] += delta;
                    let v = eval(&cand);
                    if v > best_val + 1e-13 {
                        best = cand;
                        best_val = v;
                        improved = true;
                    }
                }
            }
        }
        step *= 0.5;
        if step < 1e-7 {
            break;
        }
    }
    (best, best_val)
}

/// Generic direction sweep: candidates are evaluated once into
/// polymatroids, each direction takes the best support over candidates and
/// polishes the winner.
fn sweep_region(
    dim: usize,
    cfg: &SweepConfig,
    polymatroid_at: &mut dyn FnMut(&[f64]) -> Result<Polymatroid2>,
    polish_levels: usize,
) -> Result<RegionEstimate> {
    let mut candidates = simplex_grid(dim, adapted_denom(dim, cfg.grid_denom));
    let mut rng = rng_from_seed(cfg.seed);
    for _ in 0..cfg.restarts {
        candidates.push(dirichlet_pmf(&mut rng, dim).probs().to_vec());
    }
    for s in &cfg.extra_starts {
        if s.len() == dim {
            candidates.push(s.clone());
        }
    }
    let mut polys = Vec::with_capacity(candidates.len());
    for c in &candidates {
        polys.push(polymatroid_at(c)?);
    }
    let dirs = direction_grid(cfg.directions);
    let mut points = Vec::with_capacity(dirs.len());
    let mut vertices = Vec::new();
    for &lambda in &dirs {
        let mut best_i = 0usize;
        let mut best_v = f64::NEG_INFINITY;
        for (i, p) in polys.iter().enumerate() {
            let v = p.support(lambda);
            if v > best_v + 1e-13 {
                best_v = v;
                best_i = i;
            }
        }
        let mut eval = |d: &[f64]| -> f64 {
            polymatroid_at(d).map(|p| p.support(lambda)).unwrap_or(f64::NEG_INFINITY)
        };
        let (best_d, best_val) =
            compass_polish(&candidates[best_i], best_v, &mut eval, polish_levels);
        let poly = polymatroid_at(&best_d)?;
        let (r1, r2) = poly.support_argmax(lambda);
        vertices.extend(poly.vertices());
        points.push(RegionPoint { lambda, support: best_val, r1, r2, dist: best_d });
    }
    Ok(RegionEstimate::from_points_with_vertices(points, vertices))
}

/// Default auxiliary alphabet size for [`region_ks`].
///
/// `|X| - 1` alone is not enough: at `|X| = 2` it leaves a single auxiliary
/// value, which pins `I(U;Y_2) = 0` while the deterministic embedding
/// `U = Y_2` achieves `H(Y_2) > 0`. The default therefore also covers
/// user 2's output alphabet.
pub fn default_u_size(bc: &BroadcastChannel) -> usize {
    bc.x_size()
        .saturating_sub(1)
        .max(bc.y_sizes().get(1).copied().unwrap_or(1))
        .max(1)
}

/// Sweep of the transmitter/user-1 assisted region over `P_XU` (lower
/// estimate of the true region).
pub fn region_ks(bc: &BroadcastChannel, u_size: usize, cfg: &SweepConfig) -> Result<RegionEstimate> {
    if bc.user_count() != 2 {
        return Err(Error::InvalidArgument("2-user channel required".into()));
    }
    if u_size < 1 {
        return Err(Error::InvalidArgument("auxiliary alphabet must be nonempty".into()));
    }
    let x = bc.x_size();
    let dim = x * u_size;
    sweep_region(
        dim,
        cfg,
        &mut |d: &[f64]| {
            let j = JointDist::new(vec![x, u_size], normalized(d))?;
            ks_polymatroid(bc, &j)
        },
        10,
    )
}

/// Sweep of the outer-bound region over `P_X`.
pub fn region_sato(bc: &BroadcastChannel, tol: f64, cfg: &SweepConfig) -> Result<RegionEstimate> {
    if bc.user_count() != 2 {
        return Err(Error::InvalidArgument("2-user channel required".into()));
    }
    sweep_region(
        bc.x_size(),
        cfg,
        &mut |d: &[f64]| {
            let p = Pmf::new(normalized(d))?;
            sato_polymatroid(bc, &p, tol)
        },
        6,
    )
}

/// Closed-form region sweep for channels deterministic at user 2.
pub fn semidet_region_closed(bc: &BroadcastChannel, cfg: &SweepConfig) -> Result<RegionEstimate> {
    if !crate::channels::is_deterministic_for_user(bc, 1)? {
        return Err(Error::InvalidArgument("channel is not deterministic for user 2".into()));
    }
    sweep_region(
        bc.x_size(),
        cfg,
        &mut |d: &[f64]| {
            let p = Pmf::new(normalized(d))?;
            semidet_polymatroid(bc, &p)
        },
        10,
    )
}

/// Closed-form region sweep for a user-2-deterministic channel whose
/// outputs pass through per-user erasures with probabilities
/// `gamma1 >= gamma2` (the deterministic output must not see the worse
/// erasure; the reverse ordering is unsupported). The channel argument is
/// the pre-erasure channel.
pub fn semidet_erasure_region_closed(
    bc: &BroadcastChannel,
    gamma1: f64,
    gamma2: f64,
    cfg: &SweepConfig,
) -> Result<RegionEstimate> {
    if !(0.0..=1.0).contains(&gamma1) || !(0.0..=1.0).contains(&gamma2) {
        return Err(Error::InvalidArgument("erasure probabilities must lie in [0,1]".into()));
    }
    if gamma1 < gamma2 {
        return Err(Error::InvalidArgument(
            "unsupported hypothesis: need gamma1 >= gamma2".into(),
        ));
    }
    if !crate::channels::is_deterministic_for_user(bc, 1)? {
        return Err(Error::InvalidArgument("channel is not deterministic for user 2".into()));
    }
    sweep_region(
        bc.x_size(),
        cfg,
        &mut |d: &[f64]| {
            let p = Pmf::new(normalized(d))?;
            semidet_erasure_polymatroid(bc, &p, gamma1, gamma2)
        },
        10,
    )
}

/// Region sweep for the parallel composition of a user-2-deterministic
/// channel with a user-1-deterministic one. Per product input distribution
/// the region is the bound-wise Minkowski sum of the two component
/// polymatroids, so each direction's support maximizes separately over the
/// two factors.
pub fn prsd_region(
    bc_a: &BroadcastChannel,
    bc_b: &BroadcastChannel,
    cfg: &SweepConfig,
) -> Result<RegionEstimate> {
    if !crate::channels::is_deterministic_for_user(bc_a, 1)? {
        return Err(Error::InvalidArgument(
            "first factor must be deterministic for user 2".into(),
        ));
    }
    if !crate::channels::is_deterministic_for_user(bc_b, 0)? {
        return Err(Error::InvalidArgument(
            "second factor must be deterministic for user 1".into(),
        ));
    }
    let swapped_b = bc_b.swap_users()?;
    let dirs = direction_grid(cfg.directions);
    let mut points = Vec::with_capacity(dirs.len());
    let mut vertices = Vec::new();
    for &lambda in &dirs {
        // factor B is handled in swapped orientation, so its direction is
        // mirrored
        let (va, da) = best_semidet_support(bc_a, lambda, cfg)?;
        let (vb, db) = best_semidet_support(&swapped_b, (lambda.1, lambda.0), cfg)?;
        let poly_a = semidet_polymatroid(bc_a, &Pmf::new(normalized(&da))?)?;
        let pb_sw = semidet_polymatroid(&swapped_b, &Pmf::new(normalized(&db))?)?;
        let poly_b = Polymatroid2::new(pb_sw.a2, pb_sw.a1, pb_sw.a12);
        let sum = minkowski_sum(&poly_a, &poly_b);
        let (r1, r2) = sum.support_argmax(lambda);
        vertices.extend(sum.vertices());
        let mut dist = da;
        dist.extend_from_slice(&db);
        points.push(RegionPoint { lambda, support: va + vb, r1, r2, dist });
    }
    Ok(RegionEstimate::from_points_with_vertices(points, vertices))
}

/// Best support of the user-2-deterministic closed-form region in one
/// direction, with the argmax input distribution.
fn best_semidet_support(
    bc: &BroadcastChannel,
    lambda: (f64, f64),
    cfg: &SweepConfig,
) -> Result<(f64, Vec<f64>)> {
    let x = bc.x_size();
    let mut candidates = simplex_grid(x, adapted_denom(x, cfg.grid_denom));
    let mut rng = rng_from_seed(cfg.seed);
    for _ in 0..cfg.restarts {
        candidates.push(dirichlet_pmf(&mut rng, x).probs().to_vec());
    }
    let mut best_v = f64::NEG_INFINITY;
    let mut best_d = vec![1.0 / x as f64; x];
    for c in &candidates {
        let p = semidet_polymatroid(bc, &Pmf::new(normalized(c))?)?;
        let v = p.support(lambda);
        if v > best_v + 1e-13 {
            best_v = v;
            best_d = c.clone();
        }
    }
    let mut eval = |d: &[f64]| -> f64 {
        Pmf::new(normalized(d))
            .and_then(|p| semidet_polymatroid(bc, &p))
            .map(|p| p.support(lambda))
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (d, v) = compass_polish(&best_d, best_v, &mut eval, 10);
    Ok((v, d))
}

fn normalized(d: &[f64]) -> Vec<f64> {
    let total: f64 = d.iter().sum();
    if total <= 0.0 {
        return vec![1.0 / d.len() as f64; d.len()];
    }
    d.iter().map(|&v| (v / total).max(0.0)).collect()
}

// ---------------------------------------------------------------------------
// Erasure chain identity
// ---------------------------------------------------------------------------

/// Observed vs predicted mutual informations along the chain
/// `X -> Y -> Y' -> Y''` where the second and third arrows are erasure
/// channels with probabilities `alpha` and `beta`:
/// `I(X;Y') = (1-alpha) I(X;Y)` and `I(X;Y'') = (1-alpha)(1-beta) I(X;Y)`.
pub fn erasure_mi_check(
    ch: &CondPmf,
    p_x: &Pmf,
    alpha: f64,
    beta: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(0.0..=1.0).contains(&alpha) || !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidArgument("erasure probabilities must lie in [0,1]".into()));
    }
    if p_x.len() != ch.n_in() {
        return Err(Error::InvalidArgument("input distribution size mismatch".into()));
    }
    let y = ch.n_out();
    let joint_xy =
        JointDist::from_fn(vec![ch.n_in(), y], |ix| p_x.get(ix[0]) * ch.get(ix[0], ix[1]))?;
    let base = mutual_information(&joint_xy, &[0], &[1])?;
    let joint_once = JointDist::from_fn(vec![ch.n_in(), y + 1], |ix| {
        let px = p_x.get(ix[0]);
        if ix[1] < y {
            px * ch.get(ix[0], ix[1]) * (1.0 - alpha)
        } else {
            px * alpha
        }
    })?;
    let i1 = mutual_information(&joint_once, &[0], &[1])?;
    let joint_twice = JointDist::from_fn(vec![ch.n_in(), y + 1], |ix| {
        let px = p_x.get(ix[0]);
        if ix[1] < y {
            px * ch.get(ix[0], ix[1]) * (1.0 - alpha) * (1.0 - beta)
        } else {
            px * (alpha + (1.0 - alpha) * beta)
        }
    })?;
    let i2 = mutual_information(&joint_twice, &[0], &[1])?;
    Ok((
        vec![i1, i2],
        vec![(1.0 - alpha) * base, (1.0 - alpha) * (1.0 - beta) * base],
    ))
}
