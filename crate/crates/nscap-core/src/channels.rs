//! Channel models: point-to-point channels with state and K-user broadcast
//! channels, plus the constructions used throughout the crate (receiver state
//! augmentation, tensor powers, erasure concatenation, parallel composition).
//!
//! Index conventions, shared with the JSON schema:
//! - channel-with-state kernel rows are indexed row-major by `(x, s)`,
//!   `x` slowest;
//! - broadcast kernel rows are indexed by `x`, outputs row-major over users,
//!   user 1 slowest;
//! - an erasure symbol is always the final alphabet index.

use crate::gf::GfTables;
use crate::probspace::{CondPmf, Pmf};
use crate::{Error, Result};

/// Default cap on kernel entries produced by tensor powers.
pub const DEFAULT_TENSOR_CAP: usize = 10_000_000;

/// Point-mass detection tolerance for deterministic-row checks.
const DET_TOL: f64 = 1e-12;

/// A stochastic kernel from `(x, s)` to `y` together with an i.i.d. state
/// distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelWithState {
    kernel: CondPmf, // rows indexed (x, s), x slowest
    state: Pmf,
    x_size: usize,
    y_size: usize,
}

impl ChannelWithState {
    pub fn new(kernel: CondPmf, state: Pmf, x_size: usize) -> Result<Self> {
        let s_size = state.len();
        if kernel.n_in() != x_size * s_size {
            return Err(Error::InvalidArgument(format!(
                "kernel has {} rows, expected |X||S| = {}",
                kernel.n_in(),
                x_size * s_size
            )));
        }
        let y_size = kernel.n_out();
        Ok(Self { kernel, state, x_size, y_size })
    }

    /// Stateless channel (`|S| = 1`).
    pub fn stateless(kernel: CondPmf) -> Self {
        let x_size = kernel.n_in();
        let y_size = kernel.n_out();
        Self { kernel, state: Pmf::uniform(1), x_size, y_size }
    }

    pub fn x_size(&self) -> usize {
        self.x_size
    }

    pub fn y_size(&self) -> usize {
        self.y_size
    }

    pub fn s_size(&self) -> usize {
        self.state.len()
    }

    pub fn state(&self) -> &Pmf {
        &self.state
    }

    pub fn kernel(&self) -> &CondPmf {
        &self.kernel
    }

    /// `N(y | x, s)`.
    pub fn prob(&self, y: usize, x: usize, s: usize) -> f64 {
        self.kernel.get(x * self.s_size() + s, y)
    }

    /// The channel restricted to a fixed state value, as a plain kernel.
    pub fn per_state_kernel(&self, s: usize) -> CondPmf {
        let mut rows = Vec::with_capacity(self.x_size);
        for x in 0..self.x_size {
            rows.push(Pmf::new(self.kernel.row(x * self.s_size() + s).to_vec()).unwrap());
        }
        CondPmf::from_rows(rows).unwrap()
    }
}

/// Make the state available at the receiver: the output alphabet becomes
/// `Y x S` (receiver copy fastest) and the kernel gains the indicator that
/// the receiver copy equals the true state.
pub fn augment_with_csir(ch: &ChannelWithState) -> ChannelWithState {
    let s = ch.s_size();
    let y = ch.y_size();
    let mut kernel = vec![0.0; ch.x_size() * s * y * s];
    for x in 0..ch.x_size() {
        for st in 0..s {
            let row = (x * s + st) * (y * s);
            for yy in 0..y {
                kernel[row + yy * s + st] = ch.prob(yy, x, st);
            }
        }
    }
    ChannelWithState {
        kernel: CondPmf::new(kernel, ch.x_size() * s, y * s).unwrap(),
        state: ch.state.clone(),
        x_size: ch.x_size(),
        y_size: y * s,
    }
}

/// `n` uses of the channel: product kernel and product state distribution.
pub fn tensor_power(ch: &ChannelWithState, n: usize) -> Result<ChannelWithState> {
    tensor_power_with_cap(ch, n, DEFAULT_TENSOR_CAP)
}

pub fn tensor_power_with_cap(
    ch: &ChannelWithState,
    n: usize,
    cap: usize,
) -> Result<ChannelWithState> {
    if n == 0 {
        return Err(Error::InvalidArgument("blocklength must be at least 1".into()));
    }
    if n == 1 {
        return Ok(ch.clone());
    }
    let (x, y, s) = (ch.x_size(), ch.y_size(), ch.s_size());
    let entries = checked_pow(x * s * y, n, cap)?;
    let xn = x.pow(n as u32);
    let sn = s.pow(n as u32);
    let yn = y.pow(n as u32);
    let mut kernel = vec![0.0; entries];
    let mut state = vec![0.0; sn];
    for sj in 0..sn {
        state[sj] = unrank(sj, s, n).iter().map(|&si| ch.state.get(si)).product();
    }
    for xj in 0..xn {
        let xs = unrank(xj, x, n);
        for sj in 0..sn {
            let ss = unrank(sj, s, n);
            let row = (xj * sn + sj) * yn;
            for yj in 0..yn {
                let ys = unrank(yj, y, n);
                let mut p = 1.0;
                for i in 0..n {
                    p *= ch.prob(ys[i], xs[i], ss[i]);
                    if p == 0.0 {
                        break;
                    }
                }
                kernel[row + yj] = p;
            }
        }
    }
    Ok(ChannelWithState {
        kernel: CondPmf::new(kernel, xn * sn, yn)?,
        state: Pmf::new(state)?,
        x_size: xn,
        y_size: yn,
    })
}

/// State-dependent channel over `GF(q)`: output `(ybar, g)` with
/// `ybar = x + g*s`, state `s` and fade `g` uniform, `g` independent of
/// `(x, s)`. Output index is `ybar*q + g`.
pub fn fading_dirt(q: usize) -> Result<ChannelWithState> {
    let f = GfTables::new(q)?;
    let y_size = q * q;
    let mut kernel = vec![0.0; q * q * y_size];
    for x in 0..q {
        for s in 0..q {
            let row = (x * q + s) * y_size;
            for g in 0..q {
                let ybar = f.add(x, f.mul(g, s));
                kernel[row + ybar * q + g] = 1.0 / q as f64;
            }
        }
    }
    Ok(ChannelWithState {
        kernel: CondPmf::new(kernel, q * q, y_size)?,
        state: Pmf::uniform(q),
        x_size: q,
        y_size,
    })
}

/// A channel whose output is independent of both input and state:
/// every `(x, s)` row equals `out`.
pub fn broken_channel(x_size: usize, state: Pmf, out: Pmf) -> ChannelWithState {
    let y_size = out.len();
    let rows = vec![out; x_size * state.len()];
    ChannelWithState { kernel: CondPmf::from_rows(rows).unwrap(), state, x_size, y_size }
}

/// One transmitter, `K` receivers: kernel from `x` to the joint output
/// `(y_1, .., y_K)`, row-major with user 1 slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct BroadcastChannel {
    kernel: CondPmf,
    y_sizes: Vec<usize>,
}

impl BroadcastChannel {
    pub fn new(kernel: CondPmf, y_sizes: Vec<usize>) -> Result<Self> {
        let total: usize = y_sizes.iter().product();
        if y_sizes.is_empty() || total != kernel.n_out() {
            return Err(Error::InvalidArgument(format!(
                "kernel output size {} does not match user alphabets {:?}",
                kernel.n_out(),
                y_sizes
            )));
        }
        Ok(Self { kernel, y_sizes })
    }

    pub fn user_count(&self) -> usize {
        self.y_sizes.len()
    }

    pub fn x_size(&self) -> usize {
        self.kernel.n_in()
    }

    pub fn y_sizes(&self) -> &[usize] {
        &self.y_sizes
    }

    pub fn kernel(&self) -> &CondPmf {
        &self.kernel
    }

    /// `N(y_1, .., y_K | x)` with per-user output indices.
    pub fn prob(&self, ys: &[usize], x: usize) -> f64 {
        self.kernel.get(x, self.joint_output_index(ys))
    }

    pub fn joint_output_index(&self, ys: &[usize]) -> usize {
        ys.iter().zip(&self.y_sizes).fold(0, |acc, (&yi, &sz)| acc * sz + yi)
    }

    pub fn split_output_index(&self, mut j: usize) -> Vec<usize> {
        let mut ys = vec![0usize; self.y_sizes.len()];
        for k in (0..self.y_sizes.len()).rev() {
            ys[k] = j % self.y_sizes[k];
            j /= self.y_sizes[k];
        }
        ys
    }

    /// Kernel summed over the outputs of all users not in `users` (order of
    /// `users` is preserved in the result).
    pub fn marginal_channel(&self, users: &[usize]) -> Result<BroadcastChannel> {
        if users.is_empty() {
            return Err(Error::InvalidArgument("empty user subset".into()));
        }
        for &u in users {
            if u >= self.user_count() {
                return Err(Error::InvalidArgument(format!("user {u} out of range")));
            }
        }
        let out_sizes: Vec<usize> = users.iter().map(|&u| self.y_sizes[u]).collect();
        let total_out: usize = out_sizes.iter().product();
        let mut kernel = vec![0.0; self.x_size() * total_out];
        for x in 0..self.x_size() {
            for j in 0..self.kernel.n_out() {
                let p = self.kernel.get(x, j);
                if p == 0.0 {
                    continue;
                }
                let ys = self.split_output_index(j);
                let o = users
                    .iter()
                    .fold(0usize, |acc, &u| acc * self.y_sizes[u] + ys[u]);
                kernel[x * total_out + o] += p;
            }
        }
        BroadcastChannel::new(CondPmf::new(kernel, self.x_size(), total_out)?, out_sizes)
    }

    /// Single-user marginal kernel `N(y_k | x)`.
    pub fn user_marginal(&self, user: usize) -> Result<CondPmf> {
        Ok(self.marginal_channel(&[user])?.kernel)
    }

    /// Two-user channel with the user indices exchanged.
    pub fn swap_users(&self) -> Result<BroadcastChannel> {
        if self.user_count() != 2 {
            return Err(Error::InvalidArgument("swap_users needs a 2-user channel".into()));
        }
        self.marginal_channel(&[1, 0])
    }
}

/// True iff user `k`'s marginal channel is deterministic (every row a point
/// mass within 1e-12).
pub fn is_deterministic_for_user(bc: &BroadcastChannel, k: usize) -> Result<bool> {
    let m = bc.user_marginal(k)?;
    for x in 0..m.n_in() {
        let row = m.row(x);
        if !row.iter().any(|&p| (p - 1.0).abs() <= DET_TOL) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The three-input deterministic broadcast channel with binary outputs:
/// `0 -> (0,0)`, `1 -> (1,1)`, `2 -> (0,1)`.
pub fn blackwell() -> BroadcastChannel {
    let mut kernel = vec![0.0; 3 * 4];
    kernel[0 * 4 + 0b00] = 1.0;
    kernel[1 * 4 + 0b11] = 1.0;
    kernel[2 * 4 + 0b01] = 1.0;
    BroadcastChannel::new(CondPmf::new(kernel, 3, 4).unwrap(), vec![2, 2]).unwrap()
}

/// How per-user erasures are coupled in [`concat_erasure`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErasureCoupling {
    /// Each user's erasure flag is drawn independently.
    Independent,
    /// Two users only, `gamma_1 >= gamma_2`: user 1 first passes an
    /// independent erasure with probability `gamma'` where
    /// `1 - gamma_1 = (1 - gamma')(1 - gamma_2)`, then a common block
    /// erasure with probability `gamma_2` hits both users simultaneously.
    /// Per-user marginals match the independent coupling.
    Block,
}

/// Concatenate per-user erasure channels to a broadcast channel. The erasure
/// symbol is appended as the last element of each output alphabet.
pub fn concat_erasure(
    bc: &BroadcastChannel,
    gammas: &[f64],
    coupling: ErasureCoupling,
) -> Result<BroadcastChannel> {
    if gammas.len() != bc.user_count() {
        return Err(Error::InvalidArgument("one erasure probability per user".into()));
    }
    if gammas.iter().any(|&g| !(0.0..=1.0).contains(&g)) {
        return Err(Error::InvalidArgument("erasure probabilities must lie in [0,1]".into()));
    }
    let out_sizes: Vec<usize> = bc.y_sizes().iter().map(|&s| s + 1).collect();
    let total_out: usize = out_sizes.iter().product();
    let k_users = bc.user_count();
    let mut kernel = vec![0.0; bc.x_size() * total_out];

    // enumerate erasure patterns; weight(pattern) assigns the joint
    // probability of that pattern
    let patterns: Vec<Vec<bool>> = (0..1usize << k_users)
        .map(|m| (0..k_users).map(|k| (m >> k) & 1 == 1).collect())
        .collect();
    let weight = |pat: &[bool]| -> f64 {
        match coupling {
            ErasureCoupling::Independent => pat
                .iter()
                .zip(gammas)
                .map(|(&e, &g)| if e { g } else { 1.0 - g })
                .product(),
            ErasureCoupling::Block => {
                // block component erases both; the residual erasure acts on
                // user 1 only
                let (g1, g2) = (gammas[0], gammas[1]);
                let gp = if g2 < 1.0 { 1.0 - (1.0 - g1) / (1.0 - g2) } else { 0.0 };
                match (pat[0], pat[1]) {
                    (true, true) => g2 + (1.0 - g2) * gp * 0.0, // both erased only via block
                    (true, false) => (1.0 - g2) * gp,
                    (false, true) => 0.0,
                    (false, false) => (1.0 - g2) * (1.0 - gp),
                }
            }
        }
    };
    if coupling == ErasureCoupling::Block {
        if k_users != 2 {
            return Err(Error::InvalidArgument("block coupling needs exactly 2 users".into()));
        }
        if gammas[0] < gammas[1] - 1e-15 {
            return Err(Error::InvalidArgument(
                "block coupling requires gamma_1 >= gamma_2".into(),
            ));
        }
    }

    for x in 0..bc.x_size() {
        for j in 0..bc.kernel().n_out() {
            let p = bc.kernel().get(x, j);
            if p == 0.0 {
                continue;
            }
            let ys = bc.split_output_index(j);
            for pat in &patterns {
                let w = weight(pat);
                if w == 0.0 {
                    continue;
                }
                let o = (0..k_users).fold(0usize, |acc, k| {
                    let sym = if pat[k] { bc.y_sizes()[k] } else { ys[k] };
                    acc * out_sizes[k] + sym
                });
                kernel[x * total_out + o] += p * w;
            }
        }
    }
    BroadcastChannel::new(CondPmf::new(kernel, bc.x_size(), total_out)?, out_sizes)
}

/// Parallel composition of two 2-user broadcast channels: input `(x', x'')`,
/// user outputs `(y_k', y_k'')`, product kernel.
pub fn parallel_compose(a: &BroadcastChannel, b: &BroadcastChannel) -> Result<BroadcastChannel> {
    if a.user_count() != 2 || b.user_count() != 2 {
        return Err(Error::InvalidArgument("parallel composition needs 2-user channels".into()));
    }
    let x_size = a.x_size() * b.x_size();
    let out_sizes = vec![a.y_sizes()[0] * b.y_sizes()[0], a.y_sizes()[1] * b.y_sizes()[1]];
    let total_out = out_sizes[0] * out_sizes[1];
    let mut kernel = vec![0.0; x_size * total_out];
    for xa in 0..a.x_size() {
        for xb in 0..b.x_size() {
            let x = xa * b.x_size() + xb;
            for ja in 0..a.kernel().n_out() {
                let pa = a.kernel().get(xa, ja);
                if pa == 0.0 {
                    continue;
                }
                let ya = a.split_output_index(ja);
                for jb in 0..b.kernel().n_out() {
                    let pb = b.kernel().get(xb, jb);
                    if pb == 0.0 {
                        continue;
                    }
                    let yb = b.split_output_index(jb);
                    let y1 = ya[0] * b.y_sizes()[0] + yb[0];
                    let y2 = ya[1] * b.y_sizes()[1] + yb[1];
                    kernel[x * total_out + y1 * out_sizes[1] + y2] += pa * pb;
                }
            }
        }
    }
    BroadcastChannel::new(CondPmf::new(kernel, x_size, total_out)?, out_sizes)
}

/// `n` uses of a broadcast channel.
pub fn tensor_power_bc(bc: &BroadcastChannel, n: usize) -> Result<BroadcastChannel> {
    tensor_power_bc_with_cap(bc, n, DEFAULT_TENSOR_CAP)
}

pub fn tensor_power_bc_with_cap(
    bc: &BroadcastChannel,
    n: usize,
    cap: usize,
) -> Result<BroadcastChannel> {
    if n == 0 {
        return Err(Error::InvalidArgument("blocklength must be at least 1".into()));
    }
    if n == 1 {
        return Ok(bc.clone());
    }
    let x = bc.x_size();
    let yj = bc.kernel().n_out();
    let entries = checked_pow(x * yj, n, cap)?;
    let xn = x.pow(n as u32);
    let yjn = yj.pow(n as u32);
    let out_sizes: Vec<usize> = bc.y_sizes().iter().map(|&s| s.pow(n as u32)).collect();
    let mut kernel = vec![0.0; entries];
    for xv in 0..xn {
        let xs = unrank(xv, x, n);
        for jv in 0..yjn {
            // joint index per use -> per-user indices per use -> per-user
            // blocked indices -> joint blocked index
            let js = unrank(jv, yj, n);
            let mut p = 1.0;
            for i in 0..n {
                p *= bc.kernel().get(xs[i], js[i]);
                if p == 0.0 {
                    break;
                }
            }
            if p == 0.0 {
                continue;
            }
            let per_use: Vec<Vec<usize>> = js.iter().map(|&j| bc.split_output_index(j)).collect();
            let o = (0..bc.user_count()).fold(0usize, |acc, k| {
                let yk = per_use.iter().fold(0usize, |a, u| a * bc.y_sizes()[k] + u[k]);
                acc * out_sizes[k] + yk
            });
            kernel[xv * yjn + o] += p;
        }
    }
    BroadcastChannel::new(CondPmf::new(kernel, xn, yjn)?, out_sizes)
}

/// Per-user side-information structure: `known[k]` lists the message indices
/// (0-based) available to user `k` in advance.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SideInfoStructure {
    known: Vec<Vec<usize>>,
}

impl SideInfoStructure {
    /// `known[k]` must not contain `k`; entries are sorted and deduplicated.
    pub fn new(user_count: usize, mut known: Vec<Vec<usize>>) -> Result<Self> {
        known.resize(user_count, Vec::new());
        for (k, set) in known.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            if set.contains(&k) {
                return Err(Error::InvalidArgument(format!(
                    "user {k} cannot have its own message as side information"
                )));
            }
            if set.iter().any(|&j| j >= user_count) {
                return Err(Error::InvalidArgument(format!(
                    "side information of user {k} references a message out of range"
                )));
            }
        }
        Ok(Self { known })
    }

    pub fn none(user_count: usize) -> Self {
        Self { known: vec![Vec::new(); user_count] }
    }

    /// Each user `k` knows the messages of users `k+1, .., K`.
    pub fn descending(user_count: usize) -> Self {
        let known = (0..user_count).map(|k| (k + 1..user_count).collect()).collect();
        Self { known }
    }

    pub fn user_count(&self) -> usize {
        self.known.len()
    }

    pub fn known_by(&self, k: usize) -> &[usize] {
        &self.known[k]
    }

    /// True iff message `k` appears in no user's side-information set.
    pub fn message_unknown_to_all(&self, k: usize) -> bool {
        self.known.iter().all(|set| !set.contains(&k))
    }
}

fn unrank(mut v: usize, base: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0usize; n];
    for i in (0..n).rev() {
        out[i] = v % base;
        v /= base;
    }
    out
}

fn checked_pow(base: usize, n: usize, cap: usize) -> Result<usize> {
    let mut total = 1usize;
    for _ in 0..n {
        total = total
            .checked_mul(base)
            .ok_or_else(|| Error::ResourceLimit("tensor power overflows".into()))?;
        if total > cap {
            return Err(Error::ResourceLimit(format!(
                "tensor power would produce {total}+ kernel entries (cap {cap})"
            )));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bsc(p: f64) -> ChannelWithState {
        ChannelWithState::stateless(CondPmf::new(vec![1.0 - p, p, p, 1.0 - p], 2, 2).unwrap())
    }

    #[test]
    fn csir_degenerate_state() {
        let ch = bsc(0.3);
        let aug = augment_with_csir(&ch);
        assert_eq!(aug.y_size(), 2);
        for x in 0..2 {
            for y in 0..2 {
                assert_abs_diff_eq!(aug.prob(y, x, 0), ch.prob(y, x, 0), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn csir_fading_dirt_structure() {
        let ch = fading_dirt(2).unwrap();
        let aug = augment_with_csir(&ch);
        assert_eq!(aug.y_size(), 8);
        // indicator structure: mass only where the receiver copy equals s
        for x in 0..2 {
            for s in 0..2 {
                let mut row_sum = 0.0;
                for y in 0..4 {
                    for sr in 0..2 {
                        let p = aug.prob(y * 2 + sr, x, s);
                        row_sum += p;
                        if sr != s {
                            assert_eq!(p, 0.0);
                        } else {
                            assert_abs_diff_eq!(p, ch.prob(y, x, s), epsilon = 1e-15);
                        }
                    }
                }
                assert_abs_diff_eq!(row_sum, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn csir_preserves_visible_marginal() {
        let ch = fading_dirt(3).unwrap();
        let aug = augment_with_csir(&ch);
        for x in 0..3 {
            for s in 0..3 {
                for y in 0..9 {
                    let m: f64 = (0..3).map(|sr| aug.prob(y * 3 + sr, x, s)).sum();
                    assert_abs_diff_eq!(m, ch.prob(y, x, s), epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn tensor_identity_and_product() {
        let ch = bsc(0.2);
        let t1 = tensor_power(&ch, 1).unwrap();
        assert_eq!(t1, ch);
        let t2 = tensor_power(&ch, 2).unwrap();
        // (00 -> 11) has probability p^2
        assert_abs_diff_eq!(t2.prob(0b11, 0b00, 0), 0.04, epsilon = 1e-15);
        assert_abs_diff_eq!(t2.prob(0b01, 0b00, 0), 0.8 * 0.2, epsilon = 1e-15);
    }

    #[test]
    fn tensor_state_is_iid() {
        let ch = fading_dirt(2).unwrap();
        let t2 = tensor_power(&ch, 2).unwrap();
        for s in 0..4 {
            assert_abs_diff_eq!(t2.state().get(s), 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn tensor_composes() {
        let ch = fading_dirt(2).unwrap();
        let t3 = tensor_power(&ch, 3).unwrap();
        let t2 = tensor_power(&ch, 2).unwrap();
        // tensoring twice gives identical flat tables under the shared
        // row-major convention
        let xs = 2usize;
        let t2x1_kernel_entry = |x3: usize, s3: usize, y3: usize| -> f64 {
            let (xa, xb) = (x3 / xs, x3 % xs);
            let (sa, sb) = (s3 / 2, s3 % 2);
            let (ya, yb) = (y3 / 4, y3 % 4);
            t2.prob(ya, xa, sa) * ch.prob(yb, xb, sb)
        };
        for x3 in 0..8 {
            for s3 in 0..8 {
                for y3 in 0..64 {
                    assert_abs_diff_eq!(
                        t3.prob(y3, x3, s3),
                        t2x1_kernel_entry(x3, s3, y3),
                        epsilon = 1e-13
                    );
                }
            }
        }
    }

    #[test]
    fn tensor_cap_enforced() {
        let ch = fading_dirt(3).unwrap();
        let err = tensor_power_with_cap(&ch, 4, 1000).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(_)));
    }

    #[test]
    fn fading_dirt_examples() {
        let ch = fading_dirt(2).unwrap();
        // input (x=1, s=1): (ybar, g) = (1, 0) w.p. 1/2 and (0, 1) w.p. 1/2
        assert_abs_diff_eq!(ch.prob(1 * 2 + 0, 1, 1), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ch.prob(0 * 2 + 1, 1, 1), 0.5, epsilon = 1e-15);
        // s = 0: ybar = x regardless of g
        for g in 0..2 {
            assert_abs_diff_eq!(ch.prob(1 * 2 + g, 1, 0), 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(ch.prob(0 * 2 + g, 0, 0), 0.5, epsilon = 1e-15);
        }
        // q = 3: x=1, s=2, g=2 -> ybar = 1 + 2*2 mod 3 = 2
        let ch3 = fading_dirt(3).unwrap();
        assert_abs_diff_eq!(ch3.prob(2 * 3 + 2, 1, 2), 1.0 / 3.0, epsilon = 1e-15);
        assert!(fading_dirt(6).is_err());
    }

    #[test]
    fn fading_dirt_per_state_bijection() {
        for q in [2usize, 3, 4, 5] {
            let ch = fading_dirt(q).unwrap();
            for s in 0..q {
                // (x, g) -> (ybar, g) is a bijection onto its support
                let mut seen = vec![false; q * q];
                for x in 0..q {
                    for y in 0..q * q {
                        if ch.prob(y, x, s) > 0.0 {
                            assert!(!seen[y], "collision at q={q} s={s}");
                            seen[y] = true;
                        }
                    }
                }
                assert_eq!(seen.iter().filter(|&&b| b).count(), q * q);
            }
        }
    }

    #[test]
    fn blackwell_kernel() {
        let bc = blackwell();
        assert_abs_diff_eq!(bc.prob(&[0, 0], 0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bc.prob(&[1, 1], 1), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(bc.prob(&[0, 1], 2), 1.0, epsilon = 1e-15);
        let total: f64 = (0..3).map(|x| bc.kernel().row(x).iter().sum::<f64>()).sum();
        assert_abs_diff_eq!(total, 3.0, epsilon = 1e-12);
        assert!(is_deterministic_for_user(&bc, 0).unwrap());
        assert!(is_deterministic_for_user(&bc, 1).unwrap());
    }

    #[test]
    fn erasure_zero_and_total() {
        let bc = blackwell();
        let e0 = concat_erasure(&bc, &[0.0, 0.0], ErasureCoupling::Independent).unwrap();
        for x in 0..3 {
            let ys = bc.split_output_index(
                (0..4).find(|&j| bc.kernel().get(x, j) > 0.5).unwrap(),
            );
            assert_abs_diff_eq!(e0.prob(&ys, x), 1.0, epsilon = 1e-15);
        }
        let e1 = concat_erasure(&bc, &[1.0, 1.0], ErasureCoupling::Independent).unwrap();
        for x in 0..3 {
            assert_abs_diff_eq!(e1.prob(&[2, 2], x), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn erasure_half_blackwell() {
        let bc = blackwell();
        let e = concat_erasure(&bc, &[0.5, 0.5], ErasureCoupling::Independent).unwrap();
        // X = 2 maps to (0, 1); P(y1 = 0, y2 = erased) = 0.5 * 0.5
        assert_abs_diff_eq!(e.prob(&[0, 2], 2), 0.25, epsilon = 1e-15);
        assert!(!is_deterministic_for_user(&e, 0).unwrap());
    }

    #[test]
    fn erasure_marginal_scaling() {
        let bc = blackwell();
        for coupling in [ErasureCoupling::Independent, ErasureCoupling::Block] {
            let e = concat_erasure(&bc, &[0.4, 0.25], coupling).unwrap();
            for (k, &g) in [0.4, 0.25].iter().enumerate() {
                let me = e.user_marginal(k).unwrap();
                let mb = bc.user_marginal(k).unwrap();
                for x in 0..3 {
                    for y in 0..2 {
                        assert_abs_diff_eq!(me.get(x, y), (1.0 - g) * mb.get(x, y), epsilon = 1e-12);
                    }
                    assert_abs_diff_eq!(me.get(x, 2), g, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn erasure_block_couples_users() {
        let bc = blackwell();
        let e = concat_erasure(&bc, &[0.5, 0.5], ErasureCoupling::Block).unwrap();
        // with equal erasure probabilities the block coupling erases both
        // users or neither
        assert_abs_diff_eq!(e.prob(&[2, 2], 2), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(e.prob(&[0, 2], 2), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.prob(&[0, 1], 2), 0.5, epsilon = 1e-15);
        assert!(concat_erasure(&bc, &[0.2, 0.5], ErasureCoupling::Block).is_err());
    }

    #[test]
    fn parallel_compose_sizes_and_entries() {
        let bc = blackwell();
        let sw = bc.swap_users().unwrap();
        let composed = parallel_compose(&bc, &sw).unwrap();
        assert_eq!(composed.x_size(), 9);
        assert_eq!(composed.y_sizes(), &[4, 4]);
        // product of factor entries
        assert_abs_diff_eq!(
            composed.prob(&[0 * 2 + 1, 1 * 2 + 0], composed_input(2, 2)),
            bc.prob(&[0, 1], 2) * sw.prob(&[1, 0], 2),
            epsilon = 1e-15
        );
        // unit element: composing with a single-symbol trivial channel
        let trivial = BroadcastChannel::new(
            CondPmf::new(vec![1.0], 1, 1).unwrap(),
            vec![1, 1],
        )
        .unwrap();
        let same = parallel_compose(&bc, &trivial).unwrap();
        assert_eq!(same.x_size(), 3);
        for x in 0..3 {
            for j in 0..4 {
                assert_abs_diff_eq!(
                    same.kernel().get(x, j),
                    bc.kernel().get(x, j),
                    epsilon = 1e-15
                );
            }
        }
    }

    fn composed_input(xa: usize, xb: usize) -> usize {
        xa * 3 + xb
    }

    #[test]
    fn marginal_full_subset_is_identity() {
        let bc = blackwell();
        let m = bc.marginal_channel(&[0, 1]).unwrap();
        assert_eq!(m, bc);
        // user-1 marginal of the Blackwell channel: x = 1 -> 1, else -> 0
        let m1 = bc.user_marginal(0).unwrap();
        assert_abs_diff_eq!(m1.get(0, 0), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m1.get(1, 1), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m1.get(2, 0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn side_info_structure_validation() {
        assert!(SideInfoStructure::new(2, vec![vec![0], vec![]]).is_err());
        assert!(SideInfoStructure::new(2, vec![vec![5], vec![]]).is_err());
        let si = SideInfoStructure::descending(3);
        assert_eq!(si.known_by(0), &[1, 2]);
        assert_eq!(si.known_by(2), &[] as &[usize]);
        assert!(si.message_unknown_to_all(0));
        assert!(!si.message_unknown_to_all(2));
    }
}
