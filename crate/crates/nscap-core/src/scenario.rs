//! Coding scenarios and their compilation to linear programs over the
//! non-signaling box polytope.
//!
//! A scenario fixes a channel (point-to-point with state, or K-user
//! broadcast), a blocklength, message sizes, an assistance class, and for
//! broadcast channels a side-information structure together with the set of
//! users whose side-information wire is actually connected. Blocklength
//! `n > 1` is handled by tensoring the channel before compilation.
//!
//! Box party layout (shared with the transform module): party 0 is the
//! transmitter, party `k+1` is user `k`. The transmitter's input wires are
//! the message coordinates (then the state coordinate, for channels with
//! state); user wires are the channel observation followed by any connected
//! side-information coordinates in ascending message order. Variables of the
//! compiled LP are the box entries in the table's canonical order:
//! party-major row-major inputs, then party-major outputs.

use crate::boxes::{self, BoxParty, BoxTable, PartyWire, SiSource, WireRole};
use crate::channels::{
    tensor_power, tensor_power_bc, BroadcastChannel, ChannelWithState, SideInfoStructure,
};
use crate::lp::{self, ConstraintOp, LpModel, LpStatus};
use crate::probspace::{binary_entropy, conditional_mutual_information, JointDist};
use crate::{Error, Result};

/// Cap on the number of LP variables a scenario may compile to.
pub const SCENARIO_VAR_CAP: usize = 300_000;
/// Cap on deterministic encoder/decoder enumeration counts.
pub const ENUM_CAP: usize = 2_000_000;

/// Assistance class of a coding scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assist {
    /// Deterministic encoder and per-user decoders (shared randomness adds
    /// nothing to the optimal success probability).
    Classical,
    /// One box shared by all parties (bipartite for point-to-point,
    /// (K+1)-partite for broadcast).
    Full,
    /// Bipartite box between the two receivers; classical encoder.
    Ns0,
    /// Bipartite box between the transmitter and user 1 (0-based user 0);
    /// classical decoder at the other user.
    Ns1,
    /// Bipartite box between the transmitter and user 2 (0-based user 1).
    Ns2,
}

#[derive(Debug, Clone)]
pub enum ScenarioChannel {
    WithState(ChannelWithState),
    Broadcast(BroadcastChannel),
}

#[derive(Debug, Clone)]
pub struct NsScenario {
    channel: ScenarioChannel,
    n: usize,
    messages: Vec<usize>,
    assist: Assist,
    side_info: SideInfoStructure,
    si_available: Vec<bool>,
}

/// A compiled box polytope LP together with the party shape that maps LP
/// variables back to box entries.
pub struct CompiledNsLp {
    pub model: LpModel,
    pub shape: Vec<BoxParty>,
    pub normalization_rows: usize,
    pub ns_rows: usize,
}

/// Result of a success-probability optimization.
pub struct SuccessOptimum {
    pub eta: f64,
    pub bx: BoxTable,
    pub lp_vars: usize,
    pub lp_rows: usize,
}

/// Outcome of the information-spectrum style converse check on a box.
#[derive(Debug, Clone, Copy)]
pub struct NsFanoCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub eta: f64,
    pub holds: bool,
}

#[derive(Clone, Copy)]
enum SuccessTarget {
    Joint,
    Individual(usize),
}

impl NsScenario {
    pub fn point_to_point(
        channel: ChannelWithState,
        message_size: usize,
        n: usize,
        assist: Assist,
    ) -> Result<Self> {
        if message_size < 1 {
            return Err(Error::InvalidArgument("message size must be at least 1".into()));
        }
        if matches!(assist, Assist::Ns0 | Assist::Ns1 | Assist::Ns2) {
            return Err(Error::InvalidArgument(
                "partial assistance classes need a 2-user broadcast channel".into(),
            ));
        }
        Ok(Self {
            channel: ScenarioChannel::WithState(channel),
            n,
            messages: vec![message_size],
            assist,
            side_info: SideInfoStructure::none(1),
            si_available: vec![false],
        })
    }

    pub fn broadcast(
        channel: BroadcastChannel,
        messages: Vec<usize>,
        n: usize,
        assist: Assist,
        side_info: SideInfoStructure,
        si_available: &[usize],
    ) -> Result<Self> {
        let k = channel.user_count();
        if messages.len() != k || messages.iter().any(|&m| m < 1) {
            return Err(Error::InvalidArgument(format!(
                "need one message size >= 1 per user (got {messages:?} for {k} users)"
            )));
        }
        if side_info.user_count() != k {
            return Err(Error::InvalidArgument("side-information structure size mismatch".into()));
        }
        if matches!(assist, Assist::Ns0 | Assist::Ns1 | Assist::Ns2) && k != 2 {
            return Err(Error::InvalidArgument(
                "partial assistance classes are defined for 2-user channels".into(),
            ));
        }
        let mut avail = vec![false; k];
        for &u in si_available {
            if u >= k {
                return Err(Error::InvalidArgument(format!("user {u} out of range")));
            }
            avail[u] = true;
        }
        Ok(Self {
            channel: ScenarioChannel::Broadcast(channel),
            n,
            messages,
            assist,
            side_info,
            si_available: avail,
        })
    }

    pub fn assist(&self) -> Assist {
        self.assist
    }

    pub fn with_assist(mut self, assist: Assist) -> Result<Self> {
        if matches!(assist, Assist::Ns0 | Assist::Ns1 | Assist::Ns2) {
            match &self.channel {
                ScenarioChannel::Broadcast(bc) if bc.user_count() == 2 => {}
                _ => {
                    return Err(Error::InvalidArgument(
                        "partial assistance classes need a 2-user broadcast channel".into(),
                    ))
                }
            }
        }
        self.assist = assist;
        Ok(self)
    }

    pub fn messages(&self) -> &[usize] {
        &self.messages
    }

    pub fn user_count(&self) -> usize {
        self.messages.len()
    }

    pub fn side_info(&self) -> &SideInfoStructure {
        &self.side_info
    }

    pub fn si_available(&self) -> &[bool] {
        &self.si_available
    }

    /// The channel after blocklength tensoring.
    pub fn effective_channel(&self) -> Result<ScenarioChannel> {
        Ok(match &self.channel {
            ScenarioChannel::WithState(ch) => {
                ScenarioChannel::WithState(tensor_power(ch, self.n)?)
            }
            ScenarioChannel::Broadcast(bc) => {
                ScenarioChannel::Broadcast(tensor_power_bc(bc, self.n)?)
            }
        })
    }

    /// Connected side-information coordinates of user `k`, ascending.
    fn si_coords(&self, k: usize) -> &[usize] {
        if self.si_available[k] {
            self.side_info.known_by(k)
        } else {
            &[]
        }
    }

    /// Party shape of the fully assisted box for this scenario.
    pub fn box_shape(&self) -> Result<Vec<BoxParty>> {
        let channel = self.effective_channel()?;
        let mut parties = Vec::with_capacity(self.user_count() + 1);
        match &channel {
            ScenarioChannel::WithState(ch) => {
                parties.push(BoxParty::new(
                    vec![
                        PartyWire { role: WireRole::Message(0), size: self.messages[0] },
                        PartyWire { role: WireRole::State, size: ch.s_size() },
                    ],
                    ch.x_size(),
                ));
                parties.push(BoxParty::new(
                    vec![PartyWire { role: WireRole::ChannelOutput, size: ch.y_size() }],
                    self.messages[0],
                ));
            }
            ScenarioChannel::Broadcast(bc) => {
                let tx_wires = (0..self.user_count())
                    .map(|j| PartyWire { role: WireRole::Message(j), size: self.messages[j] })
                    .collect();
                parties.push(BoxParty::new(tx_wires, bc.x_size()));
                for k in 0..self.user_count() {
                    let mut wires =
                        vec![PartyWire { role: WireRole::ChannelOutput, size: bc.y_sizes()[k] }];
                    for &j in self.si_coords(k) {
                        wires.push(PartyWire {
                            role: WireRole::SideInfo(SiSource::Message(j)),
                            size: self.messages[j],
                        });
                    }
                    parties.push(BoxParty::new(wires, self.messages[k]));
                }
            }
        }
        Ok(parties)
    }

    /// Enumerate the nonzero success-probability weights over box entries:
    /// `f(in_idx, out_idx, weight)` with indices in the canonical layout of
    /// `shape`. Side-information wires are pinned to their true values, and
    /// decoded outputs to the transmitted messages (all of them for the
    /// joint target, only user `i`'s for the individual target).
    fn for_each_success_term(
        &self,
        channel: &ScenarioChannel,
        shape: &[BoxParty],
        target: SuccessTarget,
        mut f: impl FnMut(usize, usize, f64),
    ) {
        let out_strides: Vec<usize> = {
            let dims: Vec<usize> = shape.iter().map(|p| p.output_size).collect();
            let mut s = vec![1usize; dims.len()];
            for i in (0..dims.len().saturating_sub(1)).rev() {
                s[i] = s[i + 1] * dims[i + 1];
            }
            s
        };
        match channel {
            ScenarioChannel::WithState(ch) => {
                let m = self.messages[0];
                let weight0 = 1.0 / m as f64;
                let (y_sz, s_sz) = (ch.y_size(), ch.s_size());
                for w in 0..m {
                    for s in 0..s_sz {
                        let ps = ch.state().get(s);
                        if ps == 0.0 {
                            continue;
                        }
                        for y in 0..y_sz {
                            // in = (w, s, y) over wire dims (m, s_sz, y_sz)
                            let in_idx = (w * s_sz + s) * y_sz + y;
                            for x in 0..ch.x_size() {
                                let nv = ch.prob(y, x, s);
                                if nv == 0.0 {
                                    continue;
                                }
                                let out_idx = x * out_strides[0] + w * out_strides[1];
                                f(in_idx, out_idx, weight0 * ps * nv);
                            }
                        }
                    }
                }
            }
            ScenarioChannel::Broadcast(bc) => {
                let k_users = self.user_count();
                let weight0 = 1.0 / self.messages.iter().product::<usize>() as f64;
                let mut w = vec![0usize; k_users];
                let total_w: usize = self.messages.iter().product();
                let total_y = bc.kernel().n_out();
                for _ in 0..total_w {
                    for yj in 0..total_y {
                        let ys = bc.split_output_index(yj);
                        // joint input index across all parties' wires
                        let mut in_idx = 0usize;
                        for (j, &mj) in self.messages.iter().enumerate() {
                            in_idx = in_idx * mj + w[j];
                        }
                        for k in 0..k_users {
                            in_idx = in_idx * bc.y_sizes()[k] + ys[k];
                            for &j in self.si_coords(k) {
                                in_idx = in_idx * self.messages[j] + w[j];
                            }
                        }
                        for x in 0..bc.x_size() {
                            let nv = bc.kernel().get(x, yj);
                            if nv == 0.0 {
                                continue;
                            }
                            match target {
                                SuccessTarget::Joint => {
                                    let mut out_idx = x * out_strides[0];
                                    for k in 0..k_users {
                                        out_idx += w[k] * out_strides[k + 1];
                                    }
                                    f(in_idx, out_idx, weight0 * nv);
                                }
                                SuccessTarget::Individual(i) => {
                                    // sum over the other users' decoded values
                                    let others: Vec<usize> =
                                        (0..k_users).filter(|&k| k != i).collect();
                                    let combos: usize =
                                        others.iter().map(|&k| self.messages[k]).product();
                                    let mut hat = vec![0usize; k_users];
                                    for c in 0..combos {
                                        let mut rem = c;
                                        for &k in others.iter().rev() {
                                            hat[k] = rem % self.messages[k];
                                            rem /= self.messages[k];
                                        }
                                        hat[i] = w[i];
                                        let mut out_idx = x * out_strides[0];
                                        for k in 0..k_users {
                                            out_idx += hat[k] * out_strides[k + 1];
                                        }
                                        f(in_idx, out_idx, weight0 * nv);
                                    }
                                }
                            }
                        }
                    }
                    advance_mixed(&mut w, &self.messages);
                }
            }
        }
    }

    /// Compile the fully assisted scenario to its box polytope LP.
    ///
    /// Variables are box entries with bounds `[0, 1]`; rows are one
    /// normalization equality per joint input and the per-party
    /// complement-singleton no-signaling equalities in
    /// difference-to-reference-input form; the objective is the
    /// channel-weighted success probability.
    pub fn build_ns_lp(&self) -> Result<CompiledNsLp> {
        if !matches!(self.assist, Assist::Full) {
            return Err(Error::InvalidArgument(
                "only the fully assisted class compiles to a single box LP".into(),
            ));
        }
        let channel = self.effective_channel()?;
        let shape = self.box_shape()?;
        build_box_polytope_lp(&shape, |model, shape| {
            self.for_each_success_term(&channel, shape, SuccessTarget::Joint, |i, o, wgt| {
                let n_out: usize = shape.iter().map(|p| p.output_size).product();
                model[i * n_out + o] += wgt;
            });
        })
    }

    /// Optimal joint success probability over the fully assisted class,
    /// together with an optimal box.
    pub fn optimal_success(&self) -> Result<SuccessOptimum> {
        let compiled = self.build_ns_lp()?;
        solve_compiled(compiled)
    }

    /// Optimal individual success probability for user `i` (same constraint
    /// set, alternate objective).
    pub fn optimal_individual_success(&self, user: usize) -> Result<SuccessOptimum> {
        if user >= self.user_count() {
            return Err(Error::InvalidArgument(format!("user {user} out of range")));
        }
        if !matches!(self.assist, Assist::Full) {
            return Err(Error::InvalidArgument(
                "only the fully assisted class compiles to a single box LP".into(),
            ));
        }
        let channel = self.effective_channel()?;
        let shape = self.box_shape()?;
        let compiled = build_box_polytope_lp(&shape, |model, shape| {
            self.for_each_success_term(
                &channel,
                shape,
                SuccessTarget::Individual(user),
                |i, o, wgt| {
                    let n_out: usize = shape.iter().map(|p| p.output_size).product();
                    model[i * n_out + o] += wgt;
                },
            );
        })?;
        solve_compiled(compiled)
    }

    /// Success probability achieved by a given box on this scenario.
    /// The box must match the scenario's party shape sizes.
    pub fn evaluate_success(&self, bx: &BoxTable) -> Result<f64> {
        self.evaluate_target(bx, SuccessTarget::Joint)
    }

    /// Individual success probability of user `i` achieved by a given box.
    pub fn evaluate_individual_success(&self, bx: &BoxTable, user: usize) -> Result<f64> {
        if user >= self.user_count() {
            return Err(Error::InvalidArgument(format!("user {user} out of range")));
        }
        self.evaluate_target(bx, SuccessTarget::Individual(user))
    }

    fn evaluate_target(&self, bx: &BoxTable, target: SuccessTarget) -> Result<f64> {
        let shape = self.box_shape()?;
        check_shape_compatible(&shape, bx)?;
        let channel = self.effective_channel()?;
        let n_out: usize = shape.iter().map(|p| p.output_size).product();
        let mut eta = 0.0;
        self.for_each_success_term(&channel, &shape, target, |i, o, wgt| {
            eta += wgt * bx.probs()[i * n_out + o];
        });
        Ok(eta)
    }

    /// Joint law of messages, decoded messages, channel input and outputs
    /// induced by a box.
    ///
    /// Axis order: point-to-point `(W, What, S, X, Y)`; broadcast
    /// `(W_1..W_K, What_1..What_K, X, Y_1..Y_K)`.
    pub fn induced_joint(&self, bx: &BoxTable) -> Result<JointDist> {
        let shape = self.box_shape()?;
        check_shape_compatible(&shape, bx)?;
        let channel = self.effective_channel()?;
        match &channel {
            ScenarioChannel::WithState(ch) => {
                let m = self.messages[0];
                let dims = vec![m, m, ch.s_size(), ch.x_size(), ch.y_size()];
                JointDist::from_fn(dims, |ix| {
                    let (w, what, s, x, y) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
                    let nv = ch.prob(y, x, s);
                    if nv == 0.0 {
                        return 0.0;
                    }
                    (1.0 / m as f64)
                        * ch.state().get(s)
                        * nv
                        * bx.get_at(&[w, s, y], &[x, what])
                })
            }
            ScenarioChannel::Broadcast(bc) => {
                let k_users = self.user_count();
                let mut dims = Vec::with_capacity(2 * k_users + 1);
                dims.extend_from_slice(&self.messages);
                dims.extend_from_slice(&self.messages);
                dims.push(bc.x_size());
                dims.extend_from_slice(bc.y_sizes());
                let weight0 = 1.0 / self.messages.iter().product::<usize>() as f64;
                JointDist::from_fn(dims, |ix| {
                    let w = &ix[..k_users];
                    let what = &ix[k_users..2 * k_users];
                    let x = ix[2 * k_users];
                    let ys = &ix[2 * k_users + 1..];
                    let nv = bc.prob(ys, x);
                    if nv == 0.0 {
                        return 0.0;
                    }
                    let mut ins = Vec::with_capacity(2 * k_users + 2);
                    ins.extend_from_slice(w);
                    for k in 0..k_users {
                        ins.push(ys[k]);
                        for &j in self.si_coords(k) {
                            ins.push(w[j]);
                        }
                    }
                    let mut outs = Vec::with_capacity(k_users + 1);
                    outs.push(x);
                    outs.extend_from_slice(what);
                    weight0 * nv * bx.get_at(&ins, &outs)
                })
            }
        }
    }

    /// Converse check relating mutual information to the success
    /// probability of a non-signaling box.
    ///
    /// Point-to-point: `I(X;Y|S) >= eta log2 M - H_b(eta)`. Broadcast:
    /// `I(X;Y_1|W_2..W_K) >= eta_1 log2 M_1 - H_b(eta_1)` with user 1's
    /// individual success probability. Fails on boxes that are not
    /// non-signaling (the hypothesis of the bound).
    pub fn check_ns_fano(&self, bx: &BoxTable) -> Result<NsFanoCheck> {
        let (ok, worst) = boxes::is_nonsignaling(bx, boxes::NS_PRECONDITION_TOL);
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "box is not non-signaling (violation {worst:.3e})"
            )));
        }
        let joint = self.induced_joint(bx)?;
        match &self.channel {
            ScenarioChannel::WithState(_) => {
                let m = self.messages[0] as f64;
                let lhs = conditional_mutual_information(&joint, &[3], &[4], &[2])?;
                let eta = self.evaluate_success(bx)?;
                let rhs = eta * m.log2() - binary_entropy(eta);
                Ok(NsFanoCheck { lhs, rhs, eta, holds: lhs >= rhs - 1e-9 })
            }
            ScenarioChannel::Broadcast(_) => {
                let k_users = self.user_count();
                let m1 = self.messages[0] as f64;
                let x_axis = 2 * k_users;
                let y1_axis = 2 * k_users + 1;
                let w_others: Vec<usize> = (1..k_users).collect();
                let lhs =
                    conditional_mutual_information(&joint, &[x_axis], &[y1_axis], &w_others)?;
                let eta1 = self.evaluate_individual_success(bx, 0)?;
                let rhs = eta1 * m1.log2() - binary_entropy(eta1);
                Ok(NsFanoCheck { lhs, rhs, eta: eta1, holds: lhs >= rhs - 1e-9 })
            }
        }
    }

    /// Exact optimum of the classical (unassisted) class by exhaustive
    /// search over deterministic encoders, with exact inner maximization
    /// over decoders. Deterministic schemes suffice: shared randomness mixes
    /// deterministic schemes and cannot beat the best of them.
    pub fn classical_optimal_success(&self) -> Result<f64> {
        if !matches!(self.assist, Assist::Classical) {
            return Err(Error::InvalidArgument(
                "classical optimization is defined for the classical class".into(),
            ));
        }
        let channel = self.effective_channel()?;
        match &channel {
            ScenarioChannel::WithState(ch) => self.classical_p2p(ch),
            ScenarioChannel::Broadcast(bc) => self.classical_bc(bc),
        }
    }

    fn classical_p2p(&self, ch: &ChannelWithState) -> Result<f64> {
        let m = self.messages[0];
        let (x_sz, y_sz, s_sz) = (ch.x_size(), ch.y_size(), ch.s_size());
        let n_enc_inputs = m * s_sz;
        let encoders = checked_pow_cap(x_sz, n_enc_inputs, ENUM_CAP)?;
        let mut best: f64 = 0.0;
        let mut enc = vec![0usize; n_enc_inputs]; // enc[w*s_sz+s] = x
        for _ in 0..encoders {
            // optimal decoder is the cell-wise argmax of q(w, y)
            let mut eta = 0.0;
            for y in 0..y_sz {
                let mut best_w = 0.0f64;
                for w in 0..m {
                    let mut q = 0.0;
                    for s in 0..s_sz {
                        q += ch.state().get(s) * ch.prob(y, enc[w * s_sz + s], s);
                    }
                    best_w = best_w.max(q);
                }
                eta += best_w;
            }
            best = best.max(eta / m as f64);
            advance_digits(&mut enc, x_sz);
        }
        Ok(best)
    }

    fn classical_bc(&self, bc: &BroadcastChannel) -> Result<f64> {
        let k_users = self.user_count();
        let total_w: usize = self.messages.iter().product();
        let encoders = checked_pow_cap(bc.x_size(), total_w, ENUM_CAP)?;
        // decoder domains: (y_k, connected side information)
        let dec_domains: Vec<usize> = (0..k_users)
            .map(|k| {
                bc.y_sizes()[k]
                    * self.si_coords(k).iter().map(|&j| self.messages[j]).product::<usize>()
            })
            .collect();
        // users 1.. are enumerated, user 0's decoder is optimized cell-wise
        let mut dec_total = 1usize;
        for k in 1..k_users {
            let c = checked_pow_cap(self.messages[k], dec_domains[k], ENUM_CAP)?;
            dec_total = dec_total
                .checked_mul(c)
                .filter(|&t| t <= ENUM_CAP)
                .ok_or_else(|| Error::ResourceLimit("decoder enumeration too large".into()))?;
        }
        let mut best: f64 = 0.0;
        let mut enc = vec![0usize; total_w];
        let weight0 = 1.0 / total_w as f64;
        for _ in 0..encoders {
            let mut decs: Vec<Vec<usize>> =
                (1..k_users).map(|k| vec![0usize; dec_domains[k]]).collect();
            loop {
                // mass(y_0, si_0, w_0) accumulated over everything else
                let si0_sz: usize =
                    self.si_coords(0).iter().map(|&j| self.messages[j]).product();
                let mut mass = vec![0.0f64; bc.y_sizes()[0] * si0_sz * self.messages[0]];
                let mut w = vec![0usize; k_users];
                for wj in 0..total_w {
                    let _ = wj;
                    let x = enc[rank_digits(&w, &self.messages)];
                    let si0 = self
                        .si_coords(0)
                        .iter()
                        .fold(0usize, |acc, &j| acc * self.messages[j] + w[j]);
                    for yj in 0..bc.kernel().n_out() {
                        let nv = bc.kernel().get(x, yj);
                        if nv == 0.0 {
                            continue;
                        }
                        let ys = bc.split_output_index(yj);
                        let mut all_ok = true;
                        for k in 1..k_users {
                            let cell = self
                                .si_coords(k)
                                .iter()
                                .fold(ys[k], |acc, &j| acc * self.messages[j] + w[j]);
                            if decs[k - 1][cell] != w[k] {
                                all_ok = false;
                                break;
                            }
                        }
                        if all_ok {
                            mass[(ys[0] * si0_sz + si0) * self.messages[0] + w[0]] += nv;
                        }
                    }
                    advance_mixed(&mut w, &self.messages);
                }
                let mut eta = 0.0;
                for cell in mass.chunks(self.messages[0]) {
                    eta += cell.iter().cloned().fold(0.0f64, f64::max);
                }
                best = best.max(weight0 * eta);
                // advance the decoder tuple
                let mut done = true;
                'outer: for (ki, d) in decs.iter_mut().enumerate() {
                    let base = self.messages[ki + 1];
                    for v in d.iter_mut() {
                        *v += 1;
                        if *v < base {
                            done = false;
                            break 'outer;
                        }
                        *v = 0;
                    }
                }
                if done {
                    break;
                }
            }
            advance_digits(&mut enc, bc.x_size());
        }
        Ok(best)
    }

    /// Optimum of the partially assisted classes: for a box between the
    /// transmitter and one user, the other user's deterministic decoders
    /// are enumerated and the box side is an LP for each (the success
    /// probability is linear in the decoder for a fixed box and vice versa,
    /// so deterministic decoders attain the optimum); for a box between the
    /// two receivers, deterministic encoders are enumerated.
    pub fn mixed_optimal_success(&self) -> Result<f64> {
        let ScenarioChannel::Broadcast(_) = &self.channel else {
            return Err(Error::InvalidArgument(
                "partial assistance classes need a broadcast channel".into(),
            ));
        };
        let ScenarioChannel::Broadcast(bc) = self.effective_channel()? else {
            unreachable!()
        };
        match self.assist {
            Assist::Ns1 => self.mixed_tx_user(&bc, 0),
            Assist::Ns2 => self.mixed_tx_user(&bc, 1),
            Assist::Ns0 => self.mixed_rx_rx(&bc),
            _ => Err(Error::InvalidArgument(
                "mixed optimization is defined for the partial assistance classes".into(),
            )),
        }
    }

    /// Box between transmitter and user `ub`; enumerate the other decoder.
    fn mixed_tx_user(&self, bc: &BroadcastChannel, ub: usize) -> Result<f64> {
        let cb = 1 - ub; // classical user
        let m_ub = self.messages[ub];
        let m_cb = self.messages[cb];
        let si_ub: Vec<usize> = self.si_coords(ub).to_vec();
        let si_cb: Vec<usize> = self.si_coords(cb).to_vec();
        let dec_domain =
            bc.y_sizes()[cb] * si_cb.iter().map(|&j| self.messages[j]).product::<usize>();
        let dec_count = checked_pow_cap(m_cb, dec_domain, ENUM_CAP)?;

        // bipartite box: transmitter with both message wires; user ub
        let mut ub_wires =
            vec![PartyWire { role: WireRole::ChannelOutput, size: bc.y_sizes()[ub] }];
        for &j in &si_ub {
            ub_wires.push(PartyWire {
                role: WireRole::SideInfo(SiSource::Message(j)),
                size: self.messages[j],
            });
        }
        let shape = vec![
            BoxParty::new(
                vec![
                    PartyWire { role: WireRole::Message(0), size: self.messages[0] },
                    PartyWire { role: WireRole::Message(1), size: self.messages[1] },
                ],
                bc.x_size(),
            ),
            BoxParty::new(ub_wires, m_ub),
        ];
        let weight0 = 1.0 / (self.messages[0] * self.messages[1]) as f64;
        let y_ub = bc.y_sizes()[ub];
        let n_out_shape = bc.x_size() * m_ub;

        let mut dec = vec![0usize; dec_domain];
        let mut best: f64 = 0.0;
        for _ in 0..dec_count {
            let compiled = build_box_polytope_lp(&shape, |obj, _| {
                for w0 in 0..self.messages[0] {
                    for w1 in 0..self.messages[1] {
                        let w = [w0, w1];
                        for yub in 0..y_ub {
                            let mut in_idx = (w0 * self.messages[1] + w1) * y_ub + yub;
                            for &j in &si_ub {
                                in_idx = in_idx * self.messages[j] + w[j];
                            }
                            for x in 0..bc.x_size() {
                                // channel weight of the classical user
                                // decoding correctly
                                let mut nv_ok = 0.0;
                                for ycb in 0..bc.y_sizes()[cb] {
                                    let cell = si_cb
                                        .iter()
                                        .fold(ycb, |acc, &j| acc * self.messages[j] + w[j]);
                                    if dec[cell] != w[cb] {
                                        continue;
                                    }
                                    let ys = if ub == 0 { [yub, ycb] } else { [ycb, yub] };
                                    nv_ok += bc.prob(&ys, x);
                                }
                                if nv_ok == 0.0 {
                                    continue;
                                }
                                let out_idx = x * m_ub + w[ub];
                                obj[in_idx * n_out_shape + out_idx] += weight0 * nv_ok;
                            }
                        }
                    }
                }
            })?;
            let opt = solve_compiled(compiled)?;
            best = best.max(opt.eta);
            advance_digits(&mut dec, m_cb);
        }
        Ok(best)
    }

    /// Box between the two receivers; enumerate deterministic encoders.
    fn mixed_rx_rx(&self, bc: &BroadcastChannel) -> Result<f64> {
        let total_w = self.messages[0] * self.messages[1];
        let enc_count = checked_pow_cap(bc.x_size(), total_w, ENUM_CAP)?;
        let mut shape = Vec::new();
        for k in 0..2 {
            let mut wires =
                vec![PartyWire { role: WireRole::ChannelOutput, size: bc.y_sizes()[k] }];
            for &j in self.si_coords(k) {
                wires.push(PartyWire {
                    role: WireRole::SideInfo(SiSource::Message(j)),
                    size: self.messages[j],
                });
            }
            shape.push(BoxParty::new(wires, self.messages[k]));
        }
        let weight0 = 1.0 / total_w as f64;
        let n_out_shape = self.messages[0] * self.messages[1];
        let y_sizes = [bc.y_sizes()[0], bc.y_sizes()[1]];

        let mut enc = vec![0usize; total_w];
        let mut best: f64 = 0.0;
        for _ in 0..enc_count {
            let compiled = build_box_polytope_lp(&shape, |obj, _| {
                for w0 in 0..self.messages[0] {
                    for w1 in 0..self.messages[1] {
                        let w = [w0, w1];
                        let x = enc[w0 * self.messages[1] + w1];
                        for y0 in 0..y_sizes[0] {
                            for y1 in 0..y_sizes[1] {
                                let nv = bc.prob(&[y0, y1], x);
                                if nv == 0.0 {
                                    continue;
                                }
                                let mut in_idx = 0usize;
                                for (k, yk) in [y0, y1].iter().enumerate() {
                                    in_idx = in_idx * y_sizes[k] + yk;
                                    for &j in self.si_coords(k) {
                                        in_idx = in_idx * self.messages[j] + w[j];
                                    }
                                }
                                let out_idx = w0 * self.messages[1] + w1;
                                obj[in_idx * n_out_shape + out_idx] += weight0 * nv;
                            }
                        }
                    }
                }
            })?;
            let opt = solve_compiled(compiled)?;
            best = best.max(opt.eta);
            advance_digits(&mut enc, bc.x_size());
        }
        Ok(best)
    }
}

fn check_shape_compatible(shape: &[BoxParty], bx: &BoxTable) -> Result<()> {
    if bx.party_count() != shape.len() {
        return Err(Error::InvalidArgument(format!(
            "box has {} parties, scenario expects {}",
            bx.party_count(),
            shape.len()
        )));
    }
    for (p, (have, want)) in bx.parties().iter().zip(shape).enumerate() {
        if have.input_size() != want.input_size() || have.output_size != want.output_size {
            return Err(Error::InvalidArgument(format!(
                "party {p} shape mismatch: box ({}, {}), scenario ({}, {})",
                have.input_size(),
                have.output_size,
                want.input_size(),
                want.output_size
            )));
        }
    }
    Ok(())
}

/// Build the box polytope LP for a party shape: `[0,1]` variable bounds, one
/// normalization equality per joint input, and per-party no-signaling
/// equalities in difference-to-reference-input form. `fill_objective`
/// receives a dense objective vector indexed like the box table.
fn build_box_polytope_lp(
    shape: &[BoxParty],
    fill_objective: impl FnOnce(&mut [f64], &[BoxParty]),
) -> Result<CompiledNsLp> {
    let in_sizes: Vec<usize> = shape.iter().map(|p| p.input_size()).collect();
    let out_sizes: Vec<usize> = shape.iter().map(|p| p.output_size).collect();
    let n_in: usize = in_sizes.iter().product();
    let n_out: usize = out_sizes.iter().product();
    let n_vars = n_in * n_out;
    if n_vars > SCENARIO_VAR_CAP {
        return Err(Error::ResourceLimit(format!(
            "scenario compiles to {n_vars} LP variables (cap {SCENARIO_VAR_CAP})"
        )));
    }
    let mut model = LpModel::new(n_vars, true);
    for v in 0..n_vars {
        model.set_bounds(v, 0.0, 1.0)?;
    }
    let mut objective = vec![0.0; n_vars];
    fill_objective(&mut objective, shape);
    for (v, &c) in objective.iter().enumerate() {
        if c != 0.0 {
            model.set_objective_coeff(v, c)?;
        }
    }

    // normalization: for each joint input, outputs sum to one
    for a in 0..n_in {
        let coeffs: Vec<(usize, f64)> = (0..n_out).map(|b| (a * n_out + b, 1.0)).collect();
        model.add_constraint(coeffs, ConstraintOp::Eq, 1.0)?;
    }
    let normalization_rows = n_in;

    // no-signaling: for each party p, each configuration of the other
    // parties' inputs and outputs, the output-marginal of p is equal for
    // every value of p's input (reference value 0)
    let k = shape.len();
    let mut ns_rows = 0usize;
    let mut a_idx = vec![0usize; k];
    let mut b_idx = vec![0usize; k];
    for p in 0..k {
        if in_sizes[p] < 2 {
            continue;
        }
        let others_in: Vec<usize> =
            (0..k).filter(|&i| i != p).map(|i| in_sizes[i]).collect();
        let others_out: Vec<usize> =
            (0..k).filter(|&i| i != p).map(|i| out_sizes[i]).collect();
        let others: Vec<usize> = (0..k).filter(|&i| i != p).collect();
        let n_oth_in: usize = others_in.iter().product();
        let n_oth_out: usize = others_out.iter().product();
        let mut oth_in = vec![0usize; others.len()];
        for _ in 0..n_oth_in {
            let mut oth_out = vec![0usize; others.len()];
            for _ in 0..n_oth_out {
                for ap in 1..in_sizes[p] {
                    let mut coeffs = Vec::with_capacity(2 * out_sizes[p]);
                    for (sign, ap_val) in [(1.0, ap), (-1.0, 0usize)] {
                        for (i, &oi) in others.iter().enumerate() {
                            a_idx[oi] = oth_in[i];
                            b_idx[oi] = oth_out[i];
                        }
                        a_idx[p] = ap_val;
                        let a = rank_digits(&a_idx, &in_sizes);
                        for bp in 0..out_sizes[p] {
                            b_idx[p] = bp;
                            let b = rank_digits(&b_idx, &out_sizes);
                            coeffs.push((a * n_out + b, sign));
                        }
                    }
                    model.add_constraint(coeffs, ConstraintOp::Eq, 0.0)?;
                    ns_rows += 1;
                }
                advance_mixed(&mut oth_out, &others_out);
            }
            advance_mixed(&mut oth_in, &others_in);
        }
    }
    Ok(CompiledNsLp { model, shape: shape.to_vec(), normalization_rows, ns_rows })
}

fn solve_compiled(compiled: CompiledNsLp) -> Result<SuccessOptimum> {
    let sol = lp::solve_default(&compiled.model)?;
    match sol.status {
        LpStatus::Optimal => {
            // clamp solver roundoff into [0, 1] and renormalize each joint
            // input's row exactly
            let n_out: usize = compiled.shape.iter().map(|p| p.output_size).product();
            let mut probs = sol.primal;
            for row in probs.chunks_mut(n_out) {
                let mut sum = 0.0;
                for v in row.iter_mut() {
                    *v = v.clamp(0.0, 1.0);
                    sum += *v;
                }
                if sum > 0.0 {
                    for v in row.iter_mut() {
                        *v /= sum;
                    }
                }
            }
            let bx = BoxTable::new(compiled.shape, probs)?;
            Ok(SuccessOptimum {
                eta: sol.objective,
                bx,
                lp_vars: compiled.model.num_vars(),
                lp_rows: compiled.model.num_constraints(),
            })
        }
        other => Err(Error::NumericFailure(format!(
            "box polytope solve ended with status {other:?}"
        ))),
    }
}

fn advance_digits(digits: &mut [usize], base: usize) {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return;
        }
        *d = 0;
    }
}

fn advance_mixed(digits: &mut [usize], bases: &[usize]) {
    for (d, &b) in digits.iter_mut().zip(bases).rev() {
        *d += 1;
        if *d < b {
            return;
        }
        *d = 0;
    }
}

fn rank_digits(digits: &[usize], bases: &[usize]) -> usize {
    digits.iter().zip(bases).fold(0, |acc, (&d, &b)| acc * b + d)
}

fn checked_pow_cap(base: usize, exp: usize, cap: usize) -> Result<usize> {
    let mut total = 1usize;
    for _ in 0..exp {
        total = total
            .checked_mul(base)
            .ok_or_else(|| Error::ResourceLimit("enumeration count overflows".into()))?;
        if total > cap {
            return Err(Error::ResourceLimit(format!(
                "enumeration of {total}+ deterministic components (cap {cap})"
            )));
        }
    }
    Ok(total)
}
