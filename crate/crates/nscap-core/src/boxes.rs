//! Multiparty conditional-distribution tables ("boxes"), their
//! non-signaling validity checks, and the explicit box constructions used to
//! relate coding scenarios: cyclic message twirling, receiver-wire
//! substitution, and side-information removal.
//!
//! A box has one party per terminal. Each party owns a single output wire
//! and a list of role-tagged input wires; a party's input alphabet is the
//! row-major product of its input wires (first wire slowest). The flat table
//! is indexed inputs-slowest: party-major over input wires, then party-major
//! over outputs.

use crate::channels::SideInfoStructure;
use crate::{Error, Result};

/// Tolerance used when transform preconditions require a non-signaling box.
pub const NS_PRECONDITION_TOL: f64 = 1e-8;

/// What an input wire carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum WireRole {
    /// A message index (transmitter-side coordinate for message `k`).
    Message(usize),
    /// The transmitter's channel-state coordinate.
    State,
    /// A receiver's channel observation.
    ChannelOutput,
    /// Receiver-side advance information mirroring a transmitter wire.
    SideInfo(SiSource),
}

/// The transmitter wire a side-information coordinate mirrors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum SiSource {
    Message(usize),
    State,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PartyWire {
    pub role: WireRole,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BoxParty {
    pub input_wires: Vec<PartyWire>,
    pub output_size: usize,
}

impl BoxParty {
    pub fn new(input_wires: Vec<PartyWire>, output_size: usize) -> Self {
        Self { input_wires, output_size }
    }

    pub fn input_size(&self) -> usize {
        self.input_wires.iter().map(|w| w.size).product()
    }
}

/// Conditional distribution of all parties' outputs given all parties'
/// inputs.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct BoxTable {
    parties: Vec<BoxParty>,
    probs: Vec<f64>,
}

/// Identifies input wire `wire` of party `party`.
pub type WireId = (usize, usize);

impl BoxTable {
    /// Validates normalization per joint input and clamps entries into
    /// `[0, 1]` (tolerating `1e-12` of solver roundoff on both sides).
    pub fn new(parties: Vec<BoxParty>, mut probs: Vec<f64>) -> Result<Self> {
        let n_in: usize = parties.iter().map(|p| p.input_size()).product();
        let n_out: usize = parties.iter().map(|p| p.output_size).product();
        if parties.is_empty() || n_in == 0 || n_out == 0 {
            return Err(Error::InvalidArgument("box needs nonempty parties and alphabets".into()));
        }
        if probs.len() != n_in * n_out {
            return Err(Error::InvalidArgument(format!(
                "box table has {} entries, expected {}",
                probs.len(),
                n_in * n_out
            )));
        }
        for p in probs.iter_mut() {
            if !p.is_finite() || *p < -1e-12 || *p > 1.0 + 1e-12 {
                return Err(Error::InvalidArgument(format!("entry {p} outside [0, 1]")));
            }
            *p = p.clamp(0.0, 1.0);
        }
        for a in 0..n_in {
            let sum: f64 = probs[a * n_out..(a + 1) * n_out].iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "outputs for joint input {a} sum to {sum}"
                )));
            }
        }
        Ok(Self { parties, probs })
    }

    /// Builds the table by evaluating `f(inputs, outputs)` where `inputs`
    /// are wire values in party-major order and `outputs` are per-party
    /// output values.
    pub fn from_fn(
        parties: Vec<BoxParty>,
        f: impl Fn(&[usize], &[usize]) -> f64,
    ) -> Result<Self> {
        let wire_dims: Vec<usize> =
            parties.iter().flat_map(|p| p.input_wires.iter().map(|w| w.size)).collect();
        let out_dims: Vec<usize> = parties.iter().map(|p| p.output_size).collect();
        let n_in: usize = wire_dims.iter().product();
        let n_out: usize = out_dims.iter().product();
        let mut probs = Vec::with_capacity(n_in * n_out);
        let mut ins = vec![0usize; wire_dims.len()];
        for _ in 0..n_in {
            let mut outs = vec![0usize; out_dims.len()];
            for _ in 0..n_out {
                probs.push(f(&ins, &outs));
                advance(&mut outs, &out_dims);
            }
            advance(&mut ins, &wire_dims);
        }
        Self::new(parties, probs)
    }

    pub fn parties(&self) -> &[BoxParty] {
        &self.parties
    }

    pub fn party_count(&self) -> usize {
        self.parties.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_joint_inputs(&self) -> usize {
        self.parties.iter().map(|p| p.input_size()).product()
    }

    pub fn n_joint_outputs(&self) -> usize {
        self.parties.iter().map(|p| p.output_size).product()
    }

    fn wire_dims(&self) -> Vec<usize> {
        self.parties.iter().flat_map(|p| p.input_wires.iter().map(|w| w.size)).collect()
    }

    fn out_dims(&self) -> Vec<usize> {
        self.parties.iter().map(|p| p.output_size).collect()
    }

    /// Flat offset of a wire within the party-major wire list.
    fn wire_offset(&self, id: WireId) -> Result<usize> {
        let (party, wire) = id;
        if party >= self.parties.len() || wire >= self.parties[party].input_wires.len() {
            return Err(Error::InvalidArgument(format!("no input wire {wire} at party {party}")));
        }
        Ok(self.parties[..party].iter().map(|p| p.input_wires.len()).sum::<usize>() + wire)
    }

    pub fn wire(&self, id: WireId) -> Result<&PartyWire> {
        let (party, wire) = id;
        self.parties
            .get(party)
            .and_then(|p| p.input_wires.get(wire))
            .ok_or_else(|| Error::InvalidArgument(format!("no input wire {wire} at party {party}")))
    }

    /// Finds the unique wire with the given role, if any.
    pub fn find_wire(&self, role: WireRole) -> Option<WireId> {
        let mut found = None;
        for (pi, p) in self.parties.iter().enumerate() {
            for (wi, w) in p.input_wires.iter().enumerate() {
                if w.role == role {
                    if found.is_some() {
                        return None;
                    }
                    found = Some((pi, wi));
                }
            }
        }
        found
    }

    pub fn get(&self, in_idx: usize, out_idx: usize) -> f64 {
        self.probs[in_idx * self.n_joint_outputs() + out_idx]
    }

    /// Value at wire-level input values (party-major) and per-party outputs.
    pub fn get_at(&self, ins: &[usize], outs: &[usize]) -> f64 {
        let in_idx = rank(ins, &self.wire_dims());
        let out_idx = rank(outs, &self.out_dims());
        self.get(in_idx, out_idx)
    }

    /// Splits input wire `id` (size `a*b*..`) into consecutive wires of the
    /// given sizes and roles. Pure metadata: the row-major flat layout is
    /// unchanged because a split wire keeps its first factor slowest.
    pub fn split_input_wire(
        &self,
        id: WireId,
        sizes: &[usize],
        roles: &[WireRole],
    ) -> Result<BoxTable> {
        let w = self.wire(id)?;
        if sizes.iter().product::<usize>() != w.size || sizes.len() != roles.len() {
            return Err(Error::InvalidArgument(format!(
                "cannot split wire of size {} into {:?}",
                w.size, sizes
            )));
        }
        let mut parties = self.parties.clone();
        let new_wires: Vec<PartyWire> = sizes
            .iter()
            .zip(roles)
            .map(|(&size, &role)| PartyWire { role, size })
            .collect();
        parties[id.0].input_wires.splice(id.1..=id.1, new_wires);
        Ok(BoxTable { parties, probs: self.probs.clone() })
    }
}

fn advance(idx: &mut [usize], dims: &[usize]) {
    for ax in (0..dims.len()).rev() {
        idx[ax] += 1;
        if idx[ax] < dims[ax] {
            return;
        }
        idx[ax] = 0;
    }
}

fn rank(idx: &[usize], dims: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}

fn unrank_into(mut v: usize, dims: &[usize], out: &mut [usize]) {
    for ax in (0..dims.len()).rev() {
        out[ax] = v % dims[ax];
        v /= dims[ax];
    }
}

/// Non-signaling validity in the complement-singleton form: for every party
/// `p`, the marginal over `p`'s output (a table over all inputs and the
/// other parties' outputs) must not depend on `p`'s input. Returns the
/// validity verdict at `tol` and the worst absolute defect found, including
/// any normalization defect.
pub fn is_nonsignaling(bx: &BoxTable, tol: f64) -> (bool, f64) {
    let n_in = bx.n_joint_inputs();
    let n_out = bx.n_joint_outputs();
    let mut worst: f64 = 0.0;
    for a in 0..n_in {
        let sum: f64 = bx.probs()[a * n_out..(a + 1) * n_out].iter().sum();
        worst = worst.max((sum - 1.0).abs());
    }

    let in_sizes: Vec<usize> = bx.parties().iter().map(|p| p.input_size()).collect();
    let out_sizes: Vec<usize> = bx.parties().iter().map(|p| p.output_size).collect();
    let k = bx.party_count();
    let mut a_idx = vec![0usize; k];
    let mut b_idx = vec![0usize; k];
    for p in 0..k {
        // key: inputs of all parties except p, outputs of all except p, and
        // the input of p; the marginal must agree across p's input values
        let others_in: usize = in_sizes.iter().enumerate().filter(|&(i, _)| i != p).map(|(_, &s)| s).product();
        let others_out: usize = out_sizes.iter().enumerate().filter(|&(i, _)| i != p).map(|(_, &s)| s).product();
        let mut sums = vec![0.0f64; others_in * others_out * in_sizes[p]];
        for a in 0..n_in {
            unrank_into(a, &in_sizes, &mut a_idx);
            let mut key_in = 0usize;
            for (i, &s) in in_sizes.iter().enumerate() {
                if i != p {
                    key_in = key_in * s + a_idx[i];
                }
            }
            for b in 0..n_out {
                let v = bx.get(a, b);
                if v == 0.0 {
                    continue;
                }
                unrank_into(b, &out_sizes, &mut b_idx);
                let mut key_out = 0usize;
                for (i, &s) in out_sizes.iter().enumerate() {
                    if i != p {
                        key_out = key_out * s + b_idx[i];
                    }
                }
                sums[(key_in * others_out + key_out) * in_sizes[p] + a_idx[p]] += v;
            }
        }
        for chunk in sums.chunks(in_sizes[p]) {
            let reference = chunk[0];
            for &v in &chunk[1..] {
                worst = worst.max((v - reference).abs());
            }
        }
    }
    (worst <= tol, worst)
}

/// Exhaustive variant checking every nontrivial bipartition; intended for
/// boxes with at most 4 parties.
pub fn is_nonsignaling_all_bipartitions(bx: &BoxTable, tol: f64) -> Result<(bool, f64)> {
    let k = bx.party_count();
    if k > 4 {
        return Err(Error::ResourceLimit(
            "bipartition check is limited to 4 parties".into(),
        ));
    }
    let n_in = bx.n_joint_inputs();
    let n_out = bx.n_joint_outputs();
    let in_sizes: Vec<usize> = bx.parties().iter().map(|p| p.input_size()).collect();
    let out_sizes: Vec<usize> = bx.parties().iter().map(|p| p.output_size).collect();
    let mut worst: f64 = 0.0;
    for a in 0..n_in {
        let sum: f64 = bx.probs()[a * n_out..(a + 1) * n_out].iter().sum();
        worst = worst.max((sum - 1.0).abs());
    }
    let mut a_idx = vec![0usize; k];
    let mut b_idx = vec![0usize; k];
    for mask in 1..(1usize << k) - 1 {
        // parties in `mask` keep their outputs; the complement's inputs must
        // not matter
        let keep: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
        let drop: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 0).collect();
        let keep_in: usize = keep.iter().map(|&i| in_sizes[i]).product();
        let keep_out: usize = keep.iter().map(|&i| out_sizes[i]).product();
        let drop_in: usize = drop.iter().map(|&i| in_sizes[i]).product();
        let mut sums = vec![0.0f64; keep_in * keep_out * drop_in];
        for a in 0..n_in {
            unrank_into(a, &in_sizes, &mut a_idx);
            let ki = keep.iter().fold(0usize, |acc, &i| acc * in_sizes[i] + a_idx[i]);
            let di = drop.iter().fold(0usize, |acc, &i| acc * in_sizes[i] + a_idx[i]);
            for b in 0..n_out {
                let v = bx.get(a, b);
                if v == 0.0 {
                    continue;
                }
                unrank_into(b, &out_sizes, &mut b_idx);
                let ko = keep.iter().fold(0usize, |acc, &i| acc * out_sizes[i] + b_idx[i]);
                sums[(ki * keep_out + ko) * drop_in + di] += v;
            }
        }
        for chunk in sums.chunks(drop_in) {
            let reference = chunk[0];
            for &v in &chunk[1..] {
                worst = worst.max((v - reference).abs());
            }
        }
    }
    Ok((worst <= tol, worst))
}

/// Average the box over the cyclic group acting simultaneously on a message
/// input wire of the transmitter and the decoded output of `decoded_party`.
///
/// Preserves the success probability for uniformly distributed messages, and
/// maps non-signaling boxes to non-signaling boxes whose transmitter-side
/// marginal is the constant `1/M`.
pub fn twirl_cyclic(bx: &BoxTable, message_wire: WireId, decoded_party: usize) -> Result<BoxTable> {
    let m = bx.wire(message_wire)?.size;
    if decoded_party >= bx.party_count() {
        return Err(Error::InvalidArgument(format!("no party {decoded_party}")));
    }
    if bx.parties()[decoded_party].output_size != m {
        return Err(Error::InvalidArgument(format!(
            "message wire has size {m} but party {decoded_party} outputs {}",
            bx.parties()[decoded_party].output_size
        )));
    }
    let (ok, worst) = is_nonsignaling(bx, NS_PRECONDITION_TOL);
    if !ok {
        return Err(Error::InvalidArgument(format!(
            "twirl input must be non-signaling (violation {worst:.3e})"
        )));
    }
    let w_off = bx.wire_offset(message_wire)?;
    let weight = 1.0 / m as f64;
    BoxTable::from_fn(bx.parties().to_vec(), |ins, outs| {
        let mut ins2 = ins.to_vec();
        let mut outs2 = outs.to_vec();
        let mut total = 0.0;
        for shift in 0..m {
            ins2[w_off] = (ins[w_off] + shift) % m;
            outs2[decoded_party] = (outs[decoded_party] + shift) % m;
            total += bx.get_at(&ins2, &outs2);
        }
        weight * total
    })
}

/// Delete receiver input wire `rx_wire`, reading the old table at the value
/// carried by the transmitter-side wire `tx_wire` in the same joint input.
///
/// This realizes the receiver-wire substitution step: applied after
/// [`twirl_cyclic`] it yields a non-signaling box; applied to a box that
/// signals through `rx_wire` the result may fail [`is_nonsignaling`], which
/// is the caller's responsibility to check.
pub fn substitute_state(bx: &BoxTable, rx_wire: WireId, tx_wire: WireId) -> Result<BoxTable> {
    if rx_wire.0 == tx_wire.0 {
        return Err(Error::InvalidArgument(
            "substitution needs wires of distinct parties".into(),
        ));
    }
    let rx = bx.wire(rx_wire)?;
    let tx = bx.wire(tx_wire)?;
    if rx.size != tx.size {
        return Err(Error::InvalidArgument(format!(
            "wire sizes differ: {} vs {}",
            rx.size, tx.size
        )));
    }
    let rx_off = bx.wire_offset(rx_wire)?;
    let mut tx_off = bx.wire_offset(tx_wire)?;
    if tx_off > rx_off {
        tx_off -= 1; // position after the rx wire is removed
    }
    let mut parties = bx.parties().to_vec();
    parties[rx_wire.0].input_wires.remove(rx_wire.1);
    BoxTable::from_fn(parties, |ins, outs| {
        let mut full = Vec::with_capacity(ins.len() + 1);
        full.extend_from_slice(&ins[..rx_off]);
        full.push(ins[tx_off]);
        full.extend_from_slice(&ins[rx_off..]);
        bx.get_at(&full, outs)
    })
}

/// Remove user `k`'s side-information wires (user `k` is party `k+1`).
///
/// Sound when message `k` is not side information for any user: first the
/// cyclic twirl is applied to message `k` and user `k`'s decoded output,
/// then each of user `k`'s side-information wires is substituted by the
/// transmitter wire it mirrors. The output is non-signaling and achieves the
/// same success probability.
pub fn remove_side_info_k(
    bx: &BoxTable,
    k: usize,
    structure: &SideInfoStructure,
) -> Result<BoxTable> {
    if k >= structure.user_count() {
        return Err(Error::InvalidArgument(format!("user {k} out of range")));
    }
    if !structure.message_unknown_to_all(k) {
        return Err(Error::InvalidArgument(format!(
            "message {k} is side information for some user; removal is unsound"
        )));
    }
    let party = k + 1;
    if party >= bx.party_count() {
        return Err(Error::InvalidArgument(format!("box has no party for user {k}")));
    }
    // cross-check the wires against the declared structure
    let si_sources: Vec<usize> = bx.parties()[party]
        .input_wires
        .iter()
        .filter_map(|w| match w.role {
            WireRole::SideInfo(SiSource::Message(j)) => Some(j),
            _ => None,
        })
        .collect();
    if si_sources != structure.known_by(k) {
        return Err(Error::InvalidArgument(format!(
            "side-information wires {:?} of user {k} do not match the declared structure {:?}",
            si_sources,
            structure.known_by(k)
        )));
    }
    let msg_wire = bx
        .find_wire(WireRole::Message(k))
        .ok_or_else(|| Error::InvalidArgument(format!("no transmitter wire for message {k}")))?;
    let mut cur = twirl_cyclic(bx, msg_wire, party)?;
    // substitute side-information wires back-to-front so indices stay valid
    loop {
        let next = cur.parties()[party]
            .input_wires
            .iter()
            .enumerate()
            .rev()
            .find_map(|(wi, w)| match w.role {
                WireRole::SideInfo(SiSource::Message(j)) => Some((wi, j)),
                _ => None,
            });
        let Some((wi, j)) = next else { break };
        let tx_wire = cur
            .find_wire(WireRole::Message(j))
            .ok_or_else(|| Error::InvalidArgument(format!("no transmitter wire for message {j}")))?;
        cur = substitute_state(&cur, (party, wi), tx_wire)?;
    }
    Ok(cur)
}

/// Marginal box of a party subset: outputs of the other parties are summed
/// out and their inputs averaged over, after checking that the marginal is
/// input-independent within `tol` (it is, for a non-signaling box).
pub fn marginal_box(bx: &BoxTable, subset: &[usize], tol: f64) -> Result<BoxTable> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument("empty party subset".into()));
    }
    let k = bx.party_count();
    let mut seen = vec![false; k];
    for &p in subset {
        if p >= k {
            return Err(Error::InvalidArgument(format!("party {p} out of range")));
        }
        if seen[p] {
            return Err(Error::InvalidArgument(format!("party {p} repeated")));
        }
        seen[p] = true;
    }
    let drop: Vec<usize> = (0..k).filter(|p| !seen[*p]).collect();
    let in_sizes: Vec<usize> = bx.parties().iter().map(|p| p.input_size()).collect();
    let out_sizes: Vec<usize> = bx.parties().iter().map(|p| p.output_size).collect();
    let keep_in: usize = subset.iter().map(|&p| in_sizes[p]).product();
    let keep_out: usize = subset.iter().map(|&p| out_sizes[p]).product();
    let drop_in: usize = drop.iter().map(|&p| in_sizes[p]).product();

    // accumulate sums keyed by (subset inputs, subset outputs, dropped inputs)
    let mut sums = vec![0.0f64; keep_in * keep_out * drop_in];
    let n_in = bx.n_joint_inputs();
    let n_out = bx.n_joint_outputs();
    let mut a_idx = vec![0usize; k];
    let mut b_idx = vec![0usize; k];
    for a in 0..n_in {
        unrank_into(a, &in_sizes, &mut a_idx);
        let ki = subset.iter().fold(0usize, |acc, &p| acc * in_sizes[p] + a_idx[p]);
        let di = drop.iter().fold(0usize, |acc, &p| acc * in_sizes[p] + a_idx[p]);
        for b in 0..n_out {
            let v = bx.get(a, b);
            if v == 0.0 {
                continue;
            }
            unrank_into(b, &out_sizes, &mut b_idx);
            let ko = subset.iter().fold(0usize, |acc, &p| acc * out_sizes[p] + b_idx[p]);
            sums[(ki * keep_out + ko) * drop_in + di] += v;
        }
    }
    let mut probs = Vec::with_capacity(keep_in * keep_out);
    for chunk in sums.chunks(drop_in) {
        let lo = chunk.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = chunk.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo > tol {
            return Err(Error::InvalidArgument(format!(
                "marginal depends on excluded parties' inputs (spread {:.3e})",
                hi - lo
            )));
        }
        probs.push(chunk.iter().sum::<f64>() / drop_in as f64);
    }
    let parties: Vec<BoxParty> = subset.iter().map(|&p| bx.parties()[p].clone()).collect();
    BoxTable::new(parties, probs)
}

/// Canonical non-signaling, non-classical bipartite table: binary inputs and
/// outputs with `a xor b = x and y`, both outputs marginally uniform. Test
/// fixture for the validity checks.
pub fn pr_box() -> BoxTable {
    let parties = vec![
        BoxParty::new(vec![PartyWire { role: WireRole::ChannelOutput, size: 2 }], 2),
        BoxParty::new(vec![PartyWire { role: WireRole::ChannelOutput, size: 2 }], 2),
    ];
    BoxTable::from_fn(parties, |ins, outs| {
        if outs[0] ^ outs[1] == ins[0] & ins[1] {
            0.5
        } else {
            0.0
        }
    })
    .unwrap()
}
