//! Two clients, Alice and Bob, have `n` servers evaluate a circuit on packed shares.
//!
//! The circuit is cut into layers. Layer `h` holds the gates of level `h` plus a copy of every
//! older wire still needed later. Each layer's operands live in blocks of `ℓ` entries, shared
//! at degree `δ`. The servers multiply or add blocks locally, Bob blinds the result with a
//! degree-`2δ` random block, and Alice opens the blinded blocks, rearranges the entries into
//! the next layer's operand blocks and reshares them at degree `δ`. Bob reshares his blinding
//! the same way, and the servers subtract. Every dealing is checked with the proofs in
//! [`crate::packed`]; any failed check aborts.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Inputs, Node, Op, Party, WireId};
use crate::error::{Abort, Error, Result};
use crate::ot::{CommStats, Outcome, Session};
use crate::packed::{
    deal, prove_membership, verify_replication, CoinSource, Committee, Constraint, LinearSpace, PackedParams,
    ReplicationMode, ReplicationPattern,
};
use crate::ring::{Label, Ring, RingOracle};

pub const ALICE: usize = 0;
pub const BOB: usize = 1;

/// Where an injected share error is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    /// A client's input share on its way to a server (layer 1 operand blocks).
    InputShare,
    /// Bob's degree-`2δ` blinding share on its way to a server.
    Blinding,
    /// A server's blinded product share on its way to Alice.
    ProductToAlice,
    /// Alice's degree-`δ` reshare on its way to a server.
    Reshare,
    /// Bob's degree-`δ` unblinding share on its way to a server.
    Unblinding,
    /// A server's output share on its way to the receiver.
    OutputShare,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::InputShare,
        Stage::Blinding,
        Stage::ProductToAlice,
        Stage::Reshare,
        Stage::Unblinding,
        Stage::OutputShare,
    ];

    fn as_str(self) -> &'static str {
        match self {
            Stage::InputShare => "input-share",
            Stage::Blinding => "blinding",
            Stage::ProductToAlice => "product-to-alice",
            Stage::Reshare => "reshare",
            Stage::Unblinding => "unblinding",
            Stage::OutputShare => "output-share",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Stage> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| Error::param(format!("unknown corruption stage {s:?}")))
    }
}

/// Adds `offset` to the share of `block` sent to or from server `server` (from 0) at `stage`
/// of layer `layer` (from 1). Output shares ignore the layer. The sending party's own record
/// stays honest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corruption {
    pub stage: Stage,
    pub layer: usize,
    pub server: usize,
    pub block: usize,
    pub offset: u64,
}

impl FromStr for Corruption {
    type Err = Error;

    /// `stage:layer:server:block:offset`, e.g. `reshare:1:3:0:5`.
    fn from_str(s: &str) -> Result<Corruption> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 5 {
            return Err(Error::param(format!("corruption {s:?} is not stage:layer:server:block:offset")));
        }
        let num = |x: &str| {
            x.parse::<u64>().map_err(|_| Error::param(format!("bad number {x:?} in corruption {s:?}")))
        };
        Ok(Corruption {
            stage: parts[0].parse()?,
            layer: num(parts[1])? as usize,
            server: num(parts[2])? as usize,
            block: num(parts[3])? as usize,
            offset: num(parts[4])?,
        })
    }
}

/// Alice reshares a consistent degree-`δ` sharing whose entry `entry` of target block `block`
/// in layer `layer` is off by `offset`, and runs the proofs on what she dealt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReshareCheat {
    pub layer: usize,
    pub block: usize,
    pub entry: usize,
    pub offset: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Challenges {
    /// Public-coin challenges.
    #[default]
    Public,
    /// The client that is not proving picks the challenge.
    OtherClient,
}

#[derive(Debug, Clone, Default)]
pub struct OuterOptions {
    pub challenges: Challenges,
    pub replication: ReplicationMode,
    /// Checks `a - a·a = 0` for every input, i.e. that inputs are bits.
    pub boolean_inputs: bool,
    pub corruptions: Vec<Corruption>,
    pub cheat: Option<ReshareCheat>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OuterReport {
    pub outcome: Outcome<Vec<Label>>,
    pub stats: CommStats,
    pub layers: usize,
    /// Gate blocks over all layers.
    pub blocks: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Src {
    Wire(WireId),
    Zero,
}

#[derive(Debug, Clone)]
struct GateBlock {
    op: Op,
    left: Vec<Src>,
    right: Vec<Src>,
}

struct OutputBlock {
    party: Party,
    entries: Vec<Src>,
}

/// Block layout of every layer.
struct Plan {
    layers: Vec<Vec<GateBlock>>,
    /// Where each wire computed in layer `h` sits: `(block, entry)`.
    loc: Vec<HashMap<WireId, (usize, usize)>>,
    outputs: Vec<OutputBlock>,
    /// Output `i` of the circuit is entry `.1` of output block `.0`.
    output_pos: Vec<(usize, usize)>,
}

impl Plan {
    fn new(c: &Circuit, ell: usize) -> Plan {
        let level = c.levels();
        let depth = level.iter().copied().max().unwrap_or(0).max(1);
        let mut last_use = vec![0usize; c.len()];
        for (w, n) in c.nodes().iter().enumerate() {
            if let Node::Gate { a, b, .. } = *n {
                last_use[a] = last_use[a].max(level[w]);
                last_use[b] = last_use[b].max(level[w]);
            }
        }
        for &(_, w) in c.outputs() {
            last_use[w] = depth + 1;
        }
        let chunk = |v: Vec<Src>| -> Vec<Vec<Src>> {
            v.chunks(ell)
                .map(|ch| {
                    let mut b = ch.to_vec();
                    b.resize(ell, Src::Zero);
                    b
                })
                .collect()
        };
        let mut layers = Vec::with_capacity(depth);
        let mut loc = Vec::with_capacity(depth);
        for h in 1..=depth {
            // group: 0 add, 1 sub, 2 mul, 3 copy
            let mut groups: [Vec<WireId>; 4] = Default::default();
            for w in 0..c.len() {
                if level[w] > h || last_use[w] <= h {
                    continue;
                }
                let g = match c.nodes()[w] {
                    Node::Gate { op, .. } if level[w] == h => op as usize,
                    _ => 3,
                };
                groups[g].push(w);
            }
            let mut blocks = Vec::new();
            let mut here = HashMap::new();
            for (g, wires) in groups.iter().enumerate() {
                for ch in wires.chunks(ell) {
                    let bi = blocks.len();
                    let mut left = Vec::with_capacity(ell);
                    let mut right = Vec::with_capacity(ell);
                    for (pos, &w) in ch.iter().enumerate() {
                        here.insert(w, (bi, pos));
                        match c.nodes()[w] {
                            Node::Gate { a, b, .. } if g < 3 => {
                                left.push(Src::Wire(a));
                                right.push(Src::Wire(b));
                            }
                            _ => {
                                left.push(Src::Wire(w));
                                right.push(Src::Zero);
                            }
                        }
                    }
                    let op = [Op::Add, Op::Sub, Op::Mul, Op::Add][g];
                    blocks.push(GateBlock { op, left: chunk(left).remove(0), right: chunk(right).remove(0) });
                }
            }
            layers.push(blocks);
            loc.push(here);
        }
        let mut outputs = Vec::new();
        let mut output_pos = vec![(0, 0); c.outputs().len()];
        for party in [Party::A, Party::B] {
            let mine: Vec<usize> = (0..c.outputs().len()).filter(|&i| c.outputs()[i].0 == party).collect();
            for ch in mine.chunks(ell) {
                let mut entries = Vec::with_capacity(ell);
                for (pos, &i) in ch.iter().enumerate() {
                    output_pos[i] = (outputs.len(), pos);
                    entries.push(Src::Wire(c.outputs()[i].1));
                }
                entries.resize(ell, Src::Zero);
                outputs.push(OutputBlock { party, entries });
            }
        }
        Plan { layers, loc, outputs, output_pos }
    }

    /// Operand blocks of layer `h` (from 1): left and right of each gate block, interleaved.
    fn operands(&self, h: usize) -> Vec<Vec<Src>> {
        self.layers[h - 1].iter().flat_map(|b| [b.left.clone(), b.right.clone()]).collect()
    }
}

/// Runs the protocol on a fresh session. Parameter problems are errors; detected cheating and
/// ⊥ from the oracle give [`Outcome::Aborted`].
pub fn run_outer_protocol(
    ring: &Ring,
    circuit: &Circuit,
    inputs: &Inputs,
    params: &PackedParams,
    opts: &OuterOptions,
    seed: u64,
) -> Result<OuterReport> {
    if opts.replication == ReplicationMode::InnerProduct && 2 * params.delta + params.ell + 1 > params.n {
        return Err(Error::param(format!(
            "inner-product replication checks need 2·delta + ell + 1 <= n, got n={}, ell={}, delta={}",
            params.n, params.ell, params.delta
        )));
    }
    let plan = Plan::new(circuit, params.ell);
    let mut names = vec!["Alice".to_string(), "Bob".to_string()];
    names.extend((1..=params.n).map(|j| format!("S{j}")));
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut s = Session::new(ring, &refs, seed);
    s.set_track_views(false);
    let mut run = Run {
        params,
        opts,
        plan: &plan,
        circuit,
        servers: (2..2 + params.n).collect(),
        adversary: ring.oracle(seed ^ 0xad5e_7a11),
    };
    let res = run.execute(&mut s, inputs);
    Ok(OuterReport {
        outcome: Outcome::from_result(res, "outer")?,
        stats: s.stats(),
        layers: plan.layers.len(),
        blocks: plan.layers.iter().map(Vec::len).sum(),
    })
}

struct Run<'a> {
    params: &'a PackedParams,
    opts: &'a OuterOptions,
    plan: &'a Plan,
    circuit: &'a Circuit,
    servers: Vec<usize>,
    adversary: RingOracle,
}

type Shares = Vec<Vec<Label>>;

fn relabel(e: Error, stage: &str) -> Error {
    match e {
        Error::Abort(a) => Abort { stage: stage.to_string(), ..a }.into(),
        other => other,
    }
}

impl Run<'_> {
    fn committee(&self, dealer: usize) -> Committee<'_> {
        let coins = match self.opts.challenges {
            Challenges::Public => CoinSource::Public,
            Challenges::OtherClient => CoinSource::OtherClient(if dealer == ALICE { BOB } else { ALICE }),
        };
        Committee { params: self.params, servers: &self.servers, coins }
    }

    fn corrupt(
        &mut self,
        held: &mut [Vec<Label>],
        stage: Stage,
        layer: usize,
        blocks: &[usize],
    ) -> Result<()> {
        for c in &self.opts.corruptions {
            if c.stage != stage
                || (stage != Stage::OutputShare && c.layer != layer)
                || c.server >= self.params.n
            {
                continue;
            }
            if let Some(i) = blocks.iter().position(|&b| b == c.block) {
                let off = self.adversary.ring().from_u64(c.offset);
                held[i][c.server] = self.adversary.add(&held[i][c.server], &off)?;
            }
        }
        Ok(())
    }

    /// Deals degree-`degree` sharings of `plain` blocks and proves their degree; returns
    /// `(dealer's shares, servers' shares)`.
    #[allow(clippy::too_many_arguments)]
    fn deal_checked(
        &mut self,
        s: &mut Session,
        dealer: usize,
        plain: &[Vec<Label>],
        degree: usize,
        name: &str,
        stage: Stage,
        layer: usize,
        block_ids: &[usize],
    ) -> Result<(Shares, Shares)> {
        let p = self.params;
        let shares: Shares =
            plain.iter().map(|b| p.share(s.oracle(dealer), b, degree)).collect::<Result<_>>()?;
        let mut held = deal(s, &self.committee(dealer), dealer, &shares, name);
        self.corrupt(&mut held, stage, layer, block_ids)?;
        let wrap = |v: &Shares| -> Vec<Vec<Vec<Label>>> { v.iter().map(|b| vec![b.clone()]).collect() };
        prove_membership(
            s,
            &self.committee(dealer),
            dealer,
            &LinearSpace::degree(degree),
            &wrap(&held),
            &wrap(&shares),
            &format!("{name}-degree"),
        )?;
        Ok((shares, held))
    }

    fn open(&self, o: &mut RingOracle, shares: &[Label], degree: usize, stage: &str) -> Result<Vec<Label>> {
        self.params.reconstruct(o, shares, degree).map_err(|e| relabel(e, stage))
    }

    fn execute(&mut self, s: &mut Session, inputs: &Inputs) -> Result<Vec<Label>> {
        let p = self.params;
        let (n, ell, delta) = (p.n, p.ell, p.delta);
        let plan = self.plan;
        let depth = plan.layers.len();

        let mut a = self.share_inputs(s, inputs)?;
        if self.opts.boolean_inputs {
            self.boolean_check(s, &a)?;
        }

        for h in 1..=depth {
            let blocks = &plan.layers[h - 1];
            let nb = blocks.len();
            let ids: Vec<usize> = (0..nb).collect();

            // local block arithmetic
            let mut d: Shares = vec![Vec::with_capacity(n); nb];
            for (j, &srv) in self.servers.iter().enumerate() {
                let o = s.oracle(srv);
                for (b, gb) in blocks.iter().enumerate() {
                    d[b].push(gb.op.apply(o, &a[2 * b][j], &a[2 * b + 1][j])?);
                }
            }

            // Bob's blinding
            let bob = s.oracle(BOB);
            let r_plain: Vec<Vec<Label>> = (0..nb).map(|_| bob.sample_vec(ell)).collect();
            let (r_dealt, r_held) =
                self.deal_checked(s, BOB, &r_plain, 2 * delta, "blinding", Stage::Blinding, h, &ids)?;

            // blinded products to Alice
            let mut c: Shares = vec![Vec::with_capacity(n); nb];
            for (j, &srv) in self.servers.iter().enumerate() {
                let o = s.oracle(srv);
                for b in 0..nb {
                    c[b].push(o.add(&d[b][j], &r_held[b][j])?);
                }
            }
            let got = s.parallel(n, |s, j| {
                let msg: Vec<Label> = c.iter().map(|blk| blk[j].clone()).collect();
                Ok(s.send_named(self.servers[j], ALICE, "blinded products", &msg))
            })?;
            let mut c_alice: Shares = (0..nb).map(|b| got.iter().map(|m| m[b].clone()).collect()).collect();
            self.corrupt(&mut c_alice, Stage::ProductToAlice, h, &ids)?;
            let c_open: Vec<Vec<Label>> = c_alice
                .iter()
                .map(|blk| self.open(s.oracle(ALICE), blk, 2 * delta, "product-degree-check"))
                .collect::<Result<_>>()?;

            // rearrange into the next layer's operands (or the output blocks)
            let targets: Vec<Vec<Src>> = if h < depth {
                plan.operands(h + 1)
            } else {
                plan.outputs.iter().map(|o| o.entries.clone()).collect()
            };
            let loc = &plan.loc[h - 1];
            let gather = |o: &mut RingOracle, open: &[Vec<Label>]| -> Vec<Vec<Label>> {
                let zero = o.zero();
                targets
                    .iter()
                    .map(|t| {
                        t.iter()
                            .map(|src| match src {
                                Src::Wire(w) => {
                                    let (b, e) = loc[w];
                                    open[b][e].clone()
                                }
                                Src::Zero => zero.clone(),
                            })
                            .collect()
                    })
                    .collect()
            };
            let mut pattern = ReplicationPattern::default();
            for (t, tb) in targets.iter().enumerate() {
                for (e, src) in tb.iter().enumerate() {
                    match src {
                        Src::Wire(w) => pattern.equal.push((loc[w], (nb + t, e))),
                        Src::Zero => pattern.zero.push((nb + t, e)),
                    }
                }
            }
            let tid: Vec<usize> = (0..targets.len()).collect();
            let mut degrees = vec![2 * delta; nb];
            degrees.extend(vec![delta; targets.len()]);

            // Alice reshares
            let mut c_plain = gather(s.oracle(ALICE), &c_open);
            if let Some(ch) = self.opts.cheat.filter(|ch| ch.layer == h) {
                if ch.block < c_plain.len() && ch.entry < ell {
                    let o = s.oracle(ALICE);
                    let off = o.ring().from_u64(ch.offset);
                    c_plain[ch.block][ch.entry] = o.add(&c_plain[ch.block][ch.entry], &off)?;
                }
            }
            let (c2_dealt, c2_held) =
                self.deal_checked(s, ALICE, &c_plain, delta, "reshare", Stage::Reshare, h, &tid)?;
            let held: Shares = c.iter().chain(&c2_held).cloned().collect();
            let claimed: Shares = c_alice.iter().chain(&c2_dealt).cloned().collect();
            verify_replication(
                s,
                &self.committee(ALICE),
                ALICE,
                &degrees,
                &held,
                &claimed,
                &pattern,
                self.opts.replication,
                "reshare-relation",
            )?;

            // Bob reshares the blinding
            let r2_plain = gather(s.oracle(BOB), &r_plain);
            let (r2_dealt, r2_held) =
                self.deal_checked(s, BOB, &r2_plain, delta, "unblinding", Stage::Unblinding, h, &tid)?;
            let held: Shares = r_held.iter().chain(&r2_held).cloned().collect();
            let claimed: Shares = r_dealt.iter().chain(&r2_dealt).cloned().collect();
            verify_replication(
                s,
                &self.committee(BOB),
                BOB,
                &degrees,
                &held,
                &claimed,
                &pattern,
                self.opts.replication,
                "unblinding-relation",
            )?;

            // unblind
            a = vec![Vec::with_capacity(n); targets.len()];
            for (j, &srv) in self.servers.iter().enumerate() {
                let o = s.oracle(srv);
                for t in 0..targets.len() {
                    a[t].push(o.sub(&c2_held[t][j], &r2_held[t][j])?);
                }
            }
        }
        self.deliver(s, &a)
    }

    /// Layer-1 operand blocks: each client shares its own entries (zeros elsewhere), proves
    /// degree and the replication pattern, and the servers add the two contributions.
    fn share_inputs(&mut self, s: &mut Session, inputs: &Inputs) -> Result<Shares> {
        let p = self.params;
        let c = self.circuit;
        let ops = self.plan.operands(1);
        let mut values: HashMap<WireId, Label> = HashMap::new();
        for party in [Party::A, Party::B] {
            for (w, v) in c.inputs(party).into_iter().zip(c.input_values(inputs, party)?) {
                values.insert(w, v);
            }
        }
        let owner = |w: WireId| match c.nodes()[w] {
            Node::Input(Party::B) => BOB,
            _ => ALICE,
        };
        let mut total: Option<Shares> = None;
        for client in [ALICE, BOB] {
            let dealt: Vec<usize> = (0..ops.len())
                .filter(|&b| ops[b].iter().any(|src| matches!(src, Src::Wire(w) if owner(*w) == client)))
                .collect();
            if dealt.is_empty() {
                continue;
            }
            let o = s.oracle(client);
            let zero = o.zero();
            let mut plain = Vec::with_capacity(dealt.len());
            let mut pattern = ReplicationPattern::default();
            let mut first_seen: HashMap<WireId, (usize, usize)> = HashMap::new();
            for (i, &b) in dealt.iter().enumerate() {
                let mut blk = Vec::with_capacity(p.ell);
                for (e, src) in ops[b].iter().enumerate() {
                    match *src {
                        Src::Wire(w) if owner(w) == client => {
                            let v = match c.nodes()[w] {
                                Node::One => o.one(),
                                _ => values[&w].clone(),
                            };
                            o.ring().decode(&v)?;
                            blk.push(v);
                            if let Some(&first) = first_seen.get(&w) {
                                pattern.equal.push((first, (i, e)));
                            } else {
                                first_seen.insert(w, (i, e));
                            }
                        }
                        _ => {
                            blk.push(zero.clone());
                            pattern.zero.push((i, e));
                        }
                    }
                }
                plain.push(blk);
            }
            // corruptions name layer-1 operand blocks; Alice's copy is hit when she deals it
            let ids: Vec<usize> = dealt
                .iter()
                .map(|&b| {
                    let alice_deals =
                        ops[b].iter().any(|src| matches!(src, Src::Wire(w) if owner(*w) == ALICE));
                    if client == ALICE || !alice_deals {
                        b
                    } else {
                        usize::MAX
                    }
                })
                .collect();
            let (dealt_shares, held) =
                self.deal_checked(s, client, &plain, p.delta, "input", Stage::InputShare, 1, &ids)?;
            verify_replication(
                s,
                &self.committee(client),
                client,
                &vec![p.delta; dealt.len()],
                &held,
                &dealt_shares,
                &pattern,
                self.opts.replication,
                "input-replication",
            )?;
            let sum = total.get_or_insert_with(|| vec![Vec::new(); ops.len()]);
            for (i, &b) in dealt.iter().enumerate() {
                if sum[b].is_empty() {
                    sum[b] = held[i].clone();
                } else {
                    for (j, &srv) in self.servers.iter().enumerate() {
                        sum[b][j] = s.oracle(srv).add(&sum[b][j], &held[i][j])?;
                    }
                }
            }
        }
        let mut total = total.unwrap_or_else(|| vec![Vec::new(); ops.len()]);
        for blk in total.iter_mut().filter(|b| b.is_empty()) {
            *blk = self.servers.iter().map(|&srv| s.oracle(srv).zero()).collect();
        }
        Ok(total)
    }

    /// Bob deals degree-`2δ` sharings of zero blocks; the servers open `a - a·a + z` for every
    /// operand block of layer 1 and everyone checks that all entries are zero.
    fn boolean_check(&mut self, s: &mut Session, a: &Shares) -> Result<()> {
        let p = self.params;
        let two_delta = 2 * p.delta;
        let zero = s.oracle(BOB).zero();
        let masks: Shares = a.iter().map(|_| vec![zero.clone(); p.ell]).collect();
        let shares: Shares =
            masks.iter().map(|b| p.share(s.oracle(BOB), b, two_delta)).collect::<Result<_>>()?;
        let held = deal(s, &self.committee(BOB), BOB, &shares, "boolean mask");
        let space = LinearSpace::new(vec![two_delta], (0..p.ell).map(|e| Constraint::Zero((0, e))).collect());
        let wrap = |v: &Shares| -> Vec<Vec<Vec<Label>>> { v.iter().map(|b| vec![b.clone()]).collect() };
        prove_membership(s, &self.committee(BOB), BOB, &space, &wrap(&held), &wrap(&shares), "boolean-mask")?;
        let opened = s.parallel(p.n, |s, j| {
            let srv = self.servers[j];
            let o = s.oracle(srv);
            let mut msg = Vec::with_capacity(a.len());
            for (b, blk) in a.iter().enumerate() {
                let sq = o.mul(&blk[j], &blk[j])?;
                let v = o.sub(&blk[j], &sq)?;
                msg.push(o.add(&v, &held[b][j])?);
            }
            Ok(s.broadcast(srv, "boolean check", &msg))
        })?;
        let o = s.oracle(ALICE);
        let zero = o.zero();
        for b in 0..a.len() {
            let col: Vec<Label> = opened.iter().map(|m| m[b].clone()).collect();
            let secrets = self.open(o, &col, two_delta, "boolean-check")?;
            if secrets.iter().any(|x| *x != zero) {
                return Err(Abort::new("boolean-check", "an input is not a bit").into());
            }
        }
        Ok(())
    }

    /// Servers send their output shares to the receiver, who checks degree `δ` and interpolates.
    fn deliver(&mut self, s: &mut Session, a: &Shares) -> Result<Vec<Label>> {
        let p = self.params;
        let plan = self.plan;
        let mut blocks_out: Vec<Vec<Label>> = vec![Vec::new(); plan.outputs.len()];
        for party in [Party::A, Party::B] {
            let mine: Vec<usize> =
                (0..plan.outputs.len()).filter(|&b| plan.outputs[b].party == party).collect();
            if mine.is_empty() {
                continue;
            }
            let got = s.parallel(p.n, |s, j| {
                let msg: Vec<Label> = mine.iter().map(|&b| a[b][j].clone()).collect();
                Ok(s.send_named(self.servers[j], party.index(), "output shares", &msg))
            })?;
            let mut recv: Shares =
                (0..mine.len()).map(|i| got.iter().map(|m| m[i].clone()).collect()).collect();
            self.corrupt(&mut recv, Stage::OutputShare, 0, &mine)?;
            for (i, &b) in mine.iter().enumerate() {
                blocks_out[b] = self.open(s.oracle(party.index()), &recv[i], p.delta, "output-delivery")?;
            }
        }
        Ok(plan.output_pos.iter().map(|&(b, e)| blocks_out[b][e].clone()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{eval_plain, random_inputs, random_layered_circuit};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn gf97() -> (Ring, PackedParams) {
        let r = Ring::prime_field(97).unwrap();
        let p = PackedParams::new(&mut r.oracle(0), 16, 4, 5).unwrap();
        (r, p)
    }

    fn run(
        r: &Ring,
        p: &PackedParams,
        text: &str,
        inputs: &Inputs,
        opts: &OuterOptions,
        seed: u64,
    ) -> OuterReport {
        let c = Circuit::parse(text).unwrap();
        run_outer_protocol(r, &c, inputs, p, opts, seed).unwrap()
    }

    fn vals(r: &Ring, kv: &[(&str, u64)]) -> Inputs {
        kv.iter().map(|&(k, v)| (k.to_string(), r.from_u64(v))).collect()
    }

    #[test]
    fn single_multiplication() {
        let (r, p) = gf97();
        let text = "INPUT A x\nINPUT B y\nMUL z x y\nOUTPUT A z\nOUTPUT B z\n";
        let rep = run(&r, &p, text, &vals(&r, &[("x", 7), ("y", 20)]), &OuterOptions::default(), 1);
        assert_eq!(rep.outcome, Outcome::Done(vec![r.from_u64(43); 2]));
    }

    #[test]
    fn identity_circuit() {
        let (r, p) = gf97();
        let text = "INPUT A x\nINPUT B y\nOUTPUT B x\nOUTPUT A y\n";
        let rep = run(&r, &p, text, &vals(&r, &[("x", 5), ("y", 6)]), &OuterOptions::default(), 2);
        assert_eq!(rep.outcome, Outcome::Done(vec![r.from_u64(5), r.from_u64(6)]));
    }

    #[test]
    fn non_layered_circuit_with_constant() {
        let (r, p) = gf97();
        let text = "INPUT A x\nINPUT B y\nONE c\nMUL s x y\nMUL t s s\nADD u t x\nSUB v u c\nOUTPUT A v\nOUTPUT B s\n";
        let inputs = vals(&r, &[("x", 3), ("y", 4)]);
        let want = eval_plain(&Circuit::parse(text).unwrap(), &inputs, &mut r.oracle(0)).unwrap();
        for mode in [ReplicationMode::Typewise, ReplicationMode::InnerProduct] {
            for challenges in [Challenges::Public, Challenges::OtherClient] {
                let opts = OuterOptions { replication: mode, challenges, ..Default::default() };
                assert_eq!(run(&r, &p, text, &inputs, &opts, 3).outcome, Outcome::Done(want.clone()));
            }
        }
    }

    #[test]
    fn random_layered_circuits_match_plain() {
        let (r, p) = gf97();
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for seed in 0..10 {
            let c = random_layered_circuit(&mut rng, 8, 3, 0.5);
            let inputs = random_inputs(&c, &mut r.oracle(seed));
            let want = eval_plain(&c, &inputs, &mut r.oracle(0)).unwrap();
            let rep = run_outer_protocol(&r, &c, &inputs, &p, &OuterOptions::default(), seed).unwrap();
            assert_eq!(rep.outcome, Outcome::Done(want));
            assert_eq!(rep.layers, 3);
        }
    }

    #[test]
    fn boolean_inputs() {
        let (r, p) = gf97();
        let text = "INPUT A x\nINPUT B y\nMUL z x y\nOUTPUT A z\n";
        let opts = OuterOptions { boolean_inputs: true, ..Default::default() };
        let ok = run(&r, &p, text, &vals(&r, &[("x", 1), ("y", 0)]), &opts, 4);
        assert_eq!(ok.outcome, Outcome::Done(vec![r.from_u64(0)]));
        let bad = run(&r, &p, text, &vals(&r, &[("x", 1), ("y", 2)]), &opts, 4);
        match bad.outcome {
            Outcome::Aborted(a) => assert_eq!(a.stage, "boolean-check"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn every_corruption_stage_aborts() {
        let (r, p) = gf97();
        let text = "INPUT A x\nINPUT B y\nADD s x y\nMUL z s y\nOUTPUT A z\n";
        let inputs = vals(&r, &[("x", 11), ("y", 12)]);
        for stage in Stage::ALL {
            for server in [0, 7, 15] {
                let opts = OuterOptions {
                    corruptions: vec![Corruption { stage, layer: 1, server, block: 0, offset: 1 }],
                    ..Default::default()
                };
                let rep = run(&r, &p, text, &inputs, &opts, server as u64);
                assert!(rep.outcome.is_abort(), "{stage} at server {server}");
            }
        }
    }

    #[test]
    fn reshare_cheat_is_caught() {
        let (r, p) = gf97();
        let text = "INPUT A x\nINPUT B y\nMUL s x y\nMUL z s y\nOUTPUT A z\n";
        let inputs = vals(&r, &[("x", 11), ("y", 12)]);
        let opts = OuterOptions {
            cheat: Some(ReshareCheat { layer: 1, block: 0, entry: 0, offset: 3 }),
            ..Default::default()
        };
        let mut caught = 0;
        for seed in 0..50 {
            if let Outcome::Aborted(a) = run(&r, &p, text, &inputs, &opts, seed).outcome {
                assert_eq!(a.stage, "reshare-relation");
                caught += 1;
            }
        }
        assert!(caught >= 48, "{caught}");
    }

    #[test]
    fn corruption_spec_parses() {
        let c: Corruption = "reshare:2:3:1:5".parse().unwrap();
        assert_eq!(c, Corruption { stage: Stage::Reshare, layer: 2, server: 3, block: 1, offset: 5 });
        assert!("reshare:2:3".parse::<Corruption>().is_err());
        assert!("nope:1:1:1:1".parse::<Corruption>().is_err());
    }

    #[test]
    fn inner_product_mode_needs_room() {
        let r = Ring::prime_field(97).unwrap();
        let p = PackedParams::new(&mut r.oracle(0), 9, 2, 4).unwrap();
        let c = Circuit::parse("INPUT A x\nOUTPUT A x").unwrap();
        let inputs = vals(&r, &[("x", 1)]);
        assert!(run_outer_protocol(&r, &c, &inputs, &p, &OuterOptions::default(), 0).is_err());
        let opts = OuterOptions { replication: ReplicationMode::Typewise, ..Default::default() };
        let rep = run_outer_protocol(&r, &c, &inputs, &p, &opts, 0).unwrap();
        assert_eq!(rep.outcome, Outcome::Done(vec![r.from_u64(1)]));
    }
}
