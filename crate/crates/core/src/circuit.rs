//! Arithmetic circuits over a black-box ring: a line-oriented text format, plain evaluation,
//! and two-party evaluation on additive shares with a pluggable product-sharing backend.
//!
//! Grammar, one statement per line (`#` starts a comment):
//!
//! ```text
//! RING zm:97
//! INPUT A x
//! INPUT B y
//! ONE c
//! ADD s x y
//! MUL p s c
//! OUTPUT A p
//! ```
//!
//! Statements may appear in any order; wires are sorted topologically after parsing.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ot::Session;
use crate::pdtshr::{degree2_share_many, ProductSharing};
use crate::ring::{Label, Ring, RingOracle};

pub type WireId = usize;

/// Input values by wire name.
pub type Inputs = BTreeMap<String, Label>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

impl Party {
    /// Session index of the party in two-party sessions.
    pub fn index(self) -> usize {
        match self {
            Party::A => 0,
            Party::B => 1,
        }
    }

    pub fn other(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Party::A => "A",
            Party::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Op {
    Add,
    Sub,
    Mul,
}

impl Op {
    fn keyword(self) -> &'static str {
        match self {
            Op::Add => "ADD",
            Op::Sub => "SUB",
            Op::Mul => "MUL",
        }
    }

    pub fn apply(self, o: &mut RingOracle, a: &Label, b: &Label) -> Result<Label> {
        match self {
            Op::Add => o.add(a, b),
            Op::Sub => o.sub(a, b),
            Op::Mul => o.mul(a, b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Input(Party),
    One,
    Gate { op: Op, a: WireId, b: WireId },
}

/// A validated circuit. Wire ids follow a topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    pub ring: Option<String>,
    names: Vec<String>,
    nodes: Vec<Node>,
    outputs: Vec<(Party, WireId)>,
}

fn parse_party(tok: &str, line: usize) -> Result<Party> {
    match tok {
        "A" | "a" | "Alice" => Ok(Party::A),
        "B" | "b" | "Bob" => Ok(Party::B),
        _ => Err(Error::Parse { line, msg: format!("unknown party {tok:?} (expected A or B)") }),
    }
}

enum RawNode {
    Input(Party),
    One,
    Gate(Op, String, String),
}

impl Circuit {
    pub fn parse(text: &str) -> Result<Circuit> {
        let mut ring = None;
        let mut defs: Vec<(String, RawNode, usize)> = Vec::new();
        let mut def_line: HashMap<String, usize> = HashMap::new();
        let mut raw_outputs: Vec<(Party, String, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            if toks.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line, msg };
            let want = |n: usize| {
                if toks.len() == n {
                    Ok(())
                } else {
                    Err(err(format!("{} takes {} operand(s), got {}", toks[0], n - 1, toks.len() - 1)))
                }
            };
            let (name, node) = match toks[0].to_ascii_uppercase().as_str() {
                "RING" => {
                    want(2)?;
                    if ring.is_some() {
                        return Err(err("duplicate RING header".into()));
                    }
                    Ring::parse(toks[1]).map_err(|e| err(format!("bad ring spec: {e}")))?;
                    ring = Some(toks[1].to_string());
                    continue;
                }
                "INPUT" => {
                    want(3)?;
                    (toks[2], RawNode::Input(parse_party(toks[1], line)?))
                }
                "ONE" => {
                    want(2)?;
                    (toks[1], RawNode::One)
                }
                "OUTPUT" => {
                    want(3)?;
                    raw_outputs.push((parse_party(toks[1], line)?, toks[2].to_string(), line));
                    continue;
                }
                kw @ ("ADD" | "SUB" | "MUL") => {
                    want(4)?;
                    let op = match kw {
                        "ADD" => Op::Add,
                        "SUB" => Op::Sub,
                        _ => Op::Mul,
                    };
                    (toks[1], RawNode::Gate(op, toks[2].to_string(), toks[3].to_string()))
                }
                other => return Err(err(format!("unknown statement {other:?}"))),
            };
            if let Some(prev) = def_line.insert(name.to_string(), line) {
                return Err(err(format!("wire {name:?} already defined on line {prev}")));
            }
            defs.push((name.to_string(), node, line));
        }

        // resolve names, then order topologically (Kahn, lowest definition index first)
        let index: HashMap<&str, usize> =
            defs.iter().enumerate().map(|(i, (n, _, _))| (n.as_str(), i)).collect();
        let lookup = |n: &str, line: usize| {
            index.get(n).copied().ok_or_else(|| Error::Parse { line, msg: format!("undefined wire {n:?}") })
        };
        let mut deps: Vec<Vec<usize>> = Vec::with_capacity(defs.len());
        for (_, node, line) in &defs {
            deps.push(match node {
                RawNode::Gate(_, a, b) => vec![lookup(a, *line)?, lookup(b, *line)?],
                _ => Vec::new(),
            });
        }
        let mut pending: Vec<usize> = deps.iter().map(Vec::len).collect();
        let mut users: Vec<Vec<usize>> = vec![Vec::new(); defs.len()];
        for (i, d) in deps.iter().enumerate() {
            for &x in d {
                users[x].push(i);
            }
        }
        let mut ready: std::collections::BTreeSet<usize> =
            (0..defs.len()).filter(|&i| pending[i] == 0).collect();
        let mut order = Vec::with_capacity(defs.len());
        while let Some(i) = ready.pop_first() {
            order.push(i);
            for &u in &users[i] {
                pending[u] -= 1;
                if pending[u] == 0 {
                    ready.insert(u);
                }
            }
        }
        if order.len() != defs.len() {
            let stuck = (0..defs.len()).find(|&i| pending[i] > 0).expect("some wire is stuck");
            return Err(Error::Parse {
                line: defs[stuck].2,
                msg: format!("cycle through wire {:?}", defs[stuck].0),
            });
        }
        let mut new_id = vec![0; defs.len()];
        for (k, &i) in order.iter().enumerate() {
            new_id[i] = k;
        }
        let mut names = Vec::with_capacity(defs.len());
        let mut nodes = Vec::with_capacity(defs.len());
        for &i in &order {
            names.push(defs[i].0.clone());
            nodes.push(match &defs[i].1 {
                RawNode::Input(p) => Node::Input(*p),
                RawNode::One => Node::One,
                RawNode::Gate(op, _, _) => {
                    Node::Gate { op: *op, a: new_id[deps[i][0]], b: new_id[deps[i][1]] }
                }
            });
        }
        let mut outputs = Vec::with_capacity(raw_outputs.len());
        for (p, n, line) in raw_outputs {
            outputs.push((p, new_id[lookup(&n, line)?]));
        }
        if outputs.is_empty() {
            return Err(Error::Circuit("circuit has no outputs".into()));
        }
        Ok(Circuit { ring, names, nodes, outputs })
    }

    /// Builds a circuit from nodes already in topological order.
    pub fn from_nodes(
        names: Vec<String>,
        nodes: Vec<Node>,
        outputs: Vec<(Party, WireId)>,
    ) -> Result<Circuit> {
        if names.len() != nodes.len() {
            return Err(Error::Circuit("one name per node".into()));
        }
        for (i, n) in nodes.iter().enumerate() {
            if let Node::Gate { a, b, .. } = *n {
                if a >= i || b >= i {
                    return Err(Error::Circuit(format!("gate {} uses a later wire", names[i])));
                }
            }
        }
        if outputs.is_empty() || outputs.iter().any(|&(_, w)| w >= nodes.len()) {
            return Err(Error::Circuit("bad output list".into()));
        }
        Ok(Circuit { ring: None, names, nodes, outputs })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn name(&self, w: WireId) -> &str {
        &self.names[w]
    }

    pub fn outputs(&self) -> &[(Party, WireId)] {
        &self.outputs
    }

    pub fn inputs(&self, p: Party) -> Vec<WireId> {
        (0..self.nodes.len()).filter(|&w| self.nodes[w] == Node::Input(p)).collect()
    }

    pub fn gate_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Gate { .. })).count()
    }

    pub fn mul_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Gate { op: Op::Mul, .. })).count()
    }

    pub fn uses_one(&self) -> bool {
        self.nodes.contains(&Node::One)
    }

    /// Multiplication gates on the path to each wire, maximized over paths.
    pub fn mul_depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for (w, n) in self.nodes.iter().enumerate() {
            if let Node::Gate { op, a, b } = *n {
                d[w] = d[a].max(d[b]) + usize::from(op == Op::Mul);
            }
        }
        d
    }

    /// Maximal number of multiplication gates on a path from an input to an output.
    pub fn mult_depth(&self) -> usize {
        let d = self.mul_depths();
        self.outputs.iter().map(|&(_, w)| d[w]).max().unwrap_or(0)
    }

    /// Gate layers: inputs and constants are at level 0, a gate one above its deepest input.
    pub fn levels(&self) -> Vec<usize> {
        let mut l = vec![0; self.nodes.len()];
        for (w, n) in self.nodes.iter().enumerate() {
            if let Node::Gate { a, b, .. } = *n {
                l[w] = l[a].max(l[b]) + 1;
            }
        }
        l
    }

    /// Whether every gate reads only wires of the previous level.
    pub fn is_layered(&self) -> bool {
        let l = self.levels();
        self.nodes.iter().enumerate().all(|(w, n)| match *n {
            Node::Gate { a, b, .. } => l[a] + 1 == l[w] && l[b] + 1 == l[w],
            _ => true,
        })
    }

    /// Looks up the values of `p`'s input wires; missing names are an error.
    pub fn input_values(&self, inputs: &Inputs, p: Party) -> Result<Vec<Label>> {
        self.inputs(p)
            .into_iter()
            .map(|w| {
                inputs
                    .get(&self.names[w])
                    .cloned()
                    .ok_or_else(|| Error::Circuit(format!("no value for input wire {:?}", self.names[w])))
            })
            .collect()
    }

    fn check_one(&self, ring: &Ring) -> Result<()> {
        if self.uses_one() && !(ring.is_field() || ring.is_pseudo_field()) {
            return Err(Error::Circuit("ONE needs a field or pseudo-field instantiation".into()));
        }
        Ok(())
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = &self.ring {
            writeln!(f, "RING {r}")?;
        }
        for (w, n) in self.nodes.iter().enumerate() {
            match *n {
                Node::Input(p) => writeln!(f, "INPUT {p} {}", self.names[w])?,
                Node::One => writeln!(f, "ONE {}", self.names[w])?,
                Node::Gate { op, a, b } => {
                    writeln!(f, "{} {} {} {}", op.keyword(), self.names[w], self.names[a], self.names[b])?
                }
            }
        }
        for &(p, w) in &self.outputs {
            writeln!(f, "OUTPUT {p} {}", self.names[w])?;
        }
        Ok(())
    }
}

/// Evaluates the circuit directly on the oracle. Any invalid input label gives ⊥
/// ([`Error::InvalidLabel`]), whether or not the wire is used.
pub fn eval_plain(c: &Circuit, inputs: &Inputs, o: &mut RingOracle) -> Result<Vec<Label>> {
    c.check_one(o.ring())?;
    let mut vals: Vec<Option<Label>> = vec![None; c.len()];
    for p in [Party::A, Party::B] {
        for (w, v) in c.inputs(p).into_iter().zip(c.input_values(inputs, p)?) {
            o.ring().decode(&v)?;
            vals[w] = Some(v);
        }
    }
    for (w, n) in c.nodes.iter().enumerate() {
        match *n {
            Node::Input(_) => {}
            Node::One => vals[w] = Some(o.one()),
            Node::Gate { op, a, b } => {
                let (x, y) = (vals[a].as_ref().expect("topological"), vals[b].as_ref().expect("topological"));
                vals[w] = Some(op.apply(o, x, y)?);
            }
        }
    }
    Ok(c.outputs.iter().map(|&(_, w)| vals[w].clone().expect("evaluated")).collect())
}

/// Evaluates the circuit with Alice (party 0) and Bob (party 1) holding additive shares of
/// every wire. Inputs and constants need no messages: the owner's share is the value and the
/// other share is zero. Additions are local. All multiplications at the same multiplicative
/// depth go through one batched call of [`degree2_share_many`]. Each output is opened by the
/// non-receiving party sending its share.
///
/// Returns the outputs as obtained by their receivers.
pub fn eval_shared(
    s: &mut Session,
    c: &Circuit,
    inputs: &Inputs,
    backend: &mut dyn ProductSharing,
) -> Result<Vec<Label>> {
    const A: usize = 0;
    const B: usize = 1;
    c.check_one(s.ring())?;
    let depth = c.mul_depths();
    let max_depth = depth.iter().copied().max().unwrap_or(0);
    let mut share: Vec<Option<(Label, Label)>> = vec![None; c.len()];
    let input_vals: HashMap<WireId, Label> = [Party::A, Party::B]
        .into_iter()
        .map(|p| Ok(c.inputs(p).into_iter().zip(c.input_values(inputs, p)?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    for round in 0..=max_depth {
        let muls: Vec<WireId> = (0..c.len())
            .filter(|&w| depth[w] == round && matches!(c.nodes[w], Node::Gate { op: Op::Mul, .. }))
            .collect();
        if !muls.is_empty() {
            let pick = |w: WireId, side: usize| -> (Label, Label) {
                let Node::Gate { a, b, .. } = c.nodes[w] else { unreachable!() };
                let get = |x: WireId| {
                    let (sa, sb) = share[x].as_ref().expect("operand ready");
                    if side == A {
                        sa.clone()
                    } else {
                        sb.clone()
                    }
                };
                (get(a), get(b))
            };
            let a_side: Vec<(Label, Label)> = muls.iter().map(|&w| pick(w, A)).collect();
            let b_side: Vec<(Label, Label)> = muls.iter().map(|&w| pick(w, B)).collect();
            let out = degree2_share_many(s, backend, &a_side, &b_side)?;
            for (&w, z) in muls.iter().zip(out) {
                share[w] = Some(z);
            }
        }
        for w in 0..c.len() {
            if depth[w] != round || share[w].is_some() {
                continue;
            }
            share[w] = Some(match c.nodes[w] {
                Node::Input(p) => {
                    let v = input_vals[&w].clone();
                    s.ring().decode(&v)?;
                    let z = s.oracle(p.other().index()).zero();
                    if p == Party::A {
                        (v, z)
                    } else {
                        (z, v)
                    }
                }
                Node::One => (s.oracle(A).one(), s.oracle(B).zero()),
                Node::Gate { op, a, b } => {
                    debug_assert!(op != Op::Mul);
                    let (xa, xb) = share[a].clone().expect("operand ready");
                    let (ya, yb) = share[b].clone().expect("operand ready");
                    (op.apply(s.oracle(A), &xa, &ya)?, op.apply(s.oracle(B), &xb, &yb)?)
                }
            });
        }
    }
    // every output is opened in the same round
    let outs = s.parallel(c.outputs.len(), |s, i| {
        let (p, w) = c.outputs[i];
        let (sa, sb) = share[w].clone().expect("evaluated");
        let (mine, theirs) = if p == Party::A { (sa, sb) } else { (sb, sa) };
        let name = format!("output {}", c.names[w]);
        let got = s.send_named(p.other().index(), p.index(), &name, &[theirs]);
        s.oracle(p.index()).add(&mine, &got[0])
    })?;
    Ok(outs)
}

/// Shape of a random circuit.
#[derive(Debug, Clone, Copy)]
pub struct RandomCircuitSpec {
    pub inputs_per_party: usize,
    pub gates: usize,
    pub max_mult_depth: usize,
    pub outputs: usize,
    pub allow_one: bool,
}

/// A random circuit: each gate reads two earlier wires; a would-be multiplication that exceeds
/// the depth bound becomes an addition.
pub fn random_circuit<R: Rng>(rng: &mut R, spec: RandomCircuitSpec) -> Circuit {
    let mut names = Vec::new();
    let mut nodes = Vec::new();
    let mut depth = Vec::new();
    for p in [Party::A, Party::B] {
        for i in 0..spec.inputs_per_party.max(1) {
            names.push(format!("{}{i}", p.to_string().to_lowercase()));
            nodes.push(Node::Input(p));
            depth.push(0);
        }
    }
    if spec.allow_one {
        names.push("one".into());
        nodes.push(Node::One);
        depth.push(0);
    }
    for g in 0..spec.gates {
        let a = rng.gen_range(0..nodes.len());
        let b = rng.gen_range(0..nodes.len());
        let mut op = [Op::Add, Op::Sub, Op::Mul][rng.gen_range(0..3)];
        let d = if op == Op::Mul { depth[a].max(depth[b]) + 1 } else { depth[a].max(depth[b]) };
        let d = if d > spec.max_mult_depth {
            op = Op::Add;
            depth[a].max(depth[b])
        } else {
            d
        };
        names.push(format!("g{g}"));
        nodes.push(Node::Gate { op, a, b });
        depth.push(d);
    }
    let n = nodes.len();
    let outputs = (0..spec.outputs.max(1))
        .map(|i| {
            let p = if rng.gen() { Party::A } else { Party::B };
            // the last wire always leaves, the rest are random
            let w = if i == 0 { n - 1 } else { rng.gen_range(0..n) };
            (p, w)
        })
        .collect();
    Circuit::from_nodes(names, nodes, outputs).expect("well formed by construction")
}

/// A strictly layered random circuit: `layers` levels of `width` gates, each reading two wires
/// of the level below. Level 0 holds `width` inputs split between the parties.
pub fn random_layered_circuit<R: Rng>(rng: &mut R, width: usize, layers: usize, mul_bias: f64) -> Circuit {
    let width = width.max(2);
    let mut names = Vec::new();
    let mut nodes = Vec::new();
    let mut prev: Vec<WireId> = Vec::new();
    for i in 0..width {
        let p = if i % 2 == 0 { Party::A } else { Party::B };
        names.push(format!("in{i}"));
        nodes.push(Node::Input(p));
        prev.push(i);
    }
    for l in 1..=layers {
        let mut cur = Vec::with_capacity(width);
        for g in 0..width {
            let a = prev[rng.gen_range(0..prev.len())];
            let b = prev[rng.gen_range(0..prev.len())];
            let op = if rng.gen_bool(mul_bias) {
                Op::Mul
            } else if rng.gen() {
                Op::Add
            } else {
                Op::Sub
            };
            cur.push(nodes.len());
            names.push(format!("l{l}g{g}"));
            nodes.push(Node::Gate { op, a, b });
        }
        prev = cur;
    }
    let outputs =
        prev.iter().enumerate().map(|(i, &w)| (if i % 2 == 0 { Party::A } else { Party::B }, w)).collect();
    Circuit::from_nodes(names, nodes, outputs).expect("well formed by construction")
}

/// Uniformly random values for every input wire.
pub fn random_inputs(c: &Circuit, o: &mut RingOracle) -> Inputs {
    [Party::A, Party::B]
        .into_iter()
        .flat_map(|p| c.inputs(p))
        .map(|w| (c.name(w).to_string(), o.sample()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pdtshr::{Rho, Tau};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn parse_small_examples() {
        let c = Circuit::parse("INPUT A w0\nINPUT B w1\nMUL w2 w0 w1\nOUTPUT A w2\n").unwrap();
        assert_eq!((c.gate_count(), c.mult_depth()), (1, 1));
        let c = Circuit::parse("INPUT A x\nINPUT B y\nADD s x y\nSUB t s y\nOUTPUT B t").unwrap();
        assert_eq!(c.mult_depth(), 0);
        let c = Circuit::parse("INPUT A x\nMUL y x x\nMUL z y x\nOUTPUT A z").unwrap();
        assert_eq!(c.mult_depth(), 2);
    }

    #[test]
    fn parse_errors_carry_lines() {
        let e = Circuit::parse("INPUT A x\nFOO y\nOUTPUT A x").unwrap_err();
        assert_eq!(e, Error::Parse { line: 2, msg: "unknown statement \"FOO\"".into() });
        let e = Circuit::parse("INPUT A x\n\nADD y x z\nOUTPUT A y").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = Circuit::parse("INPUT A x\nADD y x z\nADD z y x\nOUTPUT A z").unwrap_err();
        assert!(e.to_string().contains("cycle"), "{e}");
        let e = Circuit::parse("INPUT A x\nINPUT B x\nOUTPUT A x").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(Circuit::parse("INPUT C x\nOUTPUT A x").is_err());
        assert!(Circuit::parse("INPUT A x\nADD y x\nOUTPUT A y").is_err());
    }

    #[test]
    fn out_of_order_definitions_are_sorted() {
        let c = Circuit::parse("# comment\nOUTPUT A z\nMUL z y x  # late\nADD y x x\nINPUT A x\n").unwrap();
        let r = Ring::zm(7).unwrap();
        let mut o = r.oracle(0);
        let inputs = Inputs::from([("x".to_string(), r.from_u64(3))]);
        assert_eq!(eval_plain(&c, &inputs, &mut o).unwrap(), vec![r.from_u64(4)]);
        let again = Circuit::parse(&c.to_string()).unwrap();
        assert_eq!(again, c);
    }

    const DIFF_OF_SQUARES: &str = "INPUT A a\nINPUT B b\nADD s a b\nSUB d a b\nMUL p s d\nOUTPUT A p\n";

    #[test]
    fn difference_of_squares_mod_7() {
        let c = Circuit::parse(DIFF_OF_SQUARES).unwrap();
        let r = Ring::zm(7).unwrap();
        let inputs = Inputs::from([("a".into(), r.from_u64(3)), ("b".into(), r.from_u64(2))]);
        assert_eq!(eval_plain(&c, &inputs, &mut r.oracle(0)).unwrap(), vec![r.from_u64(5)]);
    }

    #[test]
    fn invalid_label_is_bottom() {
        let c = Circuit::parse(DIFF_OF_SQUARES).unwrap();
        let r = Ring::zm(7).unwrap();
        let inputs = Inputs::from([
            ("a".into(), Label::from_bytes(vec![0xff; r.label_bytes()])),
            ("b".into(), r.from_u64(2)),
        ]);
        assert!(eval_plain(&c, &inputs, &mut r.oracle(0)).unwrap_err().is_bottom());
    }

    #[test]
    fn matrix_instantiation_matches_schoolbook() {
        let c = Circuit::parse(DIFF_OF_SQUARES).unwrap();
        let r = Ring::matrix(5, 2).unwrap();
        let (a, b) = ([1u64, 2, 3, 4], [0u64, 1, 4, 2]);
        let inputs = Inputs::from([("a".into(), r.encode(&a).unwrap()), ("b".into(), r.encode(&b).unwrap())]);
        let got = r.decode(&eval_plain(&c, &inputs, &mut r.oracle(0)).unwrap()[0]).unwrap();
        let s: Vec<u64> = (0..4).map(|i| (a[i] + b[i]) % 5).collect();
        let d: Vec<u64> = (0..4).map(|i| (a[i] + 5 - b[i]) % 5).collect();
        let mut want = vec![0u64; 4];
        for i in 0..2 {
            for j in 0..2 {
                want[i * 2 + j] = (0..2).map(|k| s[i * 2 + k] * d[k * 2 + j]).sum::<u64>() % 5;
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn one_needs_a_field() {
        let c = Circuit::parse("INPUT A x\nONE c\nADD y x c\nOUTPUT A y").unwrap();
        let inputs = |r: &Ring| Inputs::from([("x".into(), r.from_u64(1))]);
        let z6 = Ring::zm(6).unwrap();
        assert!(eval_plain(&c, &inputs(&z6), &mut z6.oracle(0)).is_err());
        let f = Ring::prime_field(7).unwrap();
        assert_eq!(eval_plain(&c, &inputs(&f), &mut f.oracle(0)).unwrap(), vec![f.from_u64(2)]);
    }

    #[test]
    fn shared_matches_plain_on_random_circuits() {
        let r = Ring::zm(97).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for seed in 0..40 {
            let c = random_circuit(
                &mut rng,
                RandomCircuitSpec {
                    inputs_per_party: 3,
                    gates: 30,
                    max_mult_depth: 4,
                    outputs: 3,
                    allow_one: true,
                },
            );
            let inputs = random_inputs(&c, &mut r.oracle(seed));
            let want = eval_plain(&c, &inputs, &mut r.oracle(0)).unwrap();
            let mut s = Session::two_party(&r, seed);
            let mut rho = Rho::for_ring(&r, 8);
            assert_eq!(eval_shared(&mut s, &c, &inputs, &mut rho).unwrap(), want);
        }
    }

    #[test]
    fn linear_gates_cost_nothing() {
        let r = Ring::zm(97).unwrap();
        let c =
            Circuit::parse("INPUT A x\nINPUT B y\nADD s x y\nSUB t s x\nADD u t s\nOUTPUT A u\nOUTPUT B s")
                .unwrap();
        let inputs = random_inputs(&c, &mut r.oracle(1));
        let mut s = Session::two_party(&r, 1);
        let mut rho = Rho::for_ring(&r, 8);
        eval_shared(&mut s, &c, &inputs, &mut rho).unwrap();
        let st = s.stats();
        assert_eq!(st.elements_transmitted, 2);
        assert_eq!((st.ot_invocations, st.ot_elements), (0, 0));
    }

    #[test]
    fn independent_muls_batch_through_tau() {
        let r = Ring::prime_field(2_147_483_647).unwrap();
        let mut text = String::from("INPUT A x\nINPUT B y\n");
        for i in 0..32 {
            text += &format!("ADD x{i} x y\nMUL m{i} x{i} y\nOUTPUT A m{i}\n");
        }
        let c = Circuit::parse(&text).unwrap();
        let inputs = random_inputs(&c, &mut r.oracle(3));
        let want = eval_plain(&c, &inputs, &mut r.oracle(0)).unwrap();
        let mut s = Session::two_party(&r, 3);
        let mut tau = crate::pdtshr::Counted::new(Tau::with_t(16, 16, 16));
        assert_eq!(eval_shared(&mut s, &c, &inputs, &mut tau).unwrap(), want);
        assert_eq!(tau.calls, 4);

        // 64 instances at t = 8
        let mut s = Session::two_party(&r, 3);
        let mut tau = crate::pdtshr::Counted::new(Tau::with_t(16, 8, 8));
        assert_eq!(eval_shared(&mut s, &c, &inputs, &mut tau).unwrap(), want);
        assert_eq!(tau.calls, 8);
    }
}
