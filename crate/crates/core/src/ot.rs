//! Ideal oblivious transfer and the in-process protocol harness.
//!
//! A [`Session`] holds every party of one protocol run. Protocols are ordinary functions that
//! take `&mut Session` and move data between parties only through [`Session::send`],
//! [`Session::broadcast`], [`Session::ot_1of2`] and [`Session::ot_kofn`], so the transcript and
//! the per-party views are complete by construction.
//!
//! Rounds are counted with per-party clocks: a message sent by `p` leaves at `p`'s clock and
//! arrives one round later. [`Session::parallel`] runs independent sub-protocols from the same
//! starting clocks, so batched instances cost the rounds of one instance.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::{Label, Ring, RingOracle};

/// Destination of a broadcast message.
pub const BROADCAST: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayloadKind {
    RingElems,
    Ot1of2,
    OtKofn,
    Bits,
    Ciphertexts,
    /// Public description of a code or key, sent once per instance.
    Setup,
    /// Public-coin challenges. Not counted as communication.
    Coins,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Record {
    pub round: u64,
    pub from: usize,
    pub to: usize,
    pub kind: PayloadKind,
    /// Ring elements (sender side for OT), ciphertexts, bits or coins carried.
    pub count: u64,
    /// Number of slots of a k-of-n transfer, i.e. its cost as 1-of-2 transfers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slots: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub names: Vec<String>,
    pub records: Vec<Record>,
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    round: u64,
    from: &'a str,
    to: &'a str,
    kind: PayloadKind,
    count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    slots: Option<u64>,
}

impl Transcript {
    fn name(&self, i: usize) -> &str {
        if i == BROADCAST {
            "*"
        } else {
            &self.names[i]
        }
    }

    /// One JSON object per line: `round`, `from`, `to`, `kind`, `count`.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for r in &self.records {
            let rec = JsonRecord {
                round: r.round,
                from: self.name(r.from),
                to: self.name(r.to),
                kind: r.kind,
                count: r.count,
                slots: r.slots,
            };
            serde_json::to_writer(&mut w, &rec)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn count_kind(&self, kind: PayloadKind) -> u64 {
        self.records.iter().filter(|r| r.kind == kind).map(|r| r.count).sum()
    }
}

/// Communication and computation totals of one run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommStats {
    /// Ring elements in direct and broadcast messages.
    pub elements_transmitted: u64,
    /// Ring elements supplied by OT senders.
    pub ot_elements: u64,
    pub setup_elements: u64,
    pub ciphertexts: u64,
    pub bits: u64,
    pub coins: u64,
    /// Each 1-of-2 and each k-of-n call counts once.
    pub ot_invocations: u64,
    /// k-of-n calls counted as `n` 1-of-2 calls.
    pub ot_invocations_as_1of2: u64,
    pub messages: u64,
    pub rounds: u64,
    pub oracle_calls: u64,
    pub oracle_calls_per_party: Vec<u64>,
}

impl CommStats {
    /// Ring elements in messages plus ring elements fed into OT.
    pub fn total_elements(&self) -> u64 {
        self.elements_transmitted + self.ot_elements
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    Input,
    Random,
    Received,
    Local,
    Output,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellValue {
    Labels(Vec<Label>),
    Bits(Vec<bool>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub name: String,
    pub kind: CellKind,
    pub scope: u32,
    pub value: CellValue,
}

/// What a passively corrupted party would report: everything in its memory that has not been
/// erased.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct View {
    pub party: String,
    pub cells: Vec<Cell>,
}

impl View {
    pub fn has(&self, name: &str) -> bool {
        self.cells.iter().any(|c| c.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.cells.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn labels(&self, name: &str) -> Option<&[Label]> {
        self.cells.iter().find_map(|c| match (&c.value, c.name == name) {
            (CellValue::Labels(v), true) => Some(v.as_slice()),
            _ => None,
        })
    }

    pub fn of_kind(&self, kind: CellKind) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(move |c| c.kind == kind)
    }
}

pub struct Party {
    pub name: String,
    pub oracle: RingOracle,
    cells: Vec<Cell>,
    clock: u64,
}

impl fmt::Debug for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Party")
            .field("name", &self.name)
            .field("cells", &self.cells.len())
            .field("clock", &self.clock)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OtMode {
    /// k-of-n transfers are a single call to the ideal functionality.
    #[default]
    Monolithic,
    /// k-of-n transfers run as `n` 1-of-2 transfers with an empty message in the unchosen slot.
    Decomposed,
}

/// Replaces one label of one delivered message by an invalid label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tamper {
    /// Index among label-carrying deliveries (messages, broadcasts, OT outputs), from 0.
    pub delivery: u64,
    pub position: usize,
}

pub struct Session {
    ring: Ring,
    parties: Vec<Party>,
    transcript: Transcript,
    scopes: Vec<u32>,
    next_scope: u32,
    ot_mode: OtMode,
    tamper: Option<Tamper>,
    deliveries: u64,
    coins: RingOracle,
    track_views: bool,
}

impl fmt::Debug for Session {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Session")
            .field("ring", &self.ring.id().id)
            .field("parties", &self.parties)
            .field("records", &self.transcript.records.len())
            .finish()
    }
}

impl Session {
    /// Party `i` draws its randomness from stream `i + 1` of `seed`; stream 0 is the public-coin
    /// source.
    pub fn new(ring: &Ring, names: &[&str], seed: u64) -> Session {
        let parties = names
            .iter()
            .enumerate()
            .map(|(i, n)| Party {
                name: n.to_string(),
                oracle: ring.oracle_stream(seed, i as u64 + 1),
                cells: Vec::new(),
                clock: 0,
            })
            .collect();
        Session {
            ring: ring.clone(),
            parties,
            transcript: Transcript {
                names: names.iter().map(|s| s.to_string()).collect(),
                records: Vec::new(),
            },
            scopes: vec![0],
            next_scope: 1,
            ot_mode: OtMode::Monolithic,
            tamper: None,
            deliveries: 0,
            coins: ring.oracle_stream(seed, 0),
            track_views: true,
        }
    }

    /// Parties `A` (index 0) and `B` (index 1).
    pub fn two_party(ring: &Ring, seed: u64) -> Session {
        Session::new(ring, &["A", "B"], seed)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn len(&self) -> usize {
        self.parties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parties.is_empty()
    }

    pub fn name(&self, p: usize) -> &str {
        &self.parties[p].name
    }

    pub fn oracle(&mut self, p: usize) -> &mut RingOracle {
        &mut self.parties[p].oracle
    }

    /// Public-coin randomness shared by all parties.
    pub fn coins(&mut self) -> &mut RingOracle {
        &mut self.coins
    }

    pub fn set_ot_mode(&mut self, mode: OtMode) {
        self.ot_mode = mode;
    }

    pub fn ot_mode(&self) -> OtMode {
        self.ot_mode
    }

    pub fn set_tamper(&mut self, t: Option<Tamper>) {
        self.tamper = t;
    }

    /// Turns off memory bookkeeping for large runs where views are never inspected.
    pub fn set_track_views(&mut self, on: bool) {
        self.track_views = on;
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn rounds(&self) -> u64 {
        self.parties.iter().map(|p| p.clock).max().unwrap_or(0)
    }

    // ---------------------------------------------------------------------------------------
    // memory

    pub fn remember(&mut self, p: usize, name: &str, kind: CellKind, value: &[Label]) {
        self.store(p, name, kind, CellValue::Labels(value.to_vec()));
    }

    pub fn remember_bits(&mut self, p: usize, name: &str, kind: CellKind, value: &[bool]) {
        self.store(p, name, kind, CellValue::Bits(value.to_vec()));
    }

    fn store(&mut self, p: usize, name: &str, kind: CellKind, value: CellValue) {
        if !self.track_views {
            return;
        }
        let scope = *self.scopes.last().expect("root scope");
        self.parties[p].cells.push(Cell { name: name.to_string(), kind, scope, value });
    }

    /// Opens a memory scope; cells stored until the matching [`Session::pop_scope`] can later be
    /// erased together.
    pub fn push_scope(&mut self) -> u32 {
        let id = self.next_scope;
        self.next_scope += 1;
        self.scopes.push(id);
        id
    }

    pub fn pop_scope(&mut self) {
        if self.scopes.len() > 1 {
            self.scopes.pop();
        }
    }

    /// Overwrites and drops every cell of party `p` in `scope`.
    pub fn erase(&mut self, p: usize, scope: u32) {
        let cells = &mut self.parties[p].cells;
        for c in cells.iter_mut().filter(|c| c.scope == scope) {
            match &mut c.value {
                CellValue::Labels(v) => v.iter_mut().for_each(|l| *l = Label::from_bytes(vec![])),
                CellValue::Bits(v) => v.iter_mut().for_each(|b| *b = false),
            }
        }
        cells.retain(|c| c.scope != scope);
    }

    pub fn capture_view(&self, p: usize) -> View {
        View { party: self.parties[p].name.clone(), cells: self.parties[p].cells.clone() }
    }

    // ---------------------------------------------------------------------------------------
    // communication

    fn log(&mut self, from: usize, to: usize, kind: PayloadKind, count: u64, slots: Option<u64>) -> u64 {
        let is_ot = matches!(kind, PayloadKind::Ot1of2 | PayloadKind::OtKofn);
        let round = if is_ot {
            self.parties[from].clock.max(self.parties[to].clock)
        } else {
            self.parties[from].clock
        };
        self.transcript.records.push(Record { round, from, to, kind, count, slots });
        let counter = self.parties[from].oracle.counter_mut();
        match kind {
            PayloadKind::RingElems => counter.elements_transmitted += count,
            PayloadKind::Ot1of2 | PayloadKind::OtKofn => counter.ot_invocations += 1,
            _ => {}
        }
        if to == BROADCAST {
            for (i, p) in self.parties.iter_mut().enumerate() {
                if i != from {
                    p.clock = p.clock.max(round + 1);
                }
            }
        } else if is_ot {
            self.parties[from].clock = round + 1;
            self.parties[to].clock = round + 1;
        } else {
            let c = &mut self.parties[to].clock;
            *c = (*c).max(round + 1);
        }
        round
    }

    fn deliver(&mut self, mut labels: Vec<Label>) -> Vec<Label> {
        if let Some(t) = self.tamper {
            if t.delivery == self.deliveries && t.position < labels.len() {
                let len = labels[t.position].len().max(1);
                labels[t.position] = Label::from_bytes(vec![0xff; len]);
            }
        }
        self.deliveries += 1;
        labels
    }

    /// Sends ring elements from `from` to `to`; returns what `to` receives.
    pub fn send(&mut self, from: usize, to: usize, labels: &[Label]) -> Vec<Label> {
        self.send_named(from, to, "msg", labels)
    }

    pub fn send_named(&mut self, from: usize, to: usize, name: &str, labels: &[Label]) -> Vec<Label> {
        self.log(from, to, PayloadKind::RingElems, labels.len() as u64, None);
        let got = self.deliver(labels.to_vec());
        let cell = format!("{name} from {}", self.parties[from].name);
        self.remember(to, &cell, CellKind::Received, &got);
        got
    }

    /// Sends to every other party. Counted once.
    pub fn broadcast(&mut self, from: usize, name: &str, labels: &[Label]) -> Vec<Label> {
        self.log(from, BROADCAST, PayloadKind::RingElems, labels.len() as u64, None);
        let got = self.deliver(labels.to_vec());
        if self.track_views {
            let cell = format!("{name} from {}", self.parties[from].name);
            for p in 0..self.parties.len() {
                if p != from {
                    self.remember(p, &cell, CellKind::Received, &got);
                }
            }
        }
        got
    }

    /// Sends public setup data (a code description, a key) made of ring elements. Logged as
    /// [`PayloadKind::Setup`], not as ordinary communication.
    pub fn send_setup(&mut self, from: usize, to: usize, name: &str, labels: &[Label]) -> Vec<Label> {
        self.log(from, to, PayloadKind::Setup, labels.len() as u64, None);
        let cell = format!("{name} from {}", self.parties[from].name);
        self.remember(to, &cell, CellKind::Received, labels);
        labels.to_vec()
    }

    /// Records a message whose payload is not made of ring elements (ciphertexts, bits, key
    /// material). The caller moves the payload itself.
    pub fn note(&mut self, from: usize, to: usize, kind: PayloadKind, count: u64) {
        self.log(from, to, kind, count, None);
    }

    /// Draws `count` public random elements seen by every party. Logged as
    /// [`PayloadKind::Coins`] from and to `*`; no clock moves.
    pub fn public_coins(&mut self, count: usize) -> Vec<Label> {
        self.transcript.records.push(Record {
            round: self.rounds(),
            from: BROADCAST,
            to: BROADCAST,
            kind: PayloadKind::Coins,
            count: count as u64,
            slots: None,
        });
        self.coins.sample_vec(count)
    }

    /// Ideal 1-of-2 transfer. The sender's memory gains nothing; the receiver's memory gains only
    /// the chosen message.
    pub fn ot_1of2(
        &mut self,
        sender: usize,
        receiver: usize,
        m0: &[Label],
        m1: &[Label],
        choice: bool,
    ) -> Vec<Label> {
        self.log(sender, receiver, PayloadKind::Ot1of2, (m0.len() + m1.len()) as u64, None);
        let chosen = if choice { m1 } else { m0 };
        let got = self.deliver(chosen.to_vec());
        let cell = format!("ot from {}", self.parties[sender].name);
        self.remember(receiver, &cell, CellKind::Received, &got);
        got
    }

    /// Ideal k-of-n transfer of single-element slots; the receiver learns `w_i` for `i ∈ set`,
    /// in the order of `set`.
    pub fn ot_kofn(
        &mut self,
        sender: usize,
        receiver: usize,
        slots: &[Label],
        set: &[usize],
    ) -> Result<Vec<Label>> {
        if let Some(&bad) = set.iter().find(|&&i| i >= slots.len()) {
            return Err(Error::param(format!("OT index {bad} out of range for {} slots", slots.len())));
        }
        match self.ot_mode {
            OtMode::Monolithic => {
                self.log(sender, receiver, PayloadKind::OtKofn, slots.len() as u64, Some(slots.len() as u64));
                let chosen: Vec<Label> = set.iter().map(|&i| slots[i].clone()).collect();
                let got = self.deliver(chosen);
                let cell = format!("ot from {}", self.parties[sender].name);
                self.remember(receiver, &cell, CellKind::Received, &got);
                Ok(got)
            }
            OtMode::Decomposed => {
                let mut want = vec![false; slots.len()];
                for &i in set {
                    want[i] = true;
                }
                let start = (self.parties[sender].clock, self.parties[receiver].clock);
                let mut end = start;
                let mut received: Vec<Option<Label>> = vec![None; slots.len()];
                for (i, w) in slots.iter().enumerate() {
                    self.parties[sender].clock = start.0;
                    self.parties[receiver].clock = start.1;
                    let got = self.ot_1of2(sender, receiver, &[], std::slice::from_ref(w), want[i]);
                    end.0 = end.0.max(self.parties[sender].clock);
                    end.1 = end.1.max(self.parties[receiver].clock);
                    received[i] = got.into_iter().next();
                }
                self.parties[sender].clock = end.0;
                self.parties[receiver].clock = end.1;
                set.iter().map(|&i| received[i].clone().ok_or(Error::InvalidLabel)).collect()
            }
        }
    }

    /// Runs `jobs` independent sub-protocols as if concurrently: each starts from the current
    /// clocks and the session continues from the latest clocks reached.
    pub fn parallel<T>(
        &mut self,
        jobs: usize,
        mut f: impl FnMut(&mut Session, usize) -> Result<T>,
    ) -> Result<Vec<T>> {
        let start: Vec<u64> = self.parties.iter().map(|p| p.clock).collect();
        let mut end = start.clone();
        let mut out = Vec::with_capacity(jobs);
        for j in 0..jobs {
            for (p, &c) in self.parties.iter_mut().zip(&start) {
                p.clock = c;
            }
            out.push(f(self, j)?);
            for (e, p) in end.iter_mut().zip(&self.parties) {
                *e = (*e).max(p.clock);
            }
        }
        for (p, e) in self.parties.iter_mut().zip(end) {
            p.clock = e;
        }
        Ok(out)
    }

    pub fn stats(&self) -> CommStats {
        let mut s = CommStats {
            messages: self.transcript.records.len() as u64,
            rounds: self.rounds(),
            ..CommStats::default()
        };
        for r in &self.transcript.records {
            match r.kind {
                PayloadKind::RingElems => s.elements_transmitted += r.count,
                PayloadKind::Ot1of2 => {
                    s.ot_elements += r.count;
                    s.ot_invocations += 1;
                    s.ot_invocations_as_1of2 += 1;
                }
                PayloadKind::OtKofn => {
                    s.ot_elements += r.count;
                    s.ot_invocations += 1;
                    s.ot_invocations_as_1of2 += r.slots.unwrap_or(1);
                }
                PayloadKind::Bits => s.bits += r.count,
                PayloadKind::Ciphertexts => s.ciphertexts += r.count,
                PayloadKind::Setup => s.setup_elements += r.count,
                PayloadKind::Coins => s.coins += r.count,
            }
        }
        s.oracle_calls_per_party = self.parties.iter().map(|p| p.oracle.counter().oracle_calls).collect();
        s.oracle_calls = s.oracle_calls_per_party.iter().sum();
        s
    }
}

/// Outcome of a run: outputs, or a structured abort when an honest party detected a problem
/// (including ⊥ from the oracle).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome<T> {
    Done(T),
    Aborted(crate::error::Abort),
}

impl<T> Outcome<T> {
    /// Maps ⊥ and explicit aborts to [`Outcome::Aborted`]; other errors pass through.
    pub fn from_result(r: Result<T>, stage: &str) -> Result<Outcome<T>> {
        match r {
            Ok(v) => Ok(Outcome::Done(v)),
            Err(Error::Abort(a)) => Ok(Outcome::Aborted(a)),
            Err(e) if e.is_bottom() => {
                Ok(Outcome::Aborted(crate::error::Abort::new(stage, format!("oracle returned bottom: {e}"))))
            }
            Err(e) => Err(e),
        }
    }

    pub fn is_abort(&self) -> bool {
        matches!(self, Outcome::Aborted(_))
    }

    pub fn done(self) -> Option<T> {
        match self {
            Outcome::Done(v) => Some(v),
            Outcome::Aborted(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Ring, Session) {
        let r = Ring::zm(5).unwrap();
        let s = Session::two_party(&r, 1);
        (r, s)
    }

    #[test]
    fn one_of_two_returns_chosen() {
        let (r, mut s) = setup();
        let x = [r.from_u64(1)];
        let y = [r.from_u64(2)];
        assert_eq!(s.ot_1of2(0, 1, &x, &y, false), x.to_vec());
        assert_eq!(s.ot_1of2(0, 1, &x, &y, true), y.to_vec());
        let st = s.stats();
        assert_eq!(st.ot_invocations, 2);
        assert_eq!(st.ot_elements, 4);
    }

    #[test]
    fn receiver_view_holds_only_chosen() {
        let (r, mut s) = setup();
        let x = [r.from_u64(1)];
        let y = [r.from_u64(3)];
        s.ot_1of2(0, 1, &x, &y, true);
        let view = s.capture_view(1);
        let all: Vec<&Label> = view
            .cells
            .iter()
            .flat_map(|c| match &c.value {
                CellValue::Labels(v) => v.iter().collect::<Vec<_>>(),
                CellValue::Bits(_) => vec![],
            })
            .collect();
        assert_eq!(all, vec![&y[0]]);
        assert!(s.capture_view(0).cells.is_empty());
    }

    #[test]
    fn kofn_modes_agree() {
        let r = Ring::zm(97).unwrap();
        for seed in 0..100 {
            let mut o = r.oracle(seed);
            let slots = o.sample_vec(10);
            let set: Vec<usize> = (0..10).filter(|_| o.random_bit()).collect();
            let mut a = Session::two_party(&r, seed);
            let mut b = Session::two_party(&r, seed);
            b.set_ot_mode(OtMode::Decomposed);
            let ga = a.ot_kofn(0, 1, &slots, &set).unwrap();
            let gb = b.ot_kofn(0, 1, &slots, &set).unwrap();
            assert_eq!(ga, gb);
            assert_eq!(a.stats().ot_invocations, 1);
            assert_eq!(a.stats().ot_invocations_as_1of2, 10);
            assert_eq!(b.stats().ot_invocations, 10);
            assert_eq!(a.rounds(), b.rounds());
        }
    }

    #[test]
    fn kofn_examples() {
        let (r, mut s) = setup();
        let w: Vec<Label> = (0..4).map(|i| r.from_u64(i)).collect();
        assert_eq!(s.ot_kofn(0, 1, &w, &[1, 3]).unwrap(), vec![w[1].clone(), w[3].clone()]);
        assert_eq!(s.ot_kofn(0, 1, &w, &[0, 1, 2, 3]).unwrap(), w);
        assert!(s.ot_kofn(0, 1, &w, &[4]).is_err());
    }

    #[test]
    fn erase_removes_scope() {
        let (r, mut s) = setup();
        s.remember(0, "keep", CellKind::Input, &[r.from_u64(1)]);
        let sc = s.push_scope();
        s.remember(0, "temp", CellKind::Local, &[r.from_u64(2)]);
        s.pop_scope();
        s.erase(0, sc);
        assert_eq!(s.capture_view(0).names(), vec!["keep"]);
    }

    #[test]
    fn rounds_and_parallel() {
        let (r, mut s) = setup();
        let x = [r.from_u64(1)];
        s.send(0, 1, &x);
        s.send(1, 0, &x);
        assert_eq!(s.rounds(), 2);
        s.parallel(5, |s, _| {
            s.send(0, 1, &x);
            Ok(())
        })
        .unwrap();
        assert_eq!(s.rounds(), 3);
    }

    #[test]
    fn tamper_invalidates_label() {
        let (r, mut s) = setup();
        s.set_tamper(Some(Tamper { delivery: 1, position: 0 }));
        let x = [r.from_u64(1)];
        assert_eq!(s.send(0, 1, &x), x.to_vec());
        let bad = s.send(0, 1, &x);
        assert!(r.decode(&bad[0]).is_err());
    }

    #[test]
    fn jsonl_counts_match_stats() {
        let (r, mut s) = setup();
        let x = vec![r.from_u64(1); 3];
        s.send(1, 0, &x);
        s.ot_kofn(0, 1, &x, &[0]).unwrap();
        s.note(0, 1, PayloadKind::Ciphertexts, 2);
        let text = s.transcript().to_jsonl();
        let mut elems = 0;
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            if v["kind"] == "ring_elems" {
                elems += v["count"].as_u64().unwrap();
            }
        }
        assert_eq!(elems, s.stats().elements_transmitted);
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with(r#"{"round":0,"from":"B","to":"A","kind":"ring_elems","count":3}"#));
    }
}
