use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
}

/// Symbol under the head. `Blank` is any cell never written or loaded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Read {
    Bit(u8),
    Blank,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmTransition {
    pub next: String,
    pub write: u8,
    pub mv: Move,
}

/// Binary single-tape machine on a semi-infinite tape. A left move at cell 0
/// stays put. A blank read uses the `Blank` entry when present and the
/// `Bit(0)` entry otherwise; a missing entry halts without accepting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TmJson", into = "TmJson")]
pub struct TmSpec {
    pub states: Vec<String>,
    pub start: String,
    pub accept: String,
    pub reject: Option<String>,
    pub delta: BTreeMap<(String, Read), TmTransition>,
}

#[derive(Serialize, Deserialize)]
struct TmJson {
    states: Vec<String>,
    start: String,
    accept: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reject: Option<String>,
    delta: BTreeMap<String, (String, u8, Move)>,
}

fn read_key(r: Read) -> &'static str {
    match r {
        Read::Bit(0) => "0",
        Read::Bit(_) => "1",
        Read::Blank => "_",
    }
}

impl TryFrom<TmJson> for TmSpec {
    type Error = Error;

    fn try_from(raw: TmJson) -> Result<Self> {
        let mut delta = BTreeMap::new();
        for (key, (next, write, mv)) in raw.delta {
            let (q, sym) = key
                .rsplit_once(',')
                .ok_or_else(|| Error::InvalidSpec(format!("transition key {key:?} is not \"state,symbol\"")))?;
            let read = match sym.trim() {
                "0" => Read::Bit(0),
                "1" => Read::Bit(1),
                "_" => Read::Blank,
                other => return Err(Error::InvalidSpec(format!("unknown tape symbol {other:?}"))),
            };
            delta.insert((q.trim().to_string(), read), TmTransition { next, write, mv });
        }
        TmSpec::new(raw.states, raw.start, raw.accept, raw.reject, delta)
    }
}

impl From<TmSpec> for TmJson {
    fn from(tm: TmSpec) -> Self {
        TmJson {
            delta: tm
                .delta
                .into_iter()
                .map(|((q, r), t)| (format!("{q},{}", read_key(r)), (t.next, t.write, t.mv)))
                .collect(),
            states: tm.states,
            start: tm.start,
            accept: tm.accept,
            reject: tm.reject,
        }
    }
}

impl TmSpec {
    pub fn new(
        states: Vec<String>,
        start: String,
        accept: String,
        reject: Option<String>,
        delta: BTreeMap<(String, Read), TmTransition>,
    ) -> Result<Self> {
        let known = |q: &str| states.iter().any(|s| s == q);
        for (i, s) in states.iter().enumerate() {
            if states[..i].contains(s) {
                return Err(Error::InvalidSpec(format!("duplicate state {s:?}")));
            }
        }
        for q in [Some(&start), Some(&accept), reject.as_ref()].into_iter().flatten() {
            if !known(q) {
                return Err(Error::InvalidSpec(format!("unknown state {q:?}")));
            }
        }
        if reject.as_ref() == Some(&accept) {
            return Err(Error::InvalidSpec("accept and reject coincide".into()));
        }
        for ((q, read), t) in &delta {
            if !known(q) || !known(&t.next) {
                return Err(Error::InvalidSpec(format!("transition {q:?}/{read:?} names an unknown state")));
            }
            if *q == accept || reject.as_ref() == Some(q) {
                return Err(Error::InvalidSpec(format!("halting state {q:?} has a transition")));
            }
            if t.write > 1 || matches!(read, Read::Bit(b) if *b > 1) {
                return Err(Error::InvalidSpec("tape symbols are bits".into()));
            }
        }
        Ok(TmSpec {
            states,
            start,
            accept,
            reject,
            delta,
        })
    }

    pub fn is_halting(&self, q: &str) -> bool {
        q == self.accept || self.reject.as_deref() == Some(q)
    }

    pub fn transition(&self, q: &str, read: Read) -> Option<&TmTransition> {
        let key = |r| (q.to_string(), r);
        match read {
            Read::Blank => self
                .delta
                .get(&key(Read::Blank))
                .or_else(|| self.delta.get(&key(Read::Bit(0)))),
            bit => self.delta.get(&key(bit)),
        }
    }

    /// Accepts iff the input holds an even number of ones.
    pub fn parity() -> Self {
        let js = r#"{
            "states": ["even", "odd", "acc", "rej"],
            "start": "even", "accept": "acc", "reject": "rej",
            "delta": {
                "even,0": ["even", 0, "R"], "even,1": ["odd", 1, "R"],
                "odd,0": ["odd", 0, "R"], "odd,1": ["even", 1, "R"],
                "even,_": ["acc", 0, "R"], "odd,_": ["rej", 0, "R"]
            }
        }"#;
        serde_json::from_str(js).expect("parity machine is well formed")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TmRun {
    pub state: String,
    /// Cells `0 .. len`; everything past the end is blank.
    pub tape: Vec<u8>,
    pub head: usize,
    pub steps: usize,
    pub halted: bool,
    pub accepted: bool,
}

/// Direct tape simulation.
pub fn tm_run(tm: &TmSpec, input: &[u8], max_steps: usize) -> TmRun {
    let mut run = TmRun {
        state: tm.start.clone(),
        tape: input.to_vec(),
        head: 0,
        steps: 0,
        halted: false,
        accepted: false,
    };
    loop {
        if tm.is_halting(&run.state) {
            run.halted = true;
            run.accepted = run.state == tm.accept;
            return run;
        }
        let read = run.tape.get(run.head).map_or(Read::Blank, |&b| Read::Bit(b));
        let Some(t) = tm.transition(&run.state, read) else {
            run.halted = true;
            return run;
        };
        if run.steps == max_steps {
            return run;
        }
        if run.head < run.tape.len() {
            run.tape[run.head] = t.write;
        } else {
            run.tape.push(t.write);
        }
        run.head = match t.mv {
            Move::R => run.head + 1,
            Move::L => run.head.saturating_sub(1),
        };
        run.state = t.next.clone();
        run.steps += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StackRead {
    Empty,
    Top(u8),
}

impl StackRead {
    pub const ALL: [StackRead; 3] = [StackRead::Empty, StackRead::Top(0), StackRead::Top(1)];

    fn of(stack: &[u8]) -> Self {
        stack.last().map_or(StackRead::Empty, |&b| StackRead::Top(b))
    }

    fn label(self) -> &'static str {
        match self {
            StackRead::Empty => "_",
            StackRead::Top(0) => "0",
            StackRead::Top(_) => "1",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "_" => Ok(StackRead::Empty),
            "0" => Ok(StackRead::Top(0)),
            "1" => Ok(StackRead::Top(1)),
            _ => Err(Error::InvalidSpec(format!("bad stack read {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StackOp {
    #[serde(rename = "NOOP")]
    Noop,
    #[serde(rename = "POP")]
    Pop,
    #[serde(rename = "PUSH0")]
    Push0,
    #[serde(rename = "PUSH1")]
    Push1,
}

impl StackOp {
    pub fn push(bit: u8) -> Self {
        if bit == 0 {
            StackOp::Push0
        } else {
            StackOp::Push1
        }
    }

    fn apply(self, stack: &mut Vec<u8>) {
        match self {
            StackOp::Noop => {}
            StackOp::Pop => {
                stack.pop();
            }
            StackOp::Push0 => stack.push(0),
            StackOp::Push1 => stack.push(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StackKey {
    pub state: usize,
    pub read1: StackRead,
    pub read2: StackRead,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StackAction {
    pub next: usize,
    pub op1: StackOp,
    pub op2: StackOp,
}

/// Deterministic machine with a finite control and two binary stacks.
/// Every non-halting state has an action for each of the nine
/// (top-of-stack-1, top-of-stack-2) readings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TwoStackJson", into = "TwoStackJson")]
pub struct TwoStackSpec {
    states: Vec<String>,
    start: usize,
    accept: usize,
    reject: usize,
    transitions: BTreeMap<StackKey, StackAction>,
}

#[derive(Serialize, Deserialize)]
struct TwoStackJson {
    states: Vec<String>,
    start: String,
    accept: String,
    reject: String,
    transitions: Vec<TransitionJson>,
}

#[derive(Serialize, Deserialize)]
struct TransitionJson {
    state: String,
    read1: String,
    read2: String,
    next: String,
    op1: StackOp,
    op2: StackOp,
}

impl TryFrom<TwoStackJson> for TwoStackSpec {
    type Error = Error;

    fn try_from(raw: TwoStackJson) -> Result<Self> {
        let idx = |q: &str| {
            raw.states
                .iter()
                .position(|s| s == q)
                .ok_or_else(|| Error::InvalidSpec(format!("unknown state {q:?}")))
        };
        let mut transitions = BTreeMap::new();
        for t in &raw.transitions {
            let key = StackKey {
                state: idx(&t.state)?,
                read1: StackRead::parse(&t.read1)?,
                read2: StackRead::parse(&t.read2)?,
            };
            let action = StackAction {
                next: idx(&t.next)?,
                op1: t.op1,
                op2: t.op2,
            };
            transitions.insert(key, action);
        }
        TwoStackSpec::new(
            raw.states.clone(),
            idx(&raw.start)?,
            idx(&raw.accept)?,
            idx(&raw.reject)?,
            transitions,
        )
    }
}

impl From<TwoStackSpec> for TwoStackJson {
    fn from(ts: TwoStackSpec) -> Self {
        let name = |i: usize| ts.states[i].clone();
        TwoStackJson {
            transitions: ts
                .transitions
                .iter()
                .map(|(k, a)| TransitionJson {
                    state: name(k.state),
                    read1: k.read1.label().into(),
                    read2: k.read2.label().into(),
                    next: name(a.next),
                    op1: a.op1,
                    op2: a.op2,
                })
                .collect(),
            start: name(ts.start),
            accept: name(ts.accept),
            reject: name(ts.reject),
            states: ts.states,
        }
    }
}

impl TwoStackSpec {
    pub fn new(
        states: Vec<String>,
        start: usize,
        accept: usize,
        reject: usize,
        transitions: BTreeMap<StackKey, StackAction>,
    ) -> Result<Self> {
        let n = states.len();
        if start >= n || accept >= n || reject >= n || accept == reject {
            return Err(Error::InvalidSpec("bad start/accept/reject state".into()));
        }
        for (k, a) in &transitions {
            if k.state >= n || a.next >= n {
                return Err(Error::InvalidSpec("transition names an unknown state".into()));
            }
            if k.state == accept || k.state == reject {
                return Err(Error::InvalidSpec(format!("halting state {:?} has a transition", states[k.state])));
            }
            if (k.read1 == StackRead::Empty && a.op1 == StackOp::Pop)
                || (k.read2 == StackRead::Empty && a.op2 == StackOp::Pop)
            {
                return Err(Error::InvalidSpec("pop on an empty stack".into()));
            }
        }
        for q in 0..n {
            if q == accept || q == reject {
                continue;
            }
            for read1 in StackRead::ALL {
                for read2 in StackRead::ALL {
                    if !transitions.contains_key(&StackKey { state: q, read1, read2 }) {
                        return Err(Error::InvalidSpec(format!(
                            "state {:?} has no action for ({}, {})",
                            states[q],
                            read1.label(),
                            read2.label()
                        )));
                    }
                }
            }
        }
        Ok(TwoStackSpec {
            states,
            start,
            accept,
            reject,
            transitions,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn accept(&self) -> usize {
        self.accept
    }

    pub fn reject(&self) -> usize {
        self.reject
    }

    pub fn is_halting(&self, q: usize) -> bool {
        q == self.accept || q == self.reject
    }

    pub fn transitions(&self) -> &BTreeMap<StackKey, StackAction> {
        &self.transitions
    }

    pub fn action(&self, key: &StackKey) -> Option<&StackAction> {
        self.transitions.get(key)
    }
}

/// Stacks store the top last.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StackConfig {
    pub state: usize,
    pub stack1: Vec<u8>,
    pub stack2: Vec<u8>,
}

impl StackConfig {
    /// Initial configuration on `input`: stack 2 holds the input with its
    /// first symbol on top.
    pub fn initial(ts: &TwoStackSpec, input: &[u8]) -> Self {
        StackConfig {
            state: ts.start,
            stack1: Vec::new(),
            stack2: input.iter().rev().copied().collect(),
        }
    }

    /// Tape reading of the stacks: stack 1 holds the cells left of the head.
    pub fn tape(&self) -> (Vec<u8>, usize) {
        let mut tape = self.stack1.clone();
        tape.extend(self.stack2.iter().rev());
        (tape, self.stack1.len())
    }
}

/// Configurations `c_0 .. c_K`, stopping at a halting state or after
/// `max_steps` steps.
pub fn two_stack_run(ts: &TwoStackSpec, input: &[u8], max_steps: usize) -> Vec<StackConfig> {
    let mut cur = StackConfig::initial(ts, input);
    let mut out = vec![cur.clone()];
    for _ in 0..max_steps {
        if ts.is_halting(cur.state) {
            break;
        }
        let key = StackKey {
            state: cur.state,
            read1: StackRead::of(&cur.stack1),
            read2: StackRead::of(&cur.stack2),
        };
        let a = ts.transitions[&key];
        a.op1.apply(&mut cur.stack1);
        a.op2.apply(&mut cur.stack2);
        cur.state = a.next;
        out.push(cur.clone());
    }
    out
}

/// Stack 1 holds the cells left of the head (nearest on top), stack 2 the
/// head cell and everything right of it. A right move is one step; a left
/// move takes up to three through auxiliary states.
pub fn tm_to_two_stack(tm: &TmSpec) -> Result<TwoStackSpec> {
    let mut states: Vec<String> = tm.states.clone();
    let intern = |states: &mut Vec<String>, name: String| -> usize {
        match states.iter().position(|s| *s == name) {
            Some(i) => i,
            None => {
                states.push(name);
                states.len() - 1
            }
        }
    };
    let fresh = |states: &[String], base: &str| {
        let mut name = base.to_string();
        while states.contains(&name) {
            name.push('\'');
        }
        name
    };
    let reject = match &tm.reject {
        Some(r) => intern(&mut states, r.clone()),
        None => {
            let name = fresh(&states, "reject");
            intern(&mut states, name)
        }
    };
    let accept = intern(&mut states, tm.accept.clone());
    let start = intern(&mut states, tm.start.clone());

    let mut transitions = BTreeMap::new();
    let mut pending_m: Vec<(usize, u8)> = Vec::new();
    let mut pending_n: Vec<(usize, u8)> = Vec::new();
    for q in tm.states.clone() {
        if tm.is_halting(&q) {
            continue;
        }
        let qi = intern(&mut states, q.clone());
        for read1 in StackRead::ALL {
            for read2 in StackRead::ALL {
                let read = match read2 {
                    StackRead::Empty => Read::Blank,
                    StackRead::Top(b) => Read::Bit(b),
                };
                let pop2 = if read2 == StackRead::Empty {
                    StackOp::Noop
                } else {
                    StackOp::Pop
                };
                let action = match tm.transition(&q, read) {
                    None => StackAction {
                        next: reject,
                        op1: StackOp::Noop,
                        op2: StackOp::Noop,
                    },
                    Some(t) => {
                        let next = intern(&mut states, t.next.clone());
                        match t.mv {
                            Move::R => StackAction {
                                next,
                                op1: StackOp::push(t.write),
                                op2: pop2,
                            },
                            Move::L => {
                                pending_m.push((next, t.write));
                                let m = intern(&mut states, format!("M[{},{}]", t.next, t.write));
                                StackAction {
                                    next: m,
                                    op1: StackOp::Noop,
                                    op2: pop2,
                                }
                            }
                        }
                    }
                };
                transitions.insert(StackKey { state: qi, read1, read2 }, action);
            }
        }
    }
    pending_m.sort_unstable();
    pending_m.dedup();
    for (next, w) in pending_m {
        let name = format!("M[{},{}]", states[next], w);
        let m = intern(&mut states, name);
        for read1 in StackRead::ALL {
            for read2 in StackRead::ALL {
                let action = match read1 {
                    StackRead::Empty => StackAction {
                        next,
                        op1: StackOp::Noop,
                        op2: StackOp::push(w),
                    },
                    StackRead::Top(l) => {
                        pending_n.push((next, l));
                        let name = format!("N[{},{}]", states[next], l);
                        StackAction {
                            next: intern(&mut states, name),
                            op1: StackOp::Pop,
                            op2: StackOp::push(w),
                        }
                    }
                };
                transitions.insert(StackKey { state: m, read1, read2 }, action);
            }
        }
    }
    pending_n.sort_unstable();
    pending_n.dedup();
    for (next, l) in pending_n {
        let name = format!("N[{},{}]", states[next], l);
        let n = intern(&mut states, name);
        for read1 in StackRead::ALL {
            for read2 in StackRead::ALL {
                let action = StackAction {
                    next,
                    op1: StackOp::Noop,
                    op2: StackOp::push(l),
                };
                transitions.insert(StackKey { state: n, read1, read2 }, action);
            }
        }
    }
    TwoStackSpec::new(states, start, accept, reject, transitions)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<u8> {
        s.bytes().map(|b| b - b'0').collect()
    }

    #[test]
    fn parity_direct() {
        let tm = TmSpec::parity();
        let run = tm_run(&tm, &bits("100"), 100);
        assert!(run.halted && !run.accepted);
        assert_eq!(run.state, "rej");
        let run = tm_run(&tm, &bits("1001"), 100);
        assert!(run.halted && run.accepted);
        assert_eq!(run.tape, bits("10010"));
        assert!(tm_run(&tm, &[], 10).accepted);
    }

    #[test]
    fn fuel_limit() {
        let run = tm_run(&TmSpec::parity(), &bits("0000"), 2);
        assert!(!run.halted);
        assert_eq!(run.steps, 2);
    }

    #[test]
    fn json_round_trip() {
        let tm = TmSpec::parity();
        let js = serde_json::to_string(&tm).unwrap();
        let back: TmSpec = serde_json::from_str(&js).unwrap();
        assert_eq!(back, tm);
    }

    #[test]
    fn invalid_machines() {
        let bad_state = r#"{"states":["a"],"start":"a","accept":"b","delta":{}}"#;
        assert!(serde_json::from_str::<TmSpec>(bad_state).is_err());
        let bad_key = r#"{"states":["a","b"],"start":"a","accept":"b","delta":{"a;0":["b",0,"R"]}}"#;
        assert!(serde_json::from_str::<TmSpec>(bad_key).is_err());
        let from_accept = r#"{"states":["a","b"],"start":"a","accept":"b","delta":{"b,0":["a",0,"R"]}}"#;
        assert!(serde_json::from_str::<TmSpec>(from_accept).is_err());
    }

    #[test]
    fn left_moves_back_up() {
        let js = r#"{"states":["go","back","done"],"start":"go","accept":"done",
            "delta":{"go,0":["go",1,"R"],"go,1":["go",1,"R"],"go,_":["back",0,"L"],
                     "back,1":["back",0,"L"],"back,0":["done",1,"R"]}}"#;
        let tm: TmSpec = serde_json::from_str(js).unwrap();
        let direct = tm_run(&tm, &bits("011"), 100);
        let ts = tm_to_two_stack(&tm).unwrap();
        let confs = two_stack_run(&ts, &bits("011"), 1000);
        let last = confs.last().unwrap();
        assert!(ts.is_halting(last.state));
        assert_eq!(ts.states()[last.state], direct.state);
        assert_eq!(last.tape(), (direct.tape.clone(), direct.head));
    }

    #[test]
    fn two_stack_json_round_trip() {
        let ts = tm_to_two_stack(&TmSpec::parity()).unwrap();
        let js = serde_json::to_string(&ts).unwrap();
        let back: TwoStackSpec = serde_json::from_str(&js).unwrap();
        assert_eq!(back, ts);
    }

    #[test]
    fn incomplete_two_stack_rejected() {
        let ts = tm_to_two_stack(&TmSpec::parity()).unwrap();
        let mut t = ts.transitions().clone();
        let first = *t.keys().next().unwrap();
        t.remove(&first);
        let r = TwoStackSpec::new(ts.states().to_vec(), ts.start(), ts.accept(), ts.reject(), t);
        assert!(r.is_err());
    }
}
