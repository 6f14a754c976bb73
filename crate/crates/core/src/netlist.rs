//! Gate-level model of the Spongent Sbox with stuck-at (SET) fault injection.
//!
//! Wire numbering follows the canonical gate list: the four inputs
//! `X0..X3` (X0 = MSB) are `w0..w3`, then the gates of `Y0`, `Y1`, `Y2`, `Y3`
//! in that order. A faulted wire is overridden right after it is computed,
//! so every consumer of that wire sees the forced value.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::sbox::SboxTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WireId(pub usize);

impl fmt::Display for WireId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

impl FromStr for WireId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.strip_prefix('w')
            .and_then(|n| n.parse().ok())
            .map(WireId)
            .ok_or_else(|| Error::BadFaultSpec(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateOp {
    Input,
    Not,
    And,
    Or,
    Xor,
    Xnor,
}

impl GateOp {
    pub fn arity(self) -> usize {
        match self {
            GateOp::Input => 0,
            GateOp::Not => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateOp::Input => "INPUT",
            GateOp::Not => "NOT",
            GateOp::And => "AND",
            GateOp::Or => "OR",
            GateOp::Xor => "XOR",
            GateOp::Xnor => "XNOR",
        }
    }

    /// Bitwise evaluation; works lane-wise on packed values.
    #[inline]
    fn apply(self, a: u16, b: u16) -> u16 {
        match self {
            GateOp::Input => unreachable!("inputs are not evaluated"),
            GateOp::Not => !a,
            GateOp::And => a & b,
            GateOp::Or => a | b,
            GateOp::Xor => a ^ b,
            GateOp::Xnor => !(a ^ b),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub id: WireId,
    pub op: GateOp,
    pub inputs: Vec<WireId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Set0,
    Set1,
}

impl Polarity {
    pub fn bit(self) -> u8 {
        match self {
            Polarity::Set0 => 0,
            Polarity::Set1 => 1,
        }
    }

    pub fn from_bit(b: u8) -> Option<Self> {
        match b {
            0 => Some(Polarity::Set0),
            1 => Some(Polarity::Set1),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Polarity::Set0 => "SET0",
            Polarity::Set1 => "SET1",
        }
    }
}

/// Partial assignment of SET faults to wires; unmapped wires are fault-free.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FaultMap(BTreeMap<WireId, Polarity>);

impl FaultMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an assignment; a wire may be assigned only once.
    pub fn insert(&mut self, wire: WireId, pol: Polarity) -> Result<()> {
        if self.0.contains_key(&wire) {
            return Err(Error::DuplicateWire(wire.0));
        }
        self.0.insert(wire, pol);
        Ok(())
    }

    pub fn from_pairs<I: IntoIterator<Item = (WireId, Polarity)>>(pairs: I) -> Result<Self> {
        let mut m = FaultMap::new();
        for (w, p) in pairs {
            m.insert(w, p)?;
        }
        Ok(m)
    }

    pub fn get(&self, wire: WireId) -> Option<Polarity> {
        self.0.get(&wire).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (WireId, Polarity)> + '_ {
        self.0.iter().map(|(&w, &p)| (w, p))
    }

    /// Parses `w12=0,w30=1`; the empty string is the empty map.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut m = FaultMap::new();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (w, p) = part
                .split_once('=')
                .ok_or_else(|| Error::BadFaultSpec(part.to_string()))?;
            let wire: WireId = w.trim().parse()?;
            let pol = match p.trim() {
                "0" => Polarity::Set0,
                "1" => Polarity::Set1,
                _ => return Err(Error::BadFaultSpec(part.to_string())),
            };
            m.insert(wire, pol)?;
        }
        Ok(m)
    }

    /// Parses and checks every wire against `netlist`.
    pub fn parse_for(spec: &str, netlist: &Netlist) -> Result<Self> {
        let m = Self::parse(spec)?;
        netlist.check_faults(&m)?;
        Ok(m)
    }

    /// `w4;w10`
    pub fn wires_label(&self) -> String {
        self.0.keys().map(|w| w.to_string()).collect::<Vec<_>>().join(";")
    }

    /// `SET0;SET1`
    pub fn polarities_label(&self) -> String {
        self.0.values().map(|p| p.label()).collect::<Vec<_>>().join(";")
    }
}

impl fmt::Display for FaultMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(w, p)| format!("{w}={}", p.bit())).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for FaultMap {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Netlist {
    gates: Vec<Gate>,
    outputs: [WireId; 4],
}

impl Netlist {
    /// Validates input wires, arity and topological order.
    pub fn new(gates: Vec<Gate>, outputs: [WireId; 4]) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        for (i, g) in gates.iter().enumerate() {
            if g.id.0 != i {
                return bad(format!("gate {i} carries id {}", g.id));
            }
            if (i < 4) != (g.op == GateOp::Input) {
                return bad(format!("wire {i}: the first four wires and only those are inputs"));
            }
            if g.inputs.len() != g.op.arity() {
                return bad(format!("wire {i}: {} expects {} inputs", g.op.name(), g.op.arity()));
            }
            if let Some(w) = g.inputs.iter().find(|w| w.0 >= i) {
                return bad(format!("wire {i} reads {w}, not an earlier wire"));
            }
        }
        if let Some(w) = outputs.iter().find(|w| w.0 >= gates.len()) {
            return bad(format!("output {w} does not exist"));
        }
        Ok(Netlist { gates, outputs })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn outputs(&self) -> [WireId; 4] {
        self.outputs
    }

    pub fn wire_count(&self) -> usize {
        self.gates.len()
    }

    pub fn check_faults(&self, faults: &FaultMap) -> Result<()> {
        for (w, _) in faults.iter() {
            if w.0 >= self.gates.len() {
                return Err(Error::UnknownWire {
                    wire: w.0,
                    wires: self.gates.len(),
                });
            }
        }
        Ok(())
    }

    /// Evaluates one input nibble under `faults`, returning `Y0Y1Y2Y3` (Y0 = MSB).
    pub fn eval(&self, x: u8, faults: &FaultMap) -> Result<u8> {
        if x > 0xf {
            return Err(Error::NibbleOutOfRange(x as u32));
        }
        self.check_faults(faults)?;
        let mut v = vec![false; self.gates.len()];
        for g in &self.gates {
            let val = match g.op {
                GateOp::Input => (x >> (3 - g.id.0)) & 1 == 1,
                GateOp::Not => !v[g.inputs[0].0],
                GateOp::And => v[g.inputs[0].0] && v[g.inputs[1].0],
                GateOp::Or => v[g.inputs[0].0] || v[g.inputs[1].0],
                GateOp::Xor => v[g.inputs[0].0] != v[g.inputs[1].0],
                GateOp::Xnor => v[g.inputs[0].0] == v[g.inputs[1].0],
            };
            v[g.id.0] = match faults.get(g.id) {
                Some(Polarity::Set0) => false,
                Some(Polarity::Set1) => true,
                None => val,
            };
        }
        Ok(self
            .outputs
            .iter()
            .fold(0u8, |acc, w| (acc << 1) | v[w.0] as u8))
    }

    /// Truth table under `faults`, all 16 inputs evaluated at once
    /// (bit `x` of each lane word is the wire value for input `x`).
    pub fn faulty_truth_table(&self, faults: &FaultMap) -> Result<SboxTable> {
        self.check_faults(faults)?;
        let overrides: Vec<(usize, u16)> = faults
            .iter()
            .map(|(w, p)| (w.0, if p == Polarity::Set1 { 0xffff } else { 0 }))
            .collect();
        Ok(self.truth_table_with(&overrides))
    }

    pub(crate) fn truth_table_with(&self, overrides: &[(usize, u16)]) -> SboxTable {
        let mut lanes = [0u16; 64];
        let mut lanes_vec;
        let v: &mut [u16] = if self.gates.len() <= lanes.len() {
            &mut lanes[..self.gates.len()]
        } else {
            lanes_vec = vec![0u16; self.gates.len()];
            &mut lanes_vec
        };
        for (i, g) in self.gates.iter().enumerate() {
            let mut val = match g.op {
                GateOp::Input => input_lane(i),
                op => {
                    let a = v[g.inputs[0].0];
                    let b = g.inputs.get(1).map_or(0, |w| v[w.0]);
                    op.apply(a, b)
                }
            };
            for &(w, forced) in overrides {
                if w == i {
                    val = forced;
                }
            }
            v[i] = val;
        }
        let mut t = [0u8; 16];
        for (x, e) in t.iter_mut().enumerate() {
            *e = self
                .outputs
                .iter()
                .fold(0u8, |acc, w| (acc << 1) | ((v[w.0] >> x) & 1) as u8);
        }
        SboxTable::new(t).expect("4 output bits fit a nibble")
    }

    /// One `w<id> = OP(args)` line per wire, then `output Yk = w<id>` lines.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for g in &self.gates {
            let args = if g.op == GateOp::Input {
                format!("X{}", g.id.0)
            } else {
                g.inputs.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
            };
            s.push_str(&format!("{} = {}({})\n", g.id, g.op.name(), args));
        }
        for (k, w) in self.outputs.iter().enumerate() {
            s.push_str(&format!("output Y{k} = {w}\n"));
        }
        s
    }

    /// SHA-256 of [`Netlist::dump`], lowercase hex.
    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.dump().as_bytes()))
    }
}

/// Lane word of input `X<i>`: bit x set iff bit (3 - i) of x is set.
fn input_lane(i: usize) -> u16 {
    (0..16u16).filter(|x| (x >> (3 - i)) & 1 == 1).fold(0, |acc, x| acc | (1 << x))
}

struct Builder {
    gates: Vec<Gate>,
}

impl Builder {
    fn gate(&mut self, op: GateOp, inputs: &[WireId]) -> WireId {
        let id = WireId(self.gates.len());
        self.gates.push(Gate {
            id,
            op,
            inputs: inputs.to_vec(),
        });
        id
    }
    fn not(&mut self, a: WireId) -> WireId {
        self.gate(GateOp::Not, &[a])
    }
    fn and(&mut self, a: WireId, b: WireId) -> WireId {
        self.gate(GateOp::And, &[a, b])
    }
    fn or(&mut self, a: WireId, b: WireId) -> WireId {
        self.gate(GateOp::Or, &[a, b])
    }
    fn xor(&mut self, a: WireId, b: WireId) -> WireId {
        self.gate(GateOp::Xor, &[a, b])
    }
    fn xnor(&mut self, a: WireId, b: WireId) -> WireId {
        self.gate(GateOp::Xnor, &[a, b])
    }
}

/// The fixed 53-wire decomposition of the Sbox output equations.
///
/// Only `Y3` shares subexpressions. The printed `Y3` equation is the
/// complement of the table bit, so `Y3` ends with an extra inverter.
pub fn canonical_netlist() -> Netlist {
    let mut b = Builder { gates: Vec::new() };
    let x: Vec<WireId> = (0..4).map(|_| b.gate(GateOp::Input, &[])).collect();
    let (x0, x1, x2, x3) = (x[0], x[1], x[2], x[3]);

    // Y0 = ~((X0^X1)|X2) | ~(X1|(X2 xnor X3)) | ~(~(~X0&X1) | ~(X2&X3))
    let t = b.xor(x0, x1);
    let t = b.or(t, x2);
    let y0a = b.not(t);
    let t = b.xnor(x2, x3);
    let t = b.or(x1, t);
    let y0b = b.not(t);
    let n0 = b.not(x0);
    let t = b.and(n0, x1);
    let p = b.not(t);
    let t = b.and(x2, x3);
    let q = b.not(t);
    let t = b.or(p, q);
    let y0c = b.not(t);
    let t = b.or(y0a, y0b);
    let y0 = b.or(t, y0c);

    // Y1 = ~(X0|(X1^X2)) | ~(X1|(X2|X3)) | ~(~(X0&X3) | ~(X1|X2))
    let t = b.xor(x1, x2);
    let t = b.or(x0, t);
    let y1a = b.not(t);
    let t = b.or(x2, x3);
    let t = b.or(x1, t);
    let y1b = b.not(t);
    let t = b.and(x0, x3);
    let p = b.not(t);
    let t = b.or(x1, x2);
    let q = b.not(t);
    let t = b.or(p, q);
    let y1c = b.not(t);
    let t = b.or(y1a, y1b);
    let y1 = b.or(t, y1c);

    // Y2 = X0&(X1 xnor X2) | X1&(X2&X3) | ~(X0|X3)&~(X1&X2)
    let t = b.xnor(x1, x2);
    let y2a = b.and(x0, t);
    let t = b.and(x2, x3);
    let y2b = b.and(x1, t);
    let t = b.or(x0, x3);
    let p = b.not(t);
    let t = b.and(x1, x2);
    let q = b.not(t);
    let y2c = b.and(p, q);
    let t = b.or(y2a, y2b);
    let y2 = b.or(t, y2c);

    // Y3 = ~( ~(~a | b) | (~a & b) ), a = X0 xnor X3, b = ~X1 & X2
    let a = b.xnor(x0, x3);
    let na = b.not(a);
    let n1 = b.not(x1);
    let bb = b.and(n1, x2);
    let t = b.or(na, bb);
    let y3a = b.not(t);
    let y3b = b.and(na, bb);
    let t = b.or(y3a, y3b);
    let y3 = b.not(t);

    Netlist::new(b.gates, [y0, y1, y2, y3]).expect("canonical netlist is well formed")
}
