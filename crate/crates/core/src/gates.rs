//! Gate-level IR: the gate set, layered circuits, ideal unitaries and the
//! circuit text format.
//!
//! A circuit is a list of layers; gates within a layer act on pairwise
//! disjoint spins. The circuit unitary multiplies layer unitaries in time
//! order (first layer acts first). Ideal unitaries are built by pushing
//! each basis column through the gate list, which keeps permutation-heavy
//! circuits (all the switch routing) cheap.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::error::Error;
use crate::matrix::ComplexMatrix;
use crate::quantum::{check_spin_count, UnitaryOperator};
use crate::Result;

/// The supported gate set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// Bit flip (pi rotation about x, up to phase).
    Not(usize),
    Hadamard(usize),
    /// Phase rotation about z by theta.
    RotZ(usize, f64),
    /// Phase of theta on |11> of (control, target).
    CPhase(usize, usize, f64),
    /// Controlled-not: target flips when the control is |1>.
    CN(usize, usize),
}

impl Gate {
    /// Spins the gate acts on.
    pub fn spins(&self) -> Vec<usize> {
        match *self {
            Gate::Not(s) | Gate::Hadamard(s) | Gate::RotZ(s, _) => vec![s],
            Gate::CPhase(c, t, _) | Gate::CN(c, t) => vec![c, t],
        }
    }

    pub fn validate(&self, nspins: usize) -> Result<()> {
        match *self {
            Gate::CPhase(c, t, _) | Gate::CN(c, t) if c == t => {
                return Err(Error::ControlEqualsTarget(c));
            }
            _ => {}
        }
        for s in self.spins() {
            if s >= nspins {
                return Err(Error::SpinOutOfRange { spin: s, nspins });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Not(s) => write!(f, "N {s}"),
            Gate::Hadamard(s) => write!(f, "H {s}"),
            Gate::RotZ(s, th) => write!(f, "RZ {s} {th}"),
            Gate::CPhase(c, t, th) => write!(f, "CP {c} {t} {th}"),
            Gate::CN(c, t) => write!(f, "CN {c} {t}"),
        }
    }
}

/// Layered circuit on a fixed register width.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumCircuit {
    nspins: usize,
    layers: Vec<Vec<Gate>>,
}

impl QuantumCircuit {
    pub fn new(nspins: usize) -> Result<Self> {
        check_spin_count(nspins)?;
        Ok(QuantumCircuit {
            nspins,
            layers: Vec::new(),
        })
    }

    /// Appends a layer; its gates must act on pairwise disjoint spins.
    pub fn push_layer(&mut self, layer: Vec<Gate>) -> Result<()> {
        let mut used = std::collections::BTreeSet::new();
        for gate in &layer {
            gate.validate(self.nspins)?;
            for s in gate.spins() {
                if !used.insert(s) {
                    return Err(Error::OverlappingLayer);
                }
            }
        }
        self.layers.push(layer);
        Ok(())
    }

    /// Appends a single gate as its own layer.
    pub fn push_gate(&mut self, gate: Gate) -> Result<()> {
        self.push_layer(vec![gate])
    }

    pub fn nspins(&self) -> usize {
        self.nspins
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// Gates in time order, ignoring layer boundaries.
    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.layers.iter().flatten()
    }

    /// The circuit's unitary, built column by column.
    pub fn ideal_unitary(&self) -> UnitaryOperator {
        let dim = 1usize << self.nspins;
        let mut m = ComplexMatrix::zeros(dim);
        let mut col = vec![Complex64::ZERO; dim];
        for j in 0..dim {
            col.fill(Complex64::ZERO);
            col[j] = Complex64::ONE;
            for gate in self.gates() {
                apply_gate(gate, self.nspins, &mut col);
            }
            m.set_column(j, &col);
        }
        UnitaryOperator::from_trusted(m)
    }

    /// Text form: one gate per line, layers separated by `---`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, layer) in self.layers.iter().enumerate() {
            if i > 0 {
                out.push_str("---\n");
            }
            for gate in layer {
                out.push_str(&gate.to_string());
                out.push('\n');
            }
        }
        out
    }

    /// Parses the text form. The register width is the smallest that fits
    /// every index, or `min_spins` if larger.
    pub fn parse(text: &str, min_spins: usize) -> Result<Self> {
        let mut layers: Vec<Vec<(usize, Gate)>> = vec![Vec::new()];
        let mut max_spin = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "---" {
                layers.push(Vec::new());
                continue;
            }
            let gate = parse_gate_line(line, lineno)?;
            max_spin = max_spin.max(gate.spins().into_iter().max().unwrap_or(0));
            layers.last_mut().unwrap().push((lineno, gate));
        }
        let nspins = (max_spin + 1).max(min_spins).max(1);
        let mut circuit = QuantumCircuit::new(nspins)?;
        for layer in layers {
            if layer.is_empty() {
                continue;
            }
            let first_line = layer[0].0;
            circuit
                .push_layer(layer.into_iter().map(|(_, g)| g).collect())
                .map_err(|e| Error::parse(first_line, e.to_string()))?;
        }
        Ok(circuit)
    }
}

impl fmt::Display for QuantumCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Parses one gate line of the circuit format.
pub fn parse_gate_line(line: &str, lineno: usize) -> Result<Gate> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let idx = |k: usize| -> Result<usize> {
        fields
            .get(k)
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| Error::parse(lineno, "bad spin index"))
    };
    let angle = |k: usize| -> Result<f64> {
        fields
            .get(k)
            .and_then(|f| f.parse().ok())
            .filter(|a: &f64| a.is_finite())
            .ok_or_else(|| Error::parse(lineno, "bad angle"))
    };
    let arity = |n: usize| -> Result<()> {
        if fields.len() != n + 1 {
            Err(Error::parse(
                lineno,
                format!("`{}` takes {n} arguments", fields[0]),
            ))
        } else {
            Ok(())
        }
    };
    match fields[0] {
        "N" => {
            arity(1)?;
            Ok(Gate::Not(idx(1)?))
        }
        "H" => {
            arity(1)?;
            Ok(Gate::Hadamard(idx(1)?))
        }
        "RZ" => {
            arity(2)?;
            Ok(Gate::RotZ(idx(1)?, angle(2)?))
        }
        "CP" => {
            arity(3)?;
            let g = Gate::CPhase(idx(1)?, idx(2)?, angle(3)?);
            if let Gate::CPhase(c, t, _) = g {
                if c == t {
                    return Err(Error::parse(lineno, "control equals target"));
                }
            }
            Ok(g)
        }
        "CN" => {
            arity(2)?;
            let (c, t) = (idx(1)?, idx(2)?);
            if c == t {
                return Err(Error::parse(lineno, "control equals target"));
            }
            Ok(Gate::CN(c, t))
        }
        other => Err(Error::parse(lineno, format!("unknown gate `{other}`"))),
    }
}

/// Ideal unitary of a single gate on an n-spin register.
pub fn gate_ideal_unitary(gate: &Gate, nspins: usize) -> Result<UnitaryOperator> {
    gate.validate(nspins)?;
    let mut circuit = QuantumCircuit::new(nspins)?;
    circuit.push_gate(*gate)?;
    Ok(circuit.ideal_unitary())
}

/// In-place action of a gate on an amplitude vector; spin 0 is the most
/// significant bit of the index.
fn apply_gate(gate: &Gate, nspins: usize, amps: &mut [Complex64]) {
    let mask = |s: usize| 1usize << (nspins - 1 - s);
    match *gate {
        Gate::Not(s) => {
            let m = mask(s);
            for i in 0..amps.len() {
                if i & m == 0 {
                    amps.swap(i, i | m);
                }
            }
        }
        Gate::Hadamard(s) => {
            let m = mask(s);
            let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
            for i in 0..amps.len() {
                if i & m == 0 {
                    let (a, b) = (amps[i], amps[i | m]);
                    amps[i] = r * (a + b);
                    amps[i | m] = r * (a - b);
                }
            }
        }
        Gate::RotZ(s, th) => {
            let m = mask(s);
            let lo = Complex64::from_polar(1.0, -th / 2.0);
            let hi = Complex64::from_polar(1.0, th / 2.0);
            for (i, a) in amps.iter_mut().enumerate() {
                *a *= if i & m == 0 { lo } else { hi };
            }
        }
        Gate::CPhase(c, t, th) => {
            let (mc, mt) = (mask(c), mask(t));
            let phase = Complex64::from_polar(1.0, th);
            for (i, a) in amps.iter_mut().enumerate() {
                if i & mc != 0 && i & mt != 0 {
                    *a *= phase;
                }
            }
        }
        Gate::CN(c, t) => {
            let (mc, mt) = (mask(c), mask(t));
            for i in 0..amps.len() {
                if i & mc != 0 && i & mt == 0 {
                    amps.swap(i, i | mt);
                }
            }
        }
    }
}
