//! Frame switching: classical/quantum conversion at the port boundary and
//! constant-depth permutation routing built from controlled-not gates.
//!
//! Any permutation factors as sigma1 o sigma2 with both factors
//! involutions (apply sigma2 first). An involution is a set of disjoint
//! transpositions, each realizable as three controlled-nots, and disjoint
//! transpositions share layers. A permutation circuit therefore never
//! needs more than 2 x 3 = 6 controlled-not layers, independent of the
//! port count.
//!
//! The factorization reverses each cycle about its minimum element:
//! writing a cycle as a0, a1, ..., a_{L-1} starting at its smallest
//! member, sigma2 maps a_k to a_{-k mod L} and sigma1 maps a_k to
//! a_{1-k mod L}. Both are reflections, and their composition advances
//! the cycle by one step.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::Error;
use crate::gates::{Gate, QuantumCircuit};
use crate::quantum::{check_spin_count, StateVector, UnitaryOperator};
use crate::spin::SpinSystem;
use crate::Result;

/// Default dominance threshold for reading a basis state back into bits.
pub const Q2C_TOLERANCE: f64 = 1e-6;

/// Bijection on 0..n, stored as an image list: `map[i]` is where input i
/// goes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(Error::NotABijection(map.clone()));
            }
            seen[v] = true;
        }
        Ok(Permutation { map })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { map: inv }
    }

    /// self o other: `other` applies first.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Permutation {
            map: (0..self.len()).map(|i| self.apply(other.apply(i))).collect(),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn is_involution(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| self.map[v] == i)
    }

    /// Cycles of length >= 2, each starting at its minimum element, in
    /// order of those minima.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.map.len();
        let mut visited = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if visited[start] {
                continue;
            }
            let mut cycle = vec![start];
            visited[start] = true;
            let mut next = self.map[start];
            while next != start {
                visited[next] = true;
                cycle.push(next);
                next = self.map[next];
            }
            if cycle.len() >= 2 {
                cycles.push(cycle);
            }
        }
        cycles
    }

    /// The transpositions of an involution, each as (low, high).
    pub fn transpositions(&self) -> Vec<(usize, usize)> {
        self.map
            .iter()
            .enumerate()
            .filter(|&(i, &v)| i < v)
            .map(|(i, &v)| (i, v))
            .collect()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.map.iter().map(|v| v.to_string()).collect();
        f.write_str(&words.join(" "))
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Space-separated image list, e.g. `2 0 1` sends 0 to 2, 1 to 0 and
    /// 2 to 1.
    fn from_str(s: &str) -> Result<Self> {
        let mut map = Vec::new();
        for word in s.split_whitespace() {
            let v: usize = word
                .parse()
                .map_err(|_| Error::parse(1, format!("bad permutation entry `{word}`")))?;
            map.push(v);
        }
        if map.is_empty() {
            return Err(Error::parse(1, "empty permutation"));
        }
        Permutation::new(map)
    }
}

/// One time slot of classical traffic: a bit per port.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalFrame {
    bits: Vec<bool>,
}

impl ClassicalFrame {
    pub fn new(bits: Vec<bool>) -> Self {
        ClassicalFrame { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, port: usize) -> bool {
        self.bits[port]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Index of the corresponding basis state; port 0 is the most
    /// significant bit.
    pub fn basis_index(&self) -> usize {
        self.bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
    }

    pub fn from_basis_index(index: usize, nports: usize) -> Self {
        let bits = (0..nports)
            .map(|p| index & (1 << (nports - 1 - p)) != 0)
            .collect();
        ClassicalFrame { bits }
    }
}

impl fmt::Display for ClassicalFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for ClassicalFrame {
    type Err = Error;

    /// Bit characters, port 0 leftmost, e.g. `110`.
    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for ch in s.trim().chars() {
            match ch {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(Error::parse(1, format!("bad frame character `{ch}`"))),
            }
        }
        if bits.is_empty() {
            return Err(Error::parse(1, "empty frame"));
        }
        Ok(ClassicalFrame { bits })
    }
}

/// What a port carries. Classical ports pass through the converters at
/// both edges of the switch; quantum ports would hand their state through
/// untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortKind {
    Classical,
    Quantum,
}

/// Port count, routing permutation and per-port kind.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchConfig {
    nports: usize,
    permutation: Permutation,
    port_kinds: Vec<PortKind>,
}

impl SwitchConfig {
    /// All ports classical.
    pub fn new(permutation: Permutation) -> Result<Self> {
        let nports = permutation.len();
        check_spin_count(nports)?;
        Ok(SwitchConfig {
            nports,
            permutation,
            port_kinds: vec![PortKind::Classical; nports],
        })
    }

    pub fn with_port_kinds(mut self, kinds: Vec<PortKind>) -> Result<Self> {
        if kinds.len() != self.nports {
            return Err(Error::DimensionMismatch {
                left: self.nports,
                right: kinds.len(),
            });
        }
        self.port_kinds = kinds;
        Ok(self)
    }

    pub fn nports(&self) -> usize {
        self.nports
    }

    pub fn permutation(&self) -> &Permutation {
        &self.permutation
    }

    pub fn port_kinds(&self) -> &[PortKind] {
        &self.port_kinds
    }
}

/// Converts classical bits to the computational basis state |b0 b1 ...>.
pub fn c2q(frame: &ClassicalFrame) -> Result<StateVector> {
    check_spin_count(frame.len())?;
    StateVector::basis_state(frame.len(), frame.basis_index())
}

/// Reads a basis state back into bits, discarding global phase. Errors
/// with `SuperposedState` when no basis amplitude dominates; classical
/// traffic stays in basis states so this only trips on genuinely quantum
/// inputs.
pub fn q2c(state: &StateVector, tolerance: f64) -> Result<ClassicalFrame> {
    let (best, prob) = (0..state.dim())
        .map(|i| (i, state.probability(i)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("state has at least one amplitude");
    if prob < 1.0 - tolerance {
        return Err(Error::SuperposedState(prob));
    }
    Ok(ClassicalFrame::from_basis_index(best, state.nspins()))
}

/// The 2x2 cross configuration: three controlled-nots with the middle one
/// upside down; equal to a swap of the two ports.
pub fn cross_circuit_2x2() -> QuantumCircuit {
    let mut circuit = QuantumCircuit::new(2).expect("two spins");
    circuit.push_gate(Gate::CN(0, 1)).expect("valid");
    circuit.push_gate(Gate::CN(1, 0)).expect("valid");
    circuit.push_gate(Gate::CN(0, 1)).expect("valid");
    circuit
}

/// The 2x2 bypass configuration: no operation at all.
pub fn bypass_circuit_2x2() -> QuantumCircuit {
    QuantumCircuit::new(2).expect("two spins")
}

/// A pair of involutions composing to a target permutation, sigma2 first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvolutionPair {
    pub sigma1: Permutation,
    pub sigma2: Permutation,
}

/// Factors a permutation into two involutions with sigma1 o sigma2 = p.
/// Fixed points stay fixed in both factors.
pub fn permutation_to_involutions(p: &Permutation) -> InvolutionPair {
    let n = p.len();
    let mut s1: Vec<usize> = (0..n).collect();
    let mut s2: Vec<usize> = (0..n).collect();
    for cycle in p.cycles() {
        let len = cycle.len();
        for (k, &a) in cycle.iter().enumerate() {
            s2[a] = cycle[(len - k) % len];
            s1[a] = cycle[(len + 1 - k) % len];
        }
    }
    InvolutionPair {
        sigma1: Permutation { map: s1 },
        sigma2: Permutation { map: s2 },
    }
}

/// Swap circuit on ports as at most six controlled-not layers: the
/// disjoint transpositions of sigma2 as three layers of parallel swaps,
/// then sigma1's. Output port p(i) ends up carrying input bit i.
pub fn build_switch_circuit(p: &Permutation) -> Result<QuantumCircuit> {
    let n = p.len();
    check_spin_count(n)?;
    let pair = permutation_to_involutions(p);
    let mut circuit = QuantumCircuit::new(n)?;
    for sigma in [&pair.sigma2, &pair.sigma1] {
        let swaps = sigma.transpositions();
        if swaps.is_empty() {
            continue;
        }
        circuit.push_layer(swaps.iter().map(|&(i, j)| Gate::CN(i, j)).collect())?;
        circuit.push_layer(swaps.iter().map(|&(i, j)| Gate::CN(j, i)).collect())?;
        circuit.push_layer(swaps.iter().map(|&(i, j)| Gate::CN(i, j)).collect())?;
    }
    Ok(circuit)
}

/// How the permutation unitary is realized.
#[derive(Debug, Clone, Copy)]
pub enum RouteMode<'a> {
    /// Ideal gate unitaries.
    Ideal,
    /// The compiled pulse sequence on the given spin system, which must
    /// couple every pair the circuit uses.
    Pulse(&'a SpinSystem),
}

/// The switch's permutation unitary in the requested mode.
pub fn switch_unitary(cfg: &SwitchConfig, mode: RouteMode<'_>) -> Result<UnitaryOperator> {
    let circuit = build_switch_circuit(&cfg.permutation)?;
    match mode {
        RouteMode::Ideal => Ok(circuit.ideal_unitary()),
        RouteMode::Pulse(sys) => {
            if sys.spin_count() != cfg.nports {
                return Err(Error::SystemSizeMismatch {
                    got: sys.spin_count(),
                    want: cfg.nports,
                });
            }
            let seq = crate::compiler::compile_circuit(sys, &circuit)?;
            sys.sequence_propagator(&seq)
        }
    }
}

/// Full pipeline for one frame: convert to a basis state, apply the
/// permutation unitary, convert back.
pub fn route_frame(
    cfg: &SwitchConfig,
    frame: &ClassicalFrame,
    mode: RouteMode<'_>,
) -> Result<ClassicalFrame> {
    let unitary = switch_unitary(cfg, mode)?;
    route_frame_with(cfg, &unitary, frame)
}

/// As `route_frame`, reusing a precomputed permutation unitary; useful
/// when many frames flow through one configuration.
pub fn route_frame_with(
    cfg: &SwitchConfig,
    unitary: &UnitaryOperator,
    frame: &ClassicalFrame,
) -> Result<ClassicalFrame> {
    if frame.len() != cfg.nports {
        return Err(Error::FrameLengthMismatch {
            got: frame.len(),
            want: cfg.nports,
        });
    }
    let state = c2q(frame)?;
    let routed = unitary.apply(&state)?;
    q2c(&routed, Q2C_TOLERANCE)
}
