//! States, unitaries and spin operators for an n-spin register.
//!
//! Basis ordering convention, used everywhere in this crate: spin 0 is the
//! MOST significant bit of a computational basis index. For two spins the
//! basis is |00>, |01>, |10>, |11> at indices 0..3, and `kron(a, b)` acts
//! with `a` on spin 0 and `b` on spin 1.
//!
//! Rotations follow the spin-1/2 convention: a pulse of angle `theta`
//! about `axis` is exp(-i theta I_axis) with I_axis = sigma_axis / 2,
//! evaluated in closed form as cos(theta/2) I - i sin(theta/2) sigma_axis.
//! A pulse about a negative axis is the same rotation with the angle
//! negated.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::Error;
use crate::matrix::ComplexMatrix;
use crate::{Result, MAX_SPINS};

const NORM_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Rotation axis of an RF pulse (or of a composite z rotation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinAxis {
    XPlus,
    XMinus,
    YPlus,
    YMinus,
    ZPlus,
    ZMinus,
}

impl SpinAxis {
    /// +1 for the positive axes, -1 for the negative ones.
    pub fn sign(self) -> f64 {
        match self {
            SpinAxis::XPlus | SpinAxis::YPlus | SpinAxis::ZPlus => 1.0,
            SpinAxis::XMinus | SpinAxis::YMinus | SpinAxis::ZMinus => -1.0,
        }
    }

    /// True for the x and y axes, which are realizable as RF pulses.
    pub fn is_transverse(self) -> bool {
        !matches!(self, SpinAxis::ZPlus | SpinAxis::ZMinus)
    }

    fn pauli(self) -> ComplexMatrix {
        match self {
            SpinAxis::XPlus | SpinAxis::XMinus => pauli_x(),
            SpinAxis::YPlus | SpinAxis::YMinus => pauli_y(),
            SpinAxis::ZPlus | SpinAxis::ZMinus => pauli_z(),
        }
    }
}

impl fmt::Display for SpinAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpinAxis::XPlus => "+x",
            SpinAxis::XMinus => "-x",
            SpinAxis::YPlus => "+y",
            SpinAxis::YMinus => "-y",
            SpinAxis::ZPlus => "+z",
            SpinAxis::ZMinus => "-z",
        };
        f.write_str(s)
    }
}

impl FromStr for SpinAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+x" | "x" => Ok(SpinAxis::XPlus),
            "-x" => Ok(SpinAxis::XMinus),
            "+y" | "y" => Ok(SpinAxis::YPlus),
            "-y" => Ok(SpinAxis::YMinus),
            "+z" | "z" => Ok(SpinAxis::ZPlus),
            "-z" => Ok(SpinAxis::ZMinus),
            _ => Err(Error::parse(0, format!("unknown axis `{s}`"))),
        }
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
        .unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]])
        .unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)])
}

/// Spin operator Ix = sigma_x / 2.
pub fn spin_ix() -> ComplexMatrix {
    pauli_x().scale(c(0.5, 0.0))
}

/// Spin operator Iy = sigma_y / 2.
pub fn spin_iy() -> ComplexMatrix {
    pauli_y().scale(c(0.5, 0.0))
}

/// Spin operator Iz = sigma_z / 2.
pub fn spin_iz() -> ComplexMatrix {
    pauli_z().scale(c(0.5, 0.0))
}

/// Pure state of an n-spin register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    nspins: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Validates length 2^nspins, finiteness and unit norm (1e-12).
    pub fn new(nspins: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_spin_count(nspins)?;
        let dim = 1usize << nspins;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: amps.len(),
            });
        }
        if !amps.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm2.sqrt()));
        }
        Ok(StateVector { nspins, amps })
    }

    /// The computational basis state with the given index; spin 0 is the
    /// most significant bit of the index.
    pub fn basis_state(nspins: usize, index: usize) -> Result<Self> {
        check_spin_count(nspins)?;
        let dim = 1usize << nspins;
        if index >= dim {
            return Err(Error::SpinOutOfRange {
                spin: index,
                nspins,
            });
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[index] = Complex64::ONE;
        Ok(StateVector { nspins, amps })
    }

    pub fn nspins(&self) -> usize {
        self.nspins
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// |<self|other>|.
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let ip: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(ip.norm())
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }
}

/// Unitary operator on an n-spin register (dim = 2^n).
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: ComplexMatrix,
}

impl UnitaryOperator {
    /// Validates a power-of-two dimension, finiteness, and
    /// U U+ = I within 1e-10 (max elementwise deviation).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.dim().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(matrix.dim()));
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = matrix.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(UnitaryOperator { matrix })
    }

    /// Wraps a matrix that is unitary by construction (products, tensor
    /// products and closed-form rotations of unitaries), skipping the
    /// O(dim^3) check.
    pub(crate) fn from_trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.unitarity_defect() <= 1e-8);
        UnitaryOperator { matrix }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        if !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        Ok(UnitaryOperator {
            matrix: ComplexMatrix::identity(dim),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> UnitaryOperator {
        UnitaryOperator {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Matrix product self * rhs (rhs acts first).
    pub fn mul(&self, rhs: &UnitaryOperator) -> Result<UnitaryOperator> {
        if self.dim() != rhs.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: rhs.dim(),
            });
        }
        Ok(UnitaryOperator {
            matrix: self.matrix.mul(&rhs.matrix),
        })
    }

    /// Kronecker product; self acts on the more significant spins.
    pub fn kron(&self, rhs: &UnitaryOperator) -> UnitaryOperator {
        UnitaryOperator {
            matrix: self.matrix.kron(&rhs.matrix),
        }
    }

    /// s' = U s. Preserves the norm by unitarity.
    pub fn apply(&self, s: &StateVector) -> Result<StateVector> {
        if self.dim() != s.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: s.dim(),
            });
        }
        Ok(StateVector {
            nspins: s.nspins,
            amps: self.matrix.mul_vec(&s.amps),
        })
    }
}

/// Closed-form spin-1/2 rotation exp(-i theta I_axis) as a 2x2 unitary.
pub fn rotation(axis: SpinAxis, theta: f64) -> UnitaryOperator {
    let th = axis.sign() * theta;
    let (cos, sin) = ((th / 2.0).cos(), (th / 2.0).sin());
    let m = ComplexMatrix::identity(2)
        .scale(c(cos, 0.0))
        .add(&axis.pauli().scale(c(0.0, -sin)));
    UnitaryOperator::from_trusted(m)
}

/// Kronecker-embeds a 2x2 unitary at the given spin position, identity on
/// every other spin.
pub fn embed(u: &UnitaryOperator, spin: usize, nspins: usize) -> Result<UnitaryOperator> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: u.dim(),
        });
    }
    Ok(UnitaryOperator {
        matrix: embed_matrix(u.matrix(), spin, nspins)?,
    })
}

/// As `embed`, for a general (not necessarily unitary) 2x2 matrix; used
/// for observables.
pub fn embed_matrix(m: &ComplexMatrix, spin: usize, nspins: usize) -> Result<ComplexMatrix> {
    check_spin_count(nspins)?;
    if spin >= nspins {
        return Err(Error::SpinOutOfRange { spin, nspins });
    }
    let left = ComplexMatrix::identity(1 << spin);
    let right = ComplexMatrix::identity(1 << (nspins - 1 - spin));
    Ok(left.kron(m).kron(&right))
}

/// Result of aligning two unitaries over a global phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAlignment {
    /// max elementwise |u - e^{i phase} v| at the aligning phase.
    pub distance: f64,
    /// The phase (radians) that achieves it.
    pub phase: f64,
}

/// Distance between unitaries up to a global phase.
///
/// The aligning phase is -arg(tr(u+ v)) when the trace is nonzero; when it
/// vanishes, the phase is read off the largest-magnitude overlapping
/// element pair (or 0 if the supports are disjoint). The result is zero
/// iff u = e^{i phi} v.
pub fn phase_alignment(u: &UnitaryOperator, v: &UnitaryOperator) -> Result<PhaseAlignment> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    let d = u.dim();
    let t = u.matrix.adjoint().mul(&v.matrix).trace();
    let phase = if t.norm() > 1e-14 * d as f64 {
        -t.arg()
    } else {
        let mut best = 0.0;
        let mut phi = 0.0;
        for i in 0..d {
            for j in 0..d {
                let w = u.matrix.get(i, j).norm() * v.matrix.get(i, j).norm();
                if w > best {
                    best = w;
                    phi = u.matrix.get(i, j).arg() - v.matrix.get(i, j).arg();
                }
            }
        }
        phi
    };
    let rot = c(phase.cos(), phase.sin());
    let mut distance: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let diff = (u.matrix.get(i, j) - rot * v.matrix.get(i, j)).norm();
            distance = distance.max(diff);
        }
    }
    Ok(PhaseAlignment { distance, phase })
}

/// min over unit phase phi of max elementwise |u - e^{i phi} v|.
pub fn global_phase_distance(u: &UnitaryOperator, v: &UnitaryOperator) -> Result<f64> {
    Ok(phase_alignment(u, v)?.distance)
}

/// Mixed (or pure) state of an n-spin register as a density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    nspins: usize,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity (1e-12), unit trace (1e-12) and positive
    /// semidefiniteness (min eigenvalue >= -1e-10).
    pub fn new(nspins: usize, matrix: ComplexMatrix) -> Result<Self> {
        check_spin_count(nspins)?;
        let dim = 1usize << nspins;
        if matrix.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: matrix.dim(),
            });
        }
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let herm = matrix.max_abs_diff(&matrix.adjoint());
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::BadTrace(tr.re));
        }
        let min_eig = hermitian_min_eigenvalue(&matrix);
        if min_eig < -PSD_TOL {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(DensityOperator { nspins, matrix })
    }

    /// |psi><psi| for a pure state.
    pub fn from_pure(state: &StateVector) -> Self {
        let d = state.dim();
        let mut m = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, state.amps[i] * state.amps[j].conj());
            }
        }
        DensityOperator {
            nspins: state.nspins,
            matrix: m,
        }
    }

    /// Convex mixture sum_k p_k |psi_k><psi_k|; weights are normalized to
    /// sum to one.
    pub fn from_mixture(parts: &[(f64, StateVector)]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::DimensionMismatch { left: 1, right: 0 });
        }
        let nspins = parts[0].1.nspins;
        let total: f64 = parts.iter().map(|(p, _)| p).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::NonFinite);
        }
        let d = 1usize << nspins;
        let mut m = ComplexMatrix::zeros(d);
        for (p, state) in parts {
            if state.nspins != nspins {
                return Err(Error::DimensionMismatch {
                    left: d,
                    right: state.dim(),
                });
            }
            if *p < 0.0 {
                return Err(Error::NotPositive(*p));
            }
            let w = c(p / total, 0.0);
            let pure = DensityOperator::from_pure(state);
            m = m.add(&pure.matrix.scale(w));
        }
        Ok(DensityOperator { nspins, matrix: m })
    }

    /// The maximally mixed state I / 2^n.
    pub fn maximally_mixed(nspins: usize) -> Result<Self> {
        check_spin_count(nspins)?;
        let d = 1usize << nspins;
        let m = ComplexMatrix::identity(d).scale(c(1.0 / d as f64, 0.0));
        Ok(DensityOperator { nspins, matrix: m })
    }

    pub fn nspins(&self) -> usize {
        self.nspins
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// U rho U+.
    pub fn evolved(&self, u: &UnitaryOperator) -> Result<DensityOperator> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: u.dim(),
                right: self.dim(),
            });
        }
        Ok(DensityOperator {
            nspins: self.nspins,
            matrix: u.matrix.mul(&self.matrix).mul(&u.matrix.adjoint()),
        })
    }

    /// tr(rho O).
    pub fn expectation(&self, observable: &ComplexMatrix) -> Result<Complex64> {
        if observable.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: observable.dim(),
                right: self.dim(),
            });
        }
        Ok(self.matrix.mul(observable).trace())
    }
}

pub(crate) fn check_spin_count(nspins: usize) -> Result<()> {
    if nspins == 0 || nspins > MAX_SPINS {
        return Err(Error::TooManySpins(nspins));
    }
    Ok(())
}

/// Smallest eigenvalue of a Hermitian matrix via the cyclic Jacobi method.
/// Only used to validate density operators, so dimensions are small.
fn hermitian_min_eigenvalue(m: &ComplexMatrix) -> f64 {
    let d = m.dim();
    let mut a = m.clone();
    // 30 sweeps is far more than needed for dim <= 2^MAX_SPINS at f64.
    for _ in 0..30 {
        let mut off: f64 = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off = off.max(a.get(p, q).norm());
            }
        }
        if off < 1e-14 {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a.get(p, q);
                if apq.norm() < 1e-300 {
                    continue;
                }
                // Unitary 2x2 rotation zeroing the (p, q) element.
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let phase = apq / c(apq.norm(), 0.0);
                let theta = 0.5 * (2.0 * apq.norm()).atan2(aqq - app);
                let (cs, sn) = (theta.cos(), theta.sin());
                // Columns: v_p' = cs v_p - sn phase* v_q ; v_q' = sn phase v_p + cs v_q
                for r in 0..d {
                    let arp = a.get(r, p);
                    let arq = a.get(r, q);
                    a.set(r, p, arp * cs - arq * phase.conj() * sn);
                    a.set(r, q, arp * phase * sn + arq * cs);
                }
                for r in 0..d {
                    let apr = a.get(p, r);
                    let aqr = a.get(q, r);
                    a.set(p, r, apr * cs - aqr * phase * sn);
                    a.set(q, r, apr * phase.conj() * sn + aqr * cs);
                }
            }
        }
    }
    (0..d).map(|i| a.get(i, i).re).fold(f64::INFINITY, f64::min)
}
